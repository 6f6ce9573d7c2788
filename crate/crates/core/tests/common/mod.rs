//! Brute-force oracles shared by the integration tests. They use only plain
//! integer arithmetic and never call into the enumeration engine.

#![allow(dead_code)]

use burau_core::ModMatrix;

pub fn gram_unreduced(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Less => if (i + j) % 2 == 0 { -1 } else { 1 },
                    std::cmp::Ordering::Greater => if (i + j) % 2 == 0 { 1 } else { -1 },
                    std::cmp::Ordering::Equal => 0,
                })
                .collect()
        })
        .collect()
}

pub fn gram_reduced(d: usize) -> Vec<Vec<i64>> {
    let mut g = vec![vec![0; d]; d];
    for i in 0..d.saturating_sub(1) {
        g[i][i + 1] = -1;
        g[i + 1][i] = 1;
    }
    g
}

pub fn gram_standard(d: usize) -> Vec<Vec<i64>> {
    let mut g = vec![vec![0; d]; d];
    for p in 0..d / 2 {
        g[2 * p][2 * p + 1] = 1;
        g[2 * p + 1][2 * p] = -1;
    }
    g
}

fn md(x: i64, l: u64) -> u64 {
    x.rem_euclid(l as i64) as u64
}

fn pairing(g: &[Vec<i64>], x: &[u64], y: &[u64], l: u64) -> u64 {
    let mut s: i64 = 0;
    for i in 0..x.len() {
        for j in 0..y.len() {
            s = (s + g[i][j] * x[i] as i64 * y[j] as i64).rem_euclid(l as i64);
        }
    }
    s as u64
}

pub fn det_mod(m: &[Vec<u64>], l: u64) -> u64 {
    let n = m.len();
    if n == 1 {
        return m[0][0] % l;
    }
    let mut total: i64 = 0;
    for c in 0..n {
        let minor: Vec<Vec<u64>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &x)| x).collect()).collect();
        let term = (m[0][c] * det_mod(&minor, l)) as i64;
        total += if c % 2 == 0 { term } else { -term };
    }
    md(total, l)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// All `M` over `Z/ℓ` with `Mᵀ G M = G`, a unit determinant, every column
/// passing `column_ok(j, col)`, and the finished matrix passing `accept`.
/// Columns are chosen one at a time and pruned on the pairings with the
/// columns already fixed.
pub fn isometries(
    gram: &[Vec<i64>],
    l: u64,
    column_ok: &dyn Fn(usize, &[u64]) -> bool,
    accept: &dyn Fn(&[Vec<u64>]) -> bool,
) -> Vec<ModMatrix> {
    let d = gram.len();
    let vectors: Vec<Vec<u64>> = (0..l.pow(d as u32))
        .map(|mut k| {
            (0..d)
                .map(|_| {
                    let x = k % l;
                    k /= l;
                    x
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut cols: Vec<Vec<u64>> = Vec::new();
    fn rec(
        gram: &[Vec<i64>],
        l: u64,
        vectors: &[Vec<u64>],
        cols: &mut Vec<Vec<u64>>,
        column_ok: &dyn Fn(usize, &[u64]) -> bool,
        accept: &dyn Fn(&[Vec<u64>]) -> bool,
        out: &mut Vec<ModMatrix>,
    ) {
        let d = gram.len();
        let j = cols.len();
        if j == d {
            let rows: Vec<Vec<u64>> = (0..d).map(|r| (0..d).map(|c| cols[c][r]).collect()).collect();
            if gcd(det_mod(&rows, l), l) == 1 && accept(&rows) {
                let flat: Vec<u64> = rows.concat();
                out.push(ModMatrix::new(d, l, flat).unwrap());
            }
            return;
        }
        for v in vectors {
            if !column_ok(j, v) || pairing(gram, v, v, l) != md(gram[j][j], l) {
                continue;
            }
            if (0..j).all(|i| pairing(gram, &cols[i], v, l) == md(gram[i][j], l)) {
                cols.push(v.clone());
                rec(gram, l, vectors, cols, column_ok, accept, out);
                cols.pop();
            }
        }
    }
    rec(gram, l, &vectors, &mut cols, column_ok, accept, &mut out);
    out
}

pub fn any_column(_: usize, _: &[u64]) -> bool {
    true
}

pub fn accept_all(_: &[Vec<u64>]) -> bool {
    true
}

/// `Sp_{2g}(Z/ℓ)` for the interleaved standard form.
pub fn brute_sp(g: usize, l: u64) -> Vec<ModMatrix> {
    isometries(&gram_standard(2 * g), l, &any_column, &accept_all)
}

/// The stabilizer of `e_1` in `Sp_{2g}(Z/ℓ)`.
pub fn brute_stab(g: usize, l: u64) -> Vec<ModMatrix> {
    let first = |j: usize, v: &[u64]| j != 0 || v.iter().enumerate().all(|(i, &x)| x == u64::from(i == 0) % l);
    isometries(&gram_standard(2 * g), l, &first, &accept_all)
}

/// `Γ_{n−1}/Γ_{n−1}[ℓ]`: isometries of the unreduced form fixing
/// `v = (1, …, 1)` and with `wᵀM = wᵀ` for `w = (1, −1, 1, …)`.
pub fn brute_gamma(n: usize, l: u64) -> Vec<ModMatrix> {
    let w = |i: usize| if i.is_multiple_of(2) { 1 } else { l - 1 };
    let row_w = move |j: usize, v: &[u64]| {
        let s: u64 = v.iter().enumerate().map(|(i, &x)| x * w(i)).sum();
        s % l == w(j) % l
    };
    let fixes_v = |rows: &[Vec<u64>]| rows.iter().all(|r| r.iter().sum::<u64>() % l == 1 % l);
    isometries(&gram_unreduced(n), l, &row_w, &fixes_v)
}

/// `Γ′_{n−1}/Γ′_{n−1}[ℓ]`: isometries of the reduced form on `(Z/ℓ)^{n−1}`
/// fixing `v′ = e_1 + e_3 + ⋯` when `n` is even.
pub fn brute_gamma_prime(n: usize, l: u64) -> Vec<ModMatrix> {
    let d = n - 1;
    let fixes = move |rows: &[Vec<u64>]| {
        n % 2 == 1
            || (0..d).all(|r| {
                let s: u64 = (0..d).step_by(2).map(|c| rows[r][c]).sum();
                s % l == u64::from(r % 2 == 0) % l
            })
    };
    isometries(&gram_reduced(d), l, &any_column, &fixes)
}

/// Counts 2×2 matrices over `Z/ℓ` with determinant 1 by full enumeration.
pub fn sl2_count(l: u64) -> usize {
    let mut count = 0;
    for a in 0..l {
        for b in 0..l {
            for c in 0..l {
                for d in 0..l {
                    if (a * d + l * l - b * c % l) % l == 1 % l {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// Counts `Sp_4(Z/2)` by testing all `2^16` matrices against the form.
pub fn sp4_mod2_full_scan() -> usize {
    let j = gram_standard(4);
    let mut count = 0;
    for bits in 0u32..(1 << 16) {
        let m: Vec<Vec<u64>> = (0..4).map(|r| (0..4).map(|c| u64::from(bits >> (4 * r + c) & 1)).collect()).collect();
        let col = |c: usize| -> Vec<u64> { (0..4).map(|r| m[r][c]).collect() };
        if (0..4).all(|a| (0..4).all(|b| pairing(&j, &col(a), &col(b), 2) == md(j[a][b], 2))) {
            count += 1;
        }
    }
    count
}
