//! Integral lifts of residue matrices: `Sp_{2g}(Z) → Sp_{2g}(Z/ℓ)`, its
//! `e_1`-stabilizer version, the `Γ` and `Γ′` families, and lifts into a
//! second congruence level by gluing residues.
//!
//! Every public function checks its output exactly before returning it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::matrix::{balanced, IntMatrix};
use crate::modmatrix::{mod_inverse, reduce, ModMatrix};
use crate::symplectic::{
    gamma_prime_rebuild, in_gamma, is_symplectic, reduced_symplectic_coords, stabilizer_frame, to_symplectic_coords,
    BasisData, FormSpec, SubgroupSpec,
};

/// Largest supported modulus; keeps residue products inside `i128`.
pub const MAX_MODULUS: u64 = 1 << 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("expected a {expected}x{expected} matrix, got {found}x{found}")]
    Dimension { expected: usize, found: usize },
    #[error("modulus {0} is outside the supported range 1..=2^62")]
    Modulus(u64),
    #[error("matrix is not symplectic mod {0}")]
    NotSymplectic(u64),
    #[error("matrix does not have the e_1-stabilizer shape mod {0}")]
    NotStabilizer(u64),
    #[error("matrix fails the {family} residue conditions mod {modulus}")]
    ResidueConditions { family: &'static str, modulus: u64 },
    #[error("matrix is not congruent to the identity mod gcd = {0}")]
    NotCongruent(u64),
    #[error("lift postcondition failed: {0}")]
    Postcondition(String),
}

/// Which integral group a residue should be lifted into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftFamily {
    /// `Sp_{2g}(Z)`, interleaved standard form.
    Sp { g: usize },
    /// `[Sp_{2g}(Z)]_{e_1}`.
    SpStab { g: usize },
    /// `Γ_{n−1} ⊂ GL_n(Z)`, given by the strand count `n`.
    Gamma { n: usize },
    /// `Γ′_{n−1} ⊂ GL_{n−1}(Z)`, given by the strand count `n`.
    GammaPrime { n: usize },
}

impl LiftFamily {
    pub fn dim(&self) -> usize {
        match *self {
            LiftFamily::Sp { g } | LiftFamily::SpStab { g } => 2 * g,
            LiftFamily::Gamma { n } => n,
            LiftFamily::GammaPrime { n } => n - 1,
        }
    }
}

/// A residue to lift, optionally into a second congruence level: with
/// `crt = Some((ℓ, m))` the target is read mod `ℓ` and the lift must also be
/// `≡ I mod m`.
#[derive(Clone, Debug)]
pub struct LiftRequest {
    pub target: ModMatrix,
    pub family: LiftFamily,
    pub crt: Option<(u64, u64)>,
}

impl LiftRequest {
    pub fn run(&self) -> Result<IntMatrix, LiftError> {
        match self.crt {
            None => lift_residue(&self.target, self.family),
            Some((l, m)) => {
                if self.target.modulus() != l {
                    return Err(LiftError::Modulus(self.target.modulus()));
                }
                crt_lift(&self.target.to_int_matrix(), l, m, self.family)
            }
        }
    }
}

/// Dispatches to the lift for `family`.
pub fn lift_residue(a: &ModMatrix, family: LiftFamily) -> Result<IntMatrix, LiftError> {
    match family {
        LiftFamily::Sp { g } => sp_lift(a, g),
        LiftFamily::SpStab { g } => stab_lift(a, g),
        LiftFamily::Gamma { n } => gamma_lift(a, n),
        LiftFamily::GammaPrime { n } => gamma_prime_lift(a, n),
    }
}

fn check_shape(a: &ModMatrix, dim: usize) -> Result<(), LiftError> {
    if a.dim() != dim {
        return Err(LiftError::Dimension { expected: dim, found: a.dim() });
    }
    if a.modulus() > MAX_MODULUS {
        return Err(LiftError::Modulus(a.modulus()));
    }
    Ok(())
}

fn standard_mod(dim: usize, modulus: u64) -> ModMatrix {
    reduce(&FormSpec::standard(dim), modulus).expect("modulus checked")
}

fn transpose(a: &ModMatrix) -> ModMatrix {
    let n = a.dim();
    let e = (0..n * n).map(|k| a.get(k % n, k / n)).collect();
    ModMatrix::new(n, a.modulus(), e).expect("same shape")
}

/// `Aᵀ J A ≡ J (mod ℓ)` for a Gram matrix `gram`.
fn preserves_mod(a: &ModMatrix, gram: &IntMatrix) -> bool {
    let j = reduce(gram, a.modulus()).expect("modulus checked");
    transpose(a).mul_unchecked(&j).mul_unchecked(a) == j
}

/// Symplectic for the interleaved standard form, mod `ℓ`.
pub fn is_symplectic_mod(a: &ModMatrix) -> bool {
    a.dim().is_multiple_of(2) && {
        let j = standard_mod(a.dim(), a.modulus());
        transpose(a).mul_unchecked(&j).mul_unchecked(a) == j
    }
}

/// Residue-level `e_1`-stabilizer shape: first column `e_1`, second row
/// `e_2ᵀ`, symplectic.
pub fn is_stabilizer_mod(a: &ModMatrix) -> bool {
    let n = a.dim();
    let l = a.modulus();
    is_symplectic_mod(a)
        && n >= 2
        && (0..n).all(|i| a.get(i, 0) == u64::from(i == 0) % l)
        && (0..n).all(|j| a.get(1, j) == u64::from(j == 1) % l)
}

/// Elimination state: the residue `W` being reduced to `I` by symplectic
/// row operations `E`, and the integral product `R` of the inverses of the
/// lifted `E`, so that `A ≡ R` once `W = I`.
struct Eliminator {
    l: i128,
    lb: BigInt,
    w: Vec<Vec<i128>>,
    r: IntMatrix,
}

impl Eliminator {
    fn new(a: &ModMatrix) -> Self {
        let n = a.dim();
        Eliminator {
            l: a.modulus() as i128,
            lb: BigInt::from(a.modulus()),
            w: (0..n).map(|i| (0..n).map(|j| a.get(i, j) as i128).collect()).collect(),
            r: IntMatrix::identity(n),
        }
    }

    fn norm(&self, t: i128) -> i128 {
        t.rem_euclid(self.l)
    }

    fn lift(&self, t: i128) -> BigInt {
        balanced(&BigInt::from(t), &self.lb)
    }

    fn row_add(&mut self, dst: usize, src: usize, t: i128) {
        for j in 0..self.w.len() {
            let v = self.w[dst][j] + t * self.w[src][j];
            self.w[dst][j] = v.rem_euclid(self.l);
        }
    }

    fn col_add(&mut self, dst: usize, src: usize, t: &BigInt) {
        for i in 0..self.r.dim() {
            let v = &self.r[(i, src)] * t;
            self.r[(i, dst)] += v;
        }
    }

    /// `row a_p += t·row b_p`; on `R`: `col b_p −= t·col a_p`.
    fn upper(&mut self, p: usize, t: i128) {
        let t = self.norm(t);
        if t == 0 {
            return;
        }
        self.row_add(2 * p, 2 * p + 1, t);
        let s = -self.lift(t);
        self.col_add(2 * p + 1, 2 * p, &s);
    }

    /// `row b_p += t·row a_p`; on `R`: `col a_p −= t·col b_p`.
    fn lower(&mut self, p: usize, t: i128) {
        let t = self.norm(t);
        if t == 0 {
            return;
        }
        self.row_add(2 * p + 1, 2 * p, t);
        let s = -self.lift(t);
        self.col_add(2 * p, 2 * p + 1, &s);
    }

    /// `I + t(E_{a_i a_j} − E_{b_j b_i})`.
    fn shear(&mut self, i: usize, j: usize, t: i128) {
        let t = self.norm(t);
        if t == 0 {
            return;
        }
        self.row_add(2 * i, 2 * j, t);
        self.row_add(2 * j + 1, 2 * i + 1, -t);
        let s = self.lift(t);
        self.col_add(2 * j, 2 * i, &-s.clone());
        self.col_add(2 * i + 1, 2 * j + 1, &s);
    }

    /// `I + t(E_{a_i b_j} + E_{a_j b_i})`.
    fn cross(&mut self, i: usize, j: usize, t: i128) {
        let t = self.norm(t);
        if t == 0 {
            return;
        }
        self.row_add(2 * i, 2 * j + 1, t);
        self.row_add(2 * j, 2 * i + 1, t);
        let s = -self.lift(t);
        self.col_add(2 * j + 1, 2 * i, &s);
        self.col_add(2 * i + 1, 2 * j, &s);
    }

    fn run(&mut self) -> Result<(), LiftError> {
        let g = self.w.len() / 2;
        for p in 0..g {
            let c = 2 * p;
            // Within each pair, Euclid on column a_p until the b-entry vanishes.
            for q in p..g {
                loop {
                    let (x, y) = (self.w[2 * q][c], self.w[2 * q + 1][c]);
                    if y == 0 {
                        break;
                    }
                    if x == 0 {
                        self.upper(q, 1);
                        continue;
                    }
                    self.lower(q, -(y / x));
                    let y = self.w[2 * q + 1][c];
                    if y != 0 {
                        self.upper(q, -(x / y));
                    }
                }
            }
            // Across pairs, Euclid on the a-entries of column a_p.
            loop {
                let nz: Vec<usize> = (p..g).filter(|&q| self.w[2 * q][c] != 0).collect();
                if nz.len() <= 1 {
                    if let Some(&q) = nz.first() {
                        if q != p {
                            self.shear(p, q, 1);
                            self.shear(q, p, -1);
                        }
                    }
                    break;
                }
                let piv = *nz.iter().min_by_key(|&&q| self.w[2 * q][c]).expect("nonempty");
                for &q in &nz {
                    if q != piv {
                        let t = self.w[2 * q][c] / self.w[2 * piv][c];
                        self.shear(q, piv, -t);
                    }
                }
            }
            let d = self.w[c][c];
            if d != 1 {
                let d_inv = mod_inverse(d as u64, self.l as u64)
                    .ok_or(LiftError::NotSymplectic(self.l as u64))? as i128;
                self.lower(p, (1 - d) * d_inv % self.l);
                self.upper(p, 1);
                self.lower(p, -(1 - d));
            }
            // Clear column b_p outside its diagonal entry.
            let b = 2 * p + 1;
            for q in p + 1..g {
                let t = self.w[2 * q + 1][b];
                self.shear(p, q, t);
                let t = self.w[2 * q][b];
                self.cross(q, p, -t);
            }
            let t = self.w[c][b];
            self.upper(p, -t);
        }
        let n = self.w.len();
        let done = (0..n).all(|i| (0..n).all(|j| self.w[i][j] == i128::from(i == j) % self.l));
        if done {
            Ok(())
        } else {
            Err(LiftError::NotSymplectic(self.l as u64))
        }
    }
}

/// An integral symplectic `Ã ≡ A (mod ℓ)`, by symplectic elimination of
/// the residue with balanced-residue parameters.
pub fn sp_lift(a: &ModMatrix, g: usize) -> Result<IntMatrix, LiftError> {
    check_shape(a, 2 * g)?;
    if a.modulus() == 1 {
        return Ok(IntMatrix::identity(2 * g));
    }
    if !is_symplectic_mod(a) {
        return Err(LiftError::NotSymplectic(a.modulus()));
    }
    let mut e = Eliminator::new(a);
    e.run()?;
    let out = e.r;
    post(is_symplectic(&out) && reduce(&out, a.modulus()).ok().as_ref() == Some(a), "sp_lift")?;
    Ok(out)
}

fn post(ok: bool, what: &str) -> Result<(), LiftError> {
    if ok {
        Ok(())
    } else {
        Err(LiftError::Postcondition(what.to_string()))
    }
}

fn balanced_u64(x: u64, l: u64) -> BigInt {
    balanced(&BigInt::from(x), &BigInt::from(l))
}

/// An integral `Ã ∈ [Sp_{2g}(Z)]_{e_1}` with `Ã ≡ A (mod ℓ)`.
///
/// Writing the residue as first column `e_1`, second column
/// `(x, 1, v_2)`, remaining columns `(a_i, 0, v_i)` with `B = (v_3 … v_{2g})`
/// symplectic, the lift takes `B̃ = sp_lift(B)`, balanced lifts `x̃, ṽ_2`, and
/// recomputes the border as `ã_i = ⟨ṽ_2, ṽ_i⟩`.
pub fn stab_lift(a: &ModMatrix, g: usize) -> Result<IntMatrix, LiftError> {
    check_shape(a, 2 * g)?;
    let l = a.modulus();
    let n = 2 * g;
    if l == 1 {
        return Ok(IntMatrix::identity(n));
    }
    if !is_stabilizer_mod(a) {
        return Err(LiftError::NotStabilizer(l));
    }
    let k = n - 2;
    let corner: Vec<u64> = (0..k * k).map(|t| a.get(2 + t / k.max(1), 2 + t % k.max(1))).collect();
    let b_tilde = if k == 0 {
        IntMatrix::identity(0)
    } else {
        sp_lift(&ModMatrix::new(k, l, corner).expect("square"), g - 1)?
    };
    let v2: Vec<BigInt> = (0..k).map(|i| balanced_u64(a.get(2 + i, 1), l)).collect();
    let j = FormSpec::standard(k);
    let jb = j.checked_mul(&b_tilde).expect("same dim");
    let border = jb.vec_mul(&v2).expect("same dim");

    let mut out = IntMatrix::identity(n);
    out[(0, 1)] = balanced_u64(a.get(0, 1), l);
    for i in 0..k {
        out[(2 + i, 1)] = v2[i].clone();
        out[(0, 2 + i)] = border[i].clone();
        for c in 0..k {
            out[(2 + i, 2 + c)] = b_tilde[(i, c)].clone();
        }
    }
    let stab_ok = is_symplectic(&out)
        && (0..n).all(|i| out[(i, 0)] == BigInt::from(u8::from(i == 0)))
        && reduce(&out, l).ok().as_ref() == Some(a);
    post(stab_ok, "stab_lift")?;
    Ok(out)
}

/// Residue conditions for `Γ_{n−1}` mod `ℓ`: isometry, `Av ≡ v`, `wᵀA ≡ wᵀ`.
pub fn is_gamma_residue(a: &ModMatrix, n: usize) -> bool {
    let Ok(basis) = BasisData::new(n) else { return false };
    if a.dim() != n {
        return false;
    }
    let l = a.modulus();
    let to_res = |v: &[BigInt]| -> Vec<u64> {
        v.iter().map(|x| x.mod_floor(&BigInt::from(l)).try_into().expect("residue")).collect()
    };
    let v = to_res(&basis.v);
    let w = to_res(&basis.w);
    let wa = transpose(a).mul_vec(&w).expect("dim");
    preserves_mod(a, FormSpec::unreduced(n).gram()) && a.mul_vec(&v).expect("dim") == v && wa == w
}

/// Residue conditions for `Γ′_{n−1}` mod `ℓ`: isometry of the reduced form
/// and, for even `n`, `Av′ ≡ v′`.
pub fn is_gamma_prime_residue(a: &ModMatrix, n: usize) -> bool {
    let Ok(basis) = BasisData::new(n) else { return false };
    if n < 3 || a.dim() != n - 1 {
        return false;
    }
    let fixes = match &basis.reduced_v {
        Some(v) => {
            let v: Vec<u64> = v.iter().map(|x| if x.is_one() { 1 % a.modulus() } else { 0 }).collect();
            a.mul_vec(&v).expect("dim") == v
        }
        None => true,
    };
    preserves_mod(a, FormSpec::reduced(n - 1).gram()) && fixes
}

fn conj_residue(a: &ModMatrix, p: &IntMatrix, p_inv: &IntMatrix) -> ModMatrix {
    let x = a.to_int_matrix().conjugate_by(p, p_inv).expect("same dim");
    reduce(&x, a.modulus()).expect("modulus checked")
}

/// An integral `Ã ∈ Γ_{n−1}` with `Ã ≡ A (mod ℓ)`.
///
/// For even `n` the stabilizer frame identifies `Γ_{n−1}` with
/// `[Sp_n(Z)]_{e_1}` and [`stab_lift`] applies; for odd `n` the symplectic
/// coordinates (with `v_n` appended) turn the residue into `diag(S, 1)` and
/// [`sp_lift`] lifts `S`.
pub fn gamma_lift(a: &ModMatrix, n: usize) -> Result<IntMatrix, LiftError> {
    check_shape(a, n)?;
    let l = a.modulus();
    if !is_gamma_residue(a, n) {
        return Err(LiftError::ResidueConditions { family: "Gamma", modulus: l });
    }
    let out = if n.is_multiple_of(2) {
        let f = stabilizer_frame(n).expect("even n");
        let f_inv = f.inverse().expect("unimodular");
        let lifted = stab_lift(&conj_residue(a, &f, &f_inv), n / 2)?;
        lifted.conjugate_by(&f_inv, &f).expect("same dim")
    } else {
        let p = to_symplectic_coords(n).expect("n >= 2");
        let p_inv = p.inverse().expect("unimodular");
        let x = conj_residue(a, &p, &p_inv);
        let k = n - 1;
        let s = ModMatrix::new(k, l, (0..k * k).map(|t| x.get(t / k, t % k)).collect()).expect("square");
        let s_tilde = sp_lift(&s, k / 2)?;
        let mut big = IntMatrix::identity(n);
        for i in 0..k {
            for j in 0..k {
                big[(i, j)] = s_tilde[(i, j)].clone();
            }
        }
        big.conjugate_by(&p_inv, &p).expect("same dim")
    };
    let ok = in_gamma(&out, &SubgroupSpec::gamma(n - 1, 1)).unwrap_or(false)
        && reduce(&out, l).ok().as_ref() == Some(a);
    post(ok, "gamma_lift")?;
    Ok(out)
}

/// An integral `Ã ∈ Γ′_{n−1}` with `Ã ≡ A (mod ℓ)`; for even `n` the
/// symplectic part is lifted by [`sp_lift`] and the translation part by
/// balanced residues.
pub fn gamma_prime_lift(a: &ModMatrix, n: usize) -> Result<IntMatrix, LiftError> {
    if n < 3 {
        return Err(LiftError::Dimension { expected: 2, found: a.dim() });
    }
    check_shape(a, n - 1)?;
    let l = a.modulus();
    if !is_gamma_prime_residue(a, n) {
        return Err(LiftError::ResidueConditions { family: "Gamma'", modulus: l });
    }
    let q = reduced_symplectic_coords(n).expect("n >= 3");
    let q_inv = q.inverse().expect("unimodular");
    let x = conj_residue(a, &q, &q_inv);
    let out = if n % 2 == 1 {
        sp_lift(&x, (n - 1) / 2)?.conjugate_by(&q_inv, &q).expect("same dim")
    } else {
        let k = n - 2;
        let s = ModMatrix::new(k, l, (0..k * k).map(|t| x.get(t / k, t % k)).collect()).expect("square");
        let s_tilde = sp_lift(&s, k / 2)?;
        let t: Vec<BigInt> = (0..k).map(|j| balanced_u64(x.get(k, j), l)).collect();
        gamma_prime_rebuild(&s_tilde, &t, n).expect("shapes match")
    };
    let ok = in_gamma(&out, &SubgroupSpec::gamma_prime(n - 1, 1)).unwrap_or(false)
        && reduce(&out, l).ok().as_ref() == Some(a);
    post(ok, "gamma_prime_lift")?;
    Ok(out)
}

/// Glues `x ≡ a (mod ℓ)` and `x ≡ b (mod m)`, given `a ≡ b (mod gcd)`,
/// into a residue mod `lcm(ℓ, m)`.
fn glue(a: &BigInt, b: &BigInt, l: u64, m: u64) -> BigInt {
    let (lb, mb) = (BigInt::from(l), BigInt::from(m));
    let d = lb.gcd(&mb);
    let lcm = &lb / &d * &mb;
    let diff = (b - a).mod_floor(&mb);
    debug_assert!((&diff % &d).is_zero());
    let m_red = &mb / &d;
    let l_red = (&lb / &d).mod_floor(&m_red);
    let k = if m_red.is_one() {
        BigInt::zero()
    } else {
        let inv = mod_inverse(
            u64::try_from(&l_red).expect("fits"),
            u64::try_from(&m_red).expect("fits"),
        )
        .expect("coprime after dividing by gcd");
        (&diff / &d * BigInt::from(inv)).mod_floor(&m_red)
    };
    (a + lb * k).mod_floor(&lcm)
}

/// An element of the level-`m` subgroup of `family` with `Ã ≡ A (mod ℓ)`,
/// for `A` in the family's group with `A ≡ I (mod gcd(ℓ, m))`.
///
/// The residues `A mod ℓ` and `I mod m` agree mod `gcd(ℓ, m)` and glue to a
/// single residue mod `lcm(ℓ, m)`, which is then lifted.
pub fn crt_lift(a: &IntMatrix, l: u64, m: u64, family: LiftFamily) -> Result<IntMatrix, LiftError> {
    let dim = family.dim();
    if a.dim() != dim {
        return Err(LiftError::Dimension { expected: dim, found: a.dim() });
    }
    if l == 0 || m == 0 {
        return Err(LiftError::Modulus(0));
    }
    let d = l.gcd(&m);
    if !a.is_identity_mod(&BigInt::from(d)) {
        return Err(LiftError::NotCongruent(d));
    }
    let lcm = l / d * m;
    if lcm > MAX_MODULUS {
        return Err(LiftError::Modulus(lcm));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let id = BigInt::from(u8::from(i == j));
            let x = glue(&a[(i, j)], &id, l, m);
            entries.push(u64::try_from(&x).expect("below lcm"));
        }
    }
    let glued = ModMatrix::new(dim, lcm, entries).expect("square");
    let out = lift_residue(&glued, family)?;
    let ok = congruent_mod(&out, a, l) && out.is_identity_mod(&BigInt::from(m));
    post(ok, "crt_lift")?;
    Ok(out)
}

fn congruent_mod(a: &IntMatrix, b: &IntMatrix, l: u64) -> bool {
    let lb = BigInt::from(l);
    a.dim() == b.dim() && a.entries().iter().zip(b.entries()).all(|(x, y)| ((x - y) % &lb).is_zero())
}
