//! Closed-form orders of the finite symplectic quotients and the braid
//! quotient orders they predict.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `ℓ = 2^k · m` with `m` odd, plus the full prime factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelFactorization {
    pub level: u64,
    pub two_part: u32,
    pub odd_part: u64,
    pub prime_powers: Vec<(u64, u32)>,
}

impl LevelFactorization {
    /// Trial division; `level` must be at least 1.
    pub fn new(level: u64) -> Self {
        assert!(level >= 1, "level must be at least 1");
        let two_part = level.trailing_zeros();
        let odd_part = level >> two_part;
        let mut prime_powers = Vec::new();
        let mut rest = level;
        let mut p = 2u64;
        while p.saturating_mul(p) <= rest {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            if e > 0 {
                prime_powers.push((p, e));
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if rest > 1 {
            prime_powers.push((rest, 1));
        }
        LevelFactorization { level, two_part, odd_part, prime_powers }
    }

    pub fn two_power(&self) -> u64 {
        1 << self.two_part
    }
}

fn pow(p: u64, e: u64) -> BigUint {
    BigUint::from(p).pow(e as u32)
}

/// `|Sp_{2g}(Z/ℓZ)|`; multiplicative over prime powers, with
/// `|Sp_{2g}(Z/p^e)| = p^{(2g²+g)(e−1)} · p^{g²} · ∏_{i=1}^{g} (p^{2i} − 1)`.
pub fn sp_order(g: u32, level: u64) -> BigUint {
    let g = g as u64;
    LevelFactorization::new(level)
        .prime_powers
        .iter()
        .map(|&(p, e)| {
            let e = e as u64;
            let mut o = pow(p, (2 * g * g + g) * (e - 1)) * pow(p, g * g);
            for i in 1..=g {
                o *= pow(p, 2 * i) - BigUint::one();
            }
            o
        })
        .product()
}

/// Unimodular vectors in `(Z/ℓZ)^{2g}`, i.e. vectors whose entries
/// generate the unit ideal.
pub fn unimodular_count(g: u32, level: u64) -> BigUint {
    let g = g as u64;
    LevelFactorization::new(level)
        .prime_powers
        .iter()
        .map(|&(p, e)| pow(p, 2 * g * (e as u64 - 1)) * (pow(p, 2 * g) - BigUint::one()))
        .product()
}

/// `|[Sp_{2g}(Z/ℓZ)]_{e_1}|`, by the orbit-stabilizer count on unimodular
/// vectors (the action is transitive).
pub fn stab_order(g: u32, level: u64) -> BigUint {
    let (q, r) = num_integer::Integer::div_rem(&sp_order(g, level), &unimodular_count(g, level));
    debug_assert!(r.is_zero());
    q
}

/// `|Γ_{n−1}/Γ_{n−1}[ℓ]|`: `Sp_{2g}` for `n − 1 = 2g`, the `e_1`-stabilizer
/// in `Sp_{2g}` for `n − 1 = 2g − 1`. For `n − 1 = 1` this is `ℓ`.
pub fn gamma_quotient_order(n_minus_1: u32, level: u64) -> BigUint {
    assert!(n_minus_1 >= 1, "n - 1 must be at least 1");
    if n_minus_1.is_multiple_of(2) {
        sp_order(n_minus_1 / 2, level)
    } else {
        stab_order(n_minus_1.div_ceil(2), level)
    }
}

/// `|Γ′_{n−1}/Γ′_{n−1}[ℓ]|`: equals the unreduced value for odd `n`; for
/// even `n = 2g` it is `|Sp_{2g−2}(Z/ℓ)| · ℓ^{2g−2}` from the semidirect
/// product with the translation part.
pub fn gamma_prime_quotient_order(n_minus_1: u32, level: u64) -> BigUint {
    assert!(n_minus_1 >= 1, "n - 1 must be at least 1");
    let n = n_minus_1 + 1;
    if n % 2 == 1 {
        return gamma_quotient_order(n_minus_1, level);
    }
    let g = n / 2;
    let sp = if g == 1 { BigUint::one() } else { sp_order(g - 1, level) };
    sp * BigUint::from(level).pow(2 * g - 2)
}

fn factorial(n: u32) -> BigUint {
    (1..=n as u64).map(BigUint::from).product()
}

fn two_power_factor(n: u32, k: u32, quotient: impl Fn(u64) -> BigUint) -> BigUint {
    match k {
        0 => BigUint::one(),
        1 => factorial(n),
        _ => factorial(n) * quotient(1 << k) / quotient(2),
    }
}

/// `|B_n/B_n[ℓ]|` as predicted by the structure of the quotient: the
/// symplectic quotient for `n ≤ 3`, and for `n ≥ 4` with `ℓ = 2^k m` the
/// product of the 2-power part (an extension of `S_n`) with the odd part.
pub fn predicted_braid_quotient_order(n: u32, level: u64) -> BigUint {
    assert!(n >= 2, "need at least 2 strands");
    if n <= 3 {
        return gamma_quotient_order(n - 1, level);
    }
    let f = LevelFactorization::new(level);
    two_power_factor(n, f.two_part, |l| gamma_quotient_order(n - 1, l)) * gamma_quotient_order(n - 1, f.odd_part)
}

/// Reduced analogue of [`predicted_braid_quotient_order`]. The reduced
/// representation is zero for `n = 2`, so the quotient is trivial there.
pub fn predicted_reduced_quotient_order(n: u32, level: u64) -> BigUint {
    assert!(n >= 2, "need at least 2 strands");
    if n == 2 {
        return BigUint::one();
    }
    if n == 3 {
        return gamma_prime_quotient_order(2, level);
    }
    let f = LevelFactorization::new(level);
    two_power_factor(n, f.two_part, |l| gamma_prime_quotient_order(n - 1, l))
        * gamma_prime_quotient_order(n - 1, f.odd_part)
}
