//! Alternating forms preserved by the Burau images, the distinguished
//! vectors and bases attached to them, and the groups `Γ_{n-1}`, `Γ′_{n-1}`
//! with their congruence subgroups as decidable predicates.
//!
//! Indexing convention: `Γ_{n-1}` lives in `GL_n(Z)` and `Γ′_{n-1}` in
//! `GL_{n-1}(Z)`, where `n` is the number of strands. The subscript is always
//! the matrix dimension of `Γ` minus one, never the genus.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::matrix::{IntMatrix, MatrixError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymplecticError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("need at least {min} strands, got {n}")]
    TooFewStrands { n: usize, min: usize },
    #[error("operation needs an even strand count, got {0}")]
    NeedsEvenStrands(usize),
    #[error("matrix is not in Gamma_{0}")]
    NotInGamma(usize),
    #[error("matrix is not in Gamma'_{0}")]
    NotInGammaPrime(usize),
    #[error("matrix does not preserve the kernel of w_n^T")]
    DoesNotPreserveKernel,
    #[error("congruence level must be at least 1")]
    ZeroLevel,
}

/// Which of the two alternating forms a [`FormSpec`] carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    /// The form on `Z^n` preserved by `ρ`.
    Unreduced(usize),
    /// The restricted form on `Z^{n-1}`, written in the `c`-basis.
    Reduced(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormSpec {
    kind: FormKind,
    gram: IntMatrix,
}

impl FormSpec {
    /// `⟨e_i, e_j⟩ = (-1)^{i+j+1}` for `i < j` (1-based), antisymmetric.
    pub fn unreduced(n: usize) -> Self {
        let mut gram = IntMatrix::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                // 1-based i+j+1 has the same parity as 0-based i+j+1.
                let v: i64 = if (i + j + 1) % 2 == 0 { 1 } else { -1 };
                gram[(i, j)] = v.into();
                gram[(j, i)] = (-v).into();
            }
        }
        FormSpec { kind: FormKind::Unreduced(n), gram }
    }

    /// `⟨e_i, e_{i+1}⟩′ = -1`, `⟨e_{i+1}, e_i⟩′ = 1`, zero otherwise.
    pub fn reduced(dim: usize) -> Self {
        let mut gram = IntMatrix::zero(dim);
        for i in 0..dim.saturating_sub(1) {
            gram[(i, i + 1)] = (-1).into();
            gram[(i + 1, i)] = 1.into();
        }
        FormSpec { kind: FormKind::Reduced(dim), gram }
    }

    /// The interleaved standard form with `⟨f_{2i-1}, f_{2i}⟩ = 1`.
    pub fn standard(dim: usize) -> IntMatrix {
        let mut j = IntMatrix::zero(dim);
        for p in 0..dim / 2 {
            j[(2 * p, 2 * p + 1)] = 1.into();
            j[(2 * p + 1, 2 * p)] = (-1).into();
        }
        j
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.dim()
    }

    /// `vᵀ · gram · w`.
    pub fn eval(&self, v: &[BigInt], w: &[BigInt]) -> Result<BigInt, SymplecticError> {
        let gw = self.gram.mul_vec(w)?;
        if v.len() != gw.len() {
            return Err(MatrixError::DimensionMismatch { expected: gw.len(), found: v.len() }.into());
        }
        Ok(v.iter().zip(&gw).map(|(a, b)| a * b).sum())
    }

    /// `Mᵀ · gram · M == gram`.
    pub fn is_isometry(&self, m: &IntMatrix) -> Result<bool, SymplecticError> {
        Ok(preserves(&self.gram, m)?)
    }
}

/// `Mᵀ · G · M == G` for an arbitrary Gram matrix.
pub fn preserves(gram: &IntMatrix, m: &IntMatrix) -> Result<bool, MatrixError> {
    if gram.dim() != m.dim() {
        return Err(MatrixError::DimensionMismatch { expected: gram.dim(), found: m.dim() });
    }
    Ok(m.transpose().checked_mul(gram)?.checked_mul(m)? == *gram)
}

/// Symplectic for the interleaved standard form.
pub fn is_symplectic(m: &IntMatrix) -> bool {
    m.dim().is_multiple_of(2) && preserves(&FormSpec::standard(m.dim()), m).unwrap_or(false)
}

fn unit(n: usize, i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    v[i] = BigInt::one();
    v
}

fn add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn scale(a: &[BigInt], s: &BigInt) -> Vec<BigInt> {
    a.iter().map(|x| x * s).collect()
}

/// Sign `(-1)^{i+1}` attached to `c_i` (1-based `i`).
fn c_sign(i: usize) -> BigInt {
    if i % 2 == 1 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Coordinates of `u ∈ Z^n` in the basis `c_1, …, c_{n-1}` of the kernel of
/// `w_nᵀ`, or `None` when `u` is not in that kernel.
pub fn c_coordinates(u: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = u.len();
    if n < 2 {
        return None;
    }
    // u_1 = s_1 x_1, u_k = s_{k-1} x_{k-1} + s_k x_k, u_n = s_{n-1} x_{n-1}.
    let mut x: Vec<BigInt> = Vec::with_capacity(n - 1);
    x.push(&c_sign(1) * &u[0]);
    for k in 2..n {
        let prev = &c_sign(k - 1) * &x[k - 2];
        x.push(c_sign(k) * (&u[k - 1] - prev));
    }
    if &c_sign(n - 1) * &x[n - 2] == u[n - 1] {
        Some(x)
    } else {
        None
    }
}

/// The vector `Σ x_i c_i ∈ Z^n` for `c`-coordinates `x` of length `n - 1`.
pub fn from_c_coordinates(x: &[BigInt]) -> Vec<BigInt> {
    let n = x.len() + 1;
    let mut u = vec![BigInt::zero(); n];
    for (k, xi) in x.iter().enumerate() {
        let s = c_sign(k + 1) * xi;
        u[k] += &s;
        u[k + 1] += s;
    }
    u
}

/// Distinguished vectors and bases for a strand count `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisData {
    pub n: usize,
    /// `e_1 + ⋯ + e_n`.
    pub v: Vec<BigInt>,
    /// `e_1 - e_2 + ⋯ + (-1)^{n-1} e_n`.
    pub w: Vec<BigInt>,
    /// `c_i = (-1)^{i+1}(e_i + e_{i+1})`, spanning the kernel of `wᵀ`.
    pub c: Vec<Vec<BigInt>>,
    /// `a_i = e_1 + ⋯ + e_{2i}` for `2i ≤ n`.
    pub a: Vec<Vec<BigInt>>,
    /// `b_i = e_{2i} + e_{2i+1}`, or `e_n` when `2i = n`.
    pub b: Vec<Vec<BigInt>>,
    /// `a′_i = e_1 + e_3 + ⋯ + e_{2i-1}` in `Z^{n-1}`, images of the `a_i`.
    pub reduced_a: Vec<Vec<BigInt>>,
    /// `b′_i = -e_{2i}` in `Z^{n-1}` for `2i ≤ n - 1`, images of the `b_i`.
    pub reduced_b: Vec<Vec<BigInt>>,
    /// `v′_n = e_1 + e_3 + ⋯ + e_{n-1}` for even `n`.
    pub reduced_v: Option<Vec<BigInt>>,
}

impl BasisData {
    pub fn new(n: usize) -> Result<Self, SymplecticError> {
        if n < 2 {
            return Err(SymplecticError::TooFewStrands { n, min: 2 });
        }
        let v = vec![BigInt::one(); n];
        let w = (0..n).map(|i| if i % 2 == 0 { BigInt::one() } else { -BigInt::one() }).collect();
        let c = (1..n).map(|i| scale(&add(&unit(n, i - 1), &unit(n, i)), &c_sign(i))).collect();
        let pairs = n / 2;
        let a: Vec<Vec<BigInt>> = (1..=pairs)
            .map(|i| (0..n).map(|k| if k < 2 * i { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        let b: Vec<Vec<BigInt>> = (1..=pairs)
            .map(|i| if 2 * i == n { unit(n, n - 1) } else { add(&unit(n, 2 * i - 1), &unit(n, 2 * i)) })
            .collect();
        let m = n - 1;
        let reduced_a = (1..=pairs)
            .map(|i| (0..m).map(|k| if k % 2 == 0 && k < 2 * i { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        let reduced_b = (1..=pairs).filter(|i| 2 * i < n).map(|i| scale(&unit(m, 2 * i - 1), &-BigInt::one())).collect();
        let reduced_v = n.is_multiple_of(2)
            .then(|| (0..m).map(|k| if k % 2 == 0 { BigInt::one() } else { BigInt::zero() }).collect());
        Ok(BasisData { n, v, w, c, a, b, reduced_a, reduced_b, reduced_v })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Gamma,
    GammaPrime,
}

/// `Γ_{n-1}[ℓ]` or `Γ′_{n-1}[ℓ]`; level 1 imposes no congruence condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubgroupSpec {
    pub family: Family,
    pub n_minus_1: usize,
    pub level: u64,
}

impl SubgroupSpec {
    pub fn gamma(n_minus_1: usize, level: u64) -> Self {
        SubgroupSpec { family: Family::Gamma, n_minus_1, level }
    }

    pub fn gamma_prime(n_minus_1: usize, level: u64) -> Self {
        SubgroupSpec { family: Family::GammaPrime, n_minus_1, level }
    }

    pub fn strands(&self) -> usize {
        self.n_minus_1 + 1
    }

    pub fn matrix_dim(&self) -> usize {
        match self.family {
            Family::Gamma => self.n_minus_1 + 1,
            Family::GammaPrime => self.n_minus_1,
        }
    }
}

/// Membership in `Γ_{n-1}[ℓ]` / `Γ′_{n-1}[ℓ]`. Fixed vectors are checked by
/// exact equality.
pub fn in_gamma(m: &IntMatrix, spec: &SubgroupSpec) -> Result<bool, SymplecticError> {
    if spec.level == 0 {
        return Err(SymplecticError::ZeroLevel);
    }
    let dim = spec.matrix_dim();
    if m.dim() != dim {
        return Err(MatrixError::DimensionMismatch { expected: dim, found: m.dim() }.into());
    }
    let n = spec.strands();
    if n < 2 {
        return Err(SymplecticError::TooFewStrands { n, min: 2 });
    }
    let basis = BasisData::new(n)?;
    let ok = match spec.family {
        Family::Gamma => {
            FormSpec::unreduced(n).is_isometry(m)?
                && m.mul_vec(&basis.v)? == basis.v
                && m.vec_mul(&basis.w)? == basis.w
        }
        Family::GammaPrime => {
            FormSpec::reduced(dim).is_isometry(m)?
                && match &basis.reduced_v {
                    Some(v) => m.mul_vec(v)? == *v,
                    None => true,
                }
        }
    };
    Ok(ok && m.determinant().abs().is_one() && m.is_identity_mod(&BigInt::from(spec.level)))
}

/// Change of basis to symplectic coordinates: columns `a_1, b_1, a_2, b_2, …`.
///
/// For odd `n` the pairs only span the kernel of `w_nᵀ`; `v_n` (the radical
/// of the form) is appended as the last column so the matrix is square and
/// unimodular. Conjugating an element of `Γ_{n-1}` by it gives an interleaved
/// symplectic matrix for even `n`, and `diag(S, 1)` with `S` symplectic for
/// odd `n`.
pub fn to_symplectic_coords(n: usize) -> Result<IntMatrix, SymplecticError> {
    let basis = BasisData::new(n)?;
    let mut cols = Vec::with_capacity(n);
    for (a, b) in basis.a.iter().zip(&basis.b) {
        cols.push(a.clone());
        cols.push(b.clone());
    }
    if n % 2 == 1 {
        cols.push(basis.v.clone());
    }
    Ok(IntMatrix::from_columns(&cols)?)
}

/// For even `n = 2g`: columns `a_g, b_g, a_1, b_1, …, a_{g-1}, b_{g-1}`.
///
/// This is [`to_symplectic_coords`] followed by the fixed permutation moving
/// the last pair to the front, so that `v_n = a_g` becomes the first basis
/// vector. Conjugation by this frame identifies `Γ_{n-1}` with the stabilizer
/// of `e_1` in `Sp_n(Z)`: first column `e_1`, second row `e_2ᵀ`.
pub fn stabilizer_frame(n: usize) -> Result<IntMatrix, SymplecticError> {
    if !n.is_multiple_of(2) {
        return Err(SymplecticError::NeedsEvenStrands(n));
    }
    let basis = BasisData::new(n)?;
    let g = n / 2;
    let mut cols = vec![basis.a[g - 1].clone(), basis.b[g - 1].clone()];
    for i in 0..g - 1 {
        cols.push(basis.a[i].clone());
        cols.push(basis.b[i].clone());
    }
    Ok(IntMatrix::from_columns(&cols)?)
}

/// Symplectic coordinates for the reduced form on `Z^{n-1}`: columns
/// `a′_1, b′_1, …` and, for even `n`, the isotropic `a′_g = v′_n` last.
pub fn reduced_symplectic_coords(n: usize) -> Result<IntMatrix, SymplecticError> {
    if n < 3 {
        return Err(SymplecticError::TooFewStrands { n, min: 3 });
    }
    let basis = BasisData::new(n)?;
    let mut cols = Vec::with_capacity(n - 1);
    for (i, a) in basis.reduced_a.iter().enumerate() {
        cols.push(a.clone());
        if let Some(b) = basis.reduced_b.get(i) {
            cols.push(b.clone());
        }
    }
    Ok(IntMatrix::from_columns(&cols)?)
}

/// `ψ`: restriction of `M ∈ Γ_{n-1}` to the kernel of `w_nᵀ`, written in
/// the `c`-basis. Satisfies `ψ(ρ(w)) = ρ̄(w)`.
pub fn psi(m: &IntMatrix, n: usize) -> Result<IntMatrix, SymplecticError> {
    if n < 3 {
        return Err(SymplecticError::TooFewStrands { n, min: 3 });
    }
    if !in_gamma(m, &SubgroupSpec::gamma(n - 1, 1))? {
        return Err(SymplecticError::NotInGamma(n - 1));
    }
    let basis = BasisData::new(n)?;
    let mut cols = Vec::with_capacity(n - 1);
    for c in &basis.c {
        let image = m.mul_vec(c)?;
        cols.push(c_coordinates(&image).ok_or(SymplecticError::DoesNotPreserveKernel)?);
    }
    Ok(IntMatrix::from_columns(&cols)?)
}

/// A set-theoretic section of `ψ` for even `n = 2g`.
///
/// The lift acts on `a_1, b_1, …, a_g` as `B` acts on their images
/// `a′_1, b′_1, …, a′_g`, and sends
/// `b_g ↦ b_g + Σ_{i<g} (⟨b_g, B̃a_i⟩ B̃b_i − ⟨b_g, B̃b_i⟩ B̃a_i)`.
/// The correction terms are taken through `B̃` so that the result is an
/// isometry; without it the pairing `⟨B̃a_i, B̃b_g⟩` fails to vanish as soon
/// as the symplectic part of `B` is nontrivial.
pub fn psi_section(bm: &IntMatrix, n: usize) -> Result<IntMatrix, SymplecticError> {
    if !n.is_multiple_of(2) {
        return Err(SymplecticError::NeedsEvenStrands(n));
    }
    if n < 4 {
        return Err(SymplecticError::TooFewStrands { n, min: 4 });
    }
    if !in_gamma(bm, &SubgroupSpec::gamma_prime(n - 1, 1))? {
        return Err(SymplecticError::NotInGammaPrime(n - 1));
    }
    let basis = BasisData::new(n)?;
    let form = FormSpec::unreduced(n);
    let g = n / 2;
    let act = |u: &[BigInt]| -> Result<Vec<BigInt>, SymplecticError> {
        let x = c_coordinates(u).expect("a_i and b_i (i < g) lie in the kernel of w^T");
        Ok(from_c_coordinates(&bm.mul_vec(&x)?))
    };
    let mut images_a = Vec::with_capacity(g);
    let mut images_b = Vec::with_capacity(g);
    for i in 0..g {
        images_a.push(act(&basis.a[i])?);
        if i + 1 < g {
            images_b.push(act(&basis.b[i])?);
        }
    }
    let bg = &basis.b[g - 1];
    let mut image_bg = bg.clone();
    for i in 0..g - 1 {
        let alpha = form.eval(bg, &images_a[i])?;
        let beta = form.eval(bg, &images_b[i])?;
        image_bg = add(&image_bg, &scale(&images_b[i], &alpha));
        image_bg = add(&image_bg, &scale(&images_a[i], &-beta));
    }
    let mut cols = Vec::with_capacity(n);
    for i in 0..g {
        cols.push(images_a[i].clone());
        cols.push(if i + 1 < g { images_b[i].clone() } else { image_bg.clone() });
    }
    let images = IntMatrix::from_columns(&cols)?;
    let p = to_symplectic_coords(n)?;
    let p_inv = p.inverse().expect("symplectic basis is unimodular");
    Ok(images.checked_mul(&p_inv)?)
}

/// Splits `A ∈ Γ′_{n-1}` (even `n = 2g`) into its symplectic part
/// `Ā ∈ Sp_{2g-2}(Z)`, written in the `ā′_i, b̄′_i` basis of the quotient by
/// `v′_n`, and a translation `(λ_1, μ_1, …, λ_{g-1}, μ_{g-1})`.
///
/// The decomposition is `A = s(Ā) · K(λ, μ)` where `s(Ā)` fixes `v′_n` and
/// acts on the `a′_i, b′_i` as `Ā`, and `K` sends `a′_i ↦ a′_i + λ_i v′_n`,
/// `b′_i ↦ b′_i + μ_i v′_n`. See [`gamma_prime_rebuild`].
pub fn gamma_prime_split(a: &IntMatrix, n: usize) -> Result<(IntMatrix, Vec<BigInt>), SymplecticError> {
    if !n.is_multiple_of(2) {
        return Err(SymplecticError::NeedsEvenStrands(n));
    }
    if n < 4 {
        return Err(SymplecticError::TooFewStrands { n, min: 4 });
    }
    if !in_gamma(a, &SubgroupSpec::gamma_prime(n - 1, 1))? {
        return Err(SymplecticError::NotInGammaPrime(n - 1));
    }
    let q = reduced_symplectic_coords(n)?;
    let q_inv = q.inverse().expect("reduced symplectic basis is unimodular");
    let x = a.conjugate_by(&q, &q_inv)?;
    let k = n - 2;
    let rows: Vec<Vec<BigInt>> = (0..k).map(|i| x.row(i)[..k].to_vec()).collect();
    let translation = x.row(k)[..k].to_vec();
    Ok((IntMatrix::from_big_rows(rows)?, translation))
}

/// Inverse of [`gamma_prime_split`].
pub fn gamma_prime_rebuild(sym: &IntMatrix, translation: &[BigInt], n: usize) -> Result<IntMatrix, SymplecticError> {
    if !n.is_multiple_of(2) {
        return Err(SymplecticError::NeedsEvenStrands(n));
    }
    let k = n - 2;
    if sym.dim() != k || translation.len() != k {
        return Err(MatrixError::DimensionMismatch { expected: k, found: sym.dim() }.into());
    }
    let mut x = IntMatrix::identity(k + 1);
    for i in 0..k {
        for j in 0..k {
            x[(i, j)] = sym[(i, j)].clone();
        }
        x[(k, i)] = translation[i].clone();
    }
    let q = reduced_symplectic_coords(n)?;
    let q_inv = q.inverse().expect("reduced symplectic basis is unimodular");
    Ok(q.checked_mul(&x)?.checked_mul(&q_inv)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{burau, burau_sigma, reduced_burau, reduced_burau_sigma, BraidWord};
    use crate::matrix::big_vec;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn unreduced_gram_small() {
        let f = FormSpec::unreduced(4);
        let e = |i| unit(4, i);
        assert_eq!(FormSpec::unreduced(2).eval(&unit(2, 0), &unit(2, 1)).unwrap(), BigInt::from(1));
        assert_eq!(f.eval(&e(0), &e(2)).unwrap(), BigInt::from(-1));
        assert_eq!(f.eval(&e(2), &e(0)).unwrap(), BigInt::from(1));
        assert_eq!(f.eval(&e(1), &e(1)).unwrap(), BigInt::from(0));
        assert_eq!(f.gram(), &f.gram().transpose().transpose());
        let b = BasisData::new(4).unwrap();
        assert_eq!(f.eval(&b.a[0], &b.b[0]).unwrap(), BigInt::from(1));
    }

    #[test]
    fn reduced_gram_small() {
        let f = FormSpec::reduced(3);
        assert_eq!(f.gram(), &m(&[vec![0, -1, 0], vec![1, 0, -1], vec![0, 1, 0]]));
    }

    #[test]
    fn form_eval_dimension_mismatch() {
        let f = FormSpec::unreduced(3);
        assert!(f.eval(&big_vec(&[1, 0]), &big_vec(&[1, 0, 0])).is_err());
        assert!(f.is_isometry(&IntMatrix::identity(2)).is_err());
    }

    #[test]
    fn isometry_examples() {
        let f = FormSpec::unreduced(4);
        assert!(f.is_isometry(&IntMatrix::identity(4)).unwrap());
        assert!(f.is_isometry(&burau_sigma(4, 1).unwrap()).unwrap());
        let d = m(&[vec![2, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
        assert!(!f.is_isometry(&d).unwrap());
    }

    #[test]
    fn symplectic_basis_pairings() {
        for n in 2..=9 {
            let b = BasisData::new(n).unwrap();
            let f = FormSpec::unreduced(n);
            for i in 0..b.a.len() {
                for j in 0..b.a.len() {
                    let expect = BigInt::from((i == j) as i64);
                    assert_eq!(f.eval(&b.a[i], &b.b[j]).unwrap(), expect, "n={n} <a{i},b{j}>");
                    assert!(f.eval(&b.a[i], &b.a[j]).unwrap().is_zero());
                    assert!(f.eval(&b.b[i], &b.b[j]).unwrap().is_zero());
                }
            }
            let wc: Vec<BigInt> = b.c.iter().map(|c| c.iter().zip(&b.w).map(|(x, y)| x * y).sum()).collect();
            assert!(wc.iter().all(Zero::is_zero), "n={n}");
        }
    }

    #[test]
    fn reduced_basis_matches_c_images() {
        for n in 3..=9 {
            let b = BasisData::new(n).unwrap();
            for (i, a) in b.a.iter().enumerate() {
                assert_eq!(c_coordinates(a).unwrap(), b.reduced_a[i]);
            }
            for (i, rb) in b.reduced_b.iter().enumerate() {
                assert_eq!(c_coordinates(&b.b[i]).unwrap(), *rb);
            }
            if n % 2 == 0 {
                assert_eq!(c_coordinates(&b.v).unwrap(), *b.reduced_v.as_ref().unwrap());
                assert_eq!(*b.reduced_a.last().unwrap(), *b.reduced_v.as_ref().unwrap());
            }
        }
    }

    #[test]
    fn c_basis_restricts_form() {
        for n in 3..=8 {
            let b = BasisData::new(n).unwrap();
            let f = FormSpec::unreduced(n);
            let r = FormSpec::reduced(n - 1);
            for i in 0..n - 1 {
                for j in 0..n - 1 {
                    assert_eq!(f.eval(&b.c[i], &b.c[j]).unwrap(), r.gram()[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn symplectic_coords_examples() {
        assert_eq!(to_symplectic_coords(2).unwrap(), m(&[vec![1, 0], vec![1, 1]]));
        let p3 = to_symplectic_coords(3).unwrap();
        assert_eq!(p3.column(0), big_vec(&[1, 1, 0]));
        assert_eq!(p3.column(1), big_vec(&[0, 1, 1]));
        assert_eq!(p3.column(2), big_vec(&[1, 1, 1]));
        for n in 2..=8 {
            let p = to_symplectic_coords(n).unwrap();
            let p_inv = p.inverse().expect("unimodular");
            assert!(IntMatrix::identity(n).conjugate_by(&p, &p_inv).unwrap().is_identity());
            let g = FormSpec::unreduced(n);
            let pulled = p.transpose().checked_mul(g.gram()).unwrap().checked_mul(&p).unwrap();
            let mut expect = FormSpec::standard(n);
            if n % 2 == 1 {
                expect = FormSpec::standard(n - 1);
                let mut e = IntMatrix::zero(n);
                for i in 0..n - 1 {
                    for j in 0..n - 1 {
                        e[(i, j)] = expect[(i, j)].clone();
                    }
                }
                expect = e;
            }
            assert_eq!(pulled, expect, "n={n}");
        }
    }

    #[test]
    fn in_gamma_examples() {
        let w = BraidWord::parse("1 -2 3 1 1", 4).unwrap();
        assert!(in_gamma(&burau(&w), &SubgroupSpec::gamma(3, 1)).unwrap());
        let sq = BraidWord::parse("1 1", 4).unwrap();
        assert!(in_gamma(&burau(&sq), &SubgroupSpec::gamma(3, 2)).unwrap());
        let s = BraidWord::parse("1", 4).unwrap();
        assert!(!in_gamma(&burau(&s), &SubgroupSpec::gamma(3, 2)).unwrap());
        assert!(in_gamma(&IntMatrix::identity(3), &SubgroupSpec::gamma(3, 1)).is_err());
        assert_eq!(in_gamma(&IntMatrix::identity(4), &SubgroupSpec::gamma(3, 0)), Err(SymplecticError::ZeroLevel));
        // -I preserves the form but not v_n.
        let neg = IntMatrix::from_big_rows(IntMatrix::identity(4).rows().into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect()).unwrap();
        assert!(!in_gamma(&neg, &SubgroupSpec::gamma(3, 1)).unwrap());
    }

    #[test]
    fn generators_lie_in_gamma() {
        for n in 2..=8 {
            for i in 1..n as i64 {
                assert!(in_gamma(&burau_sigma(n, i).unwrap(), &SubgroupSpec::gamma(n - 1, 1)).unwrap());
                if n >= 3 {
                    let r = reduced_burau_sigma(n, i).unwrap();
                    assert!(in_gamma(&r, &SubgroupSpec::gamma_prime(n - 1, 1)).unwrap(), "n={n} i={i}");
                }
            }
        }
    }

    #[test]
    fn psi_examples() {
        assert!(psi(&IntMatrix::identity(5), 5).unwrap().is_identity());
        let s2 = burau_sigma(3, 2).unwrap();
        assert_eq!(psi(&s2, 3).unwrap(), m(&[vec![1, 0], vec![-1, 1]]));
        assert_eq!(psi(&IntMatrix::identity(3), 2), Err(SymplecticError::TooFewStrands { n: 2, min: 3 }));
        let d = m(&[vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(psi(&d, 3), Err(SymplecticError::NotInGamma(2)));
    }

    /// `b_g ↦ b_g + λ a_g` with everything else fixed lies in the kernel of ψ.
    #[test]
    fn psi_kills_the_cyclic_kernel() {
        for n in [4usize, 6, 8] {
            let b = BasisData::new(n).unwrap();
            let g = n / 2;
            let p = to_symplectic_coords(n).unwrap();
            let p_inv = p.inverse().unwrap();
            for lambda in [-3i64, 1, 5] {
                let mut cols = Vec::new();
                for i in 0..g {
                    cols.push(b.a[i].clone());
                    if i + 1 < g {
                        cols.push(b.b[i].clone());
                    } else {
                        cols.push(add(&b.b[i], &scale(&b.a[i], &BigInt::from(lambda))));
                    }
                }
                let k = IntMatrix::from_columns(&cols).unwrap().checked_mul(&p_inv).unwrap();
                assert!(in_gamma(&k, &SubgroupSpec::gamma(n - 1, 1)).unwrap());
                assert!(psi(&k, n).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn psi_section_identity_and_errors() {
        assert!(psi_section(&IntMatrix::identity(3), 4).unwrap().is_identity());
        assert_eq!(psi_section(&IntMatrix::identity(4), 5), Err(SymplecticError::NeedsEvenStrands(5)));
        let bad = m(&[vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(psi_section(&bad, 4), Err(SymplecticError::NotInGammaPrime(3)));
    }

    #[test]
    fn psi_section_is_a_section_on_generators() {
        for n in [4usize, 6, 8] {
            for i in 1..n as i64 {
                for sign in [1, -1] {
                    let bm = reduced_burau_sigma(n, sign * i).unwrap();
                    let lift = psi_section(&bm, n).unwrap();
                    assert!(in_gamma(&lift, &SubgroupSpec::gamma(n - 1, 1)).unwrap(), "n={n} i={}", sign * i);
                    assert_eq!(psi(&lift, n).unwrap(), bm);
                }
            }
        }
    }

    #[test]
    fn gamma_prime_split_examples() {
        let (s, t) = gamma_prime_split(&IntMatrix::identity(3), 4).unwrap();
        assert!(s.is_identity());
        assert!(t.iter().all(Zero::is_zero));

        // Pure translation: a′_i ↦ a′_i + λ_i v′, b′_i ↦ b′_i + μ_i v′.
        let n = 6;
        let b = BasisData::new(n).unwrap();
        let v = b.reduced_v.clone().unwrap();
        let lm = [2i64, -1, 3, 7];
        let mut cols = Vec::new();
        for i in 0..2 {
            cols.push(add(&b.reduced_a[i], &scale(&v, &BigInt::from(lm[2 * i]))));
            cols.push(add(&b.reduced_b[i], &scale(&v, &BigInt::from(lm[2 * i + 1]))));
        }
        cols.push(v.clone());
        let q = reduced_symplectic_coords(n).unwrap();
        let k = IntMatrix::from_columns(&cols).unwrap().checked_mul(&q.inverse().unwrap()).unwrap();
        let (s, t) = gamma_prime_split(&k, n).unwrap();
        assert!(s.is_identity());
        assert_eq!(t, big_vec(&lm));
    }

    #[test]
    fn gamma_prime_split_round_trip() {
        let w = BraidWord::parse("1 2 -3 2 2 1 -1 3 1", 4).unwrap();
        let a = reduced_burau(&w).unwrap();
        let (s, t) = gamma_prime_split(&a, 4).unwrap();
        assert!(is_symplectic(&s));
        assert_eq!(gamma_prime_rebuild(&s, &t, 4).unwrap(), a);
    }

    #[test]
    fn stabilizer_frame_fixes_first_vector() {
        for n in [2usize, 4, 6] {
            let f = stabilizer_frame(n).unwrap();
            let f_inv = f.inverse().unwrap();
            let gram = FormSpec::unreduced(n);
            let pulled = f.transpose().checked_mul(gram.gram()).unwrap().checked_mul(&f).unwrap();
            assert_eq!(pulled, FormSpec::standard(n));
            for i in 1..n as i64 {
                let x = burau_sigma(n, i).unwrap().conjugate_by(&f, &f_inv).unwrap();
                assert!(is_symplectic(&x));
                assert_eq!(x.column(0), unit(n, 0));
                assert_eq!(x.row(1).to_vec(), unit(n, 1));
            }
        }
        assert!(stabilizer_frame(5).is_err());
    }
}
