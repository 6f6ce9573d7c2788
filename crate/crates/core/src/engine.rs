//! Finite matrix groups over `Z/ℓZ` as explicit sorted element lists.
//!
//! Groups are built by breadth-first closure of a generating set and then
//! manipulated through filters (congruence kernels, stabilizers) and set
//! operations. Everything is explicit enumeration; there is no stabilizer
//! chain machinery.

use std::collections::HashSet;

use log::{debug, info};
use rayon::prelude::*;
use thiserror::Error;

use crate::modmatrix::{encoded_width, Code, ModMatrix};
use crate::symplectic::FormSpec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("{d} does not divide the modulus {modulus}")]
    NotADivisor { d: u64, modulus: u64 },
    #[error("operation needs modulus {expected}, found {found}")]
    WrongModulus { expected: u64, found: u64 },
    #[error("generator is not invertible mod {0}")]
    NotInvertible(u64),
    #[error("at least one generator is required")]
    NoGenerators,
    #[error("enumeration exceeded the memory cap of {cap_mb} MiB after {elements} elements")]
    MemoryCap { cap_mb: u64, elements: usize },
    #[error("subgroup is not contained in the ambient group")]
    NotContained,
    #[error("malformed canonical encoding")]
    BadEncoding,
    #[error("matrix error: {0}")]
    Matrix(String),
    #[error("projection is not onto the symmetric group: {0}")]
    ProjectionNotSurjective(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("relation-satisfying preimages generate a group of order {found}, expected {expected}")]
    PresentationIncomplete { found: usize, expected: usize },
    #[error("section search exceeded its budget of {0} nodes")]
    SearchBudget(u64),
    #[error("need g >= 1 and modulus >= 2, got g={g}, modulus={modulus}")]
    BadSymplecticParams { g: usize, modulus: u64 },
}

/// Resource limits for [`GroupSet::close_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CloseLimits {
    pub mem_cap_mb: u64,
}

impl CloseLimits {
    pub const DEFAULT_MEM_CAP_MB: u64 = 2048;

    /// Reads `BURAU_MEM_CAP_MB`, falling back to 2 GiB.
    pub fn from_env() -> Self {
        let mem_cap_mb = std::env::var("BURAU_MEM_CAP_MB")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(Self::DEFAULT_MEM_CAP_MB);
        CloseLimits { mem_cap_mb }
    }
}

impl Default for CloseLimits {
    fn default() -> Self {
        Self::from_env()
    }
}

/// A finite set of `dim × dim` matrices mod `ℓ`, stored as sorted,
/// duplicate-free canonical encodings. When produced by closure it is a
/// group and `generators` records how; filtered subgroups carry no
/// generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSet {
    dim: usize,
    modulus: u64,
    elements: Vec<Code>,
    generators: Vec<ModMatrix>,
}

impl GroupSet {
    pub fn trivial(dim: usize, modulus: u64) -> Self {
        GroupSet { dim, modulus, elements: vec![ModMatrix::identity(dim, modulus).encode()], generators: Vec::new() }
    }

    /// Builds a set from arbitrary codes, sorting and deduplicating.
    pub fn from_codes(dim: usize, modulus: u64, mut elements: Vec<Code>) -> Self {
        elements.par_sort_unstable();
        elements.dedup();
        GroupSet { dim, modulus, elements, generators: Vec::new() }
    }

    /// Builds a set from codes that are already sorted and unique.
    pub(crate) fn from_sorted_codes(dim: usize, modulus: u64, elements: Vec<Code>, generators: Vec<ModMatrix>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        GroupSet { dim, modulus, elements, generators }
    }

    pub fn from_matrices(dim: usize, modulus: u64, ms: &[ModMatrix]) -> Self {
        Self::from_codes(dim, modulus, ms.iter().map(ModMatrix::encode).collect())
    }

    /// Closure under the default limits.
    pub fn close(generators: &[ModMatrix]) -> Result<Self, EngineError> {
        Self::close_with(generators, &CloseLimits::default())
    }

    /// The subgroup generated by `generators`: BFS from the identity by right
    /// multiplication with every generator and generator inverse. The result
    /// is independent of scheduling because the final list is sorted.
    pub fn close_with(generators: &[ModMatrix], limits: &CloseLimits) -> Result<Self, EngineError> {
        let first = generators.first().ok_or(EngineError::NoGenerators)?;
        let (dim, modulus) = (first.dim(), first.modulus());
        let mut steps = Vec::with_capacity(2 * generators.len());
        for g in generators {
            if g.dim() != dim {
                return Err(EngineError::DimensionMismatch { expected: dim, found: g.dim() });
            }
            if g.modulus() != modulus {
                return Err(EngineError::ModulusMismatch(modulus, g.modulus()));
            }
            steps.push(g.clone());
        }
        for g in generators {
            let inv = g.inverse().ok_or(EngineError::NotInvertible(modulus))?;
            if !steps.contains(&inv) {
                steps.push(inv);
            }
        }

        let identity = ModMatrix::identity(dim, modulus).encode();
        let per_element = estimated_bytes_per_element(&identity);
        let cap_bytes = limits.mem_cap_mb.saturating_mul(1 << 20);
        let mut seen: HashSet<Code> = HashSet::from([identity.clone()]);
        let mut frontier = vec![identity];
        let mut depth = 0usize;
        while !frontier.is_empty() {
            let candidates: Vec<Code> = frontier
                .par_iter()
                .flat_map_iter(|c| {
                    let m = ModMatrix::decode(c, dim, modulus).expect("codes produced by encode");
                    steps.iter().map(move |s| m.mul_unchecked(s).encode()).collect::<Vec<_>>()
                })
                .collect();
            let mut next = Vec::new();
            for c in candidates {
                if !seen.contains(&c) {
                    seen.insert(c.clone());
                    next.push(c);
                }
            }
            depth += 1;
            if (seen.len() as u64).saturating_mul(per_element) > cap_bytes {
                return Err(EngineError::MemoryCap { cap_mb: limits.mem_cap_mb, elements: seen.len() });
            }
            debug!("closure depth {depth}: {} elements, frontier {}", seen.len(), next.len());
            frontier = next;
        }
        let mut elements: Vec<Code> = seen.into_iter().collect();
        elements.par_sort_unstable();
        info!("closed {} generators mod {modulus} in dim {dim}: order {}", generators.len(), elements.len());
        Ok(GroupSet { dim, modulus, elements, generators: generators.to_vec() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn codes(&self) -> &[Code] {
        &self.elements
    }

    pub fn generators(&self) -> &[ModMatrix] {
        &self.generators
    }

    pub fn contains(&self, m: &ModMatrix) -> bool {
        m.dim() == self.dim && m.modulus() == self.modulus && self.contains_code(&m.encode())
    }

    pub fn contains_code(&self, c: &Code) -> bool {
        self.elements.binary_search(c).is_ok()
    }

    pub fn decode(&self, c: &Code) -> ModMatrix {
        ModMatrix::decode(c, self.dim, self.modulus).expect("stored codes are valid")
    }

    pub fn element(&self, i: usize) -> ModMatrix {
        self.decode(&self.elements[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = ModMatrix> + '_ {
        self.elements.iter().map(|c| self.decode(c))
    }

    pub fn matrices(&self) -> Vec<ModMatrix> {
        self.elements.par_iter().map(|c| self.decode(c)).collect()
    }

    /// Fixed width in bytes of one element in the cache format.
    pub fn encoded_width(&self) -> usize {
        encoded_width(self.dim, self.modulus)
    }

    fn same_shape(&self, other: &GroupSet) -> Result<(), EngineError> {
        if self.dim != other.dim {
            return Err(EngineError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if self.modulus != other.modulus {
            return Err(EngineError::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    /// Elements satisfying `keep`, as a new set without generators.
    pub fn filter<F>(&self, keep: F) -> GroupSet
    where
        F: Fn(&ModMatrix) -> bool + Sync,
    {
        let elements: Vec<Code> =
            self.elements.par_iter().filter(|c| keep(&self.decode(c))).cloned().collect();
        GroupSet::from_sorted_codes(self.dim, self.modulus, elements, Vec::new())
    }

    /// `{g ∈ G : g ≡ I mod d}`.
    pub fn congruence_kernel(&self, d: u64) -> Result<GroupSet, EngineError> {
        if d == 0 || !self.modulus.is_multiple_of(d) {
            return Err(EngineError::NotADivisor { d, modulus: self.modulus });
        }
        Ok(self.filter(|m| m.is_identity_mod(d)))
    }

    /// The image under reduction to a divisor `d` of the modulus.
    pub fn reduce_to(&self, d: u64) -> Result<GroupSet, EngineError> {
        if d == 0 || !self.modulus.is_multiple_of(d) {
            return Err(EngineError::NotADivisor { d, modulus: self.modulus });
        }
        let codes: Vec<Code> =
            self.elements.par_iter().map(|c| self.decode(c).reduce_to(d).expect("divisor").encode()).collect();
        let gens = self.generators.iter().map(|g| g.reduce_to(d).expect("divisor")).collect();
        let mut out = GroupSet::from_codes(self.dim, d, codes);
        out.generators = gens;
        Ok(out)
    }

    /// `{hk : h ∈ H, k ∈ K}` as a sorted set. Not closed a priori.
    pub fn set_product(&self, other: &GroupSet) -> Result<GroupSet, EngineError> {
        self.same_shape(other)?;
        let ks = other.matrices();
        let codes: Vec<Code> = self
            .elements
            .par_iter()
            .flat_map_iter(|c| {
                let h = self.decode(c);
                ks.iter().map(move |k| h.mul_unchecked(k).encode()).collect::<Vec<_>>()
            })
            .collect();
        Ok(GroupSet::from_codes(self.dim, self.modulus, codes))
    }

    pub fn intersection(&self, other: &GroupSet) -> Result<GroupSet, EngineError> {
        self.same_shape(other)?;
        let elements = self.elements.iter().filter(|c| other.contains_code(c)).cloned().collect();
        Ok(GroupSet::from_sorted_codes(self.dim, self.modulus, elements, Vec::new()))
    }

    pub fn is_subset_of(&self, other: &GroupSet) -> bool {
        self.dim == other.dim && self.modulus == other.modulus && self.elements.iter().all(|c| other.contains_code(c))
    }

    /// Same underlying set (generators ignored).
    pub fn same_elements(&self, other: &GroupSet) -> bool {
        self.dim == other.dim && self.modulus == other.modulus && self.elements == other.elements
    }

    pub fn is_abelian(&self) -> bool {
        let ms = self.matrices();
        ms.par_iter().enumerate().all(|(i, a)| ms[i + 1..].iter().all(|b| a.mul_unchecked(b) == b.mul_unchecked(a)))
    }

    /// `G = H × K` internally: trivial intersection, `|H|·|K| = |G|`, and
    /// every element of `H` commutes with every element of `K`.
    pub fn is_internal_direct_product(&self, h: &GroupSet, k: &GroupSet) -> Result<bool, EngineError> {
        self.same_shape(h)?;
        self.same_shape(k)?;
        if !h.is_subset_of(self) || !k.is_subset_of(self) {
            return Err(EngineError::NotContained);
        }
        if h.order() * k.order() != self.order() || h.intersection(k)?.order() != 1 {
            return Ok(false);
        }
        let km = k.matrices();
        Ok(h.elements.par_iter().all(|c| {
            let a = h.decode(c);
            km.iter().all(|b| a.mul_unchecked(b) == b.mul_unchecked(&a))
        }))
    }

    /// `{g ∈ G : g·v = v}`.
    pub fn stabilizer_subgroup(&self, v: &[u64]) -> Result<GroupSet, EngineError> {
        if v.len() != self.dim {
            return Err(EngineError::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        let v: Vec<u64> = v.iter().map(|x| x % self.modulus).collect();
        Ok(self.filter(|m| m.mul_vec(&v).expect("dimension checked") == v))
    }

    /// Checks that the identity is present and that the set is closed under
    /// products and inverses. Exhaustive when `|G|² ≤ max_pairs`; otherwise
    /// pairs `(i, j)` are taken along a fixed stride through the list.
    pub fn verify_closure(&self, max_pairs: usize) -> bool {
        let n = self.order();
        if !self.contains(&ModMatrix::identity(self.dim, self.modulus)) {
            return false;
        }
        let ms = self.matrices();
        let inverses_ok = ms.par_iter().all(|m| m.inverse().is_some_and(|i| self.contains(&i)));
        if !inverses_ok {
            return false;
        }
        if n.saturating_mul(n) <= max_pairs {
            return ms.par_iter().all(|a| ms.iter().all(|b| self.contains(&a.mul_unchecked(b))));
        }
        let stride = 2 * (n / 3) + 1;
        (0..max_pairs).into_par_iter().all(|t| {
            let i = t % n;
            let j = (t / n + i.wrapping_mul(stride)) % n;
            self.contains(&ms[i].mul_unchecked(&ms[j]))
        })
    }
}

fn estimated_bytes_per_element(sample: &Code) -> u64 {
    // Hash-set slot plus the frontier/candidate copies, plus any heap bytes.
    (std::mem::size_of::<Code>() as u64) * 3 + 16 + 2 * sample.heap_bytes() as u64
}

/// `Sp_{2g}(Z/ℓZ)` for the interleaved standard form, generated by the
/// transvections `x ↦ x + ⟨x, v⟩v` with `v` ranging over the `e_i` and the
/// `e_i + e_j`.
pub fn sp_group(g: usize, modulus: u64) -> Result<GroupSet, EngineError> {
    sp_group_with(g, modulus, &CloseLimits::default())
}

pub fn sp_group_with(g: usize, modulus: u64, limits: &CloseLimits) -> Result<GroupSet, EngineError> {
    if g == 0 || modulus < 2 {
        return Err(EngineError::BadSymplecticParams { g, modulus });
    }
    GroupSet::close_with(&symplectic_transvections(g, modulus), limits)
}

/// The transvection generators used by [`sp_group`].
pub fn symplectic_transvections(g: usize, modulus: u64) -> Vec<ModMatrix> {
    let d = 2 * g;
    let j = FormSpec::standard(d);
    let mut vectors: Vec<Vec<i64>> = Vec::new();
    for i in 0..d {
        let mut v = vec![0; d];
        v[i] = 1;
        vectors.push(v);
    }
    for a in 0..d {
        for b in a + 1..d {
            let mut v = vec![0; d];
            v[a] = 1;
            v[b] = 1;
            vectors.push(v);
        }
    }
    vectors
        .iter()
        .map(|v| {
            // T = I + v (Jv)ᵀ, since ⟨x, v⟩ = xᵀ J v.
            let jv: Vec<i64> =
                (0..d).map(|r| (0..d).map(|c| i64::try_from(&j[(r, c)]).expect("small") * v[c]).sum()).collect();
            let rows: Vec<Vec<i64>> =
                (0..d).map(|r| (0..d).map(|c| i64::from(r == c) + v[r] * jv[c]).collect()).collect();
            ModMatrix::from_rows(modulus, &rows).expect("square")
        })
        .collect()
}
