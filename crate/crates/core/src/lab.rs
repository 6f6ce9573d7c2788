//! Finite-level checks of the structure theorems for Burau quotients.
//!
//! Every statement about the infinite groups `B_n[ℓ]` and `Γ_{n−1}[ℓ]` is
//! checked through its shadow in a finite quotient `GL_n(Z/LZ)`, where the
//! relevant subgroups become congruence kernels of an enumerated group.

use log::{info, warn};
use num_bigint::BigUint;
use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::braid::{BraidError, GeneratorTable};
use crate::cache::{FamilyTag, GroupCache};
use crate::engine::{sp_group_with, CloseLimits, EngineError, GroupSet};
use crate::lifting::{gamma_lift, LiftError};
use crate::matrix::IntMatrix;
use crate::modmatrix::{permutation_image, reduce, ModMatrix};
use crate::orders::{
    gamma_quotient_order, predicted_braid_quotient_order, predicted_reduced_quotient_order, LevelFactorization,
};
use crate::perm::{factorial, Permutation};
use crate::presentation::{find_presentation_section, find_section_with, PermutationTable, SearchOptions, SnPresentation};
use crate::report::{ReportBuilder, VerificationReport};
use crate::symplectic::{in_gamma, stabilizer_frame, to_symplectic_coords, SubgroupSpec};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{0}")]
    Skipped(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

/// Desk-scale sizes: `n ≤ 5` with modulus `≤ 6`, `n ≤ 4` with modulus
/// `≤ 12`, `n ≤ 6` with modulus 2.
pub fn within_envelope(n: usize, modulus: u64) -> bool {
    (n <= 5 && modulus <= 6) || (n <= 4 && modulus <= 12) || (n <= 6 && modulus == 2)
}

fn variant(reduced: bool) -> &'static str {
    if reduced {
        "reduced"
    } else {
        "unreduced"
    }
}

fn predicted_order(n: usize, level: u64, reduced: bool) -> BigUint {
    if reduced {
        predicted_reduced_quotient_order(n as u32, level)
    } else {
        predicted_braid_quotient_order(n as u32, level)
    }
}

fn big(x: usize) -> String {
    x.to_string()
}

enum Settle {
    Check,
    Finding,
}

fn settle(mut b: ReportBuilder, body: impl FnOnce(&mut ReportBuilder) -> Result<Settle, LabError>) -> Result<VerificationReport, LabError> {
    match body(&mut b) {
        Ok(Settle::Check) => Ok(b.finish()),
        Ok(Settle::Finding) => Ok(b.finding()),
        Err(LabError::Skipped(reason)) => Ok(b.skipped(reason)),
        Err(LabError::Engine(EngineError::SearchBudget(nodes))) => {
            Ok(b.skipped(format!("section search exceeded {nodes} nodes")))
        }
        Err(e) => Err(e),
    }
}

/// One clause of the membership predicate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

/// Answer to a membership query together with the clauses evaluated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    pub clauses: Vec<Clause>,
}

impl Membership {
    pub fn explanation(&self) -> String {
        match self.clauses.iter().find(|c| !c.holds) {
            None => "all clauses hold".to_string(),
            Some(c) => format!("{} fails: {}", c.name, c.detail),
        }
    }
}

/// `M ∈ ρ(B_n[ℓ])`: `M ∈ Γ_{n−1}[ℓ]`, and for odd `ℓ` with `n ≥ 4` also
/// `M mod 2` is a permutation matrix.
pub fn member(m: &IntMatrix, n: usize, level: u64) -> Membership {
    let mut clauses = Vec::new();
    let gamma = if n < 2 || level == 0 {
        Err("need n >= 2 and level >= 1".to_string())
    } else {
        in_gamma(m, &SubgroupSpec::gamma(n - 1, level)).map_err(|e| e.to_string())
    };
    clauses.push(match gamma {
        Ok(holds) => Clause {
            name: "gamma".into(),
            holds,
            detail: if holds {
                format!("preserves the form, fixes v_{n}, and is congruent to I mod {level}")
            } else {
                format!("not in the level-{level} congruence subgroup of Gamma_{}", n - 1)
            },
        },
        Err(e) => Clause { name: "gamma".into(), holds: false, detail: e },
    });
    if level % 2 == 1 && n >= 4 {
        let perm = reduce(m, 2).ok().and_then(|r| permutation_image(&r).ok().flatten());
        clauses.push(Clause {
            name: "mod2_permutation".into(),
            holds: perm.is_some(),
            detail: match perm {
                Some(p) => format!("reduces mod 2 to the permutation {p}"),
                None => "reduction mod 2 is not a permutation matrix".into(),
            },
        });
    }
    Membership { member: clauses.iter().all(|c| c.holds), clauses }
}

/// Enumeration context: cache directory, memory cap and size envelope.
#[derive(Clone, Debug, Default)]
pub struct Lab {
    pub cache: Option<GroupCache>,
    pub limits: CloseLimits,
    pub allow_big: bool,
}

impl Lab {
    /// Cache from `BURAU_CACHE` and memory cap from `BURAU_MEM_CAP_MB`.
    pub fn from_env() -> Self {
        Lab { cache: GroupCache::from_env(), limits: CloseLimits::from_env(), allow_big: false }
    }

    fn check_envelope(&self, n: usize, modulus: u64) -> Result<(), LabError> {
        if self.allow_big || within_envelope(n, modulus) {
            Ok(())
        } else {
            Err(LabError::Skipped(format!(
                "n={n} with modulus {modulus} is outside the default envelope; pass --allow-big"
            )))
        }
    }

    /// `ρ(σ_i) mod L` (or `ρ̄`), `i = 1..n−1`.
    pub fn generators(n: usize, modulus: u64, reduced: bool) -> Result<Vec<ModMatrix>, LabError> {
        if modulus == 0 {
            return Err(LabError::Invalid("modulus must be at least 1".into()));
        }
        let table = if reduced { GeneratorTable::reduced(n)? } else { GeneratorTable::burau(n)? };
        Ok(table.positive().iter().map(|m| reduce(m, modulus)).collect::<Result<_, _>>()?)
    }

    /// The image of `B_n` in `GL(Z/LZ)`, read from or written to the cache.
    pub fn image(&self, n: usize, modulus: u64, reduced: bool) -> Result<GroupSet, LabError> {
        self.check_envelope(n, modulus)?;
        let gens = Self::generators(n, modulus, reduced)?;
        let tag = if reduced { FamilyTag::Reduced } else { FamilyTag::Burau };
        let dim = gens[0].dim();
        if let Some(g) = self.cache.as_ref().and_then(|c| c.load(tag, n, dim, modulus)) {
            return Ok(g);
        }
        let g = self.close(&gens)?;
        info!("image of B_{n} mod {modulus} ({}) has order {}", variant(reduced), g.order());
        self.store(tag, n, &g);
        Ok(g)
    }

    /// `Sp_{2g}(Z/ℓZ)`, cached like the braid images.
    pub fn sp_group(&self, g: usize, modulus: u64) -> Result<GroupSet, LabError> {
        if let Some(s) = self.cache.as_ref().and_then(|c| c.load(FamilyTag::Symplectic, g, 2 * g, modulus)) {
            return Ok(s);
        }
        let s = sp_group_with(g, modulus, &self.limits).map_err(skip_on_cap)?;
        self.store(FamilyTag::Symplectic, g, &s);
        Ok(s)
    }

    fn close(&self, gens: &[ModMatrix]) -> Result<GroupSet, LabError> {
        GroupSet::close_with(gens, &self.limits).map_err(skip_on_cap)
    }

    fn store(&self, tag: FamilyTag, size: usize, g: &GroupSet) {
        if let Some(c) = &self.cache {
            if let Err(e) = c.store(tag, size, g) {
                warn!("could not write cache in {}: {e}", c.dir().display());
            }
        }
    }

    /// `Γ_{n−1}/Γ_{n−1}[ℓ]` in the standard basis, built from the symplectic
    /// group (or the stabilizer of `e_1` in it) by a change of basis.
    pub fn gamma_quotient(&self, n: usize, modulus: u64) -> Result<GroupSet, LabError> {
        if n < 3 || modulus < 2 {
            return Err(LabError::Invalid("need n >= 3 and modulus >= 2".into()));
        }
        let lift = |e: crate::symplectic::SymplecticError| LabError::Invalid(e.to_string());
        let (frame, inner) = if n.is_multiple_of(2) {
            let mut e1 = vec![0; n];
            e1[0] = 1;
            (stabilizer_frame(n).map_err(lift)?, self.sp_group(n / 2, modulus)?.stabilizer_subgroup(&e1)?)
        } else {
            let s = self.sp_group((n - 1) / 2, modulus)?;
            let padded: Vec<ModMatrix> = s.iter().map(|m| pad_with_one(&m)).collect();
            (to_symplectic_coords(n).map_err(lift)?, GroupSet::from_matrices(n, modulus, &padded))
        };
        let inv = frame.inverse().ok_or_else(|| LabError::Invalid("frame is not unimodular".into()))?;
        let (p, p_inv) = (reduce(&frame, modulus)?, reduce(&inv, modulus)?);
        let conj: Vec<ModMatrix> =
            inner.iter().map(|m| p.mul(&m).and_then(|x| x.mul(&p_inv))).collect::<Result<_, _>>()?;
        Ok(GroupSet::from_matrices(n, modulus, &conj))
    }

    /// An integral element of `Γ_{n−1}` whose reduction mod 2 is not a
    /// permutation matrix: the first such residue in `Γ_{n−1}/Γ_{n−1}[2]`,
    /// lifted by [`gamma_lift`].
    pub fn non_permutation_witness(&self, n: usize) -> Result<Option<IntMatrix>, LabError> {
        let q = self.gamma_quotient(n, 2)?;
        for m in q.iter() {
            if permutation_image(&m)?.is_none() {
                return Ok(Some(gamma_lift(&m, n)?));
            }
        }
        Ok(None)
    }

    /// Enumerates the image of `B_n` mod `ℓ` and compares its order with
    /// the closed form.
    pub fn quotient(&self, n: usize, level: u64, reduced: bool) -> Result<VerificationReport, LabError> {
        let b = ReportBuilder::new("order of the image of B_n in GL(Z/l)")
            .param("n", n)
            .param("level", level)
            .param("variant", variant(reduced));
        settle(b, |b| {
            b.fallback_witness(&Self::generators(n, level, reduced)?);
            b.predict("order", predicted_order(n, level, reduced).to_string());
            let g = self.image(n, level, reduced)?;
            b.observe("order", big(g.order()));
            Ok(Settle::Check)
        })
    }

    /// Order of `B_n/B_n[ℓ]`, its splitting as `kernel(m) × kernel(2^k)`
    /// when `ℓ = 2^k m` has both parts nontrivial, and for unreduced `4 | ℓ`
    /// that `B_n[2]/B_n[4]` is elementary abelian of rank `C(n, 2)`.
    pub fn verify_theorem_a(&self, n: usize, level: u64, reduced: bool) -> Result<VerificationReport, LabError> {
        let b = ReportBuilder::new("structure of B_n/B_n[l]")
            .param("n", n)
            .param("level", level)
            .param("variant", variant(reduced));
        settle(b, |b| {
            b.fallback_witness(&Self::generators(n, level, reduced)?);
            b.predict("order", predicted_order(n, level, reduced).to_string());
            let g = self.image(n, level, reduced)?;
            b.observe("order", big(g.order()));

            let f = LevelFactorization::new(level);
            let (two, odd) = (f.two_power(), f.odd_part);
            if two > 1 && odd > 1 {
                let k_odd = g.congruence_kernel(odd)?;
                let k_two = g.congruence_kernel(two)?;
                b.predict("kernel_m_order", predicted_order(n, two, reduced).to_string());
                b.observe("kernel_m_order", big(k_odd.order()));
                b.predict("kernel_2k_order", predicted_order(n, odd, reduced).to_string());
                b.observe("kernel_2k_order", big(k_two.order()));
                b.predict("direct_product", true);
                b.observe("direct_product", g.is_internal_direct_product(&k_odd, &k_two)?);
            }
            if !reduced && level.is_multiple_of(4) {
                let k = g.reduce_to(4)?.congruence_kernel(2)?;
                b.predict("level2_kernel_order", (BigUint::from(2u32).pow((n * (n - 1) / 2) as u32)).to_string());
                b.observe("level2_kernel_order", big(k.order()));
                b.predict("level2_kernel_abelian", true);
                b.observe("level2_kernel_abelian", k.is_abelian());
                b.predict("level2_kernel_exponent_two", true);
                b.observe("level2_kernel_exponent_two", k.iter().all(|x| x.mul(&x).is_ok_and(|y| y.is_identity())));
            }
            Ok(Settle::Check)
        })
    }

    /// The image of `B_n[ℓ]` in `GL_n(Z/2ℓ)`. For odd `ℓ` and `n ≥ 4` it
    /// must map bijectively onto the permutation matrices mod 2; otherwise
    /// it must fill `Γ_{n−1}[ℓ]/Γ_{n−1}[2ℓ]`.
    pub fn verify_theorem_b(&self, n: usize, level: u64) -> Result<VerificationReport, LabError> {
        let b = ReportBuilder::new("image of B_n[l] in GL_n(Z)").param("n", n).param("level", level);
        settle(b, |b| {
            let modulus = 2 * level;
            b.fallback_witness(&Self::generators(n, modulus, false)?);
            let g = self.image(n, modulus, false)?;
            let h = g.congruence_kernel(level)?;
            b.observe("group_order", big(g.order()));
            b.observe("kernel_order", big(h.order()));
            if level % 2 == 1 && n >= 4 {
                b.predict("kernel_order", factorial(n).to_string());
                let mut images = Vec::with_capacity(h.order());
                for x in h.iter() {
                    images.push(permutation_image(&x.reduce_to(2)?)?);
                }
                let all_perms = images.iter().all(Option::is_some);
                images.sort();
                images.dedup();
                let bijective = all_perms && images.len() == h.order() && h.order() as u64 == factorial(n);
                b.predict("bijective_onto_permutations", true);
                b.observe("bijective_onto_permutations", bijective);
            } else {
                let ratio = gamma_quotient_order(n as u32 - 1, modulus) / gamma_quotient_order(n as u32 - 1, level);
                b.predict("kernel_order", ratio.to_string());
            }
            Ok(Settle::Check)
        })
    }

    /// `B_n[ℓ]·B_n[m] = B_n[gcd(ℓ, m)]` and `B_n[ℓ] ∩ B_n[m] = B_n[lcm]`,
    /// checked inside the image mod `lcm(ℓ, m)`.
    pub fn verify_multiplicativity(&self, n: usize, l: u64, m: u64) -> Result<VerificationReport, LabError> {
        let b = ReportBuilder::new("B_n[l] B_n[m] = B_n[gcd(l, m)]").param("n", n).param("l", l).param("m", m);
        settle(b, |b| {
            if l == 0 || m == 0 {
                return Err(LabError::Invalid("levels must be at least 1".into()));
            }
            let lcm = l.lcm(&m);
            b.fallback_witness(&Self::generators(n, lcm, false)?);
            let g = self.image(n, lcm, false)?;
            let (kl, km, kd) = (g.congruence_kernel(l)?, g.congruence_kernel(m)?, g.congruence_kernel(l.gcd(&m))?);
            b.observe("group_order", big(g.order()));
            b.predict("product_equals_gcd_kernel", true);
            b.observe("product_equals_gcd_kernel", kl.set_product(&km)?.same_elements(&kd));
            b.predict("intersection_order", "1");
            b.observe("intersection_order", big(kl.intersection(&km)?.order()));
            Ok(Settle::Check)
        })
    }

    /// Searches for a homomorphic section of `E → S_n`, where `E` is the
    /// image of `B_n` mod `2^k`. For the unreduced representation with
    /// `n ≥ 4` the extension splits exactly when `k = 1`; other cases are
    /// reported as findings.
    pub fn verify_nonsplit(&self, n: usize, k: u32, reduced: bool) -> Result<VerificationReport, LabError> {
        let b = ReportBuilder::new("B_n/B_n[2^k] is a non-split extension of S_n")
            .param("n", n)
            .param("k", k)
            .param("variant", variant(reduced));
        settle(b, |b| {
            if k == 0 || k > 62 {
                return Err(LabError::Invalid("k must be between 1 and 62".into()));
            }
            let modulus = 1u64 << k;
            let gens = Self::generators(n, modulus, reduced)?;
            b.fallback_witness(&gens);
            let presentation = SnPresentation::standard(n);
            presentation.validate()?;
            let e = self.image(n, modulus, reduced)?;
            let section = if reduced {
                let pairs: Vec<(ModMatrix, Permutation)> = gens
                    .iter()
                    .enumerate()
                    .map(|(i, g)| {
                        let t = Permutation::transposition(n, i + 1, i + 2).expect("i + 2 <= n");
                        Ok((g.reduce_to(2)?, t))
                    })
                    .collect::<Result<_, EngineError>>()?;
                let table = PermutationTable::from_generator_images(&pairs)?;
                if table.len() as u64 != factorial(n) {
                    return Err(LabError::Invalid(format!(
                        "reduced image mod 2 has order {}, not {}",
                        table.len(),
                        factorial(n)
                    )));
                }
                find_section_with(&e, &presentation, |g| table.project(g), &SearchOptions::default())?
            } else {
                find_presentation_section(&e, &presentation)?
            };
            let generators: Vec<String> = presentation.generators.iter().map(|p| p.to_string()).collect();
            b.observe("presentation_generators", generators);
            b.observe("group_order", big(e.order()));
            b.observe("fiber_size", big(e.order() / factorial(n) as usize));
            b.observe("split", section.is_some());
            if let Some(w) = &section {
                b.witness(w);
            }
            if reduced || n < 4 {
                return Ok(Settle::Finding);
            }
            b.predict("split", k == 1);
            Ok(Settle::Check)
        })
    }
}

fn skip_on_cap(e: EngineError) -> LabError {
    match e {
        EngineError::MemoryCap { .. } => LabError::Skipped(e.to_string()),
        other => LabError::Engine(other),
    }
}

fn pad_with_one(m: &ModMatrix) -> ModMatrix {
    let d = m.dim();
    let mut entries = vec![0; (d + 1) * (d + 1)];
    for i in 0..d {
        entries[i * (d + 1)..i * (d + 1) + d].copy_from_slice(&m.entries()[i * d..(i + 1) * d]);
    }
    entries[(d + 1) * (d + 1) - 1] = 1 % m.modulus();
    ModMatrix::new(d + 1, m.modulus(), entries).expect("entries reduced")
}
