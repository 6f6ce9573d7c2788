//! Permutations of `{1, …, n}` and their permutation matrices.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("{0:?} is not a bijection of 1..=n")]
    NotBijective(Vec<usize>),
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("cannot compose permutations of degree {0} and {1}")]
    DegreeMismatch(usize, usize),
}

/// A bijection of `{1, …, n}`; stored 0-based, displayed 1-based.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// From 0-based images: `i ↦ images[i]`.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(PermError::NotBijective(images.iter().map(|x| x + 1).collect()));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// From 1-based images, as written in one-line notation.
    pub fn from_one_based(images: &[usize]) -> Result<Self, PermError> {
        if images.contains(&0) {
            return Err(PermError::NotBijective(images.to_vec()));
        }
        Self::from_images(images.iter().map(|x| x - 1).collect())
    }

    /// The cycle `(p_1 p_2 … p_r)` on `n` points, 1-based.
    pub fn cycle(n: usize, points: &[usize]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..n).collect();
        for (k, &p) in points.iter().enumerate() {
            if p == 0 || p > n {
                return Err(PermError::PointOutOfRange { point: p, degree: n });
            }
            let next = points[(k + 1) % points.len()];
            images[p - 1] = next - 1;
        }
        Self::from_images(images)
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self, PermError> {
        Self::cycle(n, &[a, b])
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// 0-based image of the 0-based point `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `(self ∘ other)(x) = self(other(x))`, matching the product of the
    /// corresponding permutation matrices.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(Permutation { images: other.images.iter().map(|&x| self.images[x]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Disjoint cycles of length at least two, 1-based.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cyc.push(x + 1);
                x = self.images[x];
            }
            out.push(cyc);
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{self}")
    }
}

/// All elements of the permutation group generated by `gens`, by BFS.
pub fn generate(degree: usize, gens: &[Permutation]) -> Result<BTreeSet<Permutation>, PermError> {
    let id = Permutation::identity(degree);
    let mut seen = BTreeSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = p.compose(g)?;
            if seen.insert(q.clone()) {
                queue.push_back(q);
            }
        }
    }
    Ok(seen)
}

/// `n!` as a `u64`; panics past `20!`.
pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}
