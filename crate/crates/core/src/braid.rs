//! Braid words and the integral Burau representation (`t = -1`) together
//! with its reduced form on the kernel of the alternating dual vector.

use std::fmt;

use thiserror::Error;

use crate::matrix::IntMatrix;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BraidError {
    #[error("a braid group needs at least 2 strands, got {0}")]
    TooFewStrands(usize),
    #[error("the reduced representation needs at least 3 strands, got {0}")]
    ReducedTooSmall(usize),
    #[error("generator index {index} out of range for {strands} strands")]
    IndexOutOfRange { index: i64, strands: usize },
    #[error("cannot parse braid letter {0:?}")]
    BadToken(String),
}

/// A word in the Artin generators on `strands` strands.
///
/// Letter `k > 0` stands for `σ_k`, letter `k < 0` for `σ_{|k|}⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i64>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i64>) -> Result<Self, BraidError> {
        if strands < 2 {
            return Err(BraidError::TooFewStrands(strands));
        }
        for &k in &letters {
            check_index(strands, k)?;
        }
        Ok(BraidWord { strands, letters })
    }

    /// The empty word.
    pub fn identity(strands: usize) -> Result<Self, BraidError> {
        Self::new(strands, Vec::new())
    }

    /// Parses whitespace-separated signed generator indices, e.g. `"1 2 -1"`.
    pub fn parse(text: &str, strands: usize) -> Result<Self, BraidError> {
        if strands < 2 {
            return Err(BraidError::TooFewStrands(strands));
        }
        let letters = text
            .split_whitespace()
            .map(|tok| tok.parse::<i64>().map_err(|_| BraidError::BadToken(tok.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(strands, letters)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i64] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        assert_eq!(self.strands, other.strands, "concatenating words on different strand counts");
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord { strands: self.strands, letters }
    }

    /// The inverse braid: letters reversed and negated.
    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|k| -k).collect(),
        }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|k| k.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

fn check_index(strands: usize, i: i64) -> Result<(), BraidError> {
    if i == 0 || i.unsigned_abs() as usize >= strands {
        return Err(BraidError::IndexOutOfRange { index: i, strands });
    }
    Ok(())
}

/// `ρ(σ_i)` for `i > 0`, its exact inverse for `i < 0`.
pub fn burau_sigma(n: usize, i: i64) -> Result<IntMatrix, BraidError> {
    if n < 2 {
        return Err(BraidError::TooFewStrands(n));
    }
    check_index(n, i)?;
    let k = i.unsigned_abs() as usize - 1;
    let mut m = IntMatrix::identity(n);
    let block: [[i64; 2]; 2] = if i > 0 { [[2, -1], [1, 0]] } else { [[0, 1], [-1, 2]] };
    for (r, row) in block.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            m[(k + r, k + c)] = v.into();
        }
    }
    Ok(m)
}

/// `ρ̄(σ_i)` in the `c`-basis of the kernel of `w_nᵀ`.
pub fn reduced_burau_sigma(n: usize, i: i64) -> Result<IntMatrix, BraidError> {
    if n < 3 {
        return Err(BraidError::ReducedTooSmall(n));
    }
    check_index(n, i)?;
    let positive = reduced_positive(n, i.unsigned_abs() as usize);
    if i > 0 {
        Ok(positive)
    } else {
        Ok(positive.inverse().expect("reduced generators are unimodular"))
    }
}

fn reduced_positive(n: usize, i: usize) -> IntMatrix {
    // Identity except row i-1, which reads (.., -1, 1, 1, ..) around the
    // diagonal, truncated at the matrix boundary.
    let mut m = IntMatrix::identity(n - 1);
    let r = i - 1;
    if i >= 2 {
        m[(r, r - 1)] = (-1).into();
    }
    if i + 1 < n {
        m[(r, r + 1)] = 1.into();
    }
    m
}

/// Generator matrices and their inverses for one strand count, built once
/// and reused across every letter of a word.
#[derive(Clone, Debug)]
pub struct GeneratorTable {
    strands: usize,
    positive: Vec<IntMatrix>,
    negative: Vec<IntMatrix>,
}

impl GeneratorTable {
    pub fn burau(n: usize) -> Result<Self, BraidError> {
        if n < 2 {
            return Err(BraidError::TooFewStrands(n));
        }
        let positive: Vec<IntMatrix> = (1..n as i64).map(|i| burau_sigma(n, i)).collect::<Result<_, _>>()?;
        let negative = positive.iter().map(|m| m.inverse().expect("Burau generators are unimodular")).collect();
        Ok(GeneratorTable { strands: n, positive, negative })
    }

    pub fn reduced(n: usize) -> Result<Self, BraidError> {
        if n < 3 {
            return Err(BraidError::ReducedTooSmall(n));
        }
        let positive: Vec<IntMatrix> = (1..n).map(|i| reduced_positive(n, i)).collect();
        let negative = positive.iter().map(|m| m.inverse().expect("reduced generators are unimodular")).collect();
        Ok(GeneratorTable { strands: n, positive, negative })
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    /// Matrix of a single letter.
    pub fn letter(&self, k: i64) -> &IntMatrix {
        let idx = k.unsigned_abs() as usize - 1;
        if k > 0 {
            &self.positive[idx]
        } else {
            &self.negative[idx]
        }
    }

    pub fn positive(&self) -> &[IntMatrix] {
        &self.positive
    }

    /// Left-to-right product of the letters of `w`.
    pub fn evaluate(&self, w: &BraidWord) -> IntMatrix {
        assert_eq!(w.strands(), self.strands, "word and table strand counts differ");
        let dim = self.positive[0].dim();
        w.letters().iter().fold(IntMatrix::identity(dim), |acc, &k| &acc * self.letter(k))
    }
}

/// The integral Burau matrix `ρ(w)`.
pub fn burau(w: &BraidWord) -> IntMatrix {
    GeneratorTable::burau(w.strands()).expect("word validated on construction").evaluate(w)
}

/// The reduced integral Burau matrix `ρ̄(w)`; needs `n ≥ 3`.
pub fn reduced_burau(w: &BraidWord) -> Result<IntMatrix, BraidError> {
    Ok(GeneratorTable::reduced(w.strands())?.evaluate(w))
}
