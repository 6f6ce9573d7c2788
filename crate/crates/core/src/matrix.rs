//! Square matrices with arbitrary-precision integer entries.
//!
//! Burau images grow exponentially in word length, so every integral
//! computation in the crate goes through [`IntMatrix`]. The JSON form
//! `{"dim": n, "entries": [["1","0"],["0","1"]]}` writes entries as decimal
//! strings so that no precision is lost on the way through other tools.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square: row {row} has {len} entries, expected {dim}")]
    NotSquare { row: usize, len: usize, dim: usize },
    #[error("invalid matrix entry {0:?}")]
    BadEntry(String),
    #[error("malformed matrix JSON: {0}")]
    Json(String),
}

/// Dense square matrix over the integers, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(dim: usize) -> Self {
        IntMatrix {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers.
    pub fn from_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Result<Self, MatrixError> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(MatrixError::NotSquare { row, len: r.len(), dim });
            }
            entries.extend(r.iter().map(|&x| x.into()));
        }
        Ok(IntMatrix { dim, entries })
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self, MatrixError> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != dim {
                return Err(MatrixError::NotSquare { row, len: r.len(), dim });
            }
            entries.extend(r);
        }
        Ok(IntMatrix { dim, entries })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<BigInt>]) -> Result<Self, MatrixError> {
        let dim = cols.len();
        let mut m = Self::zero(dim);
        for (j, c) in cols.iter().enumerate() {
            if c.len() != dim {
                return Err(MatrixError::DimensionMismatch { expected: dim, found: c.len() });
            }
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.dim).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(k, x)| {
            if k / self.dim == k % self.dim {
                x.is_one()
            } else {
                x.is_zero()
            }
        })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.dim != rhs.dim {
            return Err(MatrixError::DimensionMismatch { expected: self.dim, found: rhs.dim });
        }
        let n = self.dim;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, MatrixError> {
        if v.len() != self.dim {
            return Err(MatrixError::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        Ok((0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Row vector times matrix, `vᵀ·M`.
    pub fn vec_mul(&self, v: &[BigInt]) -> Result<Vec<BigInt>, MatrixError> {
        if v.len() != self.dim {
            return Err(MatrixError::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        Ok((0..self.dim)
            .map(|j| (0..self.dim).map(|i| &v[i] * &self[(i, j)]).sum())
            .collect())
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        let n = self.dim;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    /// Exact inverse over the integers; `None` unless the matrix is unimodular.
    ///
    /// Uses Euclidean row reduction on `[M | I]`, so no rationals appear.
    pub fn inverse(&self) -> Option<IntMatrix> {
        let n = self.dim;
        let mut a = self.rows();
        let mut b = Self::identity(n).rows();
        for col in 0..n {
            // Euclid on column entries at or below the pivot row.
            loop {
                let nonzero: Vec<usize> = (col..n).filter(|&r| !a[r][col].is_zero()).collect();
                if nonzero.is_empty() {
                    return None;
                }
                let pivot = *nonzero.iter().min_by_key(|&&r| a[r][col].magnitude().clone())?;
                a.swap(col, pivot);
                b.swap(col, pivot);
                let mut done = true;
                for r in col + 1..n {
                    if a[r][col].is_zero() {
                        continue;
                    }
                    let q = a[r][col].div_floor(&a[col][col]);
                    for j in 0..n {
                        let t = &q * &a[col][j];
                        a[r][j] -= t;
                        let t = &q * &b[col][j];
                        b[r][j] -= t;
                    }
                    if !a[r][col].is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            let p = a[col][col].clone();
            if p.abs() != BigInt::one() {
                return None;
            }
            if p.is_negative() {
                for j in 0..n {
                    a[col][j] = -a[col][j].clone();
                    b[col][j] = -b[col][j].clone();
                }
            }
        }
        // Back substitution with unit diagonal.
        for col in (0..n).rev() {
            for r in 0..col {
                let q = a[r][col].clone();
                if q.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = &q * &a[col][j];
                    a[r][j] -= t;
                    let t = &q * &b[col][j];
                    b[r][j] -= t;
                }
            }
        }
        IntMatrix::from_big_rows(b).ok()
    }

    /// `true` iff every entry of `self - I` is divisible by `modulus`.
    pub fn is_identity_mod(&self, modulus: &BigInt) -> bool {
        if modulus.is_one() {
            return true;
        }
        self.entries.iter().enumerate().all(|(k, x)| {
            let d = if k / self.dim == k % self.dim { x - 1 } else { x.clone() };
            d.mod_floor(modulus).is_zero()
        })
    }

    /// Largest absolute value among the entries.
    pub fn max_abs(&self) -> BigInt {
        self.entries.iter().map(|x| x.abs()).max().unwrap_or_default()
    }

    /// Conjugate `P⁻¹·self·P`; `p_inv` must be the inverse of `p`.
    pub fn conjugate_by(&self, p: &IntMatrix, p_inv: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        p_inv.checked_mul(self)?.checked_mul(p)
    }

    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = (0..self.dim)
            .map(|i| Value::Array(self.row(i).iter().map(|x| Value::String(x.to_string())).collect()))
            .collect();
        serde_json::json!({ "dim": self.dim, "entries": rows })
    }

    /// Parses the matrix JSON format. Entries may be decimal strings or JSON
    /// integers.
    pub fn from_json_value(v: &Value) -> Result<IntMatrix, MatrixError> {
        let obj = v.as_object().ok_or_else(|| MatrixError::Json("expected an object".into()))?;
        let rows = obj
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| MatrixError::Json("missing \"entries\" array".into()))?;
        let mut parsed = Vec::with_capacity(rows.len());
        for row in rows {
            let row = row.as_array().ok_or_else(|| MatrixError::Json("row is not an array".into()))?;
            let mut out = Vec::with_capacity(row.len());
            for e in row {
                let x = match e {
                    Value::String(s) => s.trim().parse::<BigInt>().map_err(|_| MatrixError::BadEntry(s.clone()))?,
                    Value::Number(n) if n.is_i64() || n.is_u64() => {
                        n.to_string().parse::<BigInt>().map_err(|_| MatrixError::BadEntry(n.to_string()))?
                    }
                    other => return Err(MatrixError::BadEntry(other.to_string())),
                };
                out.push(x);
            }
            parsed.push(out);
        }
        let m = IntMatrix::from_big_rows(parsed)?;
        if let Some(d) = obj.get("dim") {
            let d = d.as_u64().ok_or_else(|| MatrixError::Json("\"dim\" is not an integer".into()))?;
            if d as usize != m.dim {
                return Err(MatrixError::DimensionMismatch { expected: d as usize, found: m.dim });
            }
        }
        Ok(m)
    }

    pub fn to_json_string(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_str(s: &str) -> Result<IntMatrix, MatrixError> {
        let v: Value = serde_json::from_str(s).map_err(|e| MatrixError::Json(e.to_string()))?;
        Self::from_json_value(&v)
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.dim + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    /// Panics on dimension mismatch; use [`IntMatrix::checked_mul`] otherwise.
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_mul(rhs).expect("matrix dimensions differ")
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.dim).map(|i| self.row(i).to_vec())).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        IntMatrix::from_json_value(&v).map_err(D::Error::custom)
    }
}

/// Converts a slice of machine integers into a big-integer vector.
pub fn big_vec<T: Into<BigInt> + Copy>(v: &[T]) -> Vec<BigInt> {
    v.iter().map(|&x| x.into()).collect()
}

/// Balanced representative of `x` mod `m`, in `(-m/2, m/2]`.
pub fn balanced(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}
