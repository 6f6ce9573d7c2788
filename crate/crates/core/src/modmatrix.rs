//! Square matrices over `Z/ℓZ` and their canonical packed encoding.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::engine::EngineError;
use crate::matrix::IntMatrix;
use crate::perm::Permutation;

/// A `dim × dim` matrix with entries in `[0, ℓ)`, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    dim: usize,
    modulus: u64,
    entries: Vec<u64>,
}

impl ModMatrix {
    pub fn new(dim: usize, modulus: u64, entries: Vec<u64>) -> Result<Self, EngineError> {
        if modulus == 0 {
            return Err(EngineError::ZeroModulus);
        }
        if entries.len() != dim * dim {
            return Err(EngineError::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        let entries = entries.into_iter().map(|x| x % modulus).collect();
        Ok(ModMatrix { dim, modulus, entries })
    }

    pub fn from_rows(modulus: u64, rows: &[Vec<i64>]) -> Result<Self, EngineError> {
        let m = IntMatrix::from_rows(rows).map_err(|e| EngineError::Matrix(e.to_string()))?;
        reduce(&m, modulus)
    }

    pub fn identity(dim: usize, modulus: u64) -> Self {
        let mut entries = vec![0; dim * dim];
        if modulus > 1 {
            for i in 0..dim {
                entries[i * dim + i] = 1;
            }
        }
        ModMatrix { dim, modulus, entries }
    }

    /// The matrix sending `e_j` to `e_{π(j)}`.
    pub fn from_permutation(p: &Permutation, modulus: u64) -> Self {
        let n = p.degree();
        let mut m = ModMatrix { dim: n, modulus, entries: vec![0; n * n] };
        if modulus > 1 {
            for j in 0..n {
                m.entries[p.apply(j) * n + j] = 1;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.dim + j]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim, self.modulus)
    }

    fn check_compatible(&self, other: &ModMatrix) -> Result<(), EngineError> {
        if self.dim != other.dim {
            return Err(EngineError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if self.modulus != other.modulus {
            return Err(EngineError::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    pub fn mul(&self, other: &ModMatrix) -> Result<ModMatrix, EngineError> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &ModMatrix) -> ModMatrix {
        let n = self.dim;
        let l = self.modulus as u128;
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            let row = &self.entries[i * n..(i + 1) * n];
            for j in 0..n {
                let mut acc: u128 = 0;
                for (k, &a) in row.iter().enumerate() {
                    acc += a as u128 * other.entries[k * n + j] as u128;
                }
                out[i * n + j] = (acc % l) as u64;
            }
        }
        ModMatrix { dim: n, modulus: self.modulus, entries: out }
    }

    pub fn mul_vec(&self, v: &[u64]) -> Result<Vec<u64>, EngineError> {
        if v.len() != self.dim {
            return Err(EngineError::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        let l = self.modulus as u128;
        Ok((0..self.dim)
            .map(|i| {
                let acc: u128 = (0..self.dim).map(|k| self.get(i, k) as u128 * (v[k] % self.modulus) as u128).sum();
                (acc % l) as u64
            })
            .collect())
    }

    /// Inverse over `Z/ℓZ` by Gauss–Jordan with Euclidean pivoting, so that
    /// composite moduli are handled without factoring. `None` when singular.
    pub fn inverse(&self) -> Option<ModMatrix> {
        let n = self.dim;
        let l = self.modulus as i128;
        if self.modulus == 1 {
            return Some(self.clone());
        }
        let mut a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j) as i128).collect()).collect();
        let mut b: Vec<Vec<i128>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { 1 } else { 0 }).collect()).collect();
        let sub = |rows: &mut Vec<Vec<i128>>, dst: usize, src: usize, q: i128| {
            for j in 0..n {
                rows[dst][j] = (rows[dst][j] - q * rows[src][j]).rem_euclid(l);
            }
        };
        for col in 0..n {
            // Euclid among rows col.. until one row holds the gcd.
            loop {
                let nz: Vec<usize> = (col..n).filter(|&r| a[r][col] != 0).collect();
                if nz.is_empty() {
                    return None;
                }
                let p = *nz.iter().min_by_key(|&&r| a[r][col]).expect("nonempty");
                a.swap(col, p);
                b.swap(col, p);
                let mut reduced = true;
                for r in col + 1..n {
                    if a[r][col] != 0 {
                        let q = a[r][col] / a[col][col];
                        sub(&mut a, r, col, q);
                        sub(&mut b, r, col, q);
                        if a[r][col] != 0 {
                            reduced = false;
                        }
                    }
                }
                if reduced {
                    break;
                }
            }
            let inv = mod_inverse(a[col][col] as u64, self.modulus)? as i128;
            for j in 0..n {
                a[col][j] = (a[col][j] * inv).rem_euclid(l);
                b[col][j] = (b[col][j] * inv).rem_euclid(l);
            }
            for r in 0..n {
                if r != col && a[r][col] != 0 {
                    let q = a[r][col];
                    sub(&mut a, r, col, q);
                    sub(&mut b, r, col, q);
                }
            }
        }
        let entries = b.into_iter().flatten().map(|x| x as u64).collect();
        Some(ModMatrix { dim: n, modulus: self.modulus, entries })
    }

    /// Reduction to a divisor `d` of the modulus.
    pub fn reduce_to(&self, d: u64) -> Result<ModMatrix, EngineError> {
        if d == 0 || !self.modulus.is_multiple_of(d) {
            return Err(EngineError::NotADivisor { d, modulus: self.modulus });
        }
        Ok(ModMatrix { dim: self.dim, modulus: d, entries: self.entries.iter().map(|x| x % d).collect() })
    }

    /// `true` iff `self ≡ I (mod d)` for a divisor `d` of the modulus.
    pub fn is_identity_mod(&self, d: u64) -> bool {
        let n = self.dim;
        d == 1
            || self.entries.iter().enumerate().all(|(k, &x)| {
                let want = if k / n == k % n { 1 % d } else { 0 };
                x % d == want
            })
    }

    /// Least nonnegative representatives as an integer matrix.
    pub fn to_int_matrix(&self) -> IntMatrix {
        let rows: Vec<Vec<u64>> = self.entries.chunks(self.dim.max(1)).map(|r| r.to_vec()).collect();
        if self.dim == 0 {
            return IntMatrix::identity(0);
        }
        IntMatrix::from_rows(&rows).expect("square by construction")
    }

    pub fn encode(&self) -> Code {
        let bits = bits_per_entry(self.modulus);
        let total = self.dim * self.dim * bits as usize;
        if total <= 64 {
            let mut w = 0u64;
            for (k, &x) in self.entries.iter().enumerate() {
                w |= x << (k * bits as usize);
            }
            Code::Word(w)
        } else {
            let mut bytes = vec![0u8; total.div_ceil(8)];
            for (k, &x) in self.entries.iter().enumerate() {
                let base = k * bits as usize;
                for b in 0..bits as usize {
                    if (x >> b) & 1 == 1 {
                        let pos = base + b;
                        bytes[pos / 8] |= 1 << (pos % 8);
                    }
                }
            }
            Code::Wide(bytes.into_boxed_slice())
        }
    }

    pub fn decode(code: &Code, dim: usize, modulus: u64) -> Result<ModMatrix, EngineError> {
        let bits = bits_per_entry(modulus) as usize;
        let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        let count = dim * dim;
        let entries: Vec<u64> = match code {
            Code::Word(w) => {
                if count * bits > 64 {
                    return Err(EngineError::BadEncoding);
                }
                (0..count).map(|k| if bits == 0 { 0 } else { (w >> (k * bits)) & mask }).collect()
            }
            Code::Wide(bytes) => {
                if bytes.len() != (count * bits).div_ceil(8) || count * bits <= 64 {
                    return Err(EngineError::BadEncoding);
                }
                (0..count)
                    .map(|k| {
                        let mut x = 0u64;
                        for b in 0..bits {
                            let pos = k * bits + b;
                            x |= (((bytes[pos / 8] >> (pos % 8)) & 1) as u64) << b;
                        }
                        x
                    })
                    .collect()
            }
        };
        if entries.iter().any(|&x| x >= modulus) {
            return Err(EngineError::BadEncoding);
        }
        Ok(ModMatrix { dim, modulus, entries })
    }
}

impl fmt::Debug for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[u64]> = self.entries.chunks(self.dim.max(1)).collect();
        write!(f, "{rows:?} mod {}", self.modulus)
    }
}

/// `a⁻¹ mod m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Entrywise least nonnegative residues; `ℓ = 1` gives the all-zero matrix.
pub fn reduce(m: &IntMatrix, modulus: u64) -> Result<ModMatrix, EngineError> {
    if modulus == 0 {
        return Err(EngineError::ZeroModulus);
    }
    let l = BigInt::from(modulus);
    let entries = m
        .entries()
        .iter()
        .map(|x| x.mod_floor(&l).to_u64().expect("residue below modulus"))
        .collect();
    Ok(ModMatrix { dim: m.dim(), modulus, entries })
}

/// Bit length of `ℓ - 1`.
pub fn bits_per_entry(modulus: u64) -> u32 {
    64 - (modulus - 1).leading_zeros()
}

/// Number of bytes one encoding occupies in the fixed-width cache format.
pub fn encoded_width(dim: usize, modulus: u64) -> usize {
    (dim * dim * bits_per_entry(modulus) as usize).div_ceil(8)
}

/// Canonical packed form of a [`ModMatrix`]: entries row-major, each in
/// `bits_per_entry(ℓ)` bits, least significant first. Small matrices fit in
/// one machine word. Ordering is numeric on the packed little-endian value.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Code {
    Word(u64),
    Wide(Box<[u8]>),
}

impl Code {
    /// Fixed-width little-endian bytes of length `width`.
    pub fn to_bytes(&self, width: usize) -> Vec<u8> {
        match self {
            Code::Word(w) => w.to_le_bytes()[..width.min(8)].iter().copied().chain(std::iter::repeat(0)).take(width).collect(),
            Code::Wide(b) => b.to_vec(),
        }
    }

    pub fn from_bytes(bytes: &[u8], dim: usize, modulus: u64) -> Code {
        if dim * dim * bits_per_entry(modulus) as usize <= 64 {
            let mut buf = [0u8; 8];
            buf[..bytes.len()].copy_from_slice(bytes);
            Code::Word(u64::from_le_bytes(buf))
        } else {
            Code::Wide(bytes.to_vec().into_boxed_slice())
        }
    }

    pub(crate) fn heap_bytes(&self) -> usize {
        match self {
            Code::Word(_) => 0,
            Code::Wide(b) => b.len(),
        }
    }
}

impl Ord for Code {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Code::Word(a), Code::Word(b)) => a.cmp(b),
            (Code::Wide(a), Code::Wide(b)) => a.len().cmp(&b.len()).then_with(|| a.iter().rev().cmp(b.iter().rev())),
            (Code::Word(_), Code::Wide(_)) => Ordering::Less,
            (Code::Wide(_), Code::Word(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Code {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Code::Word(w) => write!(f, "Word({w:#x})"),
            Code::Wide(b) => write!(f, "Wide({b:02x?})"),
        }
    }
}

/// The `ModMatrix` is a permutation matrix mod 2: exactly one 1 per row and
/// column.
pub fn permutation_image(m: &ModMatrix) -> Result<Option<Permutation>, EngineError> {
    if m.modulus() != 2 {
        return Err(EngineError::WrongModulus { expected: 2, found: m.modulus() });
    }
    let n = m.dim();
    let mut images = Vec::with_capacity(n);
    for j in 0..n {
        let ones: Vec<usize> = (0..n).filter(|&i| m.get(i, j) == 1).collect();
        if ones.len() != 1 {
            return Ok(None);
        }
        images.push(ones[0]);
    }
    Ok(Permutation::from_images(images).ok())
}
