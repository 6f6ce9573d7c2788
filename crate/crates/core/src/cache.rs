//! On-disk cache of enumerated groups.
//!
//! File layout, all integers little-endian: the magic `BURAUGRP1`, `u32`
//! dimension, `u64` modulus, `u8` family tag, `u64` element count, then the
//! fixed-width canonical encodings in ascending order.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use log::{debug, warn};

use crate::engine::GroupSet;
use crate::modmatrix::{encoded_width, Code};

pub const MAGIC: &[u8; 9] = b"BURAUGRP1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyTag {
    Burau = 0,
    Reduced = 1,
    Symplectic = 2,
}

impl FamilyTag {
    fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(FamilyTag::Burau),
            1 => Some(FamilyTag::Reduced),
            2 => Some(FamilyTag::Symplectic),
            _ => None,
        }
    }

    fn stem(self) -> &'static str {
        match self {
            FamilyTag::Burau => "burau",
            FamilyTag::Reduced => "reduced",
            FamilyTag::Symplectic => "sp",
        }
    }
}

pub fn write_group<W: Write>(mut out: W, group: &GroupSet, tag: FamilyTag) -> io::Result<()> {
    let width = group.encoded_width();
    out.write_all(MAGIC)?;
    out.write_all(&(group.dim() as u32).to_le_bytes())?;
    out.write_all(&group.modulus().to_le_bytes())?;
    out.write_all(&[tag as u8])?;
    out.write_all(&(group.order() as u64).to_le_bytes())?;
    for c in group.codes() {
        out.write_all(&c.to_bytes(width))?;
    }
    out.flush()
}

/// Parses a cache file; `InvalidData` on any structural problem, including
/// elements out of order.
pub fn read_group<R: Read>(mut input: R) -> io::Result<(GroupSet, FamilyTag)> {
    let bad = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
    let mut magic = [0u8; 9];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("bad magic"));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    let mut b1 = [0u8; 1];
    input.read_exact(&mut b4)?;
    let dim = u32::from_le_bytes(b4) as usize;
    input.read_exact(&mut b8)?;
    let modulus = u64::from_le_bytes(b8);
    input.read_exact(&mut b1)?;
    let tag = FamilyTag::from_byte(b1[0]).ok_or_else(|| bad("unknown family tag"))?;
    input.read_exact(&mut b8)?;
    let count = u64::from_le_bytes(b8) as usize;
    if modulus == 0 || dim == 0 || dim > 64 {
        return Err(bad("bad header"));
    }
    let width = encoded_width(dim, modulus);
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() != count.checked_mul(width.max(1)).ok_or_else(|| bad("count overflow"))? && width > 0 {
        return Err(bad("truncated body"));
    }
    let codes: Vec<Code> = if width == 0 {
        vec![Code::Word(0); count.min(1)]
    } else {
        body.chunks(width).map(|ch| Code::from_bytes(ch, dim, modulus)).collect()
    };
    if codes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("elements not strictly ascending"));
    }
    Ok((GroupSet::from_codes(dim, modulus, codes), tag))
}

/// A directory of cached groups keyed by family, size parameter and modulus.
#[derive(Clone, Debug)]
pub struct GroupCache {
    dir: PathBuf,
}

impl GroupCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        GroupCache { dir: dir.into() }
    }

    /// `BURAU_CACHE`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os("BURAU_CACHE").map(GroupCache::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// `burau-n4-l6.grp`, `reduced-n4-l3.grp`, `sp-g2-l3.grp`.
    pub fn path(&self, tag: FamilyTag, size: usize, modulus: u64) -> PathBuf {
        let key = if tag == FamilyTag::Symplectic { 'g' } else { 'n' };
        self.dir.join(format!("{}-{key}{size}-l{modulus}.grp", tag.stem()))
    }

    /// The cached group, or `None` if absent, unreadable or inconsistent.
    pub fn load(&self, tag: FamilyTag, size: usize, dim: usize, modulus: u64) -> Option<GroupSet> {
        let path = self.path(tag, size, modulus);
        let file = fs::File::open(&path).ok()?;
        match read_group(io::BufReader::new(file)) {
            Ok((g, t)) if t == tag && g.dim() == dim && g.modulus() == modulus => {
                debug!("cache hit {}", path.display());
                Some(g)
            }
            Ok(_) => {
                warn!("ignoring mismatched cache file {}", path.display());
                None
            }
            Err(e) => {
                warn!("ignoring unreadable cache file {}: {e}", path.display());
                None
            }
        }
    }

    /// Writes to a temporary file in the cache directory and renames it into
    /// place, so readers never see a partial file.
    pub fn store(&self, tag: FamilyTag, size: usize, group: &GroupSet) -> io::Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(tag, size, group.modulus());
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        write_group(io::BufWriter::new(tmp.as_file_mut()), group, tag)?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        debug!("cached {}", path.display());
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modmatrix::ModMatrix;

    fn sample() -> GroupSet {
        let a = ModMatrix::from_rows(5, &[vec![1, 1], vec![0, 1]]).unwrap();
        let b = ModMatrix::from_rows(5, &[vec![1, 0], vec![4, 1]]).unwrap();
        GroupSet::close(&[a, b]).unwrap()
    }

    #[test]
    fn round_trip_in_memory() {
        let g = sample();
        let mut buf = Vec::new();
        write_group(&mut buf, &g, FamilyTag::Burau).unwrap();
        assert_eq!(&buf[..9], MAGIC);
        assert_eq!(buf.len(), 9 + 4 + 8 + 1 + 8 + g.order() * g.encoded_width());
        let (back, tag) = read_group(&buf[..]).unwrap();
        assert_eq!(tag, FamilyTag::Burau);
        assert!(back.same_elements(&g));
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let g = sample();
        let mut buf = Vec::new();
        write_group(&mut buf, &g, FamilyTag::Reduced).unwrap();
        assert!(read_group(&buf[..buf.len() - 1]).is_err());
        let mut swapped = buf.clone();
        let w = g.encoded_width();
        let start = 30;
        let (x, y) = swapped[start..start + 2 * w].split_at_mut(w);
        x.swap_with_slice(y);
        assert!(read_group(&swapped[..]).is_err());
        buf[0] = b'X';
        assert!(read_group(&buf[..]).is_err());
    }

    #[test]
    fn directory_store_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let cache = GroupCache::new(dir.path());
        let g = sample();
        let path = cache.store(FamilyTag::Burau, 3, &g).unwrap();
        assert!(path.ends_with("burau-n3-l5.grp"));
        assert!(cache.load(FamilyTag::Burau, 3, 2, 5).unwrap().same_elements(&g));
        assert!(cache.load(FamilyTag::Reduced, 3, 2, 5).is_none());
        fs::write(&path, b"garbage").unwrap();
        assert!(cache.load(FamilyTag::Burau, 3, 2, 5).is_none());
    }
}
