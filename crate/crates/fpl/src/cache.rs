//! Prime cache files.
//!
//! Layout: the magic `FPL1`, `lo` and `hi` as little-endian `u64`, then the
//! packed bitset of [`SieveTable::words`] as little-endian `u64` words.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fpl_core::arith::SieveTable;

use crate::error::{FplError, Result};

pub const MAGIC: &[u8; 4] = b"FPL1";
pub const ENV_DIR: &str = "FPL_CACHE_DIR";
const HEADER: usize = 20;

/// Cache directory: explicit setting, then `FPL_CACHE_DIR`, then
/// `./.fpl-cache`.
pub fn cache_dir(explicit: Option<&Path>) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(ENV_DIR)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".fpl-cache")),
    }
}

pub fn file_name(lo: u64, hi: u64) -> String {
    format!("primes-{lo}-{hi}.fpl")
}

pub fn encode(table: &SieveTable) -> Vec<u8> {
    let words = table.words();
    let mut out = Vec::with_capacity(HEADER + 8 * words.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&table.lo().to_le_bytes());
    out.extend_from_slice(&table.hi().to_le_bytes());
    for w in words {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<SieveTable> {
    let bad = |m: &str| FplError::Cache {
        path: path.to_path_buf(),
        message: m.to_string(),
    };
    if bytes.len() < HEADER || &bytes[..4] != MAGIC {
        return Err(bad("missing FPL1 header"));
    }
    let lo = u64::from_le_bytes(bytes[4..12].try_into().unwrap());
    let hi = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let body = &bytes[HEADER..];
    if hi <= lo || body.len() as u64 != 8 * (hi - lo).div_ceil(64) {
        return Err(bad("header does not match the bitset length"));
    }
    let words = body
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    SieveTable::from_words(lo, hi, words).map_err(|e| bad(&e.to_string()))
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| FplError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| FplError::io(dir, e))?;
    tmp.write_all(bytes)
        .map_err(|e| FplError::io(tmp.path(), e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| FplError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| FplError::io(path, e.error))?;
    Ok(())
}

pub fn save(dir: &Path, table: &SieveTable) -> Result<PathBuf> {
    let path = dir.join(file_name(table.lo(), table.hi()));
    write_atomic(&path, &encode(table))?;
    Ok(path)
}

pub fn load(path: &Path) -> Result<SieveTable> {
    let bytes = fs::read(path).map_err(|e| FplError::io(path, e))?;
    decode(&bytes, path)
}

/// Cache entries as `(lo, hi, path)`, sorted.
pub fn entries(dir: &Path) -> Vec<(u64, u64, PathBuf)> {
    let Ok(rd) = fs::read_dir(dir) else {
        return Vec::new();
    };
    let mut out: Vec<_> = rd
        .filter_map(|e| {
            let path = e.ok()?.path();
            let name = path.file_name()?.to_str()?;
            let mid = name.strip_prefix("primes-")?.strip_suffix(".fpl")?;
            let (lo, hi) = mid.split_once('-')?;
            Some((lo.parse().ok()?, hi.parse().ok()?, path))
        })
        .collect();
    out.sort();
    out
}

/// The smallest cached table covering `[lo, hi)`, if any.
pub fn find_covering(dir: &Path, lo: u64, hi: u64) -> Option<PathBuf> {
    entries(dir)
        .into_iter()
        .filter(|&(l, h, _)| l <= lo && h >= hi)
        .min_by_key(|&(l, h, _)| h - l)
        .map(|(_, _, p)| p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fpl_core::arith::sieve_primes;

    #[test]
    fn encode_decode() {
        let t = sieve_primes(2, 1000).unwrap();
        let bytes = encode(&t);
        assert_eq!(&bytes[..4], b"FPL1");
        assert_eq!(u64::from_le_bytes(bytes[4..12].try_into().unwrap()), 2);
        let back = decode(&bytes, Path::new("x")).unwrap();
        assert_eq!(back.count(), 168);
        assert_eq!(back.words(), t.words());
        assert!(decode(&bytes[..bytes.len() - 8], Path::new("x")).is_err());
        assert!(decode(b"FPL2aaaaaaaaaaaaaaaa", Path::new("x")).is_err());
    }

    #[test]
    fn lookup_prefers_the_smallest_cover() {
        let dir = tempfile::tempdir().unwrap();
        save(dir.path(), &sieve_primes(2, 5000).unwrap()).unwrap();
        save(dir.path(), &sieve_primes(2, 2000).unwrap()).unwrap();
        let hit = find_covering(dir.path(), 2, 1001).unwrap();
        assert!(hit.ends_with("primes-2-2000.fpl"));
        assert!(find_covering(dir.path(), 2, 6000).is_none());
        assert_eq!(load(&hit).unwrap().count(), 303);
    }
}
