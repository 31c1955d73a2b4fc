//! On-disk antilog tables, one file per (p, f, modulus).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::FieldSpec;

const MAGIC: &[u8; 5] = b"CSRG1";

pub const CACHE_ENV: &str = "CAYLEY_CACHE_DIR";

pub fn default_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        return Some(PathBuf::from(dir));
    }
    dirs::cache_dir().map(|d| d.join("cayley-srg"))
}

fn header(spec: &FieldSpec) -> Vec<u8> {
    let mut out = Vec::with_capacity(5 + 8 * (spec.modulus.len() + 2));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&spec.p.to_le_bytes());
    out.extend_from_slice(&(spec.f as u64).to_le_bytes());
    for c in &spec.modulus {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out
}

pub fn file_for(dir: &Path, spec: &FieldSpec) -> PathBuf {
    let digest = Sha256::digest(header(spec));
    dir.join(format!("{}.csrg", hex::encode(&digest[..16])))
}

/// Antilog table (packed coordinates of omega^k) if a matching file exists.
pub fn load(dir: &Path, spec: &FieldSpec, order: u64) -> Option<Vec<u64>> {
    let bytes = fs::read(file_for(dir, spec)).ok()?;
    let head = header(spec);
    if bytes.len() != head.len() + 8 * order as usize || !bytes.starts_with(&head) {
        log::warn!("ignoring malformed cache file for p={} f={}", spec.p, spec.f);
        return None;
    }
    Some(
        bytes[head.len()..]
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect(),
    )
}

pub fn store(dir: &Path, spec: &FieldSpec, antilog: &[u32]) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = file_for(dir, spec);
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut w = std::io::BufWriter::new(fs::File::create(&tmp)?);
        w.write_all(&header(spec))?;
        for &v in antilog {
            w.write_all(&(v as u64).to_le_bytes())?;
        }
        w.flush()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(path)
}
