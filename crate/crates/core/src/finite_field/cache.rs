//! On-disk cache of field tables.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "MSFT1" | p: u32 | f: u32 | modulus: f+1 bytes | exp: (q-1) x u32 | trace: q bytes | crc32: u32
//! ```
//!
//! The CRC covers every preceding byte. Fields with `p > 255` cannot be
//! represented (one byte per coefficient and trace value) and are never cached.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use super::{assemble, build_field, field_modulus, FieldTable};
use crate::error::{Error, Result};

pub const CACHE_MAGIC: &[u8; 5] = b"MSFT1";

fn cache_path(dir: &Path, p: u64, f: u32, modulus: &[u32]) -> PathBuf {
    let coeffs: Vec<String> = modulus.iter().map(u32::to_string).collect();
    dir.join(format!("gf{p}-{f}-{}.msft", coeffs.join("_")))
}

impl FieldTable {
    pub fn to_cache_bytes(&self) -> Result<Vec<u8>> {
        if self.p > 255 {
            return Err(Error::Cache(format!(
                "p = {} does not fit the byte format",
                self.p
            )));
        }
        let mut out = Vec::with_capacity(13 + self.f as usize + 5 * self.q as usize);
        out.extend_from_slice(CACHE_MAGIC);
        out.extend_from_slice(&(self.p as u32).to_le_bytes());
        out.extend_from_slice(&self.f.to_le_bytes());
        out.extend(self.modulus.iter().map(|&c| c as u8));
        for &e in &self.exp {
            out.extend_from_slice(&e.to_le_bytes());
        }
        out.extend(self.trace.iter().map(|&t| t as u8));
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        Ok(out)
    }

    pub fn from_cache_bytes(bytes: &[u8]) -> Result<FieldTable> {
        let bad = |msg: &str| Error::Cache(msg.to_string());
        if bytes.len() < 17 || &bytes[..5] != CACHE_MAGIC {
            return Err(bad("missing magic"));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 4);
        let crc = u32::from_le_bytes(tail.try_into().unwrap());
        if crc32fast::hash(body) != crc {
            return Err(bad("checksum mismatch"));
        }
        let p = u32::from_le_bytes(body[5..9].try_into().unwrap()) as u64;
        let f = u32::from_le_bytes(body[9..13].try_into().unwrap());
        let q = p
            .checked_pow(f)
            .filter(|&q| q <= u32::MAX as u64)
            .ok_or_else(|| bad("field size overflows"))?;
        let expected = 13 + (f as usize + 1) + 4 * (q as usize - 1) + q as usize;
        if body.len() != expected {
            return Err(bad("truncated or oversized table"));
        }
        let mut at = 13;
        let modulus: Vec<u32> = body[at..at + f as usize + 1]
            .iter()
            .map(|&c| c as u32)
            .collect();
        at += f as usize + 1;
        let exp: Vec<u32> = body[at..at + 4 * (q as usize - 1)]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        at += 4 * (q as usize - 1);
        let trace: Vec<u32> = body[at..].iter().map(|&t| t as u32).collect();

        let mut seen = vec![false; q as usize];
        if exp.first() != Some(&1) {
            return Err(bad("exp[0] must be 1"));
        }
        for &e in &exp {
            if e == 0 || e as u64 >= q || std::mem::replace(&mut seen[e as usize], true) {
                return Err(bad("exp table is not a permutation of the units"));
            }
        }
        if trace.iter().any(|&t| t as u64 >= p) {
            return Err(bad("trace value out of range"));
        }
        Ok(assemble(p, f, modulus, exp, trace))
    }
}

/// Load `F_{p^f}` from `dir`, building and writing it on a miss or a corrupt
/// entry.
pub fn load_or_build(dir: &Path, p: u64, f: u32, bound: u64) -> Result<FieldTable> {
    let (modulus, _) = field_modulus(p, f, bound)?;
    let path = cache_path(dir, p, f, &modulus);
    if let Ok(bytes) = fs::read(&path) {
        if let Ok(table) = FieldTable::from_cache_bytes(&bytes) {
            if table.p == p && table.f == f && table.modulus == modulus {
                return Ok(table);
            }
        }
    }
    let table = build_field(p, f, bound)?;
    if let Ok(bytes) = table.to_cache_bytes() {
        fs::create_dir_all(dir).map_err(|e| Error::Cache(e.to_string()))?;
        // unique per writer, so concurrent builders never share a temp file
        static WRITES: AtomicU64 = AtomicU64::new(0);
        let n = WRITES.fetch_add(1, Ordering::Relaxed);
        let tmp = path.with_extension(format!("tmp{}-{n}", std::process::id()));
        fs::write(&tmp, &bytes).map_err(|e| Error::Cache(e.to_string()))?;
        fs::rename(&tmp, &path).map_err(|e| Error::Cache(e.to_string()))?;
    }
    Ok(table)
}
