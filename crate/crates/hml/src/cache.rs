//! Divisor-table cache file.
//!
//! Layout, all little-endian: magic `HMLDIVTB` (8 bytes), version `u32`,
//! `N_max` `u64`, CRC-32 of the payload `u32`, then the payload
//! `d(1..=N_max)` followed by `d₃(1..=N_max)` as `u32`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use hml_core::divisor::{build_table, DivisorTable};

use crate::CliError;

pub const MAGIC: [u8; 8] = *b"HMLDIVTB";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 24;

fn payload(table: &DivisorTable) -> Vec<u8> {
    let n = table.limit() as usize;
    let mut out = Vec::with_capacity(8 * n);
    for v in &table.d_values()[1..=n] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in &table.d3_values()[1..=n] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn write_cache(table: &DivisorTable, path: &Path) -> Result<(), CliError> {
    let body = payload(table);
    let mut w = BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?);
    let mut head = Vec::with_capacity(HEADER_LEN);
    head.extend_from_slice(&MAGIC);
    head.extend_from_slice(&VERSION.to_le_bytes());
    head.extend_from_slice(&table.limit().to_le_bytes());
    head.extend_from_slice(&crc32fast::hash(&body).to_le_bytes());
    w.write_all(&head).and_then(|_| w.write_all(&body)).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

pub fn read_cache(path: &Path) -> Result<DivisorTable, CliError> {
    let mut r = BufReader::new(File::open(path).map_err(|e| CliError::io(path, e))?);
    let mut head = [0u8; HEADER_LEN];
    r.read_exact(&mut head).map_err(|e| CliError::io(path, e))?;
    if head[..8] != MAGIC {
        return Err(CliError::Cache(format!("{}: bad magic", path.display())));
    }
    let version = u32::from_le_bytes(head[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(CliError::Cache(format!("{}: version {version}, expected {VERSION}", path.display())));
    }
    let n = u64::from_le_bytes(head[12..20].try_into().unwrap());
    let sum = u32::from_le_bytes(head[20..24].try_into().unwrap());
    if n > hml_core::divisor::MAX_LIMIT {
        return Err(CliError::Cache(format!("{}: N_max = {n} exceeds the table limit", path.display())));
    }
    let mut body = Vec::new();
    r.read_to_end(&mut body).map_err(|e| CliError::io(path, e))?;
    if body.len() as u64 != 8 * n {
        return Err(CliError::Cache(format!("{}: payload has {} bytes, expected {}", path.display(), body.len(), 8 * n)));
    }
    if crc32fast::hash(&body) != sum {
        return Err(CliError::Cache(format!("{}: checksum mismatch", path.display())));
    }
    let words: Vec<u32> = body.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect();
    let n = n as usize;
    let mut d = Vec::with_capacity(n + 1);
    d.push(0);
    d.extend_from_slice(&words[..n]);
    let mut d3 = Vec::with_capacity(n + 1);
    d3.push(0);
    d3.extend_from_slice(&words[n..]);
    DivisorTable::from_parts(d, d3).map_err(|e| CliError::Cache(format!("{}: {e}", path.display())))
}

/// A table of size at least `needed`: read from `path` when it exists and
/// is large enough, otherwise built (and written to `path` when given).
pub fn load_or_build(path: Option<&Path>, needed: u64) -> Result<DivisorTable, CliError> {
    let needed = needed.max(1);
    if let Some(p) = path {
        if p.exists() {
            let t = read_cache(p)?;
            if t.limit() >= needed {
                return Ok(t);
            }
        }
    }
    let t = build_table(needed).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(p) = path {
        write_cache(&t, p)?;
    }
    Ok(t)
}
