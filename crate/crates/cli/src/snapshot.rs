//! Binary wavefunction snapshots.
//!
//! Layout (little endian): a 64-byte header followed by `count` pairs of
//! `f64` (re, im) in row-major grid order.
//!
//! | offset | type     | field                                  |
//! |--------|----------|----------------------------------------|
//! | 0      | [u8; 8]  | magic `VARQDWF1`                       |
//! | 8      | u32      | format version (1)                     |
//! | 12     | u32      | spatial dimension                      |
//! | 16     | u32      | points per axis                        |
//! | 20     | u32      | particle index, `u32::MAX` = full state |
//! | 24     | f64      | box length                             |
//! | 32     | f64      | time                                   |
//! | 40     | f64      | ħ                                      |
//! | 48     | [u8; 8]  | config hash prefix                     |
//! | 56     | u64      | complex value count                    |

use std::fs;
use std::path::Path;

use varqd_core::{Complex64, Grid, GridWavefunction};

use crate::error::{CliError, IoContext, Result};

pub const MAGIC: &[u8; 8] = b"VARQDWF1";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 64;
pub const FULL_STATE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotHeader {
    pub dim: u32,
    pub points: u32,
    pub particle: u32,
    pub length: f64,
    pub time: f64,
    pub hbar: f64,
    pub hash_prefix: [u8; 8],
    pub count: u64,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub psi: GridWavefunction,
}

/// First eight bytes of a hex config hash.
pub fn hash_prefix(config_hash: &str) -> [u8; 8] {
    let mut out = [0u8; 8];
    if let Ok(bytes) = hex::decode(config_hash) {
        for (o, b) in out.iter_mut().zip(bytes) {
            *o = b;
        }
    }
    out
}

pub fn encode(
    psi: &GridWavefunction,
    time: f64,
    hbar: f64,
    particle: u32,
    hash: [u8; 8],
) -> Vec<u8> {
    let g = psi.grid();
    let values = psi.values();
    let mut buf = Vec::with_capacity(HEADER_LEN + 16 * values.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(g.points() as u32).to_le_bytes());
    buf.extend_from_slice(&particle.to_le_bytes());
    buf.extend_from_slice(&g.length().to_le_bytes());
    buf.extend_from_slice(&time.to_le_bytes());
    buf.extend_from_slice(&hbar.to_le_bytes());
    buf.extend_from_slice(&hash);
    buf.extend_from_slice(&(values.len() as u64).to_le_bytes());
    debug_assert_eq!(buf.len(), HEADER_LEN);
    for c in values {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    buf
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<Snapshot> {
    let bad = |reason: String| CliError::artifact(path, reason);
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(bad("not a wavefunction snapshot".into()));
    }
    let version = u32_at(bytes, 8);
    if version != VERSION {
        return Err(bad(format!("unsupported snapshot version {version}")));
    }
    let header = SnapshotHeader {
        dim: u32_at(bytes, 12),
        points: u32_at(bytes, 16),
        particle: u32_at(bytes, 20),
        length: f64_at(bytes, 24),
        time: f64_at(bytes, 32),
        hbar: f64_at(bytes, 40),
        hash_prefix: bytes[48..56].try_into().unwrap(),
        count: u64::from_le_bytes(bytes[56..64].try_into().unwrap()),
    };
    let expected = (header.points as u64).checked_pow(header.dim);
    if expected != Some(header.count) {
        return Err(bad(format!(
            "value count {} does not match a {}-dimensional grid of {} points",
            header.count, header.dim, header.points
        )));
    }
    let body = &bytes[HEADER_LEN..];
    if body.len() as u64 != 16 * header.count {
        return Err(bad(format!(
            "expected {} payload bytes, found {}",
            16 * header.count,
            body.len()
        )));
    }
    let grid = Grid::new(header.dim as usize, header.length, header.points as usize)
        .map_err(|e| bad(e.to_string()))?;
    let values = body
        .chunks_exact(16)
        .map(|c| Complex64::new(f64_at(c, 0), f64_at(c, 8)))
        .collect();
    let psi = GridWavefunction::new(grid, values).map_err(|e| bad(e.to_string()))?;
    Ok(Snapshot { header, psi })
}

pub fn write(
    path: &Path,
    psi: &GridWavefunction,
    time: f64,
    hbar: f64,
    particle: u32,
    hash: [u8; 8],
) -> Result<()> {
    fs::write(path, encode(psi, time, hbar, particle, hash)).at(path)
}

pub fn read(path: &Path) -> Result<Snapshot> {
    let bytes = fs::read(path).at(path)?;
    decode(&bytes, path)
}

/// All full-state snapshots in `dir`, sorted by time.
pub fn read_dir(dir: &Path) -> Result<Vec<Snapshot>> {
    let mut out = Vec::new();
    if !dir.is_dir() {
        return Ok(out);
    }
    let mut paths: Vec<_> = fs::read_dir(dir)
        .at(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "bin"))
        .collect();
    paths.sort();
    for p in paths {
        let s = read(&p)?;
        if s.header.particle == FULL_STATE {
            out.push(s);
        }
    }
    out.sort_by(|a, b| a.header.time.total_cmp(&b.header.time));
    Ok(out)
}
