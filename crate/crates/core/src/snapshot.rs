//! Binary field snapshots.
//!
//! Layout, little-endian throughout:
//!
//! | bytes | content |
//! |---|---|
//! | 4 | magic `PSG1` |
//! | 2 | format version (`u16`, currently 1) |
//! | 2 | dimension `d` (`u16`, 1 or 2) |
//! | 4·d | nodes per axis (`u32` each) |
//! | 8 | time `t` (`f64`) |
//! | 8 | `κ` (`f64`) |
//! | 8·n^d | values (`f64`, x fastest) |

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::grid::{Field, GridError, TorusGrid};

pub const MAGIC: &[u8; 4] = b"PSG1";
pub const VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("bad magic at offset 0: expected \"PSG1\", found {found:?}")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported format version {version} at offset {offset}")]
    UnsupportedVersion { offset: usize, version: u16 },
    #[error("unsupported dimension {dim} at offset {offset}")]
    UnsupportedDimension { offset: usize, dim: u16 },
    #[error("invalid grid size {n} at offset {offset}")]
    InvalidSize { offset: usize, n: u32 },
    #[error("unequal axis sizes {first} and {second} at offset {offset}")]
    UnequalAxes { offset: usize, first: u32, second: u32 },
    #[error("truncated snapshot: needed {needed} bytes at offset {offset}, {available} available")]
    Truncated {
        offset: usize,
        needed: usize,
        available: usize,
    },
    #[error("{extra} trailing bytes after payload at offset {offset}")]
    TrailingBytes { offset: usize, extra: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub kappa: f64,
    pub field: Field,
}

pub fn encode(t: f64, kappa: f64, field: &Field) -> Vec<u8> {
    let grid = field.grid();
    let mut out = Vec::with_capacity(4 + 2 + 2 + 4 * grid.dim() + 16 + 8 * grid.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.dim() as u16).to_le_bytes());
    for _ in 0..grid.dim() {
        out.extend_from_slice(&(grid.n_per_axis() as u32).to_le_bytes());
    }
    out.extend_from_slice(&t.to_le_bytes());
    out.extend_from_slice(&kappa.to_le_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], SnapshotError> {
        let available = self.bytes.len() - self.pos;
        if available < N {
            return Err(SnapshotError::Truncated {
                offset: self.pos,
                needed: N,
                available,
            });
        }
        let mut buf = [0u8; N];
        buf.copy_from_slice(&self.bytes[self.pos..self.pos + N]);
        self.pos += N;
        Ok(buf)
    }

    fn u16(&mut self) -> Result<u16, SnapshotError> {
        self.take().map(u16::from_le_bytes)
    }

    fn u32(&mut self) -> Result<u32, SnapshotError> {
        self.take().map(u32::from_le_bytes)
    }

    fn f64(&mut self) -> Result<f64, SnapshotError> {
        self.take().map(f64::from_le_bytes)
    }
}

pub fn decode(bytes: &[u8]) -> Result<Snapshot, SnapshotError> {
    let mut r = Reader { bytes, pos: 0 };
    let magic: [u8; 4] = r.take()?;
    if &magic != MAGIC {
        return Err(SnapshotError::BadMagic { found: magic });
    }
    let offset = r.pos;
    let version = r.u16()?;
    if version != VERSION {
        return Err(SnapshotError::UnsupportedVersion { offset, version });
    }
    let offset = r.pos;
    let dim = r.u16()?;
    if dim != 1 && dim != 2 {
        return Err(SnapshotError::UnsupportedDimension { offset, dim });
    }
    let offset = r.pos;
    let n = r.u32()?;
    if dim == 2 {
        let second_offset = r.pos;
        let second = r.u32()?;
        if second != n {
            return Err(SnapshotError::UnequalAxes {
                offset: second_offset,
                first: n,
                second,
            });
        }
    }
    let grid = TorusGrid::new(dim as usize, n as usize)
        .map_err(|_| SnapshotError::InvalidSize { offset, n })?;
    let t = r.f64()?;
    let kappa = r.f64()?;
    let payload = 8 * grid.len();
    let available = bytes.len() - r.pos;
    if available < payload {
        return Err(SnapshotError::Truncated {
            offset: r.pos,
            needed: payload,
            available,
        });
    }
    let values: Vec<f64> = bytes[r.pos..r.pos + payload]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let end = r.pos + payload;
    if end != bytes.len() {
        return Err(SnapshotError::TrailingBytes {
            offset: end,
            extra: bytes.len() - end,
        });
    }
    Ok(Snapshot {
        t,
        kappa,
        field: Field::new(grid, values)?,
    })
}

pub fn write(path: &Path, t: f64, kappa: f64, field: &Field) -> Result<(), SnapshotError> {
    fs::write(path, encode(t, kappa, field))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<Snapshot, SnapshotError> {
    decode(&fs::read(path)?)
}
