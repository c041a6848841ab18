//! Binary field snapshots.
//!
//! Layout: 32-byte header — magic "SZG1", representation flag (u32 LE:
//! 0 physical, 1 x-Fourier, 2 full), nx (u32), ny (u32), Lx (f64), Ly (f64) —
//! followed by row-major interleaved re/im f64 LE pairs.

use crate::grid::{make_grid, Grid2D};
use crate::transform::{Representation, Spectrum2D};
use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"SZG1";

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic (not a snapshot file)")]
    BadMagic,
    #[error("unknown representation flag {0}")]
    BadRep(u32),
    #[error("invalid grid in header: {0}")]
    BadGrid(#[from] crate::grid::GridError),
    #[error("payload size mismatch: expected {expected} complex values, got {got}")]
    BadPayload { expected: usize, got: usize },
}

fn rep_flag(rep: Representation) -> u32 {
    match rep {
        Representation::Physical => 0,
        Representation::XFourier => 1,
        Representation::Full => 2,
    }
}

fn flag_rep(flag: u32) -> Result<Representation, SnapshotError> {
    match flag {
        0 => Ok(Representation::Physical),
        1 => Ok(Representation::XFourier),
        2 => Ok(Representation::Full),
        f => Err(SnapshotError::BadRep(f)),
    }
}

pub fn write_snapshot(path: &Path, s: &Spectrum2D) -> Result<(), SnapshotError> {
    let mut buf = Vec::with_capacity(32 + 16 * s.values.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&rep_flag(s.rep).to_le_bytes());
    buf.extend_from_slice(&(s.grid.gx.n_points as u32).to_le_bytes());
    buf.extend_from_slice(&(s.grid.gy.n_points as u32).to_le_bytes());
    buf.extend_from_slice(&s.grid.gx.half_width.to_le_bytes());
    buf.extend_from_slice(&s.grid.gy.half_width.to_le_bytes());
    debug_assert_eq!(buf.len(), 32);
    for v in &s.values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Spectrum2D, SnapshotError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 32 || &bytes[0..4] != MAGIC {
        return Err(SnapshotError::BadMagic);
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let rep = flag_rep(u32_at(4))?;
    let nx = u32_at(8) as usize;
    let ny = u32_at(12) as usize;
    let lx = f64_at(16);
    let ly = f64_at(24);
    let grid = Grid2D::new(make_grid(lx, nx)?, make_grid(ly, ny)?);
    let expected = nx * ny;
    let got = (bytes.len() - 32) / 16;
    if got != expected || (bytes.len() - 32) % 16 != 0 {
        return Err(SnapshotError::BadPayload { expected, got });
    }
    let mut values = Vec::with_capacity(expected);
    for i in 0..expected {
        let o = 32 + 16 * i;
        values.push(Complex64::new(f64_at(o), f64_at(o + 8)));
    }
    Ok(Spectrum2D::new(grid, rep, values))
}
