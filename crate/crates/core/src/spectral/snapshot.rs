//! Binary field snapshots.
//!
//! Layout (all little-endian):
//!
//! | bytes      | content                                         |
//! |------------|-------------------------------------------------|
//! | 0..4       | magic `NLS2`                                    |
//! | 4..8       | `u32` grid size `M`                             |
//! | 8..12      | `u32` layout tag, `0` = k-space, row-major, `k2` fastest, DFT order |
//! | 12..       | `M^2` pairs of `f64` `(re, im)`                 |

use std::path::Path;

use num_complex::Complex64;

use super::{Grid2D, SpectralField};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"NLS2";
pub const LAYOUT_KSPACE_DFT: u32 = 0;
const HEADER_LEN: usize = 12;

pub fn encode(f: &SpectralField) -> Vec<u8> {
    let m = f.grid().m();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * m * m);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(m as u32).to_le_bytes());
    out.extend_from_slice(&LAYOUT_KSPACE_DFT.to_le_bytes());
    for c in f.coeffs() {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<SpectralField> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Snapshot(format!(
            "{} bytes is shorter than the header",
            bytes.len()
        )));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
    let m = word(4) as usize;
    let layout = word(8);
    if layout != LAYOUT_KSPACE_DFT {
        return Err(Error::Snapshot(format!("unsupported layout tag {layout}")));
    }
    let grid = Grid2D::new(m)?;
    let expected = HEADER_LEN + 16 * grid.len();
    if bytes.len() != expected {
        return Err(Error::Snapshot(format!(
            "expected {expected} bytes for M = {m}, found {}",
            bytes.len()
        )));
    }
    let f64_at = |at: usize| f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let coeffs = (0..grid.len())
        .map(|i| {
            let at = HEADER_LEN + 16 * i;
            Complex64::new(f64_at(at), f64_at(at + 8))
        })
        .collect();
    SpectralField::from_coeffs(grid, coeffs)
}

pub fn read(path: &Path) -> Result<SpectralField> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

pub fn write(path: &Path, f: &SpectralField) -> Result<()> {
    crate::io::write_atomic(path, &encode(f))
}
