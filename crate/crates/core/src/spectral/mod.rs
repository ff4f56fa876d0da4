//! Grids, coefficient fields, Fourier multipliers, the frequency filter and
//! the free Schrodinger propagator.

mod fft;
mod field;
mod filter;
mod grid;
pub mod snapshot;

pub use fft::Fft2d;
pub use field::{apply_multiplier, from_physical, to_physical, PhysicalField, SpectralField};
pub use filter::{free_flow, free_symbol, project, FilterSpec};
pub use grid::{Grid2D, Mode};
