use num_complex::Complex64;

use super::fft::Fft2d;
use super::grid::{Grid2D, Mode};
use crate::error::{Error, Result};

/// Fourier coefficients `u_k` of a function on the torus, one per mode of
/// the grid, stored row-major with `k2` fastest in DFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid2D,
    coeffs: Vec<Complex64>,
}

/// Samples `u(x_j)` at `x_j = 2 pi j / M`, row-major with `j2` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid2D,
    values: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid2D) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_coeffs(grid: Grid2D, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: coeffs.len(),
            });
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(Mode) -> Complex64) -> Self {
        let coeffs = grid.modes().map(&mut f).collect();
        SpectralField { grid, coeffs }
    }

    /// `c * exp(i <k, x>)`.
    pub fn plane_wave(grid: Grid2D, k: Mode, c: Complex64) -> Result<Self> {
        let idx = grid
            .index(k)
            .ok_or_else(|| Error::param("k", format!("mode {k:?} outside the grid")))?;
        let mut f = SpectralField::zeros(grid);
        f.coeffs[idx] = c;
        Ok(f)
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at `k`, zero for modes outside the grid.
    pub fn coeff(&self, k: Mode) -> Complex64 {
        self.grid
            .index(k)
            .map_or(Complex64::default(), |i| self.coeffs[i])
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scale(&self, a: Complex64) -> Self {
        self.map_coeffs(|c| a * c)
    }

    pub fn conj(&self) -> Self {
        self.map_coeffs(|c| c.conj())
    }

    fn map_coeffs(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    fn zip_with(
        &self,
        other: &SpectralField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.check_grid(other.grid)?;
        Ok(SpectralField {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `sum_k conj(u_k) v_k`.
    pub fn inner(&self, other: &SpectralField) -> Result<Complex64> {
        self.check_grid(other.grid)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub(crate) fn check_grid(&self, grid: Grid2D) -> Result<()> {
        if self.grid != grid {
            return Err(Error::GridMismatch {
                expected: self.grid.m(),
                found: grid.m(),
            });
        }
        Ok(())
    }

    /// The same function on another grid: shared modes are copied, modes
    /// missing from the source are zero, modes missing from the target are
    /// dropped.
    pub fn resample(&self, grid: Grid2D) -> Self {
        if grid == self.grid {
            return self.clone();
        }
        SpectralField::from_fn(grid, |k| self.coeff(k))
    }

    /// Translation `u(x) -> u(x - 2 pi j / M)`, applied exactly as a sample
    /// shift of the physical field.
    pub fn translate(&self, j1: usize, j2: usize) -> Self {
        let p = to_physical(self);
        let m = self.grid.m();
        let mut out = vec![Complex64::default(); m * m];
        for a in 0..m {
            for b in 0..m {
                out[((a + j1) % m) * m + (b + j2) % m] = p.values[a * m + b];
            }
        }
        from_physical(&PhysicalField {
            grid: self.grid,
            values: out,
        })
        .expect("grid preserved")
    }
}

impl PhysicalField {
    pub fn new(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(PhysicalField { grid, values })
    }

    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let m = grid.m();
        let values = (0..m * m)
            .map(|i| f(grid.coordinate(i / m), grid.coordinate(i % m)))
            .collect();
        PhysicalField { grid, values }
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, j1: usize, j2: usize) -> Complex64 {
        self.values[j1 * self.grid.m() + j2]
    }
}

/// `u(x_j) = sum_k u_k exp(i <k, x_j>)`.
pub fn to_physical(f: &SpectralField) -> PhysicalField {
    let grid = f.grid;
    let mut values = f.coeffs.clone();
    let mut tmp = Vec::new();
    Fft2d::plan(grid.m()).inverse(&mut values, &mut tmp);
    PhysicalField { grid, values }
}

/// `u_k = M^{-2} sum_j u(x_j) exp(-i <k, x_j>)`.
pub fn from_physical(p: &PhysicalField) -> Result<SpectralField> {
    let grid = p.grid;
    if p.values.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: p.values.len(),
        });
    }
    let mut coeffs = p.values.clone();
    let mut tmp = Vec::new();
    Fft2d::plan(grid.m()).forward(&mut coeffs, &mut tmp);
    let norm = 1.0 / grid.len() as f64;
    coeffs.iter_mut().for_each(|c| *c *= norm);
    Ok(SpectralField { grid, coeffs })
}

/// `u_k -> m(k) u_k` for every mode.
pub fn apply_multiplier(f: &SpectralField, m: impl Fn(Mode) -> Complex64) -> SpectralField {
    let grid = f.grid;
    SpectralField {
        grid,
        coeffs: f
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| m(grid.mode(i)) * c)
            .collect(),
    }
}
