use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{apply_multiplier, SpectralField};
use super::grid::Mode;
use crate::error::{Error, Result};

/// Step-size dependent frequency filter: keeps the closed square
/// `max(|k1|, |k2|) <= tau^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    tau: f64,
}

impl FilterSpec {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0 && tau <= 1.0) {
            return Err(Error::param("tau", format!("{tau} is not in (0, 1]")));
        }
        Ok(FilterSpec { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `tau^{-1/2}` in mode units.
    pub fn cutoff(&self) -> f64 {
        1.0 / self.tau.sqrt()
    }

    /// Whether `k` survives the filter. Compares `max|k_j|^2 * tau <= 1`,
    /// which is exact at integer ties for dyadic steps.
    #[inline]
    pub fn keeps(&self, k: Mode) -> bool {
        let s = k.sup_norm() as f64;
        s * s * self.tau <= 1.0
    }
}

/// The projection `Pi_tau`.
pub fn project(f: &SpectralField, filter: &FilterSpec) -> SpectralField {
    apply_multiplier(f, |k| {
        if filter.keeps(k) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::default()
        }
    })
}

/// Symbol of the free flow `exp(i t Delta)` at mode `k`.
#[inline]
pub fn free_symbol(k: Mode, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -t * k.norm_sq() as f64)
}

/// The free Schrodinger flow `exp(i t Delta)`: `u_k -> exp(-i t |k|^2) u_k`.
pub fn free_flow(f: &SpectralField, t: f64) -> SpectralField {
    apply_multiplier(f, |k| free_symbol(k, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid2D;
    use std::f64::consts::PI;

    #[test]
    fn tau_range() {
        assert!(FilterSpec::new(0.0).is_err());
        assert!(FilterSpec::new(-0.1).is_err());
        assert!(FilterSpec::new(1.5).is_err());
        assert!(FilterSpec::new(f64::NAN).is_err());
        assert!(FilterSpec::new(1.0).is_ok());
    }

    #[test]
    fn closed_square_boundary() {
        let filt = FilterSpec::new(0.25).unwrap();
        assert_eq!(filt.cutoff(), 2.0);
        assert!(!filt.keeps(Mode::new(3, 0)));
        assert!(filt.keeps(Mode::new(2, 2)));
        assert!(filt.keeps(Mode::new(-2, 1)));
        assert!(!filt.keeps(Mode::new(-3, -3)));

        let g = Grid2D::new(8).unwrap();
        let f = SpectralField::from_fn(g, |_| Complex64::new(1.0, 1.0));
        let p = project(&f, &filt);
        assert_eq!(p.coeff(Mode::new(3, 0)), Complex64::default());
        assert_eq!(p.coeff(Mode::new(2, 2)), Complex64::new(1.0, 1.0));
    }

    #[test]
    fn dyadic_ties_are_kept() {
        for j in 0..12 {
            let tau = 2f64.powi(-2 * j);
            let c = 1i64 << j;
            let filt = FilterSpec::new(tau).unwrap();
            assert!(filt.keeps(Mode::new(c, -c)));
            assert!(!filt.keeps(Mode::new(c + 1, 0)));
        }
    }

    #[test]
    fn free_flow_single_mode() {
        let g = Grid2D::new(8).unwrap();
        let f = SpectralField::plane_wave(g, Mode::new(1, 0), Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(free_flow(&f, 0.0), f);
        let out = free_flow(&f, PI);
        assert!((out.coeff(Mode::new(1, 0)) + 1.0).norm() < 1e-15);
    }
}
