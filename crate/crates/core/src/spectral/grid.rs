use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Fourier mode `k = (k1, k2)` on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mode {
    pub k1: i64,
    pub k2: i64,
}

impl Mode {
    pub const ZERO: Mode = Mode { k1: 0, k2: 0 };

    pub const fn new(k1: i64, k2: i64) -> Self {
        Mode { k1, k2 }
    }

    /// `|k|^2`
    pub fn norm_sq(self) -> i64 {
        self.k1 * self.k1 + self.k2 * self.k2
    }

    /// `max(|k1|, |k2|)`, the sup-norm used by the square filter.
    pub fn sup_norm(self) -> i64 {
        self.k1.abs().max(self.k2.abs())
    }

    /// `<k> = (1 + |k|^2)^{1/2}`
    pub fn bracket(self) -> f64 {
        (1.0 + self.norm_sq() as f64).sqrt()
    }

    /// `<k>^p`, computed from `(1 + |k|^2)^{p/2}` without an intermediate root.
    pub fn bracket_pow(self, p: f64) -> f64 {
        (1.0 + self.norm_sq() as f64).powf(0.5 * p)
    }
}

/// Square `M x M` grid over `[0, 2pi)^2` and its mode set
/// `{ k : -M/2 <= k_j <= M/2 - 1 }` in DFT order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Grid2D {
    m: usize,
}

impl Grid2D {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::InvalidGrid(m));
        }
        Ok(Grid2D { m })
    }

    /// Points per dimension.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Total number of modes, `M^2`.
    pub fn len(&self) -> usize {
        self.m * self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest mode magnitude per dimension, `M/2`.
    pub fn max_mode(&self) -> i64 {
        (self.m / 2) as i64
    }

    /// Signed wavenumber stored at DFT position `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i < self.m / 2 {
            i as i64
        } else {
            i as i64 - self.m as i64
        }
    }

    /// DFT position of wavenumber `k`, if it lies in the mode set.
    #[inline]
    pub fn position(&self, k: i64) -> Option<usize> {
        let half = self.max_mode();
        if k < -half || k >= half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.m as i64) as usize)
        }
    }

    /// Mode stored at flat index `idx` (row-major, `k2` fastest).
    #[inline]
    pub fn mode(&self, idx: usize) -> Mode {
        Mode::new(self.wavenumber(idx / self.m), self.wavenumber(idx % self.m))
    }

    pub fn index(&self, k: Mode) -> Option<usize> {
        Some(self.position(k.k1)? * self.m + self.position(k.k2)?)
    }

    pub fn contains(&self, k: Mode) -> bool {
        self.index(k).is_some()
    }

    /// All modes in storage order.
    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        (0..self.len()).map(move |i| self.mode(i))
    }

    /// Physical coordinate `x_j = 2 pi j / M`.
    pub fn coordinate(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * j as f64 / self.m as f64
    }

    /// Grid spacing `2 pi / M`.
    pub fn spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.m as f64
    }
}

impl TryFrom<usize> for Grid2D {
    type Error = Error;

    fn try_from(m: usize) -> Result<Self> {
        Grid2D::new(m)
    }
}

impl From<Grid2D> for usize {
    fn from(g: Grid2D) -> usize {
        g.m
    }
}
