//! Discrete norms and the discrete Bourgain-space diagnostics.
//!
//! All norms live in coefficient space: `||u||_{L^2}^2 = sum_k |u_k|^2`.
//! The continuum factor `(2 pi)^2` is a global constant that drops out of
//! every ratio and convergence order.
//!
//! # Bourgain norm
//!
//! For a finite sequence `u_0, .., u_{N-1}` (zero outside) with time step
//! `tau`,
//!
//! ```text
//! u~(sigma, k) = tau sum_n u_n(k) exp(i n tau sigma)
//! ||u||_{X^{s,b}}^2 = sum_k <k>^{2s} (1/2pi) int_{-pi/tau}^{pi/tau}
//!                       <d(sigma - |k|^2)>^{2b} |u~(sigma, k)|^2 dsigma
//! d(sigma) = (exp(i tau sigma) - 1) / tau
//! ```
//!
//! The `1/2pi` measure makes `(s, b) = (0, 0)` equal to
//! `(tau sum_n ||u_n||^2)^{1/2}` exactly. The sigma integral is evaluated
//! as a Riemann sum over one period on a zero-padded grid of `P` points.
//! `|u~|^2` is a trigonometric polynomial of degree `N - 1` in
//! `tau sigma`, and the weight `<d>^{2b}` is analytic and periodic with
//! Fourier coefficients decaying geometrically; once `P` exceeds
//! `N - 1` plus the weight's numerical bandwidth the sum equals the
//! integral to roundoff.
//!
//! Two routes compute the same number:
//!
//! * [`bourgain_norm_freq`] evaluates `u~` on the sigma grid by FFT and
//!   sums the shifted weight directly.
//! * [`bourgain_norm_time`] twists the sequence, `f_n = exp(-i n tau Delta) u_n`,
//!   and applies `<D_tau>^{2b}` in time as the Toeplitz operator whose
//!   kernel is the Fourier series of the weight, through the sequence's
//!   autocorrelation.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::spectral::{project, to_physical, FilterSpec, Grid2D, SpectralField};

/// Relative size below which a Fourier coefficient of the weight is
/// treated as zero.
const WEIGHT_TAIL_TOL: f64 = 1e-15;
const MAX_WEIGHT_SAMPLES: usize = 1 << 24;

pub fn l2_norm(f: &SpectralField) -> f64 {
    f.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `(sum_k <k>^{2s} |u_k|^2)^{1/2}`
pub fn hs_norm(f: &SpectralField, s: f64) -> f64 {
    let grid = f.grid();
    f.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| grid.mode(i).bracket_pow(2.0 * s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn l2_error(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    Ok(l2_norm(&a.sub(b)?))
}

/// `u_n` at `t_n = n tau` for `n = 0..N`, zero outside.
#[derive(Debug, Clone)]
pub struct TimeSequence {
    tau: f64,
    fields: Vec<SpectralField>,
}

impl TimeSequence {
    pub fn new(tau: f64, fields: Vec<SpectralField>) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::param("tau", format!("{tau} is not positive")));
        }
        let first = fields.first().ok_or(Error::Degenerate(
            "a time sequence needs at least one field",
        ))?;
        let grid = first.grid();
        for f in &fields {
            f.check_grid(grid)?;
        }
        Ok(TimeSequence { tau, fields })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn grid(&self) -> Grid2D {
        self.fields[0].grid()
    }

    /// Appends `extra` zero fields.
    pub fn zero_padded(&self, extra: usize) -> Self {
        let mut fields = self.fields.clone();
        fields.extend(std::iter::repeat_n(
            SpectralField::zeros(self.grid()),
            extra,
        ));
        TimeSequence {
            tau: self.tau,
            fields,
        }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        TimeSequence {
            tau: self.tau,
            fields: self.fields.iter().map(|f| f.scale(a)).collect(),
        }
    }

    /// `(tau sum_n ||u_n||^2)^{1/2}`
    pub fn l2_norm(&self) -> f64 {
        (self.tau * self.fields.iter().map(|f| l2_norm(f).powi(2)).sum::<f64>()).sqrt()
    }

    /// Time series of the coefficient at flat index `idx`.
    fn series(&self, idx: usize) -> impl Iterator<Item = Complex64> + '_ {
        self.fields.iter().map(move |f| f.coeffs()[idx])
    }

    fn is_silent(&self, idx: usize) -> bool {
        self.series(idx).all(|c| c == Complex64::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BourgainParams {
    pub s: f64,
    pub b: f64,
}

impl BourgainParams {
    pub fn new(s: f64, b: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::param("s", "must be finite"));
        }
        if !b.is_finite() {
            return Err(Error::param("b", "must be finite"));
        }
        Ok(BourgainParams { s, b })
    }
}

/// `<d(theta / tau)>^{2b} = (1 + 4 sin^2(theta/2) / tau^2)^b` as a function
/// of `theta = tau sigma`.
#[inline]
pub fn symbol_weight(theta: f64, tau: f64, b: f64) -> f64 {
    let half = (0.5 * theta).sin();
    (1.0 + 4.0 * half * half / (tau * tau)).powf(b)
}

/// Fourier coefficients `w_j`, `j >= 0`, of [`symbol_weight`] over one
/// period (`w_{-j} = w_j`), truncated after the last coefficient above
/// the tail tolerance.
pub fn weight_coefficients(tau: f64, b: f64) -> Vec<f64> {
    let mut planner = FftPlanner::new();
    let mut q = 64usize;
    loop {
        let fft = planner.plan_fft_forward(q);
        let mut buf: Vec<Complex64> = (0..q)
            .map(|i| {
                let theta = 2.0 * std::f64::consts::PI * i as f64 / q as f64;
                Complex64::new(symbol_weight(theta, tau, b), 0.0)
            })
            .collect();
        fft.process(&mut buf);
        let coeffs: Vec<f64> = buf[..=q / 2].iter().map(|c| c.re / q as f64).collect();
        let floor = WEIGHT_TAIL_TOL * coeffs[0].abs();
        let resolved = coeffs[q / 4..].iter().all(|c| c.abs() <= floor);
        if resolved || q >= MAX_WEIGHT_SAMPLES {
            let last = coeffs.iter().rposition(|c| c.abs() > floor).unwrap_or(0);
            return coeffs[..=last].to_vec();
        }
        q *= 2;
    }
}

/// Number of sigma points used for a sequence of length `n`.
fn sigma_points(n: usize, bandwidth: usize) -> usize {
    (n + bandwidth).next_power_of_two().max(2)
}

fn check_params(seq: &TimeSequence, p: &BourgainParams) -> Result<()> {
    BourgainParams::new(p.s, p.b)?;
    if seq.is_empty() {
        return Err(Error::Degenerate("empty sequence"));
    }
    Ok(())
}

/// Bourgain norm through the time-space transform on the sigma grid.
pub fn bourgain_norm_freq(seq: &TimeSequence, p: &BourgainParams) -> Result<f64> {
    check_params(seq, p)?;
    let tau = seq.tau;
    let n = seq.len();
    let bandwidth = if p.b == 0.0 {
        0
    } else {
        weight_coefficients(tau, p.b).len() - 1
    };
    let points = sigma_points(n, bandwidth);
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_inverse(points);
    let grid = seq.grid();
    let two_pi = 2.0 * std::f64::consts::PI;

    let per_mode = exec::map_range_init(
        grid.len(),
        || {
            (
                vec![Complex64::default(); points],
                vec![Complex64::default(); fft.get_inplace_scratch_len()],
            )
        },
        |(buf, scratch), idx| {
            if seq.is_silent(idx) {
                return 0.0;
            }
            let k = grid.mode(idx);
            buf.fill(Complex64::default());
            // exp(i n tau sigma_m) = (-1)^n exp(2 pi i n m / P)
            for (slot, (j, c)) in buf.iter_mut().zip(seq.series(idx).enumerate()) {
                *slot = if j % 2 == 0 { c } else { -c };
            }
            fft.process_with_scratch(buf, scratch);
            let shift = (tau * k.norm_sq() as f64).rem_euclid(two_pi);
            let sum: f64 = buf
                .iter()
                .enumerate()
                .map(|(m, u)| {
                    let theta = -std::f64::consts::PI + two_pi * m as f64 / points as f64 - shift;
                    symbol_weight(theta, tau, p.b) * u.norm_sqr()
                })
                .sum();
            k.bracket_pow(2.0 * p.s) * sum
        },
    );
    // tau^2 from u~, d sigma / 2pi = 1 / (P tau)
    let total: f64 = per_mode.iter().sum::<f64>() * tau / points as f64;
    Ok(total.sqrt())
}

/// Bourgain norm through the twisted sequence and the time-domain
/// `<D_tau>^b` operator.
pub fn bourgain_norm_time(seq: &TimeSequence, p: &BourgainParams) -> Result<f64> {
    check_params(seq, p)?;
    let tau = seq.tau;
    let n = seq.len();
    let kernel = weight_coefficients(tau, p.b);
    let len = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd: Arc<dyn Fft<f64>> = planner.plan_fft_forward(len);
    let inv: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(len);
    let scratch_len = fwd
        .get_inplace_scratch_len()
        .max(inv.get_inplace_scratch_len());
    let grid = seq.grid();
    let lags = n.min(kernel.len());

    let per_mode = exec::map_range_init(
        grid.len(),
        || {
            (
                vec![Complex64::default(); len],
                vec![Complex64::default(); scratch_len],
            )
        },
        |(buf, scratch), idx| {
            if seq.is_silent(idx) {
                return 0.0;
            }
            let k = grid.mode(idx);
            let weight = k.bracket_pow(p.s);
            let omega = tau * k.norm_sq() as f64;
            buf.fill(Complex64::default());
            // f_n = <k>^s exp(-i n tau Delta) u_n
            for (slot, (j, c)) in buf.iter_mut().zip(seq.series(idx).enumerate()) {
                *slot = c * Complex64::from_polar(
                    weight,
                    (j as f64 * omega).rem_euclid(2.0 * std::f64::consts::PI),
                );
            }
            fwd.process_with_scratch(buf, scratch);
            buf.iter_mut()
                .for_each(|c| *c = Complex64::new(c.norm_sqr(), 0.0));
            inv.process_with_scratch(buf, scratch);
            // buf[j] / len = sum_n f_{n+j} conj(f_n)
            let mut acc = kernel[0] * buf[0].re;
            for j in 1..lags {
                acc += 2.0 * kernel[j] * buf[j].re;
            }
            acc / len as f64
        },
    );
    let total: f64 = tau * per_mode.iter().sum::<f64>();
    Ok(total.max(0.0).sqrt())
}

/// `(tau sum_n (2pi/M)^2 sum_j |Pi_tau u_n(x_j)|^4)^{1/4}`
pub fn l4_norm(seq: &TimeSequence, filter: &FilterSpec) -> f64 {
    let cell = seq.grid().spacing().powi(2);
    let per_step = exec::map(seq.fields(), |f| {
        to_physical(&project(f, filter))
            .values()
            .iter()
            .map(|v| v.norm_sqr().powi(2))
            .sum::<f64>()
    });
    (seq.tau * cell * per_step.iter().sum::<f64>()).powf(0.25)
}

/// `||Pi_tau u_n||_{l^4 L^4} / ||u_n||_{X^{s,b1}}`.
pub fn strichartz_ratio(seq: &TimeSequence, s: f64, b1: f64, tau: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::param("s", format!("{s} must be positive")));
    }
    if !(b1 > 0.5) {
        return Err(Error::param("b1", format!("{b1} must exceed 1/2")));
    }
    let filter = FilterSpec::new(tau)?;
    let denom = bourgain_norm_freq(seq, &BourgainParams::new(s, b1)?)?;
    if denom == 0.0 {
        return Err(Error::Degenerate("Bourgain norm of the sequence is zero"));
    }
    Ok(l4_norm(seq, &filter) / denom)
}

/// `max_n ||u_n||_{H^s} / ||u_n||_{X^{s,b}}`.
pub fn linf_embedding_ratio(seq: &TimeSequence, s: f64, b: f64) -> Result<f64> {
    if !(b > 0.5) {
        return Err(Error::param("b", format!("{b} must exceed 1/2")));
    }
    let denom = bourgain_norm_freq(seq, &BourgainParams::new(s, b)?)?;
    if denom == 0.0 {
        return Err(Error::Degenerate("Bourgain norm of the sequence is zero"));
    }
    let sup = seq
        .fields()
        .iter()
        .map(|f| hs_norm(f, s))
        .fold(0.0, f64::max);
    Ok(sup / denom)
}
