//! Independent oracles shared by the integration and acceptance tests.
//! Nothing here goes through the crate's FFT or Bourgain-norm code paths.
#![allow(dead_code)]

use std::f64::consts::PI;

use nls2d::norms::TimeSequence;
use nls2d::rough_data::{generate, RoughDataSpec};
use nls2d::spectral::{Grid2D, Mode, SpectralField};
use num_complex::Complex64;

pub fn grid(m: usize) -> Grid2D {
    Grid2D::new(m).unwrap()
}

pub fn rough(m: usize, s: f64, seed: u64) -> SpectralField {
    generate(&RoughDataSpec::new(s, seed, grid(m)).unwrap())
}

/// Direct O(M^4) synthesis `u(x_j) = sum_k u_k exp(i <k, x_j>)`.
pub fn dft_synthesis(f: &SpectralField) -> Vec<Complex64> {
    let g = f.grid();
    let m = g.m();
    let mut out = vec![Complex64::default(); m * m];
    for j1 in 0..m {
        for j2 in 0..m {
            let (x1, x2) = (g.coordinate(j1), g.coordinate(j2));
            out[j1 * m + j2] = g
                .modes()
                .map(|k| {
                    f.coeff(k) * Complex64::from_polar(1.0, k.k1 as f64 * x1 + k.k2 as f64 * x2)
                })
                .sum();
        }
    }
    out
}

/// Direct O(M^4) analysis `u_k = M^{-2} sum_j u(x_j) exp(-i <k, x_j>)`.
pub fn dft_analysis(g: Grid2D, samples: &[Complex64]) -> Vec<Complex64> {
    let m = g.m();
    g.modes()
        .map(|k| {
            let mut acc = Complex64::default();
            for j1 in 0..m {
                for j2 in 0..m {
                    let phase = -(k.k1 as f64 * g.coordinate(j1) + k.k2 as f64 * g.coordinate(j2));
                    acc += samples[j1 * m + j2] * Complex64::from_polar(1.0, phase);
                }
            }
            acc / (m * m) as f64
        })
        .collect()
}

/// Bourgain norm by brute force: `u~(sigma, k)` summed explicitly at every
/// point of a fine uniform sigma grid, weighted with the literal complex
/// symbol `d(sigma) = (exp(i tau sigma) - 1) / tau`, and integrated with
/// the trapezoid rule under the measure `dsigma / 2pi`.
pub fn bourgain_direct(seq: &TimeSequence, s: f64, b: f64, points: usize) -> f64 {
    let tau = seq.tau();
    let g = seq.grid();
    let dsigma = 2.0 * PI / tau / points as f64;
    let mut total = 0.0;
    for k in g.modes() {
        let series: Vec<Complex64> = seq.fields().iter().map(|f| f.coeff(k)).collect();
        if series.iter().all(|c| c.norm() == 0.0) {
            continue;
        }
        let mut acc = 0.0;
        for q in 0..points {
            let sigma = -PI / tau + q as f64 * dsigma;
            let u: Complex64 = series
                .iter()
                .enumerate()
                .map(|(n, &c)| c * Complex64::from_polar(tau, n as f64 * tau * sigma))
                .sum();
            let shifted = sigma - k.norm_sq() as f64;
            let d = (Complex64::from_polar(1.0, tau * shifted) - 1.0) / tau;
            acc += (1.0 + d.norm_sqr()).powf(b) * u.norm_sqr();
        }
        total += k.bracket_pow(2.0 * s) * acc * dsigma / (2.0 * PI);
    }
    total.sqrt()
}

pub fn random_sequence(m: usize, n: usize, tau: f64, seed: u64) -> TimeSequence {
    let fields = (0..n)
        .map(|j| rough(m, 0.4, seed.wrapping_mul(977).wrapping_add(j as u64)))
        .collect();
    TimeSequence::new(tau, fields).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn plane_wave(m: usize, k: Mode, c: f64) -> SpectralField {
    SpectralField::plane_wave(grid(m), k, Complex64::new(c, 0.0)).unwrap()
}

/// Exact NLS solution for plane-wave data `c exp(i <k, x>)` at time `t`.
pub fn plane_wave_exact(m: usize, k: Mode, c: f64, mu: i32, t: f64) -> SpectralField {
    let omega = -(k.norm_sq() as f64) + mu as f64 * c * c;
    SpectralField::plane_wave(grid(m), k, Complex64::from_polar(c, omega * t)).unwrap()
}
