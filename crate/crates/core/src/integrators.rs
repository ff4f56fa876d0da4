//! Filtered and plain Lie splitting for `i u_t = -Delta u - mu |u|^2 u`.
//!
//! One step is
//!
//! ```text
//! u_{n+1} = exp(i tau Delta) Pi_tau( exp(i mu tau |Pi_tau u_n|^2) Pi_tau u_n )
//! ```
//!
//! with `Pi_tau` replaced by the identity for the plain scheme. The
//! nonlinear phase is applied pointwise on the physical grid; the trailing
//! filter, free flow and transform normalization are fused into one
//! multiplier pass, so a step costs two 2D transforms.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::norms::l2_norm;
use crate::spectral::{free_symbol, project, Fft2d, FilterSpec, Grid2D, SpectralField};

/// Points handed to one worker in the pointwise phase loop.
const POINTWISE_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub tau: f64,
    /// `-1` defocusing, `+1` focusing.
    pub mu: i32,
    pub filtered: bool,
    /// Evaluate the nonlinear phase on a 3/2-padded grid (2/3 rule).
    pub dealias: bool,
    /// Largest admissible `n_steps * tau` for [`integrate`].
    pub horizon: Option<f64>,
}

impl StepperConfig {
    pub fn new(tau: f64, mu: i32) -> Result<Self> {
        let cfg = StepperConfig {
            tau,
            mu,
            filtered: true,
            dealias: false,
            horizon: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn filtered(mut self, on: bool) -> Self {
        self.filtered = on;
        self
    }

    pub fn dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn horizon(mut self, t: f64) -> Self {
        self.horizon = Some(t);
        self
    }

    pub fn validate(&self) -> Result<()> {
        FilterSpec::new(self.tau)?;
        validate_mu(self.mu)?;
        if let Some(h) = self.horizon {
            if !(h.is_finite() && h >= 0.0) {
                return Err(Error::param(
                    "horizon",
                    format!("{h} is not a nonnegative time"),
                ));
            }
        }
        Ok(())
    }

    fn filter(&self) -> Option<FilterSpec> {
        self.filtered
            .then(|| FilterSpec::new(self.tau).expect("validated"))
    }
}

pub(crate) fn validate_mu(mu: i32) -> Result<()> {
    if mu == 1 || mu == -1 {
        Ok(())
    } else {
        Err(Error::param("mu", format!("{mu} is not -1 or +1")))
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_field: SpectralField,
    /// `(t_n, u_n)` every `snapshot_every` steps, starting at `n = 0`.
    pub snapshots: Vec<(f64, SpectralField)>,
    /// `||u_n||_{L^2}` for `n = 0..=n_steps`.
    pub mass_trace: Vec<f64>,
}

/// Pointwise phase kernel with its transform buffers.
struct PhaseKernel {
    phys_grid: Grid2D,
    plan: Arc<Fft2d>,
    /// Position of each coefficient inside the (possibly padded) physical
    /// grid. `None` when the grids coincide.
    embed: Option<Vec<usize>>,
    buf: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl PhaseKernel {
    fn new(grid: Grid2D, dealias: bool) -> Self {
        let phys_grid = if dealias { padded_grid(grid) } else { grid };
        let embed = dealias.then(|| {
            grid.modes()
                .map(|k| {
                    phys_grid
                        .index(k)
                        .expect("padded grid contains the mode set")
                })
                .collect()
        });
        PhaseKernel {
            phys_grid,
            plan: Fft2d::plan(phys_grid.m()),
            embed,
            buf: vec![Complex64::default(); phys_grid.len()],
            tmp: Vec::new(),
        }
    }

    /// Synthesizes `mask * coeffs`, applies `w -> exp(i theta |w|^2) w`,
    /// analyzes, and writes `post * result` back into `coeffs`. `post`
    /// must include the `1 / L^2` transform normalization.
    fn apply(
        &mut self,
        coeffs: &mut [Complex64],
        mask: Option<&[bool]>,
        theta: f64,
        post: &[Complex64],
    ) {
        let keep = |i: usize| mask.is_none_or(|m| m[i]);
        match &self.embed {
            None => {
                for (i, (b, &c)) in self.buf.iter_mut().zip(coeffs.iter()).enumerate() {
                    *b = if keep(i) { c } else { Complex64::default() };
                }
            }
            Some(map) => {
                self.buf.fill(Complex64::default());
                for (i, (&at, &c)) in map.iter().zip(coeffs.iter()).enumerate() {
                    if keep(i) {
                        self.buf[at] = c;
                    }
                }
            }
        }
        self.plan.inverse(&mut self.buf, &mut self.tmp);
        exec::for_each_chunk_init(
            &mut self.buf,
            POINTWISE_CHUNK,
            || (),
            |_, chunk| {
                for w in chunk.iter_mut() {
                    let (s, c) = (theta * w.norm_sqr()).sin_cos();
                    *w *= Complex64::new(c, s);
                }
            },
        );
        self.plan.forward(&mut self.buf, &mut self.tmp);
        match &self.embed {
            None => {
                for ((c, &b), &p) in coeffs.iter_mut().zip(&self.buf).zip(post) {
                    *c = b * p;
                }
            }
            Some(map) => {
                for ((c, &at), &p) in coeffs.iter_mut().zip(map).zip(post) {
                    *c = self.buf[at] * p;
                }
            }
        }
    }

    fn normalization(&self) -> f64 {
        1.0 / self.phys_grid.len() as f64
    }
}

/// Smallest even grid of at least `3M/2` points.
fn padded_grid(grid: Grid2D) -> Grid2D {
    let l = (3 * grid.m()).div_ceil(2);
    Grid2D::new(l + l % 2).expect("even and >= 2")
}

/// A reusable Lie splitting stepper for one grid and configuration.
pub struct LieStepper {
    cfg: StepperConfig,
    grid: Grid2D,
    mask: Option<Vec<bool>>,
    post: Vec<Complex64>,
    kernel: PhaseKernel,
}

impl LieStepper {
    pub fn new(grid: Grid2D, cfg: StepperConfig) -> Result<Self> {
        cfg.validate()?;
        let kernel = PhaseKernel::new(grid, cfg.dealias);
        let norm = kernel.normalization();
        let filter = cfg.filter();
        let mask = filter.map(|f| grid.modes().map(|k| f.keeps(k)).collect::<Vec<_>>());
        let post = grid
            .modes()
            .map(|k| match filter {
                Some(f) if !f.keeps(k) => Complex64::default(),
                _ => free_symbol(k, cfg.tau) * norm,
            })
            .collect();
        Ok(LieStepper {
            cfg,
            grid,
            mask,
            post,
            kernel,
        })
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    /// Advances `u` by one step in place.
    pub fn step(&mut self, u: &mut SpectralField) -> Result<()> {
        u.check_grid(self.grid)?;
        let theta = self.cfg.mu as f64 * self.cfg.tau;
        self.kernel
            .apply(u.coeffs_mut(), self.mask.as_deref(), theta, &self.post);
        Ok(())
    }

    /// Initial value of the scheme: `Pi_tau u0` when filtered, else `u0`.
    pub fn initial(&self, u0: &SpectralField) -> SpectralField {
        match self.cfg.filter() {
            Some(f) => project(u0, &f),
            None => u0.clone(),
        }
    }
}

/// Pointwise flow `w -> exp(i mu tau |w|^2) w` evaluated on the grid,
/// returned in coefficient space.
pub fn nonlinear_flow(
    f: &SpectralField,
    tau: f64,
    mu: i32,
    dealias: bool,
) -> Result<SpectralField> {
    validate_mu(mu)?;
    if !tau.is_finite() {
        return Err(Error::param("tau", "must be finite"));
    }
    let mut kernel = PhaseKernel::new(f.grid(), dealias);
    let post = vec![Complex64::new(kernel.normalization(), 0.0); f.grid().len()];
    let mut out = f.clone();
    kernel.apply(out.coeffs_mut(), None, mu as f64 * tau, &post);
    Ok(out)
}

/// One Lie step `u -> Psi^tau(u)`.
pub fn lie_step(u: &SpectralField, cfg: &StepperConfig) -> Result<SpectralField> {
    let mut stepper = LieStepper::new(u.grid(), *cfg)?;
    let mut out = u.clone();
    stepper.step(&mut out)?;
    Ok(out)
}

/// Runs `n_steps` steps from `Pi_tau u0` (or `u0` unfiltered).
pub fn integrate(
    u0: &SpectralField,
    cfg: &StepperConfig,
    n_steps: usize,
    snapshot_every: Option<usize>,
) -> Result<RunResult> {
    cfg.validate()?;
    if let Some(h) = cfg.horizon {
        let t = n_steps as f64 * cfg.tau;
        if t > h * (1.0 + 1e-12) {
            return Err(Error::config(
                "n_steps",
                format!(
                    "{n_steps} steps of {} reach t = {t}, beyond the horizon {h}",
                    cfg.tau
                ),
            ));
        }
    }
    if snapshot_every == Some(0) {
        return Err(Error::param("snapshot_every", "must be positive"));
    }
    let mut stepper = LieStepper::new(u0.grid(), *cfg)?;
    let mut u = stepper.initial(u0);
    let mut mass_trace = Vec::with_capacity(n_steps + 1);
    let mut snapshots = Vec::new();
    mass_trace.push(l2_norm(&u));
    if snapshot_every.is_some() {
        snapshots.push((0.0, u.clone()));
    }
    for n in 1..=n_steps {
        stepper.step(&mut u)?;
        let mass = l2_norm(&u);
        if !mass.is_finite() {
            return Err(Error::NonFinite { tau: cfg.tau });
        }
        mass_trace.push(mass);
        if let Some(every) = snapshot_every {
            if n % every == 0 {
                snapshots.push((n as f64 * cfg.tau, u.clone()));
            }
        }
    }
    Ok(RunResult {
        final_field: u,
        snapshots,
        mass_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rough_data::{generate, RoughDataSpec};
    use crate::spectral::{to_physical, Mode};

    fn grid(m: usize) -> Grid2D {
        Grid2D::new(m).unwrap()
    }

    fn rough(m: usize, s: f64, seed: u64) -> SpectralField {
        generate(&RoughDataSpec::new(s, seed, grid(m)).unwrap())
    }

    #[test]
    fn config_validation() {
        assert!(StepperConfig::new(0.1, 0).is_err());
        assert!(StepperConfig::new(0.1, 2).is_err());
        assert!(StepperConfig::new(0.0, 1).is_err());
        assert!(StepperConfig::new(2.0, 1).is_err());
        assert!(StepperConfig::new(1.0, -1).is_ok());
    }

    #[test]
    fn nonlinear_flow_on_constants_and_zero() {
        let g = grid(8);
        let c = Complex64::new(0.6, -0.8);
        let f = SpectralField::plane_wave(g, Mode::ZERO, c).unwrap();
        for mu in [-1, 1] {
            let out = nonlinear_flow(&f, 0.3, mu, false).unwrap();
            let want = c * Complex64::from_polar(1.0, mu as f64 * 0.3 * c.norm_sqr());
            for k in g.modes() {
                let w = if k == Mode::ZERO {
                    want
                } else {
                    Complex64::default()
                };
                assert!((out.coeff(k) - w).norm() < 1e-14);
            }
        }
        let z = SpectralField::zeros(g);
        assert_eq!(
            nonlinear_flow(&z, 0.3, 1, false).unwrap().coeffs(),
            z.coeffs()
        );
    }

    #[test]
    fn nonlinear_flow_keeps_pointwise_modulus() {
        let f = rough(32, 0.5, 3);
        let out = nonlinear_flow(&f, 0.25, -1, false).unwrap();
        let (p, q) = (to_physical(&f), to_physical(&out));
        for (a, b) in p.values().iter().zip(q.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-13);
        }
    }

    #[test]
    fn nonlinear_flow_conjugation_flips_mu() {
        let f = rough(16, 0.3, 9);
        for mu in [-1, 1] {
            let lhs = nonlinear_flow(&f.conj(), 0.2, mu, false).unwrap();
            let rhs = nonlinear_flow(&f, 0.2, -mu, false).unwrap().conj();
            let err = l2_norm(&lhs.sub(&rhs).unwrap());
            assert!(err <= 1e-12 * l2_norm(&f), "{err}");
        }
    }

    #[test]
    fn dealiased_flow_matches_on_constants() {
        let g = grid(8);
        let c = Complex64::new(0.5, 0.5);
        let f = SpectralField::plane_wave(g, Mode::ZERO, c).unwrap();
        let out = nonlinear_flow(&f, 0.7, 1, true).unwrap();
        let want = c * Complex64::from_polar(1.0, 0.7 * c.norm_sqr());
        assert!((out.coeff(Mode::ZERO) - want).norm() < 1e-14);
        assert_eq!(padded_grid(grid(8)).m(), 12);
        assert_eq!(padded_grid(grid(6)).m(), 10);
    }

    #[test]
    fn plane_wave_step_is_exact() {
        let g = grid(16);
        let k = Mode::new(2, -1);
        let c = Complex64::new(0.7, 0.0);
        let u = SpectralField::plane_wave(g, k, c).unwrap();
        for (tau, mu) in [(0.25, -1), (1.0 / 64.0, 1)] {
            let cfg = StepperConfig::new(tau, mu).unwrap();
            let out = lie_step(&u, &cfg).unwrap();
            let omega = -(k.norm_sq() as f64) + mu as f64 * c.norm_sqr();
            let want = SpectralField::plane_wave(g, k, c * Complex64::from_polar(1.0, omega * tau))
                .unwrap();
            assert!(l2_norm(&out.sub(&want).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn zero_stays_zero() {
        let z = SpectralField::zeros(grid(8));
        let cfg = StepperConfig::new(0.1, -1).unwrap();
        assert_eq!(lie_step(&z, &cfg).unwrap(), z);
    }

    #[test]
    fn filtered_step_does_not_increase_mass() {
        let u = rough(32, 0.2, 5);
        let cfg = StepperConfig::new(1.0 / 16.0, 1).unwrap();
        let out = lie_step(&u, &cfg).unwrap();
        assert!(l2_norm(&out) <= l2_norm(&u));
    }

    #[test]
    fn zero_steps_returns_initial_value() {
        let u = rough(16, 0.5, 1);
        let cfg = StepperConfig::new(0.25, -1).unwrap();
        let run = integrate(&u, &cfg, 0, None).unwrap();
        assert_eq!(
            run.final_field,
            project(&u, &FilterSpec::new(0.25).unwrap())
        );
        assert_eq!(run.mass_trace.len(), 1);
        let run = integrate(&u, &cfg.filtered(false), 0, None).unwrap();
        assert_eq!(run.final_field, u);
    }

    #[test]
    fn snapshots_and_trace_lengths() {
        let u = rough(16, 0.5, 2);
        let cfg = StepperConfig::new(0.125, -1).unwrap();
        let run = integrate(&u, &cfg, 8, Some(3)).unwrap();
        assert_eq!(run.mass_trace.len(), 9);
        let times: Vec<f64> = run.snapshots.iter().map(|s| s.0).collect();
        assert_eq!(times, vec![0.0, 0.375, 0.75]);
        assert!(integrate(&u, &cfg, 8, Some(0)).is_err());
    }

    #[test]
    fn horizon_is_enforced() {
        let u = rough(8, 0.5, 2);
        let cfg = StepperConfig::new(0.25, -1).unwrap().horizon(1.0);
        assert!(integrate(&u, &cfg, 4, None).is_ok());
        assert!(matches!(
            integrate(&u, &cfg, 5, None),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn integrate_is_deterministic() {
        let u = rough(32, 0.5, 4);
        let cfg = StepperConfig::new(1.0 / 32.0, -1).unwrap();
        let a = integrate(&u, &cfg, 10, None).unwrap();
        let b = integrate(&u, &cfg, 10, None).unwrap();
        assert_eq!(a.final_field, b.final_field);
    }
}
