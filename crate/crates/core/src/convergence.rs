//! Time-step sweeps against a fine reference, L2 error curves and fitted
//! convergence orders.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::integrators::{integrate, validate_mu, StepperConfig};
use crate::io::{write_atomic, write_json};
use crate::norms::l2_error;
use crate::rough_data::{generate, RoughDataSpec};
use crate::spectral::{Grid2D, SpectralField};

/// Largest reference step relative to the smallest sweep step.
pub const REFERENCE_RATIO: f64 = 8.0;
/// A reference passes its self-check when halving its step moves it by
/// less than this fraction of the smallest sweep error.
pub const REFERENCE_CHECK_FRACTION: f64 = 0.1;
/// Largest relative size of a tolerated error increase as tau shrinks.
pub const INVERSION_TOLERANCE: f64 = 0.2;

fn default_mu() -> i32 {
    -1
}

fn default_final_time() -> f64 {
    1.0
}

fn default_taus() -> Vec<f64> {
    (6..=13).map(|j| 2f64.powi(-j)).collect()
}

fn default_tau_ref() -> f64 {
    2f64.powi(-16)
}

fn default_true() -> bool {
    true
}

/// One convergence experiment. Serializes to the flat JSON config format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub s: f64,
    pub seed: u64,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "T", default = "default_final_time")]
    pub final_time: f64,
    #[serde(default = "default_taus")]
    pub taus: Vec<f64>,
    #[serde(default = "default_tau_ref")]
    pub tau_ref: f64,
    #[serde(default = "default_mu")]
    pub mu: i32,
    #[serde(default = "default_true")]
    pub reference_filtered: bool,
    #[serde(default)]
    pub dealias: bool,
    /// Number of largest time steps left out of the order fit.
    #[serde(default)]
    pub fit_exclude: usize,
    /// Recompute the reference at `tau_ref / 2` and record the difference.
    #[serde(default = "default_true")]
    pub reference_check: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Desk-scale defaults for data `(s, seed)` on an `m x m` grid.
    pub fn new(s: f64, seed: u64, m: usize) -> Self {
        ExperimentConfig {
            s,
            seed,
            m,
            final_time: default_final_time(),
            taus: default_taus(),
            tau_ref: default_tau_ref(),
            mu: default_mu(),
            reference_filtered: true,
            dealias: false,
            fit_exclude: 0,
            reference_check: true,
            output: None,
        }
    }

    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::new(self.m).map_err(|e| Error::config("M", e.to_string()))
    }

    pub fn data(&self) -> Result<RoughDataSpec> {
        RoughDataSpec::new(self.s, self.seed, self.grid()?)
            .map_err(|e| Error::config("s", e.to_string()))
    }

    /// Steps needed to reach `T` with step `tau`; `key` names the config
    /// entry blamed on failure.
    pub fn steps(&self, tau: f64, key: &str) -> Result<usize> {
        let t = self.final_time;
        let n = (t / tau).round();
        if !(tau > 0.0) || n < 1.0 || (n * tau - t).abs() > 1e-9 * t {
            return Err(Error::config(
                key,
                format!("T = {t} is not an integer multiple of {tau}"),
            ));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.data()?;
        validate_mu(self.mu).map_err(|e| Error::config("mu", e.to_string()))?;
        if !(self.final_time.is_finite() && self.final_time > 0.0) {
            return Err(Error::config(
                "T",
                format!("{} is not a positive time", self.final_time),
            ));
        }
        if self.taus.is_empty() {
            return Err(Error::config("taus", "at least one time step is required"));
        }
        for &tau in &self.taus {
            if !(tau > 0.0 && tau <= 1.0) {
                return Err(Error::config("taus", format!("{tau} is not in (0, 1]")));
            }
            self.steps(tau, "taus")?;
        }
        if !(self.tau_ref > 0.0) {
            return Err(Error::config("tau_ref", "must be positive"));
        }
        self.steps(self.tau_ref, "tau_ref")?;
        let smallest = self.taus.iter().cloned().fold(f64::INFINITY, f64::min);
        if self.tau_ref > smallest / REFERENCE_RATIO {
            return Err(Error::config(
                "tau_ref",
                format!("{} exceeds min(taus) / {REFERENCE_RATIO}", self.tau_ref),
            ));
        }
        if self.reference_filtered {
            let half = (self.m / 2) as f64;
            if half * half * self.tau_ref >= 1.0 {
                return Err(Error::config(
                    "tau_ref",
                    format!(
                        "filter cutoff {} does not exceed M/2 = {half}",
                        self.tau_ref.powf(-0.5)
                    ),
                ));
            }
        }
        let mut sorted = self.taus.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        sorted.dedup();
        if sorted.len() != self.taus.len() {
            return Err(Error::config("taus", "duplicate time steps"));
        }
        if self.taus.len() < self.fit_exclude + 2 {
            return Err(Error::config(
                "fit_exclude",
                format!("leaves fewer than two of {} sweep points", self.taus.len()),
            ));
        }
        Ok(())
    }

    fn sorted_taus(&self) -> Vec<f64> {
        let mut taus = self.taus.clone();
        taus.sort_by(|a, b| b.total_cmp(a));
        taus
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub tau: f64,
    pub l2_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCheck {
    pub tau_ref: f64,
    pub tau_half: f64,
    /// `||ref(tau_ref) - ref(tau_ref / 2)||`
    pub difference: f64,
    pub smallest_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Sorted by `tau`, largest first.
    pub rows: Vec<Row>,
    pub fitted_order: f64,
    /// `(tau_min, tau_max)` of the points entering the fit.
    pub fit_range: (f64, f64),
    /// Time steps left out of the fit.
    pub excluded: Vec<f64>,
    pub monotone_trend: bool,
    pub reference_check: Option<ReferenceCheck>,
    pub config: ExperimentConfig,
    pub version: String,
}

impl ConvergenceReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("tau,l2_error\n");
        for r in &self.rows {
            out.push_str(&format!("{:e},{:e}\n", r.tau, r.l2_error));
        }
        out
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        let csv = dir.join(format!("{stem}.csv"));
        let json = dir.join(format!("{stem}.json"));
        write_atomic(&csv, self.csv().as_bytes())?;
        write_json(&json, self)?;
        Ok((csv, json))
    }
}

/// Least-squares slope of `log2(error)` against `log2(tau)`.
pub fn fit_order(rows: &[(f64, f64)]) -> Result<f64> {
    if rows.len() < 2 {
        return Err(Error::param(
            "rows",
            format!("{} points cannot define a slope", rows.len()),
        ));
    }
    for &(tau, err) in rows {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::param(
                "rows",
                format!("time step {tau} is not positive"),
            ));
        }
        if !(err > 0.0 && err.is_finite()) {
            return Err(Error::param(
                "rows",
                format!("error {err} at tau = {tau} is not positive"),
            ));
        }
    }
    let n = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| r.0.log2()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1.log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::param("rows", "all time steps coincide"));
    }
    Ok(sxy / sxx)
}

/// Errors ordered by decreasing `tau` may rise at most once, by at most
/// [`INVERSION_TOLERANCE`] relative.
pub fn monotone_trend(rows: &[Row]) -> bool {
    let mut inversions = 0;
    for w in rows.windows(2) {
        let (prev, next) = (w[0].l2_error, w[1].l2_error);
        if next > prev {
            if next - prev > INVERSION_TOLERANCE * prev {
                return false;
            }
            inversions += 1;
        }
    }
    inversions <= 1
}

fn run_to(
    u0: &SpectralField,
    cfg: &ExperimentConfig,
    tau: f64,
    filtered: bool,
    key: &str,
) -> Result<SpectralField> {
    let stepper = StepperConfig::new(tau, cfg.mu)?
        .filtered(filtered)
        .dealias(cfg.dealias);
    Ok(integrate(u0, &stepper, cfg.steps(tau, key)?, None)?.final_field)
}

/// The initial field of the experiment.
pub fn initial_data(cfg: &ExperimentConfig) -> Result<SpectralField> {
    Ok(generate(&cfg.data()?))
}

/// Lie splitting of the experiment's data to `T` with step `tau_ref`.
pub fn reference_solution(cfg: &ExperimentConfig) -> Result<SpectralField> {
    cfg.validate()?;
    let u0 = initial_data(cfg)?;
    reference_from(&u0, cfg, cfg.tau_ref)
}

/// Same as [`reference_solution`] for arbitrary initial data and step.
pub fn reference_from(
    u0: &SpectralField,
    cfg: &ExperimentConfig,
    tau: f64,
) -> Result<SpectralField> {
    run_to(u0, cfg, tau, cfg.reference_filtered, "tau_ref")
}

/// Runs filtered Lie splitting for every sweep step and reports the final
/// time errors against the reference.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let u0 = initial_data(cfg)?;
    sweep_from(cfg, &u0)
}

/// [`run_sweep`] for caller-supplied initial data on the config's grid.
pub fn sweep_from(cfg: &ExperimentConfig, u0: &SpectralField) -> Result<ConvergenceReport> {
    cfg.validate()?;
    u0.check_grid(cfg.grid()?)?;
    let (reference, half) = exec::join(
        || reference_from(u0, cfg, cfg.tau_ref),
        || {
            cfg.reference_check
                .then(|| reference_from(u0, cfg, cfg.tau_ref / 2.0))
                .transpose()
        },
    );
    let reference = reference?;
    let mut report = sweep_with(cfg, &reference, |tau| run_to(u0, cfg, tau, true, "taus"))?;
    if let Some(half) = half? {
        let difference = l2_error(&reference, &half)?;
        let smallest_error = report
            .rows
            .iter()
            .map(|r| r.l2_error)
            .fold(f64::INFINITY, f64::min);
        report.reference_check = Some(ReferenceCheck {
            tau_ref: cfg.tau_ref,
            tau_half: cfg.tau_ref / 2.0,
            difference,
            smallest_error,
            passed: difference < REFERENCE_CHECK_FRACTION * smallest_error,
        });
    }
    Ok(report)
}

/// Builds a report from an arbitrary solver `tau -> u(T)` against a given
/// reference. Sweep points run in parallel.
pub fn sweep_with<S>(
    cfg: &ExperimentConfig,
    reference: &SpectralField,
    solver: S,
) -> Result<ConvergenceReport>
where
    S: Fn(f64) -> Result<SpectralField> + Sync + Send,
{
    cfg.validate()?;
    let taus = cfg.sorted_taus();
    let results = exec::map(&taus, |&tau| -> Result<Row> {
        let u = solver(tau)?;
        if !u.is_finite() {
            return Err(Error::NonFinite { tau });
        }
        Ok(Row {
            tau,
            l2_error: l2_error(&u, reference)?,
        })
    });
    let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    let fitted: Vec<(f64, f64)> = rows[cfg.fit_exclude..]
        .iter()
        .map(|r| (r.tau, r.l2_error))
        .collect();
    let fitted_order = fit_order(&fitted)?;
    Ok(ConvergenceReport {
        fit_range: (fitted[fitted.len() - 1].0, fitted[0].0),
        excluded: rows[..cfg.fit_exclude].iter().map(|r| r.tau).collect(),
        monotone_trend: monotone_trend(&rows),
        fitted_order,
        rows,
        reference_check: None,
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

/// One sweep per grid size with shared data parameters. Coefficients of
/// the generated data agree across grids on shared modes.
pub fn resolution_study(cfg: &ExperimentConfig, grids: &[usize]) -> Result<Vec<ConvergenceReport>> {
    if grids.is_empty() {
        return Err(Error::config("grids", "at least one grid size is required"));
    }
    let configs = grids
        .iter()
        .map(|&m| {
            let c = ExperimentConfig { m, ..cfg.clone() };
            c.validate()?;
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    exec::map(&configs, run_sweep).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            taus: vec![0.25, 0.125, 0.0625],
            tau_ref: 2f64.powi(-8),
            ..ExperimentConfig::new(0.5, 7, 8)
        }
    }

    #[test]
    fn fit_exact_line() {
        let rows = [
            (0.5, 2f64.powf(-0.5)),
            (0.25, 0.5),
            (0.125, 2f64.powf(-1.5)),
        ];
        assert!((fit_order(&rows).unwrap() - 0.5).abs() < 1e-14);
        let flat = [(0.5, 3.0), (0.25, 3.0), (0.125, 3.0)];
        assert_eq!(fit_order(&flat).unwrap(), 0.0);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(fit_order(&[(0.5, 1.0)]).is_err());
        assert!(fit_order(&[(0.5, 1.0), (0.25, 0.0)]).is_err());
        assert!(fit_order(&[(0.5, 1.0), (0.25, -1.0)]).is_err());
        assert!(fit_order(&[(0.5, 1.0), (0.5, 2.0)]).is_err());
    }

    #[test]
    fn validation_names_the_key() {
        let key = |c: ExperimentConfig| match c.validate() {
            Err(Error::Config { key, .. }) => key,
            other => panic!("expected config error, got {other:?}"),
        };
        assert_eq!(
            key(ExperimentConfig {
                taus: vec![0.3],
                ..small_config()
            }),
            "taus"
        );
        assert_eq!(
            key(ExperimentConfig {
                tau_ref: 0.125,
                ..small_config()
            }),
            "tau_ref"
        );
        assert_eq!(
            key(ExperimentConfig {
                mu: 0,
                ..small_config()
            }),
            "mu"
        );
        assert_eq!(
            key(ExperimentConfig {
                m: 7,
                ..small_config()
            }),
            "M"
        );
        assert_eq!(
            key(ExperimentConfig {
                s: -1.0,
                ..small_config()
            }),
            "s"
        );
        assert_eq!(
            key(ExperimentConfig {
                final_time: 0.0,
                ..small_config()
            }),
            "T"
        );
        assert_eq!(
            key(ExperimentConfig {
                fit_exclude: 2,
                ..small_config()
            }),
            "fit_exclude"
        );
        // cutoff 2^2 = 4 does not exceed M/2 = 4
        let c = ExperimentConfig {
            tau_ref: 2f64.powi(-4),
            taus: vec![0.5, 0.25],
            ..small_config()
        };
        assert_eq!(key(c), "tau_ref");
        assert!(small_config().validate().is_ok());
        assert!(ExperimentConfig::new(1.0, 7, 128).validate().is_ok());
    }

    #[test]
    fn stub_solver_recovers_exact_power_law() {
        let cfg = ExperimentConfig {
            taus: (2..=9).map(|j| 2f64.powi(-j)).collect(),
            tau_ref: 2f64.powi(-12),
            ..ExperimentConfig::new(1.0, 7, 8)
        };
        let g = cfg.grid().unwrap();
        let reference = SpectralField::from_fn(g, |k| Complex64::new(k.k1 as f64, 1.0));
        let unit = SpectralField::plane_wave(
            g,
            crate::spectral::Mode::new(1, 2),
            Complex64::new(0.0, 1.0),
        )
        .unwrap();
        let report = sweep_with(&cfg, &reference, |tau| {
            reference.add(&unit.scale(Complex64::new(tau.sqrt(), 0.0)))
        })
        .unwrap();
        assert!((report.fitted_order - 0.5).abs() < 1e-10);
        assert!(report.rows.windows(2).all(|w| w[0].tau > w[1].tau));
        assert!(report.monotone_trend);
    }

    #[test]
    fn nan_names_the_step() {
        let cfg = small_config();
        let g = cfg.grid().unwrap();
        let reference = SpectralField::zeros(g);
        let err = sweep_with(&cfg, &reference, |tau| {
            Ok(SpectralField::from_fn(g, |_| {
                Complex64::new(if tau < 0.1 { f64::NAN } else { 1.0 }, 0.0)
            }))
        })
        .unwrap_err();
        assert!(matches!(err, Error::NonFinite { tau } if tau == 0.0625));
    }

    #[test]
    fn trend_rule() {
        let rows = |e: &[f64]| -> Vec<Row> {
            e.iter()
                .enumerate()
                .map(|(i, &l2_error)| Row {
                    tau: 2f64.powi(-(i as i32)),
                    l2_error,
                })
                .collect()
        };
        assert!(monotone_trend(&rows(&[4.0, 3.0, 2.0, 1.0])));
        assert!(monotone_trend(&rows(&[4.0, 3.0, 3.3, 1.0])));
        assert!(!monotone_trend(&rows(&[4.0, 3.0, 3.9, 1.0])));
        assert!(!monotone_trend(&rows(&[4.0, 4.1, 3.0, 3.1])));
    }

    #[test]
    fn small_sweep_is_deterministic() {
        let cfg = small_config();
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a.csv(), b.csv());
        assert_eq!(a.rows.len(), 3);
        assert!(a.rows.iter().all(|r| r.l2_error > 0.0));
        assert!(a.reference_check.is_some());
    }

    #[test]
    fn zero_data_reference_is_zero() {
        let cfg = small_config();
        let z = SpectralField::zeros(cfg.grid().unwrap());
        assert_eq!(reference_from(&z, &cfg, cfg.tau_ref).unwrap(), z);
    }

    #[test]
    fn resolution_shapes() {
        let cfg = ExperimentConfig {
            reference_check: false,
            ..small_config()
        };
        assert_eq!(resolution_study(&cfg, &[8]).unwrap().len(), 1);
        let twice = resolution_study(&cfg, &[8, 8]).unwrap();
        assert_eq!(twice[0], twice[1]);
        assert!(resolution_study(&cfg, &[]).is_err());
    }
}
