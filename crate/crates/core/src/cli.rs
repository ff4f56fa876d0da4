//! The `nls2d` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{self, DiagnoseConfig, GenerateConfig, RunConfig};
use crate::convergence::{resolution_study, run_sweep, ConvergenceReport, ExperimentConfig};
use crate::error::Result;
use crate::exec;
use crate::integrators::integrate;
use crate::io::write_json;
use crate::norms::{
    bourgain_norm_freq, bourgain_norm_time, l4_norm, linf_embedding_ratio, strichartz_ratio,
    BourgainParams, TimeSequence,
};
use crate::rough_data::generate;
use crate::spectral::{snapshot, FilterSpec};

#[derive(Debug, Parser)]
#[command(
    name = "nls2d",
    version,
    about = "Filtered Lie splitting for the 2D cubic NLS"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write random rough initial data as a snapshot plus JSON sidecar.
    Generate(CommonArgs),
    /// Integrate a stored snapshot.
    Run(CommonArgs),
    /// Time-step sweep with fitted convergence order.
    Converge(CommonArgs),
    /// Convergence sweeps on several grid sizes.
    Resolution(CommonArgs),
    /// Bourgain-norm and Strichartz diagnostics.
    Diagnose(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON config file.
    #[arg(long)]
    pub config: PathBuf,
    /// Override a config entry, `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Maximum number of worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory; defaults to the config's `output` or `.`.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl CommonArgs {
    fn output_dir(&self, from_config: Option<&Path>) -> PathBuf {
        self.output
            .clone()
            .or_else(|| from_config.map(Path::to_path_buf))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

/// Parses `argv` and runs the command. Returns the process exit code.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn execute(command: &Command) -> Result<()> {
    let args = match command {
        Command::Generate(a)
        | Command::Run(a)
        | Command::Converge(a)
        | Command::Resolution(a)
        | Command::Diagnose(a) => a,
    };
    exec::with_jobs(args.jobs, || match command {
        Command::Generate(a) => cmd_generate(a),
        Command::Run(a) => cmd_run(a),
        Command::Converge(a) => cmd_converge(a),
        Command::Resolution(a) => cmd_resolution(a),
        Command::Diagnose(a) => cmd_diagnose(a),
    })
}

fn cmd_generate(args: &CommonArgs) -> Result<()> {
    let cfg: GenerateConfig = config::parse_generate(&args.config, &args.overrides)?;
    let dir = args.output_dir(None);
    let field = generate(&cfg.spec()?);
    snapshot::write(&dir.join("field.nls2"), &field)?;
    write_json(&dir.join("field.json"), &cfg)
}

#[derive(Serialize)]
struct RunOutput<'a> {
    config: &'a RunConfig,
    mass_trace: &'a [f64],
    snapshots: Vec<(f64, String)>,
}

fn cmd_run(args: &CommonArgs) -> Result<()> {
    let cfg = config::parse_run(&args.config, &args.overrides)?;
    let dir = args.output_dir(cfg.output.as_deref());
    let u0 = snapshot::read(&cfg.input)?;
    let result = integrate(&u0, &cfg.stepper()?, cfg.steps, cfg.snapshot_every)?;
    let mut snapshots = Vec::new();
    for (i, (t, field)) in result.snapshots.iter().enumerate() {
        let name = format!("snapshot_{i:06}.nls2");
        snapshot::write(&dir.join(&name), field)?;
        snapshots.push((*t, name));
    }
    snapshot::write(&dir.join("final.nls2"), &result.final_field)?;
    write_json(
        &dir.join("run.json"),
        &RunOutput {
            config: &cfg,
            mass_trace: &result.mass_trace,
            snapshots,
        },
    )
}

fn cmd_converge(args: &CommonArgs) -> Result<()> {
    let cfg: ExperimentConfig = config::parse_experiment(&args.config, &args.overrides)?;
    let dir = args.output_dir(cfg.output.as_deref());
    let report = run_sweep(&cfg)?;
    report.write(&dir, "convergence")?;
    println!(
        "fitted order {:.4} (s/2 = {:.4})",
        report.fitted_order,
        cfg.s / 2.0
    );
    Ok(())
}

#[derive(Serialize)]
struct ResolutionSummary {
    grids: Vec<usize>,
    fitted_orders: Vec<f64>,
}

fn cmd_resolution(args: &CommonArgs) -> Result<()> {
    let cfg = config::parse_resolution(&args.config, &args.overrides)?;
    let dir = args.output_dir(cfg.experiment.output.as_deref());
    let reports: Vec<ConvergenceReport> = resolution_study(&cfg.experiment, &cfg.grids)?;
    for (m, report) in cfg.grids.iter().zip(&reports) {
        report.write(&dir, &format!("resolution_M{m}"))?;
        println!("M = {m}: fitted order {:.4}", report.fitted_order);
    }
    write_json(
        &dir.join("resolution.json"),
        &ResolutionSummary {
            grids: cfg.grids.clone(),
            fitted_orders: reports.iter().map(|r| r.fitted_order).collect(),
        },
    )
}

#[derive(Debug, Serialize)]
pub struct DiagnoseValues {
    pub l2: f64,
    pub bourgain_freq: f64,
    pub bourgain_time: f64,
    pub l4: f64,
}

#[derive(Debug, Serialize)]
pub struct DiagnoseRatios {
    pub strichartz: f64,
    pub linf_embedding: f64,
    /// `|freq - time| / freq`
    pub route_gap: f64,
}

#[derive(Debug, Serialize)]
pub struct DiagnoseEntry {
    pub tau: f64,
    pub steps: usize,
    pub values: DiagnoseValues,
    pub ratios: DiagnoseRatios,
}

#[derive(Debug, Serialize)]
pub struct DiagnoseReport {
    pub params: DiagnoseConfig,
    pub sequences: Vec<DiagnoseEntry>,
}

/// The filtered Lie trajectory `u_0 .. u_{N-1}` for step `tau`.
pub fn trajectory(cfg: &DiagnoseConfig, tau: f64) -> Result<TimeSequence> {
    let n = cfg.steps(tau)?;
    let u0 = generate(&cfg.data()?);
    let stepper = crate::integrators::StepperConfig::new(tau, cfg.mu)?;
    let run = integrate(&u0, &stepper, n - 1, Some(1))?;
    TimeSequence::new(tau, run.snapshots.into_iter().map(|(_, f)| f).collect())
}

pub fn diagnose(cfg: &DiagnoseConfig) -> Result<DiagnoseReport> {
    cfg.validate()?;
    let mut sequences = Vec::with_capacity(cfg.taus.len());
    for &tau in &cfg.taus {
        let seq = trajectory(cfg, tau)?;
        let p = BourgainParams::new(cfg.s, cfg.b)?;
        let freq = bourgain_norm_freq(&seq, &p)?;
        let time = bourgain_norm_time(&seq, &p)?;
        sequences.push(DiagnoseEntry {
            tau,
            steps: seq.len(),
            values: DiagnoseValues {
                l2: seq.l2_norm(),
                bourgain_freq: freq,
                bourgain_time: time,
                l4: l4_norm(&seq, &FilterSpec::new(tau)?),
            },
            ratios: DiagnoseRatios {
                strichartz: strichartz_ratio(&seq, cfg.s, cfg.b1, tau)?,
                linf_embedding: linf_embedding_ratio(&seq, cfg.s, cfg.b1)?,
                route_gap: (freq - time).abs() / freq,
            },
        });
    }
    Ok(DiagnoseReport {
        params: cfg.clone(),
        sequences,
    })
}

fn cmd_diagnose(args: &CommonArgs) -> Result<()> {
    let cfg = config::parse_diagnose(&args.config, &args.overrides)?;
    let dir = args.output_dir(cfg.output.as_deref());
    let report = diagnose(&cfg)?;
    write_json(&dir.join("diagnose.json"), &report)
}
