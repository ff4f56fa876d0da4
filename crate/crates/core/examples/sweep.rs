//! Runs one convergence sweep and prints the error table.
//!
//! ```text
//! cargo run --release --example sweep -- <s> <seed> <M> [tau_ref_exp] [check]
//! ```

use std::time::Instant;

use nls2d::convergence::{run_sweep, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let s: f64 = arg(0, "1.0").parse()?;
    let seed: u64 = arg(1, "7").parse()?;
    let m: usize = arg(2, "128").parse()?;
    let tau_ref_exp: i32 = arg(3, "16").parse()?;
    let check = arg(4, "false") == "true";

    let cfg = ExperimentConfig {
        tau_ref: 2f64.powi(-tau_ref_exp),
        reference_check: check,
        ..ExperimentConfig::new(s, seed, m)
    };
    let start = Instant::now();
    let report = run_sweep(&cfg)?;
    for r in &report.rows {
        println!("{:>12.4e}  {:.6e}", r.tau, r.l2_error);
    }
    println!("order {:.4} (s/2 = {:.4})", report.fitted_order, s / 2.0);
    if let Some(c) = &report.reference_check {
        println!(
            "reference check: diff {:.3e}, smallest error {:.3e}, passed {}",
            c.difference, c.smallest_error, c.passed
        );
    }
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
