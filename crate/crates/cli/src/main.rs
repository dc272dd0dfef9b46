use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use leray_core::blowdown::{blow_down, export_rescaled};
use leray_core::driver::{
    check_report, emit_reports, read_report, run_lambda_sweep, CheckOutcome, ExperimentConfig, GridPolicy,
};
use leray_core::solver::{load_state, recover_pressure};
use log::info;

#[derive(Parser)]
#[command(name = "leray", version, about = "Invading-domains experiments for flow past a disc")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Outer radii of the truncated domains, increasing
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
    radii: Vec<f64>,
    /// Angular node count
    #[arg(long, default_value_t = 128)]
    ntheta: usize,
    /// Radial nodes per doubling of the radius
    #[arg(long, default_value_t = 64.0)]
    per_octave: f64,
    /// Newton tolerance relative to lambda
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Outer margin of the blow-down measurement region
    #[arg(long, default_value_t = 0.05)]
    delta0: f64,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invading-domain sequence for a single lambda
    Run {
        #[arg(long)]
        lambda: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Invading-domain sequences for several lambdas, run concurrently
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "0.025,0.05,0.1,0.2")]
        lambdas: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Blow-down analysis of a saved state
    Blowdown {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        delta0: f64,
        /// Also write the rescaled fields into the state directory
        #[arg(long)]
        export: bool,
    },
    /// Re-evaluate every slack in a report
    Check {
        #[arg(long)]
        report: PathBuf,
    },
}

fn experiment(lambdas: Vec<f64>, c: &Common) -> ExperimentConfig {
    ExperimentConfig {
        lambdas,
        radii: c.radii.clone(),
        grid: GridPolicy {
            per_octave: c.per_octave,
            n_theta: c.ntheta,
        },
        newton_tol: c.tol,
        delta0: c.delta0,
        ..Default::default()
    }
}

fn summarize(out: &CheckOutcome) -> ExitCode {
    for f in &out.failures {
        println!("FAIL {f}");
    }
    println!("{} slacks evaluated, {} failures", out.evaluated, out.failures.len());
    if out.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn sweep(cfg: ExperimentConfig, out: &Path) -> Result<ExitCode> {
    let (report, runs) = run_lambda_sweep(&cfg).context("invalid experiment configuration")?;
    emit_reports(&report, &runs, out)?;
    info!("reports written to {}", out.display());
    Ok(summarize(&check_report(&report)))
}

fn main() -> Result<ExitCode> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().cmd {
        Cmd::Run { lambda, common } => sweep(experiment(vec![lambda], &common), &common.out),
        Cmd::Sweep { lambdas, common } => sweep(experiment(lambdas, &common), &common.out),
        Cmd::Blowdown { state, delta0, export } => {
            let s = load_state(&state)?;
            let p = recover_pressure(&s)?;
            let (report, rescaled) = blow_down(&s, &p, delta0)?;
            if export {
                export_rescaled(&state, &rescaled)?;
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({ "blowdown": report }))?
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Check { report } => {
            let r = read_report(&report)?;
            Ok(summarize(&check_report(&r)))
        }
    }
}
