use std::path::PathBuf;
use std::process::ExitCode;

use clap::Args;
use ringlab_core::wave_dynamics::ColumnStatus;
use ringlab_core::{axis_field, madc, CoefficientTensor, RingConfig};

use crate::grid::{self, GRID_FILE};
use crate::manifest::{create_dir, RunManifest};
use crate::{load_config, EXIT_INFEASIBLE};

pub const REPORT_FILE: &str = "madc_report.json";

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Run configuration (TOML or JSON); defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Coefficient file ({"J", "K", "c"}).
    #[arg(long)]
    coeffs: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: &SimulateArgs) -> anyhow::Result<ExitCode> {
    let config = load_config(args.config.as_ref())?;
    let coeffs = CoefficientTensor::load(&args.coeffs)?;
    coeffs.check_against(&config.ring)?;
    let mut manifest = RunManifest::new(Some(&config), None);
    if let Some(path) = &args.config {
        manifest.add_input(path)?;
    }
    manifest.add_input(&args.coeffs)?;
    simulate(&coeffs, &config.ring, manifest, &args.out)
}

pub fn run_baseline(args: &BaselineArgs) -> anyhow::Result<ExitCode> {
    let config = load_config(args.config.as_ref())?;
    let mut manifest = RunManifest::new(Some(&config), None);
    if let Some(path) = &args.config {
        manifest.add_input(path)?;
    }
    simulate(&CoefficientTensor::zeros_for(&config.ring), &config.ring, manifest, &args.out)
}

fn simulate(
    coeffs: &CoefficientTensor,
    ring: &RingConfig,
    mut manifest: RunManifest,
    out: &std::path::Path,
) -> anyhow::Result<ExitCode> {
    let field = axis_field(coeffs, ring)?;
    let report = madc(&field, ring)?;

    create_dir(out)?;
    manifest.write_output(out, GRID_FILE, grid::to_csv(&field).as_bytes())?;
    let report_json = serde_json::to_string_pretty(&report).expect("report serializes");
    manifest.write_output(out, REPORT_FILE, report_json.as_bytes())?;
    manifest.finish(out)?;

    println!(
        "madc {:.6}  feasible_fraction {:.6}  score {:.6}",
        report.madc, report.feasible_fraction, report.score
    );
    if report.feasible_fraction == 0.0 {
        let count = |s: ColumnStatus| field.status.iter().filter(|&&x| x == s).count();
        eprintln!(
            "error: no feasible column: {} misaligned (vortex axis has no positive component along the trajectory tangent at t0), {} zero-speed, {} non-finite",
            count(ColumnStatus::Misaligned),
            count(ColumnStatus::ZeroSpeed),
            count(ColumnStatus::NonFinite)
        );
        return Ok(ExitCode::from(EXIT_INFEASIBLE));
    }
    Ok(ExitCode::SUCCESS)
}
