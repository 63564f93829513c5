//! `ringlab`: simulate, optimize, render, analyze and verify deformed
//! vortex rings.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 bad input
//! (arguments, configuration, coefficient or grid files), 3 no feasible
//! column in the simulated field, 4 the trial log to resume is corrupt.

mod grid;
mod manifest;
mod optimize;
mod render;
mod simulate;
mod spectrum;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ringlab_core::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "ringlab", version, about = "Vortex-ring deformation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one coefficient set: axis field grid, MADC report, manifest.
    Simulate(simulate::SimulateArgs),
    /// Simulate the undeformed ring (all coefficients zero).
    Baseline(simulate::BaselineArgs),
    /// Run or resume a coefficient search.
    Optimize(optimize::OptimizeArgs),
    /// Draw ring snapshots from a simulated grid as SVG.
    Render(render::RenderArgs),
    /// Fourier mode energies of a coefficient set.
    Spectrum(spectrum::SpectrumArgs),
    /// Run the numerical identity checks.
    Verify(verify::VerifyArgs),
}

/// Exit statuses other than success and bad input.
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_BAD_INPUT: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_CORRUPT_LOG: u8 = 4;

/// Loads the configuration file, or the defaults when none is given.
pub fn load_config(path: Option<&PathBuf>) -> anyhow::Result<RunConfig> {
    Ok(match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<ringlab_core::Error>() {
        Some(ringlab_core::Error::CorruptLog { .. }) => EXIT_CORRUPT_LOG,
        _ => EXIT_BAD_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => simulate::run(&args),
        Command::Baseline(args) => simulate::run_baseline(&args),
        Command::Optimize(args) => optimize::run(&args),
        Command::Render(args) => render::run(&args),
        Command::Spectrum(args) => spectrum::run(&args),
        Command::Verify(args) => verify::run(&args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            // causes already rendered by their parent's message are skipped
            let mut message = String::new();
            for cause in err.chain() {
                let text = cause.to_string();
                if !message.contains(&text) {
                    if !message.is_empty() {
                        message.push_str(": ");
                    }
                    message.push_str(&text);
                }
            }
            eprintln!("error: {message}");
            ExitCode::from(exit_code(&err))
        }
    }
}
