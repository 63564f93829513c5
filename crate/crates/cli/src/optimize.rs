use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Args;
use ringlab_core::config::RunConfig;
use ringlab_core::optimizer::{run_study_until, SearchSpace, Strategy};

use crate::load_config;
use crate::manifest::{create_dir, RunManifest};

pub const LOG_FILE: &str = "trials.jsonl";
pub const SUMMARY_FILE: &str = "study.json";
pub const BEST_FILE: &str = "best_coeffs.json";
pub const SEED_ENV: &str = "VAL_SEED";

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Run configuration (TOML or JSON); defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Study directory; an existing trial log there is resumed.
    #[arg(long)]
    study: PathBuf,
    /// Exploration budget (default 10000).
    #[arg(long)]
    trials_qmc: Option<usize>,
    /// Refinement budget (default 50).
    #[arg(long)]
    trials_refine: Option<usize>,
    /// Study seed; the VAL_SEED environment variable takes precedence.
    #[arg(long)]
    seed: Option<u64>,
    /// Concurrent trial evaluations; 1 keeps logs reproducible.
    #[arg(long)]
    parallel: Option<usize>,
    /// perturb_best or density_ratio.
    #[arg(long)]
    strategy: Option<Strategy>,
    /// Stop once the log holds this many trials; rerun to continue.
    #[arg(long)]
    stop_after: Option<usize>,
    /// Record wall-clock seconds per trial (logs are then not reproducible).
    #[arg(long)]
    timing: bool,
}

fn resolve(args: &OptimizeArgs) -> anyhow::Result<RunConfig> {
    let mut config = load_config(args.config.as_ref())?;
    let study = &mut config.study;
    if let Some(n) = args.trials_qmc {
        study.n_qmc = n;
    }
    if let Some(n) = args.trials_refine {
        study.n_refine = n;
    }
    if let Some(seed) = args.seed {
        study.seed = seed;
    }
    if let Ok(text) = std::env::var(SEED_ENV) {
        study.seed = text
            .trim()
            .parse()
            .map_err(|e| ringlab_core::Error::InvalidConfig(format!("{SEED_ENV}='{text}': {e}")))?;
    }
    if let Some(w) = args.parallel {
        study.parallel_width = w;
    }
    if let Some(s) = args.strategy {
        study.strategy = s;
    }
    if args.timing {
        study.record_elapsed = true;
    }
    config.validate()?;
    Ok(config)
}

pub fn run(args: &OptimizeArgs) -> anyhow::Result<ExitCode> {
    let config = resolve(args)?;
    let mut manifest = RunManifest::new(Some(&config), Some(config.study.seed));
    if let Some(path) = &args.config {
        manifest.add_input(path)?;
    }
    create_dir(&args.study)?;
    let log = args.study.join(LOG_FILE);
    let result = run_study_until(&config.study, &config.ring, &log, args.stop_after)?;

    let summary = result.summary(&config.study, &config.ring);
    let summary_json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    manifest.write_output(&args.study, SUMMARY_FILE, summary_json.as_bytes())?;
    let best = SearchSpace::for_config(&config.ring)?
        .unflatten(result.best.coeffs.clone())
        .context("best trial coefficients")?;
    manifest.write_output(&args.study, BEST_FILE, best.to_json().as_bytes())?;
    manifest.add_output(&args.study, LOG_FILE)?;
    manifest.finish(&args.study)?;

    println!("trials {} of {}", result.history.len(), config.study.n_trials());
    println!(
        "best trial {}  score {:.6}  madc {:.6}  feasible_fraction {:.6}",
        result.best.trial_id, result.best.score, result.best.madc, result.best.feasible_fraction
    );
    Ok(ExitCode::SUCCESS)
}
