use std::path::PathBuf;
use std::process::ExitCode;

use clap::Args;
use ringlab_core::spectral::{dominant_mode_count, mode_energies_with_threshold, Component, DEFAULT_DOMINANCE_THRESHOLD};
use ringlab_core::{CoefficientTensor, Error, RingConfig};

use crate::load_config;
use crate::manifest::{create_dir, RunManifest};

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    coeffs: PathBuf,
    /// Run configuration (TOML or JSON); defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// terminal, initial, or a time value.
    #[arg(long, default_value = "terminal")]
    time: String,
    /// radial, vertical or both.
    #[arg(long, default_value = "both")]
    component: String,
    /// Dominance threshold relative to the largest mode energy.
    #[arg(long, default_value_t = DEFAULT_DOMINANCE_THRESHOLD)]
    threshold: f64,
    /// Directory for spectrum.csv and manifest.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn parse_time(spec: &str, ring: &RingConfig) -> Result<f64, Error> {
    let t = match spec {
        "terminal" => ring.t1,
        "initial" => ring.t0,
        other => other
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("time '{other}' is not initial, terminal or a number")))?,
    };
    if !(t >= ring.t0) {
        return Err(Error::InvalidConfig(format!("time {t} precedes t0 = {}", ring.t0)));
    }
    Ok(t)
}

fn parse_component(spec: &str) -> Result<Component, Error> {
    match spec {
        "radial" => Ok(Component::Radial),
        "vertical" => Ok(Component::Vertical),
        "both" => Ok(Component::Both),
        other => Err(Error::InvalidConfig(format!("component '{other}' is not radial, vertical or both"))),
    }
}

pub fn run(args: &SpectrumArgs) -> anyhow::Result<ExitCode> {
    let config = load_config(args.config.as_ref())?;
    let coeffs = CoefficientTensor::load(&args.coeffs)?;
    coeffs.check_against(&config.ring)?;
    let t = parse_time(&args.time, &config.ring)?;
    let component = parse_component(&args.component)?;
    let spectrum = mode_energies_with_threshold(&coeffs, t, &config.ring, component, args.threshold);

    create_dir(&args.out)?;
    let mut manifest = RunManifest::new(Some(&config), None);
    manifest.add_input(&args.coeffs)?;
    if let Some(path) = &args.config {
        manifest.add_input(path)?;
    }
    manifest.write_output(&args.out, "spectrum.csv", spectrum.to_csv().as_bytes())?;
    manifest.finish(&args.out)?;

    let dominant: Vec<String> = spectrum.dominant.iter().map(usize::to_string).collect();
    println!("t = {t:.6}  total energy {:.6e}", spectrum.total_energy());
    println!("dominant modes: {} [{}]", dominant_mode_count(&spectrum), dominant.join(","));
    Ok(ExitCode::SUCCESS)
}
