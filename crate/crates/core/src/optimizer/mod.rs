//! Two-phase search over deformation coefficients: scrambled Sobol
//! exploration, then refinement proposals drawn from the trial history.
//! Every evaluation is appended to a JSON-lines log that a later run can
//! resume from.

mod qmc;
mod refine;
mod study;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring_model::{CoefficientTensor, RingConfig};

pub use qmc::{sample_qmc, sample_qmc_range, unit_point, MAX_QMC_DIMS, MAX_QMC_POINTS};
pub use refine::{adapted_step, best_index, propose_refinements, Strategy, INITIAL_STEP_FRACTION};
pub use study::{evaluate, read_log, run_study, run_study_until, StudyResult, StudySummary};

/// The coefficient box `[−c_max, c_max]^dim`, flattened in `(ℓ, m, j, k)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    poly_terms: usize,
    fourier_modes: usize,
    c_max: f64,
}

impl SearchSpace {
    pub fn new(poly_terms: usize, fourier_modes: usize, c_max: f64) -> Result<Self> {
        if !(c_max.is_finite() && c_max > 0.0) {
            return Err(Error::InvalidConfig(format!("c_max must be positive, got {c_max}")));
        }
        Ok(Self {
            poly_terms,
            fourier_modes,
            c_max,
        })
    }

    pub fn for_config(cfg: &RingConfig) -> Result<Self> {
        Self::new(cfg.poly_terms, cfg.fourier_modes, cfg.c_max)
    }

    pub fn dim(&self) -> usize {
        CoefficientTensor::len_for(self.poly_terms, self.fourier_modes)
    }

    pub fn lower(&self) -> f64 {
        -self.c_max
    }

    pub fn upper(&self) -> f64 {
        self.c_max
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(-self.c_max, self.c_max)
    }

    pub fn flatten(&self, c: &CoefficientTensor) -> Result<Vec<f64>> {
        if (c.poly_terms(), c.fourier_modes()) != (self.poly_terms, self.fourier_modes) {
            return Err(Error::DimensionMismatch {
                expected: format!("J={}, K={}", self.poly_terms, self.fourier_modes),
                found: format!("J={}, K={}", c.poly_terms(), c.fourier_modes()),
            });
        }
        Ok(c.as_slice().to_vec())
    }

    pub fn unflatten(&self, x: Vec<f64>) -> Result<CoefficientTensor> {
        CoefficientTensor::from_flat(self.poly_terms, self.fourier_modes, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Qmc,
    Refine,
}

/// One line of the trial log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialRecord {
    pub trial_id: usize,
    pub phase: Phase,
    /// `madc · feasible_fraction`; zero when no column is feasible.
    pub score: f64,
    pub madc: f64,
    pub feasible_fraction: f64,
    /// Flattened coefficients in `(ℓ, m, j, k)` order.
    pub coeffs: Vec<f64>,
    /// Wall-clock seconds, or 0 unless timing is recorded.
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyConfig {
    pub n_qmc: usize,
    pub n_refine: usize,
    pub seed: u64,
    pub strategy: Strategy,
    pub parallel_width: usize,
    /// Records wall-clock time per trial. Off by default because timings
    /// make otherwise identical logs differ.
    pub record_elapsed: bool,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            n_qmc: 10_000,
            n_refine: 50,
            seed: 0,
            strategy: Strategy::PerturbBest,
            parallel_width: 1,
            record_elapsed: false,
        }
    }
}

impl StudyConfig {
    pub fn n_trials(&self) -> usize {
        self.n_qmc + self.n_refine
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials() == 0 {
            return Err(Error::InvalidConfig("n_qmc + n_refine must be at least 1".into()));
        }
        if self.parallel_width == 0 {
            return Err(Error::InvalidConfig("parallel_width must be at least 1".into()));
        }
        if self.n_qmc > MAX_QMC_POINTS {
            return Err(Error::SequenceTooLong {
                n: self.n_qmc,
                max: MAX_QMC_POINTS,
            });
        }
        Ok(())
    }
}
