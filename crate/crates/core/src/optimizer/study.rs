use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{propose_refinements, sample_qmc_range, Phase, SearchSpace, StudyConfig, TrialRecord};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::objective::{madc, MadcReport};
use crate::ring_model::{CoefficientTensor, RingConfig};
use crate::wave_dynamics::axis_field;

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub best: TrialRecord,
    pub history: Vec<TrialRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub best_trial_id: usize,
    pub best_score: f64,
    pub n_trials: usize,
    pub seed: u64,
    pub config: RunConfig,
}

impl StudyResult {
    pub fn summary(&self, study: &StudyConfig, ring: &RingConfig) -> StudySummary {
        StudySummary {
            best_trial_id: self.best.trial_id,
            best_score: self.best.score,
            n_trials: self.history.len(),
            seed: study.seed,
            config: RunConfig {
                ring: ring.clone(),
                study: study.clone(),
            },
        }
    }
}

/// Axis field and MADC report for one coefficient tensor.
pub fn evaluate(c: &CoefficientTensor, ring: &RingConfig) -> Result<MadcReport> {
    madc(&axis_field(c, ring)?, ring)
}

fn corrupt(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::CorruptLog {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

/// Reads a trial log; a missing file is an empty history. Any line that does
/// not parse as the next record in sequence is reported with its 1-based
/// line number.
pub fn read_log(path: &Path, dim: usize) -> Result<Vec<TrialRecord>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::io(path, e)),
    };
    let mut history = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let record: TrialRecord = serde_json::from_str(&line).map_err(|e| corrupt(path, i + 1, e.to_string()))?;
        if record.trial_id != i {
            return Err(corrupt(path, i + 1, format!("expected trial_id {i}, found {}", record.trial_id)));
        }
        if record.coeffs.len() != dim {
            return Err(corrupt(path, i + 1, format!("expected {dim} coefficients, found {}", record.coeffs.len())));
        }
        if !(record.score.is_finite() && record.coeffs.iter().all(|x| x.is_finite())) {
            return Err(corrupt(path, i + 1, "non-finite value"));
        }
        history.push(record);
    }
    Ok(history)
}

/// Checks that a resumed log was produced by the same study: phases follow
/// the budget and exploration points match the regenerated sequence.
fn check_history(history: &[TrialRecord], study: &StudyConfig, space: &SearchSpace, path: &Path) -> Result<()> {
    if history.len() > study.n_trials() {
        return Err(corrupt(
            path,
            study.n_trials() + 1,
            format!("log holds {} trials, the study budget is {}", history.len(), study.n_trials()),
        ));
    }
    let n_explore = history.len().min(study.n_qmc);
    let expected = sample_qmc_range(space, 0, n_explore, study.seed)?;
    for (r, c) in history.iter().zip(&expected) {
        let want = if r.trial_id < study.n_qmc { Phase::Qmc } else { Phase::Refine };
        if r.phase != want {
            return Err(corrupt(path, r.trial_id + 1, format!("phase {:?} does not match the study budget", r.phase)));
        }
        if r.coeffs != c.as_slice() {
            return Err(corrupt(path, r.trial_id + 1, "coefficients do not match the seeded sequence"));
        }
    }
    for r in &history[n_explore..] {
        if r.phase != Phase::Refine {
            return Err(corrupt(path, r.trial_id + 1, "phase does not match the study budget"));
        }
    }
    Ok(())
}

fn append(writer: &mut File, path: &PathBuf, record: &TrialRecord) -> Result<()> {
    let mut line = serde_json::to_string(record).expect("trial record serializes");
    line.push('\n');
    writer.write_all(line.as_bytes()).map_err(|e| Error::io(path, e))?;
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Runs (or resumes) a study to its full budget.
pub fn run_study(study: &StudyConfig, ring: &RingConfig, log_path: &Path) -> Result<StudyResult> {
    run_study_until(study, ring, log_path, None)
}

/// Like [`run_study`], but stops once the log holds `stop_after` trials.
pub fn run_study_until(
    study: &StudyConfig,
    ring: &RingConfig,
    log_path: &Path,
    stop_after: Option<usize>,
) -> Result<StudyResult> {
    study.validate()?;
    ring.validate()?;
    let space = SearchSpace::for_config(ring)?;
    let path = log_path.to_path_buf();
    let mut history = read_log(log_path, space.dim())?;
    check_history(&history, study, &space, log_path)?;
    let target = stop_after.map_or(study.n_trials(), |n| n.min(study.n_trials()));

    let mut writer = OpenOptions::new()
        .create(true)
        .append(true)
        .open(log_path)
        .map_err(|e| Error::io(log_path, e))?;

    while history.len() < target {
        let start = history.len();
        let (phase, candidates) = if start < study.n_qmc {
            let n = study.parallel_width.min(study.n_qmc - start).min(target - start);
            (Phase::Qmc, sample_qmc_range(&space, start, n, study.seed)?)
        } else {
            let n = study.parallel_width.min(target - start);
            let candidates = match propose_refinements(&history, n, study.seed, study.strategy, &space) {
                // nothing to refine yet: keep exploring along the sequence
                Err(Error::NoFeasibleHistory) => sample_qmc_range(&space, start, n, study.seed)?,
                other => other?,
            };
            (Phase::Refine, candidates)
        };

        let results: Vec<(Result<MadcReport>, f64)> = candidates
            .par_iter()
            .map(|c| {
                let clock = Instant::now();
                let report = evaluate(c, ring);
                (report, clock.elapsed().as_secs_f64())
            })
            .collect();

        for (i, (c, (report, seconds))) in candidates.into_iter().zip(results).enumerate() {
            let report = report?;
            let record = TrialRecord {
                trial_id: start + i,
                phase,
                score: report.score,
                madc: report.madc,
                feasible_fraction: report.feasible_fraction,
                coeffs: c.into_flat(),
                elapsed: if study.record_elapsed { seconds } else { 0.0 },
            };
            append(&mut writer, &path, &record)?;
            history.push(record);
        }
    }

    let best = history
        .iter()
        .fold(None::<&TrialRecord>, |best, r| match best {
            Some(b) if b.score >= r.score => Some(b),
            _ => Some(r),
        })
        .cloned()
        .ok_or_else(|| corrupt(log_path, 1, "study has no trials"))?;
    Ok(StudyResult { best, history })
}
