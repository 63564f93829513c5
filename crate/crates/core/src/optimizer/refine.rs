//! Refinement strategies proposing candidates from the committed history.
//!
//! Each candidate draws from its own random stream keyed by `(seed, trial_id)`,
//! so the proposal for a given trial depends only on the history before it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{Phase, SearchSpace, TrialRecord};
use crate::ring_model::CoefficientTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Gaussian steps around the incumbent, step size adapted by the 1/5 rule.
    #[default]
    PerturbBest,
    /// Parzen estimators of the good and bad trials; the candidate with the
    /// highest density ratio wins.
    DensityRatio,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "perturb_best" => Ok(Self::PerturbBest),
            "density_ratio" => Ok(Self::DensityRatio),
            other => Err(format!("unknown strategy '{other}' (expected perturb_best or density_ratio)")),
        }
    }
}

pub const INITIAL_STEP_FRACTION: f64 = 0.1;
const STEP_GROWTH: f64 = 1.5;
const MIN_STEP_FRACTION: f64 = 1e-4;

const GOOD_FRACTION: f64 = 0.1;
const MAX_GOOD: usize = 25;
const MAX_BAD: usize = 512;
const DENSITY_CANDIDATES: usize = 24;
const MIN_BANDWIDTH_FRACTION: f64 = 0.01;

fn trial_rng(seed: u64, trial_id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_id as u64 + 1);
    rng
}

fn is_feasible(r: &TrialRecord) -> bool {
    r.feasible_fraction > 0.0 && r.score.is_finite()
}

/// Index of the best feasible trial; ties go to the earliest.
pub fn best_index(history: &[TrialRecord]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, r) in history.iter().enumerate() {
        if is_feasible(r) && best.is_none_or(|b| r.score > history[b].score) {
            best = Some(i);
        }
    }
    best
}

/// Step size after replaying the 1/5 success rule over the refinement trials
/// of `history`: ×1.5 after an improvement, ×1.5^(−1/4) otherwise.
pub fn adapted_step(history: &[TrialRecord], space: &SearchSpace) -> f64 {
    let span = space.upper() - space.lower();
    let mut sigma = INITIAL_STEP_FRACTION * space.upper();
    let mut best = f64::NEG_INFINITY;
    for r in history {
        let improved = is_feasible(r) && r.score > best;
        if r.phase == Phase::Refine {
            sigma *= if improved { STEP_GROWTH } else { STEP_GROWTH.powf(-0.25) };
            sigma = sigma.clamp(MIN_STEP_FRACTION * span, span);
        }
        if improved {
            best = r.score;
        }
    }
    sigma
}

/// `n` candidates for trials `history.len() .. history.len() + n`.
pub fn propose_refinements(
    history: &[TrialRecord],
    n: usize,
    seed: u64,
    strategy: Strategy,
    space: &SearchSpace,
) -> Result<Vec<CoefficientTensor>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let best = best_index(history).ok_or(Error::NoFeasibleHistory)?;
    for r in history {
        if r.coeffs.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} coefficients", space.dim()),
                found: format!("{} in trial {}", r.coeffs.len(), r.trial_id),
            });
        }
    }
    let first_id = history.len();
    (0..n)
        .map(|i| {
            let mut rng = trial_rng(seed, first_id + i);
            let x = match strategy {
                Strategy::PerturbBest => perturb(&history[best].coeffs, adapted_step(history, space), space, &mut rng),
                Strategy::DensityRatio => density_ratio(history, space, &mut rng),
            };
            space.unflatten(x)
        })
        .collect()
}

fn perturb(center: &[f64], sigma: f64, space: &SearchSpace, rng: &mut impl Rng) -> Vec<f64> {
    let normal = Normal::new(0.0, sigma).expect("positive step");
    center.iter().map(|&x| space.clamp(x + normal.sample(rng))).collect()
}

/// One-dimensional Gaussian mixture with a shared bandwidth.
struct Parzen<'a> {
    points: Vec<&'a [f64]>,
    bandwidth: Vec<f64>,
}

impl<'a> Parzen<'a> {
    fn new(points: Vec<&'a [f64]>, space: &SearchSpace) -> Self {
        let dim = space.dim();
        let n = points.len() as f64;
        let span = space.upper() - space.lower();
        let bandwidth = (0..dim)
            .map(|d| {
                let mean = points.iter().map(|p| p[d]).sum::<f64>() / n;
                let var = points.iter().map(|p| (p[d] - mean).powi(2)).sum::<f64>() / n;
                (var.sqrt() * n.powf(-0.2)).clamp(MIN_BANDWIDTH_FRACTION * span, span)
            })
            .collect();
        Self { points, bandwidth }
    }

    /// Sum over dimensions of the log marginal densities.
    fn log_density(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        let mut terms = Vec::with_capacity(self.points.len());
        for (d, &xd) in x.iter().enumerate() {
            let h = self.bandwidth[d];
            terms.clear();
            terms.extend(self.points.iter().map(|p| -0.5 * ((xd - p[d]) / h).powi(2)));
            let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
            total += max + sum.ln() - h.ln();
        }
        total
    }

    fn sample(&self, space: &SearchSpace, rng: &mut impl Rng) -> Vec<f64> {
        let center = self.points[rng.random_range(0..self.points.len())];
        center
            .iter()
            .zip(&self.bandwidth)
            .map(|(&c, &h)| space.clamp(c + h * rng.sample::<f64, _>(rand_distr::StandardNormal)))
            .collect()
    }
}

fn density_ratio(history: &[TrialRecord], space: &SearchSpace, rng: &mut impl Rng) -> Vec<f64> {
    let mut order: Vec<usize> = (0..history.len()).collect();
    order.sort_by(|&a, &b| {
        let key = |i: usize| if is_feasible(&history[i]) { history[i].score } else { f64::NEG_INFINITY };
        key(b).total_cmp(&key(a)).then(a.cmp(&b))
    });
    let n_good = ((GOOD_FRACTION * history.len() as f64).ceil() as usize).clamp(1, MAX_GOOD);
    let good = Parzen::new(order[..n_good].iter().map(|&i| history[i].coeffs.as_slice()).collect(), space);
    let rest = &order[n_good..];
    if rest.is_empty() {
        return good.sample(space, rng);
    }
    let stride = rest.len().div_ceil(MAX_BAD);
    let bad = Parzen::new(rest.iter().step_by(stride).map(|&i| history[i].coeffs.as_slice()).collect(), space);

    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..DENSITY_CANDIDATES {
        let x = good.sample(space, rng);
        let ratio = good.log_density(&x) - bad.log_density(&x);
        if best.as_ref().is_none_or(|(r, _)| ratio > *r) {
            best = Some((ratio, x));
        }
    }
    best.expect("at least one candidate").1
}
