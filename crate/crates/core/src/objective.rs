//! Mean absolute directional correlation (MADC) between the vortex axis and
//! the swirl axis, averaged over the time-angle grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring_model::RingConfig;
use crate::wave_dynamics::AxisField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MadcReport {
    /// Space-time mean of `|ζ̂*·ζ̂|` over the feasible columns.
    pub madc: f64,
    pub feasible_fraction: f64,
    /// `madc · feasible_fraction`, the value optimized by the search.
    pub score: f64,
    /// Mean of `|corr|` over feasible columns at each time node.
    pub per_time_mean: Vec<Option<f64>>,
    /// Trapezoid time mean of `|corr|` per column; `None` when infeasible.
    pub per_s_mean: Vec<Option<f64>>,
}

/// Trapezoid rule over the time nodes, uniform mean over the feasible
/// angular columns. Accumulation runs in ascending index order.
pub fn madc(field: &AxisField, cfg: &RingConfig) -> Result<MadcReport> {
    let n_times = cfg.n_time + 1;
    if field.n_times() != n_times
        || field.n_s() != cfg.n_s
        || field.corr.len() != n_times * cfg.n_s
        || field.status.len() != cfg.n_s
    {
        return Err(Error::DimensionMismatch {
            expected: format!("{n_times} x {} grid", cfg.n_s),
            found: format!("{} x {} grid with {} values", field.n_times(), field.n_s(), field.corr.len()),
        });
    }

    let weight = |i: usize| if i == 0 || i == n_times - 1 { 0.5 } else { 1.0 };
    let weight_sum = cfg.n_time as f64;

    let per_s_mean: Vec<Option<f64>> = (0..cfg.n_s)
        .map(|j| {
            field.is_feasible(j).then(|| {
                let mut acc = 0.0;
                for i in 0..n_times {
                    acc += weight(i) * field.corr_at(i, j).abs();
                }
                acc / weight_sum
            })
        })
        .collect();

    let feasible: Vec<usize> = (0..cfg.n_s).filter(|&j| field.is_feasible(j)).collect();
    let per_time_mean = (0..n_times)
        .map(|i| {
            (!feasible.is_empty()).then(|| {
                let mut acc = 0.0;
                for &j in &feasible {
                    acc += field.corr_at(i, j).abs();
                }
                acc / feasible.len() as f64
            })
        })
        .collect();

    let madc = if feasible.is_empty() {
        0.0
    } else {
        let mut acc = 0.0;
        for m in per_s_mean.iter().flatten() {
            acc += m;
        }
        (acc / feasible.len() as f64).clamp(0.0, 1.0)
    };
    let feasible_fraction = feasible.len() as f64 / cfg.n_s as f64;

    Ok(MadcReport {
        madc,
        feasible_fraction,
        score: madc * feasible_fraction,
        per_time_mean,
        per_s_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use crate::wave_dynamics::ColumnStatus;
    use crate::CoefficientTensor;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn synthetic_field(cfg: &RingConfig, corr: impl Fn(usize, usize) -> f64, feasible: impl Fn(usize) -> bool) -> AxisField {
        let times = cfg.time_nodes();
        let s = cfg.s_nodes();
        let size = times.len() * s.len();
        let status: Vec<ColumnStatus> = (0..s.len())
            .map(|j| if feasible(j) { ColumnStatus::Feasible } else { ColumnStatus::Misaligned })
            .collect();
        let mut values = Vec::with_capacity(size);
        for i in 0..times.len() {
            for j in 0..s.len() {
                values.push(if feasible(j) { corr(i, j) } else { f64::NAN });
            }
        }
        AxisField {
            position: vec![Vec3::ZERO; size],
            zeta_star_hat: vec![Vec3::X; size],
            zeta_hat: vec![Vec3::X; size],
            corr: values,
            status,
            times,
            s,
        }
    }

    fn small_cfg() -> RingConfig {
        RingConfig {
            n_time: 8,
            n_s: 16,
            ..RingConfig::desk_scale()
        }
    }

    #[test]
    fn perfect_alignment_scores_one() {
        let cfg = small_cfg();
        let r = madc(&synthetic_field(&cfg, |_, _| 1.0, |j| j % 3 != 0), &cfg).unwrap();
        assert_abs_diff_eq!(r.madc, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.feasible_fraction, 10.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.score, 10.0 / 16.0, epsilon = 1e-15);
        assert!(r.per_s_mean[0].is_none());
        assert_eq!(r.per_s_mean[1], Some(1.0));
    }

    #[test]
    fn orthogonal_axes_score_zero() {
        let cfg = small_cfg();
        let r = madc(&synthetic_field(&cfg, |_, _| 0.0, |_| true), &cfg).unwrap();
        assert_eq!(r.madc, 0.0);
        assert_eq!(r.feasible_fraction, 1.0);
    }

    #[test]
    fn sign_is_ignored() {
        let cfg = small_cfg();
        let field = synthetic_field(&cfg, |i, j| if (i + j) % 2 == 0 { 1.0 } else { -1.0 }, |_| true);
        assert_abs_diff_eq!(madc(&field, &cfg).unwrap().madc, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn trapezoid_weights_in_time() {
        let cfg = small_cfg();
        // corr linear in the node index: the trapezoid mean is exact
        let n = cfg.n_time as f64;
        let r = madc(&synthetic_field(&cfg, |i, _| i as f64 / n, |_| true), &cfg).unwrap();
        assert_abs_diff_eq!(r.madc, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.per_time_mean[cfg.n_time].unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn nothing_feasible() {
        let cfg = small_cfg();
        let r = madc(&synthetic_field(&cfg, |_, _| 1.0, |_| false), &cfg).unwrap();
        assert_eq!((r.madc, r.feasible_fraction, r.score), (0.0, 0.0, 0.0));
        assert!(r.per_time_mean.iter().all(Option::is_none));
    }

    #[test]
    fn dimension_mismatch() {
        let cfg = small_cfg();
        let field = synthetic_field(&cfg, |_, _| 1.0, |_| true);
        let other = RingConfig { n_s: 32, ..cfg.clone() };
        assert!(matches!(madc(&field, &other), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn grid_refinement_is_consistent() {
        let base = RingConfig::desk_scale();
        let mut c = CoefficientTensor::zeros_for(&base);
        c.set(0, 1, 0, 2, 6.0);
        c.set(1, 0, 0, 3, 4.0);
        c.set(0, 0, 1, 1, -5.0);
        let coarse = RingConfig { n_s: 128, ..base.clone() };
        let fine = RingConfig { n_s: 256, n_time: 64, ..base };
        let a = madc(&crate::axis_field(&c, &coarse).unwrap(), &coarse).unwrap();
        let b = madc(&crate::axis_field(&c, &fine).unwrap(), &fine).unwrap();
        assert!((a.madc - b.madc).abs() < 1e-3, "{} vs {}", a.madc, b.madc);
    }

    proptest! {
        #[test]
        fn madc_is_bounded_and_sign_blind(values in proptest::collection::vec(-1.0..1.0f64, 9 * 16), flips in proptest::collection::vec(any::<bool>(), 9 * 16)) {
            let cfg = small_cfg();
            let field = synthetic_field(&cfg, |i, j| values[i * 16 + j], |j| j != 5);
            let flipped = synthetic_field(&cfg, |i, j| if flips[i * 16 + j] { -values[i * 16 + j] } else { values[i * 16 + j] }, |j| j != 5);
            let a = madc(&field, &cfg).unwrap();
            let b = madc(&flipped, &cfg).unwrap();
            prop_assert!((0.0..=1.0).contains(&a.madc));
            prop_assert_eq!(a.madc, b.madc);
        }
    }
}
