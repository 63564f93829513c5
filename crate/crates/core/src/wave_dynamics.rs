//! Swirl-axis coefficients α₁, α₂ along each material trajectory of the ring.
//!
//! At a fixed angle `s` the trajectory `t ↦ Φ(t, s)` carries a Frenet frame
//! `(τ, n, b)`. The swirl axis is `ζ = τ − α₁ n − α₂ b`, and the coefficients
//! obey
//!
//! ```text
//! α₁″ = (v″/v) α₁ + 2 v κ′ + 4 v′ κ
//! α₂″ = (v″/v) α₂
//! ```
//!
//! (primes are time derivatives). They are started aligned with the vortex
//! axis `ζ* = ∂_sΦ` at `t₀` and integrated with fixed-step RK4 on the
//! `n_time` grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{FrenetFrame, TrajectoryKinematics, Vec3};
use crate::ring_model::{CoefficientTensor, RingColumn, RingConfig};

/// Anything that can report trajectory kinematics (including `κ′`) at a time.
pub trait KinematicsSource {
    fn kinematics(&self, t: f64) -> Result<TrajectoryKinematics>;
}

impl KinematicsSource for RingColumn<'_> {
    fn kinematics(&self, t: f64) -> Result<TrajectoryKinematics> {
        RingColumn::kinematics(self, t)
    }
}

/// `(α₁, α₁′, α₂, α₂′)` at one angular point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AlphaPoint {
    pub alpha1: f64,
    pub alpha1_t: f64,
    pub alpha2: f64,
    pub alpha2_t: f64,
}

impl AlphaPoint {
    fn to_array(self) -> [f64; 4] {
        [self.alpha1, self.alpha1_t, self.alpha2, self.alpha2_t]
    }

    fn from_array(y: [f64; 4]) -> Self {
        Self {
            alpha1: y[0],
            alpha1_t: y[1],
            alpha2: y[2],
            alpha2_t: y[3],
        }
    }

    fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

/// Alpha state over the whole angular grid at one time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AlphaState {
    pub t: f64,
    pub alpha1: Vec<f64>,
    pub alpha2: Vec<f64>,
    pub alpha1_t: Vec<f64>,
    pub alpha2_t: Vec<f64>,
}

impl AlphaState {
    pub fn len(&self) -> usize {
        self.alpha1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha1.is_empty()
    }

    pub fn point(&self, i: usize) -> AlphaPoint {
        AlphaPoint {
            alpha1: self.alpha1[i],
            alpha1_t: self.alpha1_t[i],
            alpha2: self.alpha2[i],
            alpha2_t: self.alpha2_t[i],
        }
    }

    fn from_points(t: f64, points: impl IntoIterator<Item = AlphaPoint>) -> Self {
        let mut state = AlphaState {
            t,
            ..Default::default()
        };
        for p in points {
            state.alpha1.push(p.alpha1);
            state.alpha1_t.push(p.alpha1_t);
            state.alpha2.push(p.alpha2);
            state.alpha2_t.push(p.alpha2_t);
        }
        state
    }
}

/// Swirl axis `ζ = τ − α₁ n − α₂ b` (not normalized).
#[inline]
pub fn swirl_axis(frame: &FrenetFrame, alpha1: f64, alpha2: f64) -> Vec3 {
    frame.tau - frame.n * alpha1 - frame.b * alpha2
}

/// Coefficients making `ζ` parallel to `ζ*` with positive orientation.
///
/// Writing `ζ̂* = a τ + b n + c b`, the choice `α₁ = −b/a`, `α₂ = −c/a` gives
/// `ζ = ζ̂*/a`. It exists only when `a > eps_align`.
pub fn solve_initial_alignment(frame: &FrenetFrame, zeta_star: Vec3, eps_align: f64) -> Result<(f64, f64)> {
    let unit = zeta_star.normalized();
    let a = unit.dot(frame.tau);
    if !(a > eps_align) {
        return Err(Error::Infeasible { tangent_component: a });
    }
    Ok((-unit.dot(frame.n) / a, -unit.dot(frame.b) / a))
}

/// The aligned coefficients of [`solve_initial_alignment`] at time `t`.
pub fn aligned_alphas(column: &RingColumn, t: f64) -> Result<(f64, f64)> {
    let kin = column.kinematics(t)?;
    solve_initial_alignment(&kin.frame, column.vortex_axis(t), column.config().eps_align)
}

/// Initial rates `(α₁′, α₂′)` at `t₀`: the exact time derivatives of the
/// aligned coefficients, so the two axes stay aligned to second order.
///
/// With `A = ζ*·τ`, `N = ζ*·n`, `B = ζ*·b` the aligned solution is
/// `α₁ = −N/A`, `α₂ = −B/A`; the rates follow from `∂_tζ*` and the
/// Frenet-Serret equations.
pub fn initial_alpha_rates(t0: f64, s: f64, c: &CoefficientTensor, cfg: &RingConfig) -> Result<(f64, f64)> {
    column_rates(&RingColumn::new(c, cfg, s), t0)
}

fn column_rates(column: &RingColumn, t0: f64) -> Result<(f64, f64)> {
    let kin = column.kinematics(t0)?;
    let zs = column.vortex_axis(t0);
    let zs_t = column.vortex_axis_rate(t0);
    let FrenetFrame { tau, n, b } = kin.frame;
    let (a, nn, bb) = (zs.dot(tau), zs.dot(n), zs.dot(b));
    if !(a > column.config().eps_align * zs.norm()) {
        return Err(Error::Infeasible {
            tangent_component: a / zs.norm(),
        });
    }
    let bend = kin.v * kin.kappa;
    let twist = kin.v * kin.torsion;
    let a_t = zs_t.dot(tau) + bend * nn;
    let n_t = zs_t.dot(n) - bend * a + twist * bb;
    let b_t = zs_t.dot(b) - twist * nn;
    Ok(((nn * a_t - n_t * a) / (a * a), (bb * a_t - b_t * a) / (a * a)))
}

/// Aligned initial state of one column at `t₀`.
pub fn column_initial_state(column: &RingColumn) -> Result<AlphaPoint> {
    let t0 = column.config().t0;
    let (alpha1, alpha2) = aligned_alphas(column, t0)?;
    let (alpha1_t, alpha2_t) = column_rates(column, t0)?;
    Ok(AlphaPoint {
        alpha1,
        alpha1_t,
        alpha2,
        alpha2_t,
    })
}

fn wave_rhs(source: &impl KinematicsSource, t: f64, y: [f64; 4]) -> Result<[f64; 4]> {
    let kin = source.kinematics(t)?;
    let stretch = kin.v_tt / kin.v;
    Ok([
        y[1],
        stretch * y[0] + 2.0 * kin.v * kin.kappa_t + 4.0 * kin.v_t * kin.kappa,
        y[3],
        stretch * y[2],
    ])
}

fn axpy(y: [f64; 4], h: f64, k: [f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

/// Classical RK4 on `(α₁, α₁′, α₂, α₂′)` from `t_start` with `steps` equal
/// steps of size `h`. Returns the `steps + 1` states including the start.
pub fn integrate_column(
    source: &impl KinematicsSource,
    init: AlphaPoint,
    t_start: f64,
    h: f64,
    steps: usize,
) -> Result<Vec<AlphaPoint>> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = init.to_array();
    out.push(init);
    for i in 0..steps {
        let t = t_start + i as f64 * h;
        let k1 = wave_rhs(source, t, y)?;
        let k2 = wave_rhs(source, t + 0.5 * h, axpy(y, 0.5 * h, k1))?;
        let k3 = wave_rhs(source, t + 0.5 * h, axpy(y, 0.5 * h, k2))?;
        let k4 = wave_rhs(source, t + h, axpy(y, h, k3))?;
        y = std::array::from_fn(|n| y[n] + h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]));
        out.push(AlphaPoint::from_array(y));
    }
    Ok(out)
}

/// Integrates every angular column of `init` over `[t₀, t₁]`.
///
/// Fails with the first column error (e.g. `ZeroSpeed`); [`axis_field`] is
/// the variant that records such columns as infeasible instead.
pub fn integrate_alpha(c: &CoefficientTensor, cfg: &RingConfig, init: &AlphaState) -> Result<Vec<AlphaState>> {
    cfg.validate()?;
    if init.len() != cfg.n_s {
        return Err(Error::DimensionMismatch {
            expected: format!("{} angular points", cfg.n_s),
            found: format!("{}", init.len()),
        });
    }
    let s_nodes = cfg.s_nodes();
    let columns: Vec<Vec<AlphaPoint>> = s_nodes
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let column = RingColumn::new(c, cfg, s);
            integrate_column(&column, init.point(i), cfg.t0, cfg.time_step(), cfg.n_time)
        })
        .collect::<Result<_>>()?;
    Ok(cfg
        .time_nodes()
        .into_iter()
        .enumerate()
        .map(|(n, t)| AlphaState::from_points(t, columns.iter().map(|col| col[n])))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnStatus {
    Feasible,
    /// The vortex axis has no positive component along the trajectory
    /// tangent at `t₀`, so no aligned start exists.
    Misaligned,
    /// The trajectory speed dropped below `eps_v` somewhere on the path.
    ZeroSpeed,
    /// The coefficients left the floating-point range during integration.
    NonFinite,
}

impl ColumnStatus {
    pub fn is_feasible(self) -> bool {
        self == ColumnStatus::Feasible
    }
}

/// Unit vortex axis, unit swirl axis and their correlation on the
/// `(n_time + 1) × n_s` grid, stored time-major (`index = i * n_s + j`).
#[derive(Debug, Clone, PartialEq)]
pub struct AxisField {
    pub times: Vec<f64>,
    pub s: Vec<f64>,
    pub position: Vec<Vec3>,
    pub zeta_star_hat: Vec<Vec3>,
    /// NaN components on infeasible columns.
    pub zeta_hat: Vec<Vec3>,
    /// `ζ̂*·ζ̂`; NaN on infeasible columns.
    pub corr: Vec<f64>,
    pub status: Vec<ColumnStatus>,
}

impl AxisField {
    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    pub fn n_s(&self) -> usize {
        self.s.len()
    }

    #[inline]
    pub fn index(&self, time: usize, column: usize) -> usize {
        time * self.s.len() + column
    }

    pub fn corr_at(&self, time: usize, column: usize) -> f64 {
        self.corr[self.index(time, column)]
    }

    pub fn is_feasible(&self, column: usize) -> bool {
        self.status[column].is_feasible()
    }

    pub fn feasible_count(&self) -> usize {
        self.status.iter().filter(|s| s.is_feasible()).count()
    }
}

struct ColumnTrace {
    position: Vec<Vec3>,
    zeta_star_hat: Vec<Vec3>,
    zeta_hat: Vec<Vec3>,
    corr: Vec<f64>,
    status: ColumnStatus,
}

fn trace_column(c: &CoefficientTensor, cfg: &RingConfig, s: f64, times: &[f64]) -> ColumnTrace {
    let column = RingColumn::new(c, cfg, s);
    let points: Vec<_> = times.iter().map(|&t| column.point(t)).collect();
    let position = points.iter().map(|p| p.position).collect();
    let zeta_star_hat: Vec<Vec3> = points.iter().map(|p| p.ds.normalized()).collect();

    let infeasible = |status| ColumnTrace {
        position: points.iter().map(|p| p.position).collect(),
        zeta_star_hat: zeta_star_hat.clone(),
        zeta_hat: vec![Vec3::new(f64::NAN, f64::NAN, f64::NAN); times.len()],
        corr: vec![f64::NAN; times.len()],
        status,
    };
    let classify = |err: &Error| match err {
        Error::Infeasible { .. } => ColumnStatus::Misaligned,
        _ => ColumnStatus::ZeroSpeed,
    };

    let solve = || -> Result<Vec<Vec3>> {
        let init = column_initial_state(&column)?;
        let alphas = integrate_column(&column, init, cfg.t0, cfg.time_step(), cfg.n_time)?;
        if !alphas.iter().all(AlphaPoint::is_finite) {
            return Ok(Vec::new());
        }
        times
            .iter()
            .zip(&alphas)
            .map(|(&t, a)| {
                let kin = column.kinematics(t)?;
                Ok(swirl_axis(&kin.frame, a.alpha1, a.alpha2))
            })
            .collect()
    };

    match solve() {
        Err(err) => infeasible(classify(&err)),
        Ok(zetas) if zetas.is_empty() || !zetas.iter().all(|z| z.is_finite()) => infeasible(ColumnStatus::NonFinite),
        Ok(zetas) => {
            let zeta_hat: Vec<Vec3> = zetas.iter().map(|z| z.normalized()).collect();
            let corr = zeta_hat
                .iter()
                .zip(&zeta_star_hat)
                .map(|(z, zs)| z.dot(*zs).clamp(-1.0, 1.0))
                .collect();
            ColumnTrace {
                position,
                zeta_star_hat,
                zeta_hat,
                corr,
                status: ColumnStatus::Feasible,
            }
        }
    }
}

/// Builds the axis field of a coefficient tensor. Per-column failures are
/// recorded in `status`, never returned as errors; only an invalid
/// configuration or coefficient shape fails.
pub fn axis_field(c: &CoefficientTensor, cfg: &RingConfig) -> Result<AxisField> {
    cfg.validate()?;
    c.check_against(cfg)?;
    let times = cfg.time_nodes();
    let s_nodes = cfg.s_nodes();
    let traces: Vec<ColumnTrace> = s_nodes.par_iter().map(|&s| trace_column(c, cfg, s, &times)).collect();

    let size = times.len() * s_nodes.len();
    let mut field = AxisField {
        position: Vec::with_capacity(size),
        zeta_star_hat: Vec::with_capacity(size),
        zeta_hat: Vec::with_capacity(size),
        corr: Vec::with_capacity(size),
        status: traces.iter().map(|t| t.status).collect(),
        times,
        s: s_nodes,
    };
    for i in 0..field.times.len() {
        for trace in &traces {
            field.position.push(trace.position[i]);
            field.zeta_star_hat.push(trace.zeta_star_hat[i]);
            field.zeta_hat.push(trace.zeta_hat[i]);
            field.corr.push(trace.corr[i]);
        }
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FrameThresholds;
    use crate::ring_model::radius_profile_ds;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const STD_FRAME: FrenetFrame = FrenetFrame {
        tau: Vec3::X,
        n: Vec3::Y,
        b: Vec3::Z,
    };

    /// Straight trajectory with prescribed speed `v(t) = 2 + sin t`.
    struct SyntheticSpeed;

    impl KinematicsSource for SyntheticSpeed {
        fn kinematics(&self, t: f64) -> Result<TrajectoryKinematics> {
            Ok(TrajectoryKinematics {
                v: 2.0 + t.sin(),
                v_t: t.cos(),
                v_tt: -t.sin(),
                kappa: 0.0,
                kappa_t: 0.0,
                torsion: 0.0,
                frame: STD_FRAME,
                degenerate: true,
            })
        }
    }

    #[test]
    fn alignment_examples() {
        assert_eq!(solve_initial_alignment(&STD_FRAME, Vec3::X, 1e-6).unwrap(), (0.0, 0.0));
        let (a1, a2) = solve_initial_alignment(&STD_FRAME, Vec3::new(1.0, 1.0, 0.0), 1e-6).unwrap();
        assert_abs_diff_eq!(a1, -1.0, epsilon = 1e-15);
        assert_eq!(a2, 0.0);
        assert!(matches!(
            solve_initial_alignment(&STD_FRAME, Vec3::Y, 1e-6),
            Err(Error::Infeasible { .. })
        ));
        assert!(solve_initial_alignment(&STD_FRAME, Vec3::new(-1.0, 0.2, 0.0), 1e-6).is_err());
    }

    #[test]
    fn aligned_swirl_axis_is_parallel() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let zs = Vec3::new(rng.random_range(0.01..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let (a1, a2) = solve_initial_alignment(&STD_FRAME, zs, 1e-6).unwrap();
            let zeta = swirl_axis(&STD_FRAME, a1, a2);
            assert_abs_diff_eq!(zeta.normalized().dot(zs.normalized()), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(zeta.norm_squared(), 1.0 + a1 * a1 + a2 * a2, epsilon = 1e-9 * zeta.norm_squared());
            assert_eq!(zeta.dot(STD_FRAME.tau), 1.0);
        }
    }

    #[test]
    fn homogeneous_equation_reproduces_speed() {
        let (t0, len) = (1.0 / 48.0, 1.0 / 48.0);
        let v = |t: f64| 2.0 + f64::sin(t);
        let init = AlphaPoint {
            alpha1: v(t0),
            alpha1_t: t0.cos(),
            alpha2: v(t0),
            alpha2_t: t0.cos(),
        };
        let out = integrate_column(&SyntheticSpeed, init, t0, len / 32.0, 32).unwrap();
        assert_eq!(out.len(), 33);
        for (i, p) in out.iter().enumerate() {
            let t = t0 + i as f64 * len / 32.0;
            assert!((p.alpha2 - v(t)).abs() / v(t) < 1e-8);
            // κ ≡ 0: both coefficients obey the same equation
            assert_eq!(p.alpha1, p.alpha2);
            assert_eq!(p.alpha1_t, p.alpha2_t);
        }
    }

    #[test]
    fn stationary_alignment_has_zero_rates() {
        struct Frozen;
        impl KinematicsSource for Frozen {
            fn kinematics(&self, _t: f64) -> Result<TrajectoryKinematics> {
                frame_from_parts()
            }
        }
        fn frame_from_parts() -> Result<TrajectoryKinematics> {
            crate::geometry::frame_from_derivatives(Vec3::X, Vec3::ZERO, Vec3::ZERO, FrameThresholds::default())
        }
        // time-independent frame and ζ*: the aligned solution is constant
        let zs = Vec3::new(1.0, 0.5, -0.25);
        let h = 1e-5;
        let a_plus = solve_initial_alignment(&Frozen.kinematics(h).unwrap().frame, zs, 1e-6).unwrap();
        let a_minus = solve_initial_alignment(&Frozen.kinematics(-h).unwrap().frame, zs, 1e-6).unwrap();
        assert_eq!((a_plus.0 - a_minus.0) / (2.0 * h), 0.0);
        assert_eq!((a_plus.1 - a_minus.1) / (2.0 * h), 0.0);
    }

    #[test]
    fn deformed_rates_match_richardson_oracle() {
        let cfg = RingConfig::desk_scale();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut checked = 0;
        for _ in 0..20 {
            let n = CoefficientTensor::len_for(cfg.poly_terms, cfg.fourier_modes);
            let data = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let c = CoefficientTensor::from_flat(cfg.poly_terms, cfg.fourier_modes, data).unwrap();
            let s: f64 = rng.random_range(0.0..1.0);
            let column = RingColumn::new(&c, &cfg, s);
            let Ok((r1, r2)) = column_rates(&column, cfg.t0) else { continue };
            let d = |h: f64| {
                let p = aligned_alphas(&column, cfg.t0 + h).unwrap();
                let m = aligned_alphas(&column, cfg.t0 - h).unwrap();
                ((p.0 - m.0) / (2.0 * h), (p.1 - m.1) / (2.0 * h))
            };
            let h = 1e-4 * (cfg.t1 - cfg.t0);
            let (c1, c2) = (d(h), d(h / 2.0));
            let oracle = ((4.0 * c2.0 - c1.0) / 3.0, (4.0 * c2.1 - c1.1) / 3.0);
            assert!((r1 - oracle.0).abs() <= 1e-6 * oracle.0.abs().max(1.0), "{r1} {}", oracle.0);
            assert!((r2 - oracle.1).abs() <= 1e-6 * oracle.1.abs().max(1.0), "{r2} {}", oracle.1);
            checked += 1;
        }
        assert!(checked >= 5);
    }

    #[test]
    fn baseline_rates_match_richardson_oracle() {
        let cfg = RingConfig::default();
        let c = CoefficientTensor::zeros_for(&cfg);
        let s = 0.4; // ∂_sR > 0 here, so the column is feasible
        assert!(radius_profile_ds(s, cfg.delta, cfg.angle_convention) > 0.0);
        let (r1, r2) = initial_alpha_rates(cfg.t0, s, &c, &cfg).unwrap();
        let column = RingColumn::new(&c, &cfg, s);
        let d = |h: f64| {
            let p = aligned_alphas(&column, cfg.t0 + h).unwrap();
            let m = aligned_alphas(&column, cfg.t0 - h).unwrap();
            ((p.0 - m.0) / (2.0 * h), (p.1 - m.1) / (2.0 * h))
        };
        let h = 1e-3 * (cfg.t1 - cfg.t0);
        let (c1, c2) = (d(h), d(h / 2.0));
        let oracle = ((4.0 * c2.0 - c1.0) / 3.0, (4.0 * c2.1 - c1.1) / 3.0);
        assert!((r1 - oracle.0).abs() <= 1e-7 * oracle.0.abs().max(1.0));
        assert_abs_diff_eq!(r2, oracle.1, epsilon = 1e-9);
        assert!(r1 != 0.0);
    }

    #[test]
    fn baseline_symmetry_points_are_infeasible() {
        let cfg = RingConfig::default();
        let c = CoefficientTensor::zeros_for(&cfg);
        let field = axis_field(&c, &cfg).unwrap();
        for s in [0.0, 0.25, 0.5, 0.75] {
            let j = (s * cfg.n_s as f64) as usize;
            assert_eq!(field.status[j], ColumnStatus::Misaligned);
        }
        assert!(field.feasible_count() < cfg.n_s);
        assert!(field.feasible_count() > 0);
    }

    #[test]
    fn field_starts_aligned() {
        let cfg = RingConfig::desk_scale();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data = (0..CoefficientTensor::len_for(cfg.poly_terms, cfg.fourier_modes))
            .map(|_| rng.random_range(-10.0..10.0))
            .collect();
        let c = CoefficientTensor::from_flat(cfg.poly_terms, cfg.fourier_modes, data).unwrap();
        let field = axis_field(&c, &cfg).unwrap();
        assert_eq!(field.corr.len(), (cfg.n_time + 1) * cfg.n_s);
        for j in 0..cfg.n_s {
            if field.is_feasible(j) {
                assert_abs_diff_eq!(field.corr_at(0, j), 1.0, epsilon = 1e-12);
                for i in 0..field.n_times() {
                    let k = field.index(i, j);
                    assert_abs_diff_eq!(field.zeta_hat[k].norm(), 1.0, epsilon = 1e-12);
                    assert_abs_diff_eq!(field.zeta_star_hat[k].norm(), 1.0, epsilon = 1e-12);
                    assert!((-1.0..=1.0).contains(&field.corr[k]));
                }
            } else {
                assert!(field.corr_at(0, j).is_nan());
            }
        }
    }

    #[test]
    fn rk4_self_convergence_on_baseline() {
        let cfg = RingConfig::default();
        let c = CoefficientTensor::zeros_for(&cfg);
        let column = RingColumn::new(&c, &cfg, 0.4);
        let init = column_initial_state(&column).unwrap();
        let len = cfg.t1 - cfg.t0;
        let fine = integrate_column(&column, init, cfg.t0, len / 320.0, 320).unwrap();
        let coarse = integrate_column(&column, init, cfg.t0, len / 32.0, 32).unwrap();
        let reference = fine.last().unwrap();
        let end = coarse.last().unwrap();
        let scale = reference.alpha1.abs().max(1.0);
        assert!((end.alpha1 - reference.alpha1).abs() / scale < 1e-9);
        assert!((end.alpha2 - reference.alpha2).abs() < 1e-9);
    }

    #[test]
    fn serial_and_parallel_fields_agree() {
        let cfg = RingConfig { n_s: 16, ..RingConfig::desk_scale() };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data = (0..CoefficientTensor::len_for(cfg.poly_terms, cfg.fourier_modes))
            .map(|_| rng.random_range(-30.0..30.0))
            .collect();
        let c = CoefficientTensor::from_flat(cfg.poly_terms, cfg.fourier_modes, data).unwrap();
        let field = axis_field(&c, &cfg).unwrap();
        let times = cfg.time_nodes();
        for (j, &s) in cfg.s_nodes().iter().enumerate() {
            let trace = trace_column(&c, &cfg, s, &times);
            assert_eq!(trace.status, field.status[j]);
            for i in 0..times.len() {
                assert_eq!(trace.corr[i].to_bits(), field.corr_at(i, j).to_bits());
            }
        }
    }

    #[test]
    fn integrate_alpha_checks_dimensions() {
        let cfg = RingConfig::desk_scale();
        let c = CoefficientTensor::zeros_for(&cfg);
        let init = AlphaState::from_points(cfg.t0, vec![AlphaPoint::default(); 3]);
        assert!(matches!(integrate_alpha(&c, &cfg, &init), Err(Error::DimensionMismatch { .. })));
        let init = AlphaState::from_points(cfg.t0, vec![AlphaPoint::default(); cfg.n_s]);
        let series = integrate_alpha(&c, &cfg, &init).unwrap();
        assert_eq!(series.len(), cfg.n_time + 1);
        assert_eq!(series[cfg.n_time].t, cfg.t1);
        // zero data stays (numerically) zero on the force-free baseline
        assert!(series.iter().all(|st| st.alpha1.iter().all(|&a| a.abs() < 1e-10)));
        assert!(series.iter().all(|st| st.alpha2.iter().all(|&a| a == 0.0)));
    }
}
