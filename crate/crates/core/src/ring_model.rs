//! Analytic ring parameterization
//!
//! ```text
//! Φ(t,s) = (R(s,δ) + Γ(t) + γ₁(t,s)) e_r(s) + γ₂(t,s) ẑ,   e_r = (cos 2πs, sin 2πs, 0)
//! Γ(t)   = 1 − cos(12πt)
//! γ_ℓ    = (K+1)⁻¹ Σ_j Σ_k (c^{ℓ1}_{jk} sin 2πks + c^{ℓ2}_{jk} cos 2πks) (t−t₀)^{j+1}
//! ```
//!
//! with closed-form time derivatives up to third order and the angular
//! derivative `∂_sΦ`. Evaluation at a fixed angle goes through [`RingColumn`],
//! which folds the Fourier sums once so that each time evaluation costs
//! `O(J)`.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{frame_from_derivatives, FrameThresholds, Trajectory, TrajectoryKinematics, Vec3};

/// Angular frequency of the radial transport, `Γ(t) = 1 − cos(12πt)`.
pub const TRANSPORT_OMEGA: f64 = 12.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleConvention {
    /// `θ = 2πs`; the radius profile is 1-periodic in `s`.
    #[default]
    Turns,
    /// `θ = s`, the literal reading of the elliptic radius formula.
    Radians,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RingConfig {
    pub delta: f64,
    /// Highest polynomial index `J` (terms `j = 0..=J`).
    #[serde(rename = "J")]
    pub poly_terms: usize,
    /// Highest Fourier mode `K` (modes `k = 0..=K`).
    #[serde(rename = "K")]
    pub fourier_modes: usize,
    pub t0: f64,
    pub t1: f64,
    pub n_time: usize,
    pub n_s: usize,
    pub c_max: f64,
    pub angle_convention: AngleConvention,
    pub eps_v: f64,
    pub eps_kappa: f64,
    pub eps_align: f64,
    pub fd_step_factor: f64,
}

impl Default for RingConfig {
    fn default() -> Self {
        Self {
            delta: 0.02,
            poly_terms: 20,
            fourier_modes: 10,
            t0: 1.0 / 48.0,
            t1: 1.0 / 24.0,
            n_time: 32,
            n_s: 128,
            c_max: 30.0,
            angle_convention: AngleConvention::Turns,
            eps_v: 1e-10,
            eps_kappa: 1e-12,
            eps_align: 1e-6,
            fd_step_factor: 1.0 / 1024.0,
        }
    }
}

impl RingConfig {
    /// Reduced configuration used for quick studies: `J = 4`, `K = 6`,
    /// `n_s = 64`, everything else at the defaults.
    pub fn desk_scale() -> Self {
        Self {
            poly_terms: 4,
            fourier_modes: 6,
            n_s: 64,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t0 < self.t1) {
            return fail(format!("need t0 < t1, got t0={} t1={}", self.t0, self.t1));
        }
        if self.n_time < 2 {
            return fail(format!("n_time must be >= 2, got {}", self.n_time));
        }
        if self.n_s < 4 {
            return fail(format!("n_s must be >= 4, got {}", self.n_s));
        }
        if !(0.0..1.0).contains(&self.delta) {
            return fail(format!("delta must lie in [0, 1), got {}", self.delta));
        }
        if !(self.c_max > 0.0 && self.c_max.is_finite()) {
            return fail(format!("c_max must be positive, got {}", self.c_max));
        }
        for (name, value) in [
            ("eps_v", self.eps_v),
            ("eps_kappa", self.eps_kappa),
            ("eps_align", self.eps_align),
            ("fd_step_factor", self.fd_step_factor),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return fail(format!("{name} must be positive, got {value}"));
            }
        }
        Ok(())
    }

    pub fn thresholds(&self) -> FrameThresholds {
        FrameThresholds {
            eps_v: self.eps_v,
            eps_kappa: self.eps_kappa,
        }
    }

    /// Finite-difference step used for `κ′` and the initial alpha rates.
    pub fn fd_step(&self) -> f64 {
        self.fd_step_factor * (self.t1 - self.t0)
    }

    pub fn time_step(&self) -> f64 {
        (self.t1 - self.t0) / self.n_time as f64
    }

    /// The `n_time + 1` integration/quadrature nodes.
    pub fn time_nodes(&self) -> Vec<f64> {
        let h = self.time_step();
        (0..=self.n_time)
            .map(|i| if i == self.n_time { self.t1 } else { self.t0 + i as f64 * h })
            .collect()
    }

    /// Uniform angular grid `s_i = i / n_s`.
    pub fn s_nodes(&self) -> Vec<f64> {
        (0..self.n_s).map(|i| i as f64 / self.n_s as f64).collect()
    }
}

/// Deformation coefficients `c^{ℓm}_{jk}`, stored row-major in
/// `(ℓ, m, j, k)` order. `ℓ = 0` deforms the radius (γ₁), `ℓ = 1` the height
/// (γ₂); `m = 0` multiplies the sine, `m = 1` the cosine.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTensor {
    poly_terms: usize,
    fourier_modes: usize,
    data: Vec<f64>,
}

impl CoefficientTensor {
    pub fn len_for(poly_terms: usize, fourier_modes: usize) -> usize {
        4 * (poly_terms + 1) * (fourier_modes + 1)
    }

    pub fn zeros(poly_terms: usize, fourier_modes: usize) -> Self {
        Self {
            poly_terms,
            fourier_modes,
            data: vec![0.0; Self::len_for(poly_terms, fourier_modes)],
        }
    }

    pub fn zeros_for(cfg: &RingConfig) -> Self {
        Self::zeros(cfg.poly_terms, cfg.fourier_modes)
    }

    pub fn from_flat(poly_terms: usize, fourier_modes: usize, data: Vec<f64>) -> Result<Self> {
        let expected = Self::len_for(poly_terms, fourier_modes);
        if data.len() != expected {
            return Err(Error::DimensionMismatch {
                expected: format!("{expected} coefficients for J={poly_terms}, K={fourier_modes}"),
                found: format!("{}", data.len()),
            });
        }
        if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidCoefficients(format!("non-finite coefficient {bad}")));
        }
        Ok(Self {
            poly_terms,
            fourier_modes,
            data,
        })
    }

    pub fn poly_terms(&self) -> usize {
        self.poly_terms
    }

    pub fn fourier_modes(&self) -> usize {
        self.fourier_modes
    }

    #[inline]
    fn index(&self, l: usize, m: usize, j: usize, k: usize) -> usize {
        debug_assert!(l < 2 && m < 2 && j <= self.poly_terms && k <= self.fourier_modes);
        ((l * 2 + m) * (self.poly_terms + 1) + j) * (self.fourier_modes + 1) + k
    }

    #[inline]
    pub fn get(&self, l: usize, m: usize, j: usize, k: usize) -> f64 {
        self.data[self.index(l, m, j, k)]
    }

    pub fn set(&mut self, l: usize, m: usize, j: usize, k: usize, value: f64) {
        let i = self.index(l, m, j, k);
        self.data[i] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// Checks the shape against `cfg` and every entry against `|c| ≤ c_max`.
    pub fn check_against(&self, cfg: &RingConfig) -> Result<()> {
        if self.poly_terms != cfg.poly_terms || self.fourier_modes != cfg.fourier_modes {
            return Err(Error::DimensionMismatch {
                expected: format!("J={}, K={}", cfg.poly_terms, cfg.fourier_modes),
                found: format!("J={}, K={}", self.poly_terms, self.fourier_modes),
            });
        }
        let max = self.max_abs();
        if max > cfg.c_max {
            return Err(Error::InvalidCoefficients(format!(
                "|c| = {max} exceeds the bound c_max = {}",
                cfg.c_max
            )));
        }
        Ok(())
    }

    fn to_file(&self) -> CoefficientFile {
        let c = (0..2)
            .map(|l| {
                (0..2)
                    .map(|m| {
                        (0..=self.poly_terms)
                            .map(|j| (0..=self.fourier_modes).map(|k| self.get(l, m, j, k)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        CoefficientFile {
            poly_terms: self.poly_terms,
            fourier_modes: self.fourier_modes,
            c,
        }
    }

    fn from_file(file: CoefficientFile) -> Result<Self> {
        let (jn, kn) = (file.poly_terms, file.fourier_modes);
        let shape_err = |what: String| Error::DimensionMismatch {
            expected: format!("c shaped [2][2][{}][{}]", jn + 1, kn + 1),
            found: what,
        };
        if file.c.len() != 2 {
            return Err(shape_err(format!("{} rows at level l", file.c.len())));
        }
        let mut data = Vec::with_capacity(Self::len_for(jn, kn));
        for (l, by_m) in file.c.iter().enumerate() {
            if by_m.len() != 2 {
                return Err(shape_err(format!("{} rows at c[{l}]", by_m.len())));
            }
            for (m, by_j) in by_m.iter().enumerate() {
                if by_j.len() != jn + 1 {
                    return Err(shape_err(format!("{} rows at c[{l}][{m}]", by_j.len())));
                }
                for (j, by_k) in by_j.iter().enumerate() {
                    if by_k.len() != kn + 1 {
                        return Err(shape_err(format!("{} entries at c[{l}][{m}][{j}]", by_k.len())));
                    }
                    data.extend_from_slice(by_k);
                }
            }
        }
        Self::from_flat(jn, kn, data)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("coefficient file serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let file: CoefficientFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        Self::from_file(file).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|reason| Error::Parse {
            path: path.to_path_buf(),
            reason,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}

/// On-disk coefficient layout: `c[ℓ][m][j][k]`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientFile {
    #[serde(rename = "J")]
    poly_terms: usize,
    #[serde(rename = "K")]
    fourier_modes: usize,
    c: Vec<Vec<Vec<Vec<f64>>>>,
}

/// Elliptic initial radius `R(s, δ)`.
pub fn radius_profile(s: f64, delta: f64, convention: AngleConvention) -> f64 {
    let (sin, cos) = profile_angle(s, convention).sin_cos();
    let (a, b) = (1.0 - delta, 1.0 + delta);
    let q = (a * cos).powi(2) + (b * sin).powi(2);
    a * b / (2.0 * q.sqrt())
}

/// `∂_s R(s, δ)`.
pub fn radius_profile_ds(s: f64, delta: f64, convention: AngleConvention) -> f64 {
    let theta = profile_angle(s, convention);
    let (sin, cos) = theta.sin_cos();
    let (a, b) = (1.0 - delta, 1.0 + delta);
    let q = (a * cos).powi(2) + (b * sin).powi(2);
    // dq/dθ = 2 sinθ cosθ (b² − a²)
    let dq = 2.0 * sin * cos * (b * b - a * a);
    let d_theta = -a * b * dq / (4.0 * q * q.sqrt());
    match convention {
        AngleConvention::Turns => TAU * d_theta,
        AngleConvention::Radians => d_theta,
    }
}

fn profile_angle(s: f64, convention: AngleConvention) -> f64 {
    match convention {
        AngleConvention::Turns => TAU * s.rem_euclid(1.0),
        AngleConvention::Radians => s,
    }
}

/// `Γ` and its first three time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportProfile {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

pub fn transport_gamma(t: f64) -> TransportProfile {
    let w = TRANSPORT_OMEGA;
    let (sin, cos) = (w * t).sin_cos();
    TransportProfile {
        value: 1.0 - cos,
        d1: w * sin,
        d2: w * w * cos,
        d3: -w * w * w * sin,
    }
}

/// One deformation component and its partial derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DeformationComponent {
    pub value: f64,
    pub d_t: f64,
    pub d_tt: f64,
    pub d_ttt: f64,
    pub d_s: f64,
    pub d_st: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Deformation {
    /// Radial deformation γ₁.
    pub radial: DeformationComponent,
    /// Vertical deformation γ₂.
    pub vertical: DeformationComponent,
}

pub fn deformation_eval(t: f64, s: f64, c: &CoefficientTensor, cfg: &RingConfig) -> Deformation {
    RingColumn::new(c, cfg, s).deformation(t)
}

/// Position, time derivatives and angular derivative of Φ at one `(t, s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingPoint {
    pub position: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
    pub d3: Vec3,
    pub ds: Vec3,
}

pub fn phi_eval(t: f64, s: f64, c: &CoefficientTensor, cfg: &RingConfig) -> RingPoint {
    RingColumn::new(c, cfg, s).point(t)
}

pub fn kinematics_at(t: f64, s: f64, c: &CoefficientTensor, cfg: &RingConfig) -> Result<TrajectoryKinematics> {
    RingColumn::new(c, cfg, s).kinematics(t)
}

/// The ring restricted to one angular position: the time trajectory
/// `t ↦ Φ(t, s)` together with the angular tangent along it.
#[derive(Debug, Clone)]
pub struct RingColumn<'a> {
    cfg: &'a RingConfig,
    s: f64,
    e_r: Vec3,
    e_theta: Vec3,
    radius: f64,
    radius_s: f64,
    /// `A_ℓj(s)`: the folded Fourier sums, `γ_ℓ = Σ_j A_ℓj (t−t₀)^{j+1}`.
    amp: [Vec<f64>; 2],
    /// `∂_s A_ℓj(s)`.
    amp_s: [Vec<f64>; 2],
}

impl<'a> RingColumn<'a> {
    pub fn new(c: &CoefficientTensor, cfg: &'a RingConfig, s: f64) -> Self {
        debug_assert_eq!(c.poly_terms(), cfg.poly_terms);
        debug_assert_eq!(c.fourier_modes(), cfg.fourier_modes);
        let s_red = s.rem_euclid(1.0);
        let (sin, cos) = (TAU * s_red).sin_cos();
        let e_r = Vec3::new(cos, sin, 0.0);
        let e_theta = Vec3::new(-sin, cos, 0.0);

        let jn = c.poly_terms();
        let kn = c.fourier_modes();
        let norm = 1.0 / (kn + 1) as f64;
        let modes: Vec<(f64, f64)> = (0..=kn)
            .map(|k| (TAU * (k as f64 * s_red).rem_euclid(1.0)).sin_cos())
            .collect();
        let mut amp = [vec![0.0; jn + 1], vec![0.0; jn + 1]];
        let mut amp_s = [vec![0.0; jn + 1], vec![0.0; jn + 1]];
        for l in 0..2 {
            for j in 0..=jn {
                let (mut a, mut a_s) = (0.0, 0.0);
                for (k, &(sk, ck)) in modes.iter().enumerate() {
                    let cs = c.get(l, 0, j, k);
                    let cc = c.get(l, 1, j, k);
                    a += cs * sk + cc * ck;
                    a_s += TAU * k as f64 * (cs * ck - cc * sk);
                }
                amp[l][j] = a * norm;
                amp_s[l][j] = a_s * norm;
            }
        }

        Self {
            cfg,
            s,
            e_r,
            e_theta,
            radius: radius_profile(s, cfg.delta, cfg.angle_convention),
            radius_s: radius_profile_ds(s, cfg.delta, cfg.angle_convention),
            amp,
            amp_s,
        }
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn config(&self) -> &RingConfig {
        self.cfg
    }

    fn component(&self, l: usize, t: f64) -> DeformationComponent {
        let tau = t - self.cfg.t0;
        let amp = &self.amp[l];
        let amp_s = &self.amp_s[l];
        let mut out = DeformationComponent::default();
        // pow[i] = τ^i
        let mut pow = Vec::with_capacity(amp.len() + 1);
        pow.push(1.0);
        for i in 0..amp.len() {
            pow.push(pow[i] * tau);
        }
        for (j, (&a, &a_s)) in amp.iter().zip(amp_s).enumerate() {
            let jf = j as f64;
            out.value += a * pow[j + 1];
            out.d_s += a_s * pow[j + 1];
            out.d_t += (jf + 1.0) * a * pow[j];
            out.d_st += (jf + 1.0) * a_s * pow[j];
            if j >= 1 {
                out.d_tt += (jf + 1.0) * jf * a * pow[j - 1];
            }
            if j >= 2 {
                out.d_ttt += (jf + 1.0) * jf * (jf - 1.0) * a * pow[j - 2];
            }
        }
        out
    }

    pub fn deformation(&self, t: f64) -> Deformation {
        Deformation {
            radial: self.component(0, t),
            vertical: self.component(1, t),
        }
    }

    pub fn point(&self, t: f64) -> RingPoint {
        let g = transport_gamma(t);
        let def = self.deformation(t);
        let (r1, r2) = (def.radial, def.vertical);
        let radial = self.radius + g.value + r1.value;
        RingPoint {
            position: self.e_r * radial + Vec3::Z * r2.value,
            d1: self.e_r * (g.d1 + r1.d_t) + Vec3::Z * r2.d_t,
            d2: self.e_r * (g.d2 + r1.d_tt) + Vec3::Z * r2.d_tt,
            d3: self.e_r * (g.d3 + r1.d_ttt) + Vec3::Z * r2.d_ttt,
            ds: self.e_r * (self.radius_s + r1.d_s) + self.e_theta * (TAU * radial) + Vec3::Z * r2.d_s,
        }
    }

    /// Vortex axis `ζ* = ∂_sΦ`.
    pub fn vortex_axis(&self, t: f64) -> Vec3 {
        self.point(t).ds
    }

    /// `∂_t ζ* = ∂_t ∂_sΦ`.
    pub fn vortex_axis_rate(&self, t: f64) -> Vec3 {
        let g = transport_gamma(t);
        let def = self.deformation(t);
        self.e_r * def.radial.d_st + self.e_theta * (TAU * (g.d1 + def.radial.d_t)) + Vec3::Z * def.vertical.d_st
    }

    fn curvature(&self, t: f64) -> Result<f64> {
        let [d1, d2, _] = self.derivatives(t);
        let v = d1.norm();
        if !(v > self.cfg.eps_v) {
            return Err(Error::ZeroSpeed {
                speed: v,
                threshold: self.cfg.eps_v,
            });
        }
        Ok(d1.cross(d2).norm() / (v * v * v))
    }

    /// Frame and speed data at `t`, with `κ′` from a central difference of
    /// the closed-form curvature.
    pub fn kinematics(&self, t: f64) -> Result<TrajectoryKinematics> {
        let [d1, d2, d3] = self.derivatives(t);
        let mut kin = frame_from_derivatives(d1, d2, d3, self.cfg.thresholds())?;
        let h = self.cfg.fd_step();
        let k_plus = self.curvature(t + h)?;
        let k_minus = self.curvature(t - h)?;
        let eps = self.cfg.eps_kappa;
        kin.kappa_t = if kin.degenerate && k_plus < eps && k_minus < eps {
            0.0
        } else {
            (k_plus - k_minus) / (2.0 * h)
        };
        Ok(kin)
    }
}

impl Trajectory for RingColumn<'_> {
    fn position(&self, t: f64) -> Vec3 {
        self.point(t).position
    }

    fn derivatives(&self, t: f64) -> [Vec3; 3] {
        let p = self.point(t);
        [p.d1, p.d2, p.d3]
    }
}
