//! Frenet-frame kinematics of a space curve from its first three derivative
//! vectors.
//!
//! Nothing in this module differentiates numerically: callers hand in the
//! derivative vectors (closed forms from [`crate::ring_model`], or analytic
//! test curves) and get back speed, its rates, curvature, torsion and the
//! moving frame.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction. The caller guarantees a nonzero
    /// norm.
    #[inline]
    pub fn normalized(self) -> Vec3 {
        self / self.norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl AddAssign for Vec3 {
    #[inline]
    fn add_assign(&mut self, rhs: Vec3) {
        *self = *self + rhs;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, rhs: f64) -> Vec3 {
        Vec3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    #[inline]
    fn mul(self, rhs: Vec3) -> Vec3 {
        rhs * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn div(self, rhs: f64) -> Vec3 {
        Vec3::new(self.x / rhs, self.y / rhs, self.z / rhs)
    }
}

/// Orthonormal right-handed moving frame: tangent, principal normal, binormal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetFrame {
    pub tau: Vec3,
    pub n: Vec3,
    pub b: Vec3,
}

/// Thresholds below which the speed or the curvature is treated as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameThresholds {
    pub eps_v: f64,
    pub eps_kappa: f64,
}

impl Default for FrameThresholds {
    fn default() -> Self {
        Self {
            eps_v: 1e-10,
            eps_kappa: 1e-12,
        }
    }
}

/// Speed, its time rates, curvature, torsion and the Frenet frame of a
/// trajectory at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryKinematics {
    pub v: f64,
    pub v_t: f64,
    pub v_tt: f64,
    pub kappa: f64,
    /// Time derivative of the curvature. Not derivable from three derivative
    /// vectors; filled in by the caller (zero until then).
    pub kappa_t: f64,
    pub torsion: f64,
    pub frame: FrenetFrame,
    /// Curvature fell below `eps_kappa`: the normal comes from the fallback
    /// convention and the torsion is reported as zero.
    pub degenerate: bool,
}

/// A curve parameterized by time whose first three derivatives are known in
/// closed form.
pub trait Trajectory {
    fn position(&self, t: f64) -> Vec3;

    /// `[d/dt, d²/dt², d³/dt³]` of the position at `t`.
    fn derivatives(&self, t: f64) -> [Vec3; 3];
}

/// Assembles kinematics from `d1 = Φ'`, `d2 = Φ''`, `d3 = Φ'''`.
pub fn frame_from_derivatives(
    d1: Vec3,
    d2: Vec3,
    d3: Vec3,
    thresholds: FrameThresholds,
) -> Result<TrajectoryKinematics> {
    let v = d1.norm();
    if !(v > thresholds.eps_v) {
        return Err(Error::ZeroSpeed {
            speed: v,
            threshold: thresholds.eps_v,
        });
    }
    let v_t = d1.dot(d2) / v;
    let v_tt = (d2.norm_squared() + d1.dot(d3) - v_t * v_t) / v;

    let tau = d1 / v;
    let cross = d1.cross(d2);
    let cross_norm = cross.norm();
    let kappa = cross_norm / (v * v * v);

    if kappa < thresholds.eps_kappa {
        let n = fallback_normal(tau);
        let b = tau.cross(n);
        return Ok(TrajectoryKinematics {
            v,
            v_t,
            v_tt,
            kappa,
            kappa_t: 0.0,
            torsion: 0.0,
            frame: FrenetFrame { tau, n, b },
            degenerate: true,
        });
    }

    let torsion = cross.dot(d3) / (cross_norm * cross_norm);
    let b = cross / cross_norm;
    let n = b.cross(tau);
    Ok(TrajectoryKinematics {
        v,
        v_t,
        v_tt,
        kappa,
        kappa_t: 0.0,
        torsion,
        frame: FrenetFrame { tau, n, b },
        degenerate: false,
    })
}

/// Normal used when the curvature vanishes: `ẑ × τ`, or `x̂ × τ` when the
/// tangent is (nearly) vertical.
fn fallback_normal(tau: Vec3) -> Vec3 {
    let candidate = Vec3::Z.cross(tau);
    if candidate.norm() >= 1e-8 {
        candidate.normalized()
    } else {
        Vec3::X.cross(tau).normalized()
    }
}

/// Factor converting a time derivative into an arc-length derivative,
/// `∂_z = v⁻¹ ∂_t`.
#[inline]
pub fn arc_reparam_factor(kin: &TrajectoryKinematics) -> f64 {
    1.0 / kin.v
}
