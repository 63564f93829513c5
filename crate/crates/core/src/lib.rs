//! Vortex-ring deformation laboratory.
//!
//! The crate evaluates an analytic, radially transported vortex ring with
//! Fourier-polynomial deformations, integrates the wave equations for the
//! swirl-axis coefficients along every material trajectory of the ring,
//! scores how well the swirl axis stays aligned with the vortex axis (MADC),
//! and searches the deformation coefficients that maximize that score.
//!
//! Module map:
//!
//! * [`geometry`]: Frenet frames, curvature and torsion from derivative vectors.
//! * [`ring_model`]: the ring parameterization and its closed-form derivatives.
//! * [`wave_dynamics`]: initial alignment, RK4 integration of α₁, α₂, axis fields.
//! * [`objective`]: the MADC quadrature and feasibility diagnostics.
//! * [`optimizer`]: quasi-Monte Carlo exploration plus refinement, with JSONL trial logs.
//! * [`spectral`]: Fourier mode energies of the deformation.
//! * [`verify`]: numerical checks of the frame-inverse, expansion, Leibniz and closure identities.
//! * [`config`]: the flat key-value run configuration file.

pub mod config;
pub mod error;
pub mod geometry;
pub mod objective;
pub mod optimizer;
pub mod ring_model;
pub mod spectral;
pub mod verify;
pub mod wave_dynamics;

pub use error::{Error, Result};
pub use geometry::{FrenetFrame, TrajectoryKinematics, Vec3};
pub use objective::{madc, MadcReport};
pub use ring_model::{CoefficientTensor, RingConfig};
pub use wave_dynamics::{axis_field, AxisField};
