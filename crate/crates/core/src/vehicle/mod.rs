//! Vehicle state and the 6-DOF equations of motion.
//!
//! Body frame: x forward, y starboard, z down, origin at the center of
//! buoyancy. Earth frame: North-East-Down.

mod dynamics;
mod kinematics;
mod state;

pub use dynamics::{
    added_mass_matrix, assemble_inertia, coriolis, restoring_force, rigid_body_inertia, DampingCoefficients,
    MassProperties, VehicleModel, GRAVITY,
};
pub use kinematics::{euler_rate_matrix, rotation_matrix, velocity_transform, wrap_angle, PITCH_GUARD};
pub use state::{BodyVelocity, GeneralizedForce, Pose};

use thiserror::Error;

use crate::hydro::Coefficient;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VehicleError {
    #[error("pitch {theta} rad is within 1e-6 of the Euler singularity")]
    PitchSingularity { theta: f64 },
    #[error("missing coefficient {0}")]
    MissingCoefficient(Coefficient),
    #[error("inertia matrix condition number {condition:.3e} exceeds 1e12")]
    SingularInertia { condition: f64 },
    #[error("inertia matrix not positive definite (smallest eigenvalue {min_eigenvalue})")]
    IndefiniteInertia { min_eigenvalue: f64 },
    #[error("invalid mass properties: {0}")]
    InvalidMassProperties(String),
}
