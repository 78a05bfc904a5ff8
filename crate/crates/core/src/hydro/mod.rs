//! Hydrodynamic coefficient estimation from vehicle geometry.
//!
//! Added mass comes from ellipsoid and strip-theory formulas, damping from
//! empirical drag coefficients integrated over strips, and body lift from
//! a slender-body lift slope. Components (hull, thrusters, mast, mounts)
//! are estimated independently and superposed.

mod added_mass;
mod coefficients;
mod damping;
mod estimate;
pub mod fixtures;
mod geometry;
mod lift;

pub use added_mass::{
    crossflow_added_mass, ellipsoid_axial_added_mass, mast_added_mass, roll_added_mass, CrossflowAddedMass,
    HullCrossflowAddedMass, MastAddedMass, RollAddedMass,
};
pub use coefficients::{
    apply_calibration, sign_anomalies, CalibrationFactors, Coefficient, CoefficientEntry, CoefficientSet, Provenance,
    SignAnomaly,
};
pub use damping::{
    axial_damping, crossflow_damping, crossflow_k1, crossflow_k1_branches, ellipsoid_axial_drag_coefficient,
    ittc57_friction, AxialDamping, CrossflowDamping, MIN_REYNOLDS,
};
pub use estimate::{estimate_all, estimate_components, EstimationOptions, Part};
pub use geometry::{AppendageDrag, HullProfile, VehicleGeometry};
pub use lift::{body_lift, BodyLift, LiftMomentConvention};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HydroError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("missing coefficient {0}")]
    MissingCoefficient(Coefficient),
    #[error("unknown coefficient {0}")]
    UnknownCoefficient(String),
    #[error("calibration factor for {coefficient} must be positive, got {factor}")]
    InvalidFactor { coefficient: Coefficient, factor: f64 },
    #[error("{quantity}: doubling strips from {strips} changed the result by {relative_change:.3e} (> 0.5%)")]
    IntegrationTooCoarse {
        quantity: &'static str,
        strips: usize,
        relative_change: f64,
    },
    #[error("{part}: Reynolds number {reynolds:.3e} below the empirical range (>= 1e4)")]
    ReynoldsOutOfRange { part: &'static str, reynolds: f64 },
    #[error("{part}: {source}")]
    Part {
        part: &'static str,
        #[source]
        source: Box<HydroError>,
    },
}

impl HydroError {
    pub(crate) fn in_part(self, part: &'static str) -> HydroError {
        HydroError::Part {
            part,
            source: Box::new(self),
        }
    }
}

/// Relative change tolerated when the strip count is doubled.
pub const STRIP_CONVERGENCE_TOL: f64 = 0.005;

/// Midpoint-rule strip integral of `f` over `[a, b]`.
pub(crate) fn strip_integral(f: impl Fn(f64) -> f64, a: f64, b: f64, strips: usize) -> f64 {
    if b <= a || strips == 0 {
        return 0.0;
    }
    let h = (b - a) / strips as f64;
    (0..strips).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

/// Strip integral at `strips`, rejected if doubling the count moves it by
/// more than [`STRIP_CONVERGENCE_TOL`] of `∫|f|`.
pub(crate) fn converged_integral(
    quantity: &'static str,
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    strips: usize,
) -> Result<f64, HydroError> {
    let coarse = strip_integral(&f, a, b, strips);
    let fine = strip_integral(&f, a, b, 2 * strips);
    let scale = strip_integral(|x| f(x).abs(), a, b, 2 * strips);
    if scale > 0.0 {
        let relative_change = (fine - coarse).abs() / scale;
        if relative_change > STRIP_CONVERGENCE_TOL {
            return Err(HydroError::IntegrationTooCoarse {
                quantity,
                strips,
                relative_change,
            });
        }
    }
    Ok(coarse)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_integral_of_polynomial() {
        let v = strip_integral(|x| x * x, 0.0, 1.0, 1000);
        assert!((v - 1.0 / 3.0).abs() < 1e-6);
        assert_eq!(strip_integral(|_| 1.0, 1.0, 0.0, 10), 0.0);
    }

    #[test]
    fn coarse_integration_rejected() {
        let err = converged_integral("step", |x| if x < 0.3 { 1.0 } else { 0.0 }, 0.0, 1.0, 2);
        assert!(matches!(err, Err(HydroError::IntegrationTooCoarse { .. })));
    }
}
