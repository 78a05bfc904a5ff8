use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Matrix3, Vector6};

use super::{BodyVelocity, Pose, VehicleError};

/// Distance from ±π/2 pitch at which the Euler-rate transform is refused.
pub const PITCH_GUARD: f64 = 1e-6;

/// Wrap to (-π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Body-to-NED rotation `Rz(ψ)·Ry(θ)·Rx(φ)`.
pub fn rotation_matrix(phi: f64, theta: f64, psi: f64) -> Matrix3<f64> {
    let (sf, cf) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    Matrix3::new(
        cp * ct,
        -sp * cf + cp * st * sf,
        sp * sf + cp * cf * st,
        sp * ct,
        cp * cf + sf * st * sp,
        -cp * sf + st * sp * cf,
        -st,
        ct * sf,
        ct * cf,
    )
}

/// Body rates to Euler-angle rates.
pub fn euler_rate_matrix(phi: f64, theta: f64) -> Result<Matrix3<f64>, VehicleError> {
    if (theta.abs() - FRAC_PI_2).abs() < PITCH_GUARD {
        return Err(VehicleError::PitchSingularity { theta });
    }
    let (sf, cf) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let tt = st / ct;
    Ok(Matrix3::new(1.0, sf * tt, cf * tt, 0.0, cf, -sf, 0.0, sf / ct, cf / ct))
}

/// `η̇ = J(η)·ν`.
pub fn velocity_transform(pose: &Pose, nu: &BodyVelocity) -> Result<Vector6<f64>, VehicleError> {
    let t = euler_rate_matrix(pose.phi, pose.theta)?;
    let lin = rotation_matrix(pose.phi, pose.theta, pose.psi) * nu.linear();
    let ang = t * nu.angular();
    Ok(Vector6::new(lin[0], lin[1], lin[2], ang[0], ang[1], ang[2]))
}
