use nalgebra::SVector;

use super::{Environment, SimError};
use crate::hydro::CoefficientSet;
use crate::propulsion::{Propulsion, PropulsionOutput, THRUSTER_COUNT};
use crate::vehicle::{velocity_transform, BodyVelocity, MassProperties, Pose, VehicleModel};

/// Largest state magnitude accepted before a step is declared a blow-up.
pub const BLOWUP_LIMIT: f64 = 1e6;
pub const MAX_DT: f64 = 0.1;

const NX: usize = 12 + THRUSTER_COUNT;
type StateVector = SVector<f64, NX>;

/// Rigid body plus propulsion.
#[derive(Debug, Clone)]
pub struct Vehicle {
    pub model: VehicleModel,
    pub propulsion: Propulsion,
}

impl Vehicle {
    pub fn new(coeffs: &CoefficientSet, mass: MassProperties, propulsion: Propulsion) -> Result<Self, SimError> {
        propulsion.validate()?;
        Ok(Self {
            model: VehicleModel::new(coeffs, mass)?,
            propulsion,
        })
    }

    /// Propulsion output at the given state.
    pub fn propulsion_output(&self, state: &SimState, env: &Environment) -> PropulsionOutput {
        let nu_r = VehicleModel::relative_velocity(&state.pose, &state.nu, &env.current_vector());
        self.propulsion.output(&state.n, &nu_r, env.rho, self.model.mass.volume)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimState {
    pub t: f64,
    pub pose: Pose,
    pub nu: BodyVelocity,
    /// Achieved thruster speeds [rev/s].
    pub n: [f64; THRUSTER_COUNT],
}

impl SimState {
    pub fn at_rest(pose: Pose) -> Self {
        Self {
            pose,
            ..Self::default()
        }
    }

    fn to_vector(self) -> StateVector {
        let mut x = StateVector::zeros();
        x.fixed_rows_mut::<6>(0).copy_from(&self.pose.to_vector());
        x.fixed_rows_mut::<6>(6).copy_from(&self.nu.to_vector());
        for i in 0..THRUSTER_COUNT {
            x[12 + i] = self.n[i];
        }
        x
    }

    fn from_vector(t: f64, x: &StateVector) -> Self {
        Self {
            t,
            pose: Pose::from_vector(&x.fixed_rows::<6>(0).into_owned()),
            nu: BodyVelocity::from_vector(&x.fixed_rows::<6>(6).into_owned()),
            n: std::array::from_fn(|i| x[12 + i]),
        }
    }
}

fn derivative(
    vehicle: &Vehicle,
    x: &StateVector,
    n_cmd: &[f64; THRUSTER_COUNT],
    env: &Environment,
) -> Result<StateVector, SimError> {
    let s = SimState::from_vector(0.0, x);
    let eta_dot = velocity_transform(&s.pose, &s.nu)?;
    let current = env.current_vector();
    let tau = vehicle.propulsion_output(&s, env).tau;
    let nu_dot = vehicle.model.dynamics_rhs(&s.pose, &s.nu, &tau, &current);
    let n_dot = vehicle.propulsion.speed_rates(n_cmd, &s.n);
    let mut dx = StateVector::zeros();
    dx.fixed_rows_mut::<6>(0).copy_from(&eta_dot);
    dx.fixed_rows_mut::<6>(6).copy_from(&nu_dot);
    for i in 0..THRUSTER_COUNT {
        dx[12 + i] = n_dot[i];
    }
    Ok(dx)
}

/// One fixed RK4 step of length `dt` under constant speed commands.
///
/// Commands are clamped to the thruster limits. With a zero lag time
/// constant the achieved speeds jump to the command at the start of the
/// step. Angles are wrapped afterwards.
pub fn step(
    vehicle: &Vehicle,
    state: &SimState,
    n_cmd: &[f64; THRUSTER_COUNT],
    env: &Environment,
    dt: f64,
) -> Result<SimState, SimError> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(SimError::InvalidStep(dt));
    }
    let cmd = vehicle.propulsion.clamp_speeds(n_cmd);
    let mut start = *state;
    if vehicle.propulsion.lag_time_constant == 0.0 {
        start.n = cmd;
    }
    let x = start.to_vector();
    let k1 = derivative(vehicle, &x, &cmd, env)?;
    let k2 = derivative(vehicle, &(x + k1 * (dt / 2.0)), &cmd, env)?;
    let k3 = derivative(vehicle, &(x + k2 * (dt / 2.0)), &cmd, env)?;
    let k4 = derivative(vehicle, &(x + k3 * dt), &cmd, env)?;
    let xn = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    let mut next = SimState::from_vector(state.t + dt, &xn);
    next.pose = next.pose.wrapped();
    if let Some(v) = xn.iter().find(|v| !(v.abs() <= BLOWUP_LIMIT)) {
        return Err(SimError::NumericalBlowup { t: next.t, value: *v });
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydro::fixtures;
    use crate::propulsion::ThrusterArms;

    fn vehicle() -> Vehicle {
        let arms = ThrusterArms {
            y_th: 0.18,
            x_th4: 0.55,
            x_th5: -0.65,
        };
        Vehicle::new(
            &fixtures::simulation_default(),
            MassProperties::alice(),
            Propulsion::alice(arms),
        )
        .unwrap()
    }

    #[test]
    fn equilibrium_is_stationary() {
        let v = vehicle();
        let s0 = SimState::at_rest(Pose::at(1.0, 2.0, 3.0, 0.4));
        let s1 = step(&v, &s0, &[0.0; 5], &Environment::default(), 0.01).unwrap();
        assert!((s1.pose.to_vector() - s0.pose.to_vector()).norm() < 1e-12);
        assert!(s1.nu.to_vector().norm() < 1e-12);
        assert_eq!(s1.t, 0.01);
    }

    #[test]
    fn invalid_dt_rejected() {
        let v = vehicle();
        let s = SimState::default();
        assert!(matches!(
            step(&v, &s, &[0.0; 5], &Environment::default(), 0.0),
            Err(SimError::InvalidStep(_))
        ));
        assert!(matches!(
            step(&v, &s, &[0.0; 5], &Environment::default(), 0.2),
            Err(SimError::InvalidStep(_))
        ));
    }

    #[test]
    fn blowup_detected() {
        let v = vehicle();
        let mut s = SimState::default();
        s.pose.x = 2e6;
        assert!(matches!(
            step(&v, &s, &[0.0; 5], &Environment::default(), 0.01),
            Err(SimError::NumericalBlowup { .. })
        ));
    }

    #[test]
    fn drifting_with_current_feels_no_force() {
        let v = vehicle();
        let env = Environment::with_current([0.1, 0.2, 0.0]);
        let mut s = SimState::at_rest(Pose::at(0.0, 0.0, 2.0, 0.7));
        let vc = VehicleModel::body_current(&s.pose, &env.current_vector());
        s.nu = BodyVelocity::new(vc[0], vc[1], vc[2], 0.0, 0.0, 0.0);
        let s1 = step(&v, &s, &[0.0; 5], &env, 0.01).unwrap();
        assert!((s1.nu.to_vector() - s.nu.to_vector()).norm() < 1e-12);
    }
}
