//! Thruster models and the thruster configuration matrix.
//!
//! Thrusters 1 and 2 are the horizontal pair (port, starboard), 3 the
//! vertical thruster, 4 and 5 the lateral tunnel thrusters fore and aft.
//! Speeds are in rev/s, forces in N.

use nalgebra::{SMatrix, SVector, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vehicle::{BodyVelocity, GeneralizedForce};

pub const THRUSTER_COUNT: usize = 5;

pub type ConfigMatrix = SMatrix<f64, 6, THRUSTER_COUNT>;
pub type ThrustVector = SVector<f64, THRUSTER_COUNT>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropulsionError {
    #[error("thruster {id}: speed {n} rev/s exceeds limit {n_max}")]
    OverSpeed { id: usize, n: f64, n_max: f64 },
    #[error("thruster {id} is not a{} thruster", if *.expected == ThrusterKind::Tunnel { " tunnel" } else { "n open-propeller" })]
    WrongKind { id: usize, expected: ThrusterKind },
    #[error("expected {expected} thruster values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid thruster spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThrusterKind {
    OpenPropeller,
    Tunnel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThrusterSpec {
    pub id: usize,
    pub kind: ThrusterKind,
    /// Propeller diameter [m].
    pub diameter: f64,
    pub k_t: f64,
    pub k_q: f64,
    /// Speed limit [rev/s].
    pub n_max: f64,
    #[serde(default)]
    pub wake_fraction: f64,
    #[serde(default)]
    pub thrust_deduction: f64,
    /// Jet deduction constant (tunnel only).
    #[serde(default)]
    pub c_jet: f64,
    /// Tunnel cross-section [m^2] (tunnel only).
    #[serde(default)]
    pub tunnel_area: f64,
    pub position: [f64; 3],
    /// Unit force direction for positive speed.
    pub direction: [f64; 3],
    /// +1 or -1: sign of the shaft reaction torque about `direction`.
    #[serde(default = "one")]
    pub handedness: f64,
    /// Bollard-pull calibration multiplier on `k_t`.
    #[serde(default = "one")]
    pub bollard_factor: f64,
    /// Astern efficiency multiplier on `k_t` for negative speed.
    #[serde(default = "one")]
    pub astern_factor: f64,
    /// Optional `(J, k_t)` table; overrides the constant `k_t` when the
    /// thruster advances through the water.
    #[serde(default)]
    pub kt_table: Option<Vec<[f64; 2]>>,
}

fn one() -> f64 {
    1.0
}

impl ThrusterSpec {
    pub fn validate(&self) -> Result<(), PropulsionError> {
        let bad = |m: String| Err(PropulsionError::InvalidSpec(format!("thruster {}: {m}", self.id)));
        if !(self.diameter > 0.0) {
            return bad(format!("diameter must be positive, got {}", self.diameter));
        }
        if !(self.k_t > 0.0 && self.k_q >= 0.0) {
            return bad(format!(
                "k_t must be positive and k_q non-negative, got {} and {}",
                self.k_t, self.k_q
            ));
        }
        if !(self.n_max > 0.0) {
            return bad(format!("n_max must be positive, got {}", self.n_max));
        }
        if !(0.0..1.0).contains(&self.wake_fraction) {
            return bad(format!("wake fraction must be in [0, 1), got {}", self.wake_fraction));
        }
        if !(0.0..1.0).contains(&self.thrust_deduction) {
            return bad(format!(
                "thrust deduction must be in [0, 1), got {}",
                self.thrust_deduction
            ));
        }
        if !(self.bollard_factor > 0.0 && self.astern_factor > 0.0) {
            return bad("bollard and astern factors must be positive".into());
        }
        if self.kind == ThrusterKind::Tunnel && !(self.tunnel_area > 0.0) {
            return bad("tunnel area must be positive".into());
        }
        let d = Vector3::from(self.direction).norm();
        if (d - 1.0).abs() > 1e-9 {
            return bad(format!("direction must be a unit vector (norm {d})"));
        }
        if let Some(t) = &self.kt_table {
            if t.len() < 2 || t.windows(2).any(|w| w[1][0] <= w[0][0]) {
                return bad("k_t table needs at least two rows with increasing J".into());
            }
        }
        Ok(())
    }

    /// `k_t` including the bollard and astern factors.
    pub fn effective_kt(&self, n: f64) -> f64 {
        let astern = if n < 0.0 { self.astern_factor } else { 1.0 };
        self.k_t * self.bollard_factor * astern
    }

    fn check_speed(&self, n: f64) -> Result<(), PropulsionError> {
        if n.abs() > self.n_max * (1.0 + 1e-12) {
            return Err(PropulsionError::OverSpeed {
                id: self.id,
                n,
                n_max: self.n_max,
            });
        }
        Ok(())
    }

    fn kt_at(&self, advance: f64, n: f64) -> f64 {
        let base = self.effective_kt(n);
        match &self.kt_table {
            Some(table) if n != 0.0 => {
                let j = (advance / (n.abs() * self.diameter)).abs();
                base / self.k_t * interpolate(table, j)
            }
            _ => base,
        }
    }

    /// Forward and astern force limits at `n_max` in open water.
    pub fn force_limits(&self, rho: f64) -> (f64, f64) {
        let s = rho * self.diameter.powi(4) * self.n_max * self.n_max;
        (-s * self.effective_kt(-1.0), s * self.effective_kt(1.0))
    }

    /// Speed that produces `force` under the open-water law, clamped to `n_max`.
    pub fn speed_for_force(&self, force: f64, rho: f64) -> f64 {
        if force == 0.0 {
            return 0.0;
        }
        let kt = self.effective_kt(force);
        let n = (force.abs() / (rho * self.diameter.powi(4) * kt)).sqrt();
        n.min(self.n_max).copysign(force)
    }
}

fn interpolate(table: &[[f64; 2]], x: f64) -> f64 {
    if x <= table[0][0] {
        return table[0][1];
    }
    let last = table[table.len() - 1];
    if x >= last[0] {
        return last[1];
    }
    let i = table.partition_point(|r| r[0] <= x);
    let [x0, y0] = table[i - 1];
    let [x1, y1] = table[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Open-water thrust and torque `(ρD⁴k_t n|n|, ρD⁵k_q n|n|)`.
pub fn open_water_thrust(spec: &ThrusterSpec, n: f64, rho: f64) -> Result<(f64, f64), PropulsionError> {
    spec.check_speed(n)?;
    Ok(open_water_unchecked(spec, n, rho))
}

fn open_water_unchecked(spec: &ThrusterSpec, n: f64, rho: f64) -> (f64, f64) {
    let nn = n * n.abs();
    let d4 = spec.diameter.powi(4);
    (
        rho * d4 * spec.effective_kt(n) * nn,
        rho * d4 * spec.diameter * spec.k_q * nn,
    )
}

/// Delivered thrust of an open propeller advancing at `u` through the hull
/// wake, after thrust deduction.
pub fn hull_adjusted_thrust(spec: &ThrusterSpec, n: f64, u: f64, rho: f64) -> Result<f64, PropulsionError> {
    if spec.kind != ThrusterKind::OpenPropeller {
        return Err(PropulsionError::WrongKind {
            id: spec.id,
            expected: ThrusterKind::OpenPropeller,
        });
    }
    spec.check_speed(n)?;
    Ok(hull_adjusted_unchecked(spec, n, u, rho))
}

fn hull_adjusted_unchecked(spec: &ThrusterSpec, n: f64, u: f64, rho: f64) -> f64 {
    let u_p = u * (1.0 - spec.wake_fraction);
    let t = rho * spec.diameter.powi(4) * spec.kt_at(u_p, n) * n * n.abs();
    t * (1.0 - spec.thrust_deduction)
}

/// Tunnel thrust reduced by cross flow: `T₀·exp(−C(u/u_j)²)`.
pub fn tunnel_thrust(spec: &ThrusterSpec, n: f64, u: f64, rho: f64) -> Result<f64, PropulsionError> {
    if spec.kind != ThrusterKind::Tunnel {
        return Err(PropulsionError::WrongKind {
            id: spec.id,
            expected: ThrusterKind::Tunnel,
        });
    }
    spec.check_speed(n)?;
    Ok(tunnel_unchecked(spec, n, u, rho))
}

fn tunnel_unchecked(spec: &ThrusterSpec, n: f64, u: f64, rho: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    let (t0, _) = open_water_unchecked(spec, n, rho);
    let u_j = (t0.abs() / (rho * spec.tunnel_area)).sqrt();
    t0 * (-spec.c_jet * (u / u_j).powi(2)).exp()
}

/// Extra surge drag while a tunnel thruster runs: `−½ρ∇^{2/3}C_d u|u|`.
pub fn tunnel_jet_drag(rho: f64, volume: f64, cd: f64, u: f64, any_tunnel_active: bool) -> f64 {
    if !any_tunnel_active {
        return 0.0;
    }
    -0.5 * rho * volume.powf(2.0 / 3.0) * cd * u * u.abs()
}

/// Moment arms used by the configuration matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThrusterArms {
    pub y_th: f64,
    pub x_th4: f64,
    pub x_th5: f64,
}

impl ThrusterArms {
    pub fn from_geometry(g: &crate::hydro::VehicleGeometry) -> Self {
        Self {
            y_th: g.y_th,
            x_th4: g.x_th4,
            x_th5: g.x_th5,
        }
    }
}

/// Rows `X, Y, Z, K, M, N`; columns thrusters 1..5.
pub fn config_matrix(arms: &ThrusterArms) -> ConfigMatrix {
    #[rustfmt::skip]
    let b = ConfigMatrix::from_row_slice(&[
        1.0, 1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0, 1.0,
        0.0, 0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0,
        arms.y_th, -arms.y_th, 0.0, arms.x_th4, arms.x_th5,
    ]);
    b
}

pub fn forces_to_tau(f: &[f64], arms: &ThrusterArms) -> Result<GeneralizedForce, PropulsionError> {
    if f.len() != THRUSTER_COUNT {
        return Err(PropulsionError::DimensionMismatch {
            expected: THRUSTER_COUNT,
            got: f.len(),
        });
    }
    let tau = config_matrix(arms) * ThrustVector::from_column_slice(f);
    Ok(GeneralizedForce::from_vector(&tau))
}

/// Roll moment from the shaft reaction torques of thrusters whose axis has
/// a surge component.
pub fn propeller_torque_moment(specs: &[ThrusterSpec], n: &[f64], rho: f64) -> Result<f64, PropulsionError> {
    if n.len() != specs.len() {
        return Err(PropulsionError::DimensionMismatch {
            expected: specs.len(),
            got: n.len(),
        });
    }
    Ok(specs
        .iter()
        .zip(n)
        .filter(|(s, _)| s.kind == ThrusterKind::OpenPropeller)
        .map(|(s, &ni)| s.handedness * s.direction[0] * open_water_unchecked(s, ni, rho).1)
        .sum())
}

/// Complete propulsion system of the vehicle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Propulsion {
    pub thrusters: Vec<ThrusterSpec>,
    pub arms: ThrusterArms,
    /// Jet drag coefficient of the tunnel openings.
    #[serde(default)]
    pub jet_drag_cd: f64,
    /// Include shaft torque in the roll moment.
    #[serde(default = "yes")]
    pub roll_torque: bool,
    /// Command-to-speed first-order lag [s]; 0 is instantaneous.
    #[serde(default = "default_lag")]
    pub lag_time_constant: f64,
}

fn yes() -> bool {
    true
}

fn default_lag() -> f64 {
    0.1
}

/// Per-step propulsion output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropulsionOutput {
    pub tau: GeneralizedForce,
    pub thrust: ThrustVector,
}

impl Propulsion {
    /// ALICE layout. Thruster 1 sits to port, 2 to starboard, counter-rotating.
    pub fn alice(arms: ThrusterArms) -> Self {
        let horizontal = |id: usize, y: f64, hand: f64| ThrusterSpec {
            id,
            kind: ThrusterKind::OpenPropeller,
            diameter: 0.076,
            k_t: 0.35,
            k_q: 0.05,
            n_max: 60.0,
            wake_fraction: 0.1,
            thrust_deduction: 0.05,
            c_jet: 0.0,
            tunnel_area: 0.0,
            position: [-0.7, y, 0.0],
            direction: [1.0, 0.0, 0.0],
            handedness: hand,
            bollard_factor: 1.0,
            astern_factor: 1.0,
            kt_table: None,
        };
        let tunnel = |id: usize, x: f64| ThrusterSpec {
            id,
            kind: ThrusterKind::Tunnel,
            diameter: 0.07,
            k_t: 0.35,
            k_q: 0.05,
            n_max: 50.0,
            wake_fraction: 0.0,
            thrust_deduction: 0.0,
            c_jet: 1.0,
            tunnel_area: std::f64::consts::PI * 0.04 * 0.04,
            position: [x, 0.0, 0.0],
            direction: [0.0, 1.0, 0.0],
            handedness: 1.0,
            bollard_factor: 1.0,
            astern_factor: 1.0,
            kt_table: None,
        };
        let vertical = ThrusterSpec {
            id: 3,
            direction: [0.0, 0.0, 1.0],
            position: [0.0, 0.0, 0.0],
            wake_fraction: 0.0,
            thrust_deduction: 0.0,
            ..horizontal(3, 0.0, 1.0)
        };
        Self {
            thrusters: vec![
                horizontal(1, -arms.y_th, 1.0),
                horizontal(2, arms.y_th, -1.0),
                vertical,
                tunnel(4, arms.x_th4),
                tunnel(5, arms.x_th5),
            ],
            arms,
            jet_drag_cd: 0.1,
            roll_torque: true,
            lag_time_constant: 0.1,
        }
    }

    pub fn validate(&self) -> Result<(), PropulsionError> {
        if self.thrusters.len() != THRUSTER_COUNT {
            return Err(PropulsionError::DimensionMismatch {
                expected: THRUSTER_COUNT,
                got: self.thrusters.len(),
            });
        }
        for t in &self.thrusters {
            t.validate()?;
        }
        if !(self.lag_time_constant >= 0.0) {
            return Err(PropulsionError::InvalidSpec(
                "lag time constant must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn config_matrix(&self) -> ConfigMatrix {
        config_matrix(&self.arms)
    }

    pub fn force_limits(&self, rho: f64) -> ([f64; THRUSTER_COUNT], [f64; THRUSTER_COUNT]) {
        let mut lo = [0.0; THRUSTER_COUNT];
        let mut hi = [0.0; THRUSTER_COUNT];
        for (i, t) in self.thrusters.iter().enumerate() {
            (lo[i], hi[i]) = t.force_limits(rho);
        }
        (lo, hi)
    }

    pub fn speeds_for_forces(&self, f: &ThrustVector, rho: f64) -> [f64; THRUSTER_COUNT] {
        std::array::from_fn(|i| self.thrusters[i].speed_for_force(f[i], rho))
    }

    /// Clamp commands to each thruster's speed limit.
    pub fn clamp_speeds(&self, n: &[f64; THRUSTER_COUNT]) -> [f64; THRUSTER_COUNT] {
        std::array::from_fn(|i| n[i].clamp(-self.thrusters[i].n_max, self.thrusters[i].n_max))
    }

    /// Rate of change of achieved speeds under the command lag.
    pub fn speed_rates(
        &self,
        commanded: &[f64; THRUSTER_COUNT],
        achieved: &[f64; THRUSTER_COUNT],
    ) -> [f64; THRUSTER_COUNT] {
        if self.lag_time_constant == 0.0 {
            return [0.0; THRUSTER_COUNT];
        }
        std::array::from_fn(|i| (commanded[i] - achieved[i]) / self.lag_time_constant)
    }

    /// Generalized force for achieved speeds `n` and the water-relative
    /// velocity `nu_r`. Speeds must already be within limits.
    pub fn output(&self, n: &[f64; THRUSTER_COUNT], nu_r: &BodyVelocity, rho: f64, volume: f64) -> PropulsionOutput {
        let lin = nu_r.linear();
        let mut thrust = ThrustVector::zeros();
        let mut tunnel_active = false;
        for (i, t) in self.thrusters.iter().enumerate() {
            thrust[i] = match t.kind {
                ThrusterKind::OpenPropeller => {
                    let advance = Vector3::from(t.direction).dot(&lin);
                    hull_adjusted_unchecked(t, n[i], advance, rho)
                }
                ThrusterKind::Tunnel => {
                    tunnel_active |= n[i] != 0.0;
                    tunnel_unchecked(t, n[i], nu_r.u, rho)
                }
            };
        }
        let mut tau = GeneralizedForce::from_vector(&(self.config_matrix() * thrust));
        tau.x += tunnel_jet_drag(rho, volume, self.jet_drag_cd, nu_r.u, tunnel_active);
        if self.roll_torque {
            tau.k += self
                .thrusters
                .iter()
                .zip(n)
                .filter(|(s, _)| s.kind == ThrusterKind::OpenPropeller)
                .map(|(s, &ni)| s.handedness * s.direction[0] * open_water_unchecked(s, ni, rho).1)
                .sum::<f64>();
        }
        PropulsionOutput { tau, thrust }
    }
}
