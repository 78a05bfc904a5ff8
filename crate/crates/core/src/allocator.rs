//! Thrust allocation by the redistributed pseudo-inverse.
//!
//! Each pass solves the weighted, regularized pseudo-inverse over the free
//! thrusters. When free thrusters leave their box, one is clamped (the one
//! whose clamp leaves the fewest new violations, ties broken by residual),
//! its column is removed and its force moved into the saturation vector.
//! Once nothing violates, clamped thrusters whose residual gradient points
//! back into the box are released (or moved straight to the opposite bound
//! when the re-solve pushes them past it) and the loop resumes. The result is the
//! box-constrained least-squares optimum of the achieved force.

use nalgebra::{Matrix4, SMatrix, Vector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::propulsion::{ConfigMatrix, ThrustVector, THRUSTER_COUNT};
use crate::vehicle::GeneralizedForce;

const N: usize = THRUSTER_COUNT;

/// Controllable rows `X, Y, Z, N` of the configuration matrix.
pub type ControlMatrix = SMatrix<f64, 4, N>;

/// Rows of the full configuration matrix that the allocator controls.
pub const CONTROLLABLE_ROWS: [usize; 4] = [0, 1, 2, 5];

const BOX_TOL: f64 = 1e-12;
const RELEASE_TOL: f64 = 1e-9;
const LOOP_GUARD: usize = 50;
const REFINEMENT_PASSES: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AllocationError {
    #[error("invalid allocation problem: {0}")]
    InvalidProblem(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationProblem {
    /// Demand on `X, Y, Z, N`.
    pub tau: Vector4<f64>,
    pub b0: ControlMatrix,
    pub weights: [f64; N],
    pub f_min: [f64; N],
    pub f_max: [f64; N],
    pub epsilon: f64,
    /// Unavailable thrusters have their column zeroed and produce nothing.
    pub available: [bool; N],
}

impl AllocationProblem {
    pub fn new(
        tau: Vector4<f64>,
        b0: ControlMatrix,
        weights: [f64; N],
        f_min: [f64; N],
        f_max: [f64; N],
        epsilon: f64,
    ) -> Result<Self, AllocationError> {
        let p = Self {
            tau,
            b0,
            weights,
            f_min,
            f_max,
            epsilon,
            available: [true; N],
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), AllocationError> {
        let bad = |m: String| Err(AllocationError::InvalidProblem(m));
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        for i in 0..N {
            if !(self.weights[i] > 0.0) {
                return bad(format!("weight {} must be positive, got {}", i + 1, self.weights[i]));
            }
            if !(self.f_min[i] < self.f_max[i]) {
                return bad(format!(
                    "thruster {}: f_min {} must be below f_max {}",
                    i + 1,
                    self.f_min[i],
                    self.f_max[i]
                ));
            }
            if !(self.f_min[i] <= 0.0 && self.f_max[i] >= 0.0) {
                return bad(format!("thruster {}: limits must bracket zero", i + 1));
            }
        }
        if !self.tau.iter().all(|v| v.is_finite()) {
            return bad("demand must be finite".into());
        }
        Ok(())
    }

    /// Controllable rows of a full configuration matrix.
    pub fn control_matrix(b: &ConfigMatrix) -> ControlMatrix {
        ControlMatrix::from_fn(|r, c| b[(CONTROLLABLE_ROWS[r], c)])
    }

    pub fn demand(tau: &GeneralizedForce) -> Vector4<f64> {
        Vector4::new(tau.x, tau.y, tau.z, tau.n)
    }

    fn effective_b0(&self) -> ControlMatrix {
        let mut b = self.b0;
        for i in 0..N {
            if !self.available[i] {
                b.column_mut(i).fill(0.0);
            }
        }
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceAction {
    Solve,
    Clamp(usize),
    Release(usize),
    /// Released, then pinned at its opposite bound.
    Flip(usize),
}

/// One pass of the redistribution loop, for debugging output.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub action: TraceAction,
    pub b: ControlMatrix,
    pub c: [f64; N],
    pub f: [f64; N],
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult {
    pub f: ThrustVector,
    pub saturated: [bool; N],
    /// `‖B₀f − τ‖` over the controllable rows.
    pub residual: f64,
    /// Clamp passes.
    pub iterations: usize,
    /// Release passes, including releases that flip a thruster straight
    /// to its opposite bound.
    pub releases: usize,
    /// Demand not achievable within the limits.
    pub infeasible: bool,
    pub trace: Vec<TraceStep>,
}

impl AllocationResult {
    pub fn achieved(&self, problem: &AllocationProblem) -> Vector4<f64> {
        problem.effective_b0() * self.f
    }
}

struct Solver<'a> {
    p: &'a AllocationProblem,
    b0: ControlMatrix,
    w_inv: [f64; N],
}

impl Solver<'_> {
    /// `f = −c + W⁻¹Bᵀ(BW⁻¹Bᵀ + εI)⁻¹(τ + B₀c)` with `B` the free columns,
    /// plus a few refinement passes that remove the bias of `ε`.
    fn solve(&self, fixed: &[Option<f64>; N]) -> (ThrustVector, ControlMatrix, [f64; N]) {
        let mut b = self.b0;
        let mut c = [0.0; N];
        for i in 0..N {
            if let Some(v) = fixed[i] {
                b.column_mut(i).fill(0.0);
                c[i] = -v;
            }
        }
        let bw = ControlMatrix::from_fn(|r, col| b[(r, col)] * self.w_inv[col]);
        let a = bw * b.transpose() + Matrix4::identity() * self.p.epsilon;
        let solve4 = |rhs: &Vector4<f64>| -> Vector4<f64> {
            match a.cholesky() {
                Some(ch) => ch.solve(rhs),
                None => a.lu().solve(rhs).unwrap_or_else(Vector4::zeros),
            }
        };
        let cv = ThrustVector::from_column_slice(&c);
        let target = self.p.tau + self.b0 * cv;
        let mut free = bw.transpose() * solve4(&target);
        for _ in 0..REFINEMENT_PASSES {
            let r = target - b * free;
            free += bw.transpose() * solve4(&r);
        }
        (free - cv, b, c)
    }

    fn violates(&self, i: usize, v: f64) -> bool {
        v > self.p.f_max[i] + BOX_TOL || v < self.p.f_min[i] - BOX_TOL
    }

    fn clamp(&self, i: usize, v: f64) -> f64 {
        v.clamp(self.p.f_min[i], self.p.f_max[i])
    }

    fn residual(&self, f: &ThrustVector) -> f64 {
        (self.b0 * f - self.p.tau).norm()
    }
}

pub fn allocate(problem: &AllocationProblem) -> AllocationResult {
    let s = Solver {
        p: problem,
        b0: problem.effective_b0(),
        w_inv: std::array::from_fn(|i| 1.0 / problem.weights[i]),
    };
    let mut fixed: [Option<f64>; N] = std::array::from_fn(|i| (!problem.available[i]).then_some(0.0));
    let mut iterations = 0;
    let mut releases = 0;
    let mut trace = Vec::new();
    let mut action = TraceAction::Solve;
    let mut f = ThrustVector::zeros();

    for _ in 0..LOOP_GUARD {
        let (sol, b, c) = s.solve(&fixed);
        f = sol;
        trace.push(TraceStep {
            action,
            b,
            c,
            f: f.into(),
        });

        let violators: Vec<usize> = (0..N).filter(|&i| fixed[i].is_none() && s.violates(i, f[i])).collect();
        if !violators.is_empty() {
            let mut best: Option<((usize, f64), usize)> = None;
            for &i in &violators {
                let mut trial = fixed;
                trial[i] = Some(s.clamp(i, f[i]));
                let (f2, _, _) = s.solve(&trial);
                let new_violations = (0..N).filter(|&j| trial[j].is_none() && s.violates(j, f2[j])).count();
                let key = (new_violations, s.residual(&f2));
                if best.is_none_or(|(k, _)| key < k) {
                    best = Some((key, i));
                }
            }
            let (_, i) = best.expect("at least one violator");
            fixed[i] = Some(s.clamp(i, f[i]));
            iterations += 1;
            action = TraceAction::Clamp(i);
            continue;
        }

        // release a clamped thruster if moving it inward lowers the residual
        let g = s.b0.transpose() * (s.b0 * f - problem.tau);
        let mut candidate: Option<(f64, usize)> = None;
        for i in 0..N {
            if !problem.available[i] {
                continue;
            }
            let Some(v) = fixed[i] else { continue };
            let score = if v >= problem.f_max[i] && g[i] > RELEASE_TOL {
                g[i]
            } else if v <= problem.f_min[i] && g[i] < -RELEASE_TOL {
                -g[i]
            } else {
                continue;
            };
            if candidate.is_none_or(|(best, _)| score > best) {
                candidate = Some((score, i));
            }
        }
        match candidate {
            Some((_, i)) => {
                fixed[i] = None;
                releases += 1;
                action = TraceAction::Release(i);
                let (trial, _, _) = s.solve(&fixed);
                if s.violates(i, trial[i]) {
                    fixed[i] = Some(s.clamp(i, trial[i]));
                    action = TraceAction::Flip(i);
                }
            }
            None => break,
        }
    }

    for i in 0..N {
        f[i] = s.clamp(i, f[i]);
        if !problem.available[i] {
            f[i] = 0.0;
        }
    }
    let residual = s.residual(&f);
    let saturated =
        std::array::from_fn(|i| problem.available[i] && (f[i] >= problem.f_max[i] || f[i] <= problem.f_min[i]));
    AllocationResult {
        f,
        saturated,
        residual,
        iterations,
        releases,
        infeasible: residual > 1e-6 * (1.0 + problem.tau.norm()),
        trace,
    }
}

/// Speed-dependent weights: lateral thrusters preferred below `u_lo`,
/// the horizontal pair above `u_hi`, with a cosine ramp in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WeightSchedule {
    pub u_lo: f64,
    pub u_hi: f64,
    /// Weight of the preferred group (lower is preferred).
    pub preferred: f64,
    pub avoided: f64,
    /// Weight of the vertical thruster.
    pub vertical: f64,
}

impl Default for WeightSchedule {
    fn default() -> Self {
        Self {
            u_lo: 0.2,
            u_hi: 0.5,
            preferred: 1.0,
            avoided: 10.0,
            vertical: 1.0,
        }
    }
}

impl WeightSchedule {
    /// Ramp position in [0, 1]: 0 at or below `u_lo`, 1 at or above `u_hi`.
    pub fn ramp(&self, u: f64) -> f64 {
        let u = u.abs();
        if u <= self.u_lo {
            0.0
        } else if u >= self.u_hi {
            1.0
        } else {
            0.5 - 0.5 * (std::f64::consts::PI * (u - self.u_lo) / (self.u_hi - self.u_lo)).cos()
        }
    }

    pub fn weights(&self, u: f64) -> [f64; N] {
        let s = self.ramp(u);
        let horizontal = self.avoided + (self.preferred - self.avoided) * s;
        let lateral = self.preferred + (self.avoided - self.preferred) * s;
        [horizontal, horizontal, self.vertical, lateral, lateral]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propulsion::{config_matrix, ThrusterArms};
    use nalgebra::DMatrix;

    fn b0() -> ControlMatrix {
        AllocationProblem::control_matrix(&config_matrix(&ThrusterArms {
            y_th: 0.18,
            x_th4: 0.55,
            x_th5: -0.65,
        }))
    }

    fn problem(tau: [f64; 4], lim: f64) -> AllocationProblem {
        AllocationProblem::new(Vector4::from(tau), b0(), [1.0; N], [-lim; N], [lim; N], 1e-6).unwrap()
    }

    #[test]
    fn zero_demand_zero_thrust() {
        let r = allocate(&problem([0.0; 4], 10.0));
        assert_eq!(r.f, ThrustVector::zeros());
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn unsaturated_matches_minimum_norm() {
        let mut p = problem([3.0, -2.0, 1.0, 0.5], 100.0);
        p.epsilon = 1e-9;
        let r = allocate(&p);
        // oracle: Moore-Penrose pseudo-inverse via SVD
        let b = DMatrix::from_fn(4, N, |i, j| p.b0[(i, j)]);
        let pinv = b.pseudo_inverse(1e-12).unwrap();
        let tau = nalgebra::DVector::from_column_slice(p.tau.as_slice());
        let oracle = pinv * tau;
        for i in 0..N {
            assert!((r.f[i] - oracle[i]).abs() < 1e-6);
        }
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn yaw_beyond_lateral_limits_uses_horizontal_pair() {
        let mut p = problem([0.0, 0.0, 0.0, 6.0], 20.0);
        p.f_min[3] = -2.0;
        p.f_max[3] = 2.0;
        p.f_min[4] = -2.0;
        p.f_max[4] = 2.0;
        p.weights = [10.0, 10.0, 1.0, 1.0, 1.0];
        let r = allocate(&p);
        assert!(r.residual < 1e-6, "{r:?}");
        assert!(r.saturated[3] || r.saturated[4]);
        assert!(r.f[0] > 0.0 && r.f[1] < 0.0);
        // brute-force grid oracle over the lateral pair confirms zero residual is optimal
        assert!(!r.infeasible);
    }

    #[test]
    fn unavailable_thrusters_stay_off() {
        let mut p = problem([1.0, 1.0, 0.0, 0.3], 20.0);
        p.available[3] = false;
        p.available[4] = false;
        let r = allocate(&p);
        assert_eq!((r.f[3], r.f[4]), (0.0, 0.0));
        assert!(r.infeasible, "sway cannot be produced without lateral thrusters");
        assert!((r.achieved(&p)[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn invalid_problems_rejected() {
        assert!(AllocationProblem::new(Vector4::zeros(), b0(), [1.0; N], [-1.0; N], [1.0; N], 0.0).is_err());
        assert!(AllocationProblem::new(Vector4::zeros(), b0(), [0.0; N], [-1.0; N], [1.0; N], 1e-6).is_err());
        assert!(AllocationProblem::new(Vector4::zeros(), b0(), [1.0; N], [1.0; N], [1.0; N], 1e-6).is_err());
    }

    #[test]
    fn trace_records_each_pass() {
        let r = allocate(&problem([100.0, 0.0, 0.0, 0.0], 10.0));
        assert_eq!(r.trace.len(), 1 + r.iterations + r.releases);
        assert_eq!(r.trace[0].action, TraceAction::Solve);
    }

    #[test]
    fn weight_schedule_preferences() {
        let s = WeightSchedule::default();
        let w0 = s.weights(0.0);
        assert!(w0[3] < w0[0] && w0[4] < w0[1]);
        let wh = s.weights(0.6);
        assert!(wh[0] < wh[3]);
        let wm = s.weights(0.35);
        assert!((wm[0] - wm[3]).abs() < 1e-12);
        let mut prev = s.weights(0.0);
        for i in 1..=100 {
            let w = s.weights(i as f64 * 0.01);
            assert!(w[0] <= prev[0] && w[3] >= prev[3]);
            prev = w;
        }
    }
}
