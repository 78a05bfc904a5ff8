//! Coordinate-descent search over calibration factors.

use super::integrate::{SimState, Vehicle};
use super::log::{RpmLog, TrajectoryLog};
use super::run::replay;
use super::{compare, Environment, SimError};
use crate::hydro::{apply_calibration, CalibrationFactors, Coefficient, CoefficientSet};
use crate::propulsion::Propulsion;
use crate::vehicle::MassProperties;

/// Everything needed to replay a recorded run with trial coefficients.
#[derive(Debug, Clone)]
pub struct FitProblem<'a> {
    pub base: &'a CoefficientSet,
    pub mass: &'a MassProperties,
    pub propulsion: &'a Propulsion,
    pub env: &'a Environment,
    pub commands: &'a RpmLog,
    pub measured: &'a TrajectoryLog,
    pub initial: SimState,
    pub dt: f64,
    /// Coefficients whose factors are searched.
    pub targets: &'a [Coefficient],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Initial multiplicative step: factors move by `1 ± step`.
    pub initial_step: f64,
    pub min_step: f64,
    pub max_evaluations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.25,
            min_step: 1e-3,
            max_evaluations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub factors: CalibrationFactors,
    /// Summed channel RMS of the fitted replay.
    pub cost: f64,
    pub evaluations: usize,
}

fn cost(problem: &FitProblem, factors: &[f64]) -> Result<f64, SimError> {
    let cal = CalibrationFactors::new(problem.targets.iter().copied().zip(factors.iter().copied()))?;
    let coeffs = apply_calibration(problem.base, &cal)?;
    let vehicle = Vehicle::new(&coeffs, problem.mass.clone(), problem.propulsion.clone())?;
    let sim = replay(&vehicle, problem.commands, problem.env, problem.initial, problem.dt)?;
    Ok(compare(&sim, problem.measured)?.total_rms())
}

/// Minimizes the replay-versus-measured error one factor at a time,
/// halving the step whenever no factor improves. Factors start at 1.
pub fn fit_calibration(problem: &FitProblem, options: &FitOptions) -> Result<FitResult, SimError> {
    let mut x = vec![1.0; problem.targets.len()];
    let mut best = cost(problem, &x)?;
    let mut evaluations = 1;
    let mut step = options.initial_step;
    'search: while step >= options.min_step {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0 + step, 1.0 / (1.0 + step)] {
                if evaluations >= options.max_evaluations {
                    break 'search;
                }
                let mut trial = x.clone();
                trial[i] *= dir;
                let c = cost(problem, &trial)?;
                evaluations += 1;
                if c < best {
                    best = c;
                    x = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    log::debug!("calibration fit: cost {best:.3e} after {evaluations} replays");
    Ok(FitResult {
        factors: CalibrationFactors::new(problem.targets.iter().copied().zip(x))?,
        cost: best,
        evaluations,
    })
}
