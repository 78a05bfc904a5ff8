use serde::{Deserialize, Serialize};

use super::integrate::{step, SimState, Vehicle};
use super::log::{LogMode, Metrics, RpmLog, TrajectoryLog, TrajectoryRecord};
use super::{Environment, SimError};
use crate::allocator::{allocate, AllocationProblem, WeightSchedule};
use crate::guidance::{ControllerGains, ControllerKind, Guidance, GuidanceMode, InnerLoops, VerticalReference};
use crate::mission::MissionPlan;
use crate::propulsion::THRUSTER_COUNT;
use crate::vehicle::Pose;

/// How yaw and sway demands reach the thrusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationMode {
    /// Speed-scheduled weights with the lateral thrusters available.
    Scheduled,
    /// Lateral thrusters off; yaw comes from the horizontal pair alone.
    DifferentialOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AllocatorConfig {
    pub epsilon: f64,
    pub schedule: WeightSchedule,
    /// Thrusters marked false are treated as failed.
    pub available: [bool; THRUSTER_COUNT],
}

impl Default for AllocatorConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            schedule: WeightSchedule::default(),
            available: [true; THRUSTER_COUNT],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionOptions {
    pub controller: ControllerKind,
    /// Defaults to `Scheduled` for the modified controller and
    /// `DifferentialOnly` for the original one.
    pub allocation: Option<AllocationMode>,
    pub gains: ControllerGains,
    pub allocator: AllocatorConfig,
    pub dt: f64,
    /// Simulated time limit [s].
    pub max_time: f64,
    /// Log every n-th step.
    pub log_every: usize,
    /// Defaults to rest at the first waypoint, facing the first segment.
    pub initial: Option<SimState>,
}

impl Default for MissionOptions {
    fn default() -> Self {
        Self {
            controller: ControllerKind::Modified,
            allocation: None,
            gains: ControllerGains::default(),
            allocator: AllocatorConfig::default(),
            dt: 0.01,
            max_time: 7200.0,
            log_every: 1,
            initial: None,
        }
    }
}

impl MissionOptions {
    pub fn allocation_mode(&self) -> AllocationMode {
        self.allocation.unwrap_or(match self.controller {
            ControllerKind::Modified => AllocationMode::Scheduled,
            ControllerKind::Original => AllocationMode::DifferentialOnly,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionRun {
    pub log: TrajectoryLog,
    /// Every step's speed command, for replay.
    pub commands: RpmLog,
    pub metrics: Metrics,
    pub initial: SimState,
    pub dt: f64,
}

fn initial_state(plan: &MissionPlan, env: &Environment) -> SimState {
    let Some(first) = plan.waypoints.first() else {
        return SimState::default();
    };
    let psi = plan
        .waypoints
        .iter()
        .find(|w| w.x != first.x || w.y != first.y)
        .map_or(0.0, |w| (w.y - first.y).atan2(w.x - first.x));
    let z = match plan.vertical {
        VerticalReference::Depth => first.z,
        VerticalReference::Altitude(h) => env.seabed.depth_at(first.x, first.y) - h,
    };
    SimState::at_rest(Pose::at(first.x, first.y, z, psi))
}

/// Closed-loop run of a mission until the last waypoint is passed.
///
/// Returns `Timeout` carrying the partial run when `max_time` elapses
/// first. An empty plan completes immediately with an empty log.
pub fn run_mission(
    plan: &MissionPlan,
    vehicle: &Vehicle,
    env: &Environment,
    options: &MissionOptions,
) -> Result<MissionRun, SimError> {
    env.validate()?;
    if !(options.dt > 0.0 && options.dt <= super::MAX_DT) {
        return Err(SimError::InvalidStep(options.dt));
    }
    let mut guidance = Guidance::new(
        &plan.waypoints,
        plan.speed,
        plan.vertical,
        options.controller,
        options.gains.clone(),
    )?;
    let mut inner = InnerLoops::new();
    let mode = options.allocation_mode();
    let b0 = AllocationProblem::control_matrix(&vehicle.propulsion.config_matrix());
    let (f_min, f_max) = vehicle.propulsion.force_limits(env.rho);
    let mut available = options.allocator.available;
    if mode == AllocationMode::DifferentialOnly {
        available[3] = false;
        available[4] = false;
    }
    let sway_enabled = available[3] || available[4];

    let initial = options.initial.unwrap_or_else(|| initial_state(plan, env));
    let mut state = initial;
    let mut run = MissionRun {
        log: TrajectoryLog::default(),
        commands: RpmLog::default(),
        metrics: Metrics::default(),
        initial,
        dt: options.dt,
    };
    let log_every = options.log_every.max(1);
    let mut k = 0usize;
    loop {
        let seabed = env.seabed.depth_at(state.pose.x, state.pose.y);
        let Some(g) = guidance.path_follow_step(&state.pose, &state.nu, seabed, options.dt) else {
            break;
        };
        if k as f64 * options.dt >= options.max_time {
            run.metrics = Metrics::from_log(&run.log);
            return Err(SimError::Timeout(Box::new(run)));
        }
        let tau_c = inner.step(
            &g.setpoints,
            &state.pose,
            &state.nu,
            &options.gains,
            sway_enabled,
            options.dt,
        );
        let weights = options.allocator.schedule.weights(state.nu.u);
        let mut problem = AllocationProblem::new(
            AllocationProblem::demand(&tau_c),
            b0,
            weights,
            f_min,
            f_max,
            options.allocator.epsilon,
        )?;
        problem.available = available;
        let f = allocate(&problem).f;
        let n_cmd = vehicle.propulsion.speeds_for_forces(&f, env.rho);

        if k.is_multiple_of(log_every) {
            run.log.records.push(TrajectoryRecord {
                t: state.t,
                pose: state.pose,
                nu: state.nu,
                tau: tau_c,
                f: f.into(),
                mode: match g.mode {
                    GuidanceMode::HeadingLos => LogMode::Heading,
                    GuidanceMode::SwayLos => LogMode::Sway,
                },
                e: g.e,
                e_v: g.e_v,
            });
        }
        run.commands.samples.push((state.t, n_cmd));
        state = step(vehicle, &state, &n_cmd, env, options.dt)?;
        k += 1;
    }
    run.metrics = Metrics::from_log(&run.log);
    Ok(run)
}

/// Open-loop run driven by recorded speed commands held between samples.
/// Runs from `initial` until the last command time; the logged forces are
/// the delivered propulsion forces.
pub fn replay(
    vehicle: &Vehicle,
    rpm: &RpmLog,
    env: &Environment,
    initial: SimState,
    dt: f64,
) -> Result<TrajectoryLog, SimError> {
    env.validate()?;
    let mut log = TrajectoryLog::default();
    let Some(&(t_end, _)) = rpm.samples.last() else {
        return Ok(log);
    };
    let mut state = initial;
    while state.t <= t_end {
        let n_cmd = rpm.command_at(state.t);
        let out = vehicle.propulsion_output(&state, env);
        log.records.push(TrajectoryRecord {
            t: state.t,
            pose: state.pose,
            nu: state.nu,
            tau: out.tau,
            f: out.thrust.into(),
            mode: LogMode::OpenLoop,
            e: 0.0,
            e_v: 0.0,
        });
        state = step(vehicle, &state, &n_cmd, env, dt)?;
    }
    Ok(log)
}
