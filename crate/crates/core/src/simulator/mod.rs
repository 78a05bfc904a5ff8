//! Fixed-step closed-loop and open-loop simulation, logging and replay
//! comparison.

mod compare;
mod environment;
mod fit;
mod integrate;
mod log;
mod run;

pub use compare::{compare, ChannelError, CompareReport, COMPARE_CHANNELS};
pub use environment::{Environment, Seabed, SeabedGrid};
pub use fit::{fit_calibration, FitOptions, FitProblem, FitResult};
pub use integrate::{step, SimState, Vehicle, BLOWUP_LIMIT, MAX_DT};
pub use log::{LogMode, Metrics, RpmLog, TrajectoryLog, TrajectoryRecord, RPM_HEADER, TRAJECTORY_HEADER};
pub use run::{replay, run_mission, AllocationMode, AllocatorConfig, MissionOptions, MissionRun};

use thiserror::Error;

use crate::allocator::AllocationError;
use crate::guidance::GuidanceError;
use crate::hydro::HydroError;
use crate::propulsion::PropulsionError;
use crate::vehicle::VehicleError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("time step {0} outside (0, 0.1]")]
    InvalidStep(f64),
    #[error("numerical blow-up at t = {t}: state value {value}")]
    NumericalBlowup { t: f64, value: f64 },
    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),
    #[error("mission timed out after {:.1} s", .0.log.records.last().map_or(0.0, |r| r.t))]
    Timeout(Box<MissionRun>),
    #[error("malformed log at line {line}: {message}")]
    MalformedLog { line: u64, message: String },
    #[error("logs do not overlap in time")]
    NoOverlap,
    #[error(transparent)]
    Vehicle(#[from] VehicleError),
    #[error(transparent)]
    Propulsion(#[from] PropulsionError),
    #[error(transparent)]
    Guidance(#[from] GuidanceError),
    #[error(transparent)]
    Allocation(#[from] AllocationError),
    #[error(transparent)]
    Hydro(#[from] HydroError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
