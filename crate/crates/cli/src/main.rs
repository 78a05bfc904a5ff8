//! `auvkit` command-line entry point.
//!
//! Exit codes: 0 success, 1 usage error, 2 configuration or input error,
//! 3 runtime error. Diagnostics go to standard error.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use auvkit::allocator::{allocate, AllocationProblem, TraceAction};
use auvkit::guidance::ControllerKind;
use auvkit::hydro::{sign_anomalies, CalibrationFactors};
use auvkit::mission::{overlap_report, CoefficientSource, Config, ConfigError};
use auvkit::simulator::{compare, replay, run_mission, Metrics, MissionRun, RpmLog, SimError, SimState, TrajectoryLog};
use auvkit::vehicle::GeneralizedForce;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(
    name = "auvkit",
    version,
    about = "Hovering-AUV modelling, allocation and survey simulation"
)]
struct Cli {
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Controller {
    Original,
    Modified,
}

impl From<Controller> for ControllerKind {
    fn from(c: Controller) -> Self {
        match c {
            Controller::Original => ControllerKind::Original,
            Controller::Modified => ControllerKind::Modified,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate hydrodynamic coefficients from the vehicle geometry.
    EstimateCoeffs {
        vehicle: PathBuf,
        /// JSON object of multiplicative factors, e.g. {"X_udot": 10.0}.
        #[arg(long)]
        calibrate: Option<PathBuf>,
        /// Also write the table as CSV (coefficient,value,unit,provenance).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Plan the lawnmower survey of a mission config and print it as JSON.
    Plan { mission: PathBuf },
    /// Fly the planned survey in closed loop.
    Simulate {
        /// Config supplying the vehicle and gains sections.
        vehicle: PathBuf,
        /// Config supplying the mission and environment sections.
        mission: PathBuf,
        #[arg(long, value_enum)]
        controller: Option<Controller>,
        /// Current in the Earth frame [m/s], as N,E,D.
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        current: Option<[f64; 3]>,
        /// Recorded in metrics.json; the simulation itself is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for trajectory.csv, rpm.csv and metrics.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Drive the model open loop with recorded thruster speed commands.
    Replay {
        vehicle: PathBuf,
        rpm: PathBuf,
        /// Measured trajectory: the replay starts from its first sample and
        /// a per-channel error report is printed. Without it the replay
        /// starts at rest at the origin.
        #[arg(long)]
        compare: Option<PathBuf>,
        /// Current in the Earth frame [m/s], as N,E,D.
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        current: Option<[f64; 3]>,
        /// Write the replayed trajectory here (stdout when neither this nor
        /// --compare is given).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Allocate one force demand and print every redistribution pass.
    Allocate {
        vehicle: PathBuf,
        /// Demand X,Y,Z,N [N, N, N, N m].
        #[arg(long, value_parser = parse_vec4, allow_hyphen_values = true)]
        tau: [f64; 4],
        /// Surge speed selecting the thruster weights [m/s].
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        speed: f64,
    },
}

fn parse_list<const K: usize>(s: &str) -> Result<[f64; K], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != K {
        return Err(format!("expected {K} comma-separated numbers, got {}", parts.len()));
    }
    let mut out = [0.0; K];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"))?;
        if !o.is_finite() {
            return Err(format!("{p:?} is not finite"));
        }
    }
    Ok(out)
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    parse_list::<3>(s)
}

fn parse_vec4(s: &str) -> Result<[f64; 4], String> {
    parse_list::<4>(s)
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

fn load(path: &Path) -> Result<Config, CliError> {
    Config::load(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn config_err(path: &Path) -> impl Fn(ConfigError) -> CliError + '_ {
    move |e| CliError::Config(format!("{}: {e}", path.display()))
}

/// Errors reading an input log are input errors; everything else is a
/// runtime failure.
fn input_err(path: &Path) -> impl Fn(SimError) -> CliError + '_ {
    move |e| match e {
        SimError::MalformedLog { .. } | SimError::Csv(_) | SimError::Io(_) => {
            CliError::Config(format!("{}: {e}", path.display()))
        }
        other => CliError::Runtime(other.to_string()),
    }
}

/// Writes to stdout; a reader that stops early is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(runtime(e)),
        _ => Ok(()),
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn estimate_coeffs(vehicle: &Path, calibrate: Option<&Path>, csv: Option<&Path>) -> Result<(), CliError> {
    let mut cfg = load(vehicle)?.vehicle;
    cfg.coefficients = CoefficientSource::Estimated;
    if let Some(path) = calibrate {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.calibration = serde_json::from_str::<CalibrationFactors>(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    }
    let set = cfg.coefficients().map_err(config_err(vehicle))?;
    for a in sign_anomalies(&set) {
        log::warn!("{} = {} but expected {}", a.coefficient.name(), a.value, a.expected);
    }
    emit(&set.report())?;
    if let Some(path) = csv {
        fs::write(path, set.to_csv()).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn plan(mission: &Path) -> Result<(), CliError> {
    let cfg = load(mission)?;
    let plan = cfg.mission.plan().map_err(config_err(mission))?;
    let overlap = overlap_report(&cfg.mission.footprint, &plan);
    eprintln!(
        "{} waypoints, frame rate {:.3} fps, along-track overlap {:.0}%, cross-track overlap {:.0}%",
        plan.waypoints.len(),
        plan.camera.frame_rate,
        overlap.along_track_pct,
        overlap.cross_track_pct
    );
    emit(&(serde_json::to_string_pretty(&plan).map_err(runtime)? + "\n"))?;
    Ok(())
}

#[derive(Serialize)]
struct RunSummary {
    controller: ControllerKind,
    seed: u64,
    current: [f64; 3],
    completed: bool,
    #[serde(flatten)]
    metrics: Metrics,
}

fn write_run(dir: &Path, run: &MissionRun, summary: &RunSummary) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
    run.log
        .write_csv(create(&dir.join("trajectory.csv"))?)
        .map_err(runtime)?;
    run.commands.write_csv(create(&dir.join("rpm.csv"))?).map_err(runtime)?;
    let mut json = serde_json::to_string_pretty(summary).map_err(runtime)?;
    json.push('\n');
    fs::write(dir.join("metrics.json"), json).map_err(runtime)
}

fn simulate(
    vehicle: &Path,
    mission: &Path,
    controller: Option<Controller>,
    current: Option<[f64; 3]>,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let vcfg = load(vehicle)?;
    let mut mcfg = load(mission)?;
    if let Some(c) = controller {
        mcfg.mission.controller = c.into();
    }
    if let Some(c) = current {
        mcfg.environment.current = c;
    }
    let model = vcfg.vehicle.build().map_err(config_err(vehicle))?;
    let env = mcfg.environment.environment().map_err(config_err(mission))?;
    let plan = mcfg.mission.plan().map_err(config_err(mission))?;
    let options = auvkit::simulator::MissionOptions {
        gains: vcfg.gains.controller.clone(),
        allocator: vcfg.gains.allocator.clone(),
        ..mcfg.mission_options()
    };
    let (run, completed) = match run_mission(&plan, &model, &env, &options) {
        Ok(run) => (run, true),
        Err(SimError::Timeout(run)) => (*run, false),
        Err(e) => return Err(runtime(e)),
    };
    let summary = RunSummary {
        controller: options.controller,
        seed,
        current: env.current,
        completed,
        metrics: run.metrics,
    };
    write_run(out, &run, &summary)?;
    eprintln!(
        "rms cross-track {:.3} m, peak roll {:.1} deg, {:.1} s; wrote {}",
        run.metrics.rms_cross_track_m,
        run.metrics.max_roll_deg,
        run.metrics.duration_s,
        out.display()
    );
    if !completed {
        return Err(CliError::Runtime(format!(
            "mission did not finish within {} s; partial results written",
            options.max_time
        )));
    }
    Ok(())
}

fn replay_cmd(
    vehicle: &Path,
    rpm: &Path,
    measured: Option<&Path>,
    current: Option<[f64; 3]>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let mut cfg = load(vehicle)?;
    if let Some(c) = current {
        cfg.environment.current = c;
    }
    let model = cfg.vehicle.build().map_err(config_err(vehicle))?;
    let env = cfg.environment.environment().map_err(config_err(vehicle))?;
    let commands = RpmLog::read_csv(open(rpm)?).map_err(input_err(rpm))?;
    let measured = match measured {
        Some(p) => Some((p, TrajectoryLog::read_csv(open(p)?).map_err(input_err(p))?)),
        None => None,
    };
    let initial = match measured.as_ref().and_then(|(_, m)| m.records.first()) {
        Some(r) => SimState {
            t: r.t,
            pose: r.pose,
            nu: r.nu,
            n: [0.0; 5],
        },
        None => SimState::default(),
    };
    let sim = replay(&model, &commands, &env, initial, cfg.mission.dt).map_err(runtime)?;
    match out {
        Some(path) => sim.write_csv(create(path)?).map_err(runtime)?,
        None if measured.is_none() => {
            let mut buf = Vec::new();
            sim.write_csv(&mut buf).map_err(runtime)?;
            emit(&String::from_utf8_lossy(&buf))?;
        }
        None => {}
    }
    if let Some((path, m)) = measured {
        let report = compare(&sim, &m).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        emit(&report.to_text())?;
    }
    Ok(())
}

fn row(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:>11.4}")).collect::<Vec<_>>().join(" ")
}

fn allocate_cmd(vehicle: &Path, tau: [f64; 4], speed: f64) -> Result<(), CliError> {
    let cfg = load(vehicle)?;
    let model = cfg.vehicle.build().map_err(config_err(vehicle))?;
    let env = cfg.environment.environment().map_err(config_err(vehicle))?;
    let alloc = &cfg.gains.allocator;
    let (f_min, f_max) = model.propulsion.force_limits(env.rho);
    let demand = GeneralizedForce {
        x: tau[0],
        y: tau[1],
        z: tau[2],
        n: tau[3],
        ..GeneralizedForce::ZERO
    };
    let mut problem = AllocationProblem::new(
        AllocationProblem::demand(&demand),
        AllocationProblem::control_matrix(&model.propulsion.config_matrix()),
        alloc.schedule.weights(speed),
        f_min,
        f_max,
        alloc.epsilon,
    )
    .map_err(config_err_alloc)?;
    problem.available = alloc.available;
    let result = allocate(&problem);

    let mut out = String::new();
    let mut w = || -> std::fmt::Result {
        writeln!(out, "weights     {}", row(&problem.weights))?;
        writeln!(out, "f_min       {}", row(&f_min))?;
        writeln!(out, "f_max       {}", row(&f_max))?;
        for (k, s) in result.trace.iter().enumerate() {
            let action = match s.action {
                TraceAction::Solve => "solve".to_string(),
                TraceAction::Clamp(i) => format!("clamp thruster {}", i + 1),
                TraceAction::Release(i) => format!("release thruster {}", i + 1),
                TraceAction::Flip(i) => format!("flip thruster {}", i + 1),
            };
            writeln!(out, "\npass {k}: {action}")?;
            for (r, name) in ["X", "Y", "Z", "N"].iter().enumerate() {
                let b: Vec<f64> = (0..5).map(|c| s.b[(r, c)]).collect();
                writeln!(out, "  B[{name}]      {}", row(&b))?;
            }
            writeln!(out, "  c         {}", row(&s.c))?;
            writeln!(out, "  f         {}", row(&s.f))?;
        }
        let achieved = result.achieved(&problem);
        writeln!(out, "\nforces      {}", row(result.f.as_slice()))?;
        let n = model.propulsion.speeds_for_forces(&result.f, env.rho);
        writeln!(out, "speeds      {}", row(&n))?;
        writeln!(out, "achieved    {}", row(achieved.as_slice()))?;
        writeln!(
            out,
            "residual {:.6e}, {} clamp passes, {} releases{}",
            result.residual,
            result.iterations,
            result.releases,
            if result.infeasible { ", demand infeasible" } else { "" }
        )
    };
    w().map_err(runtime)?;
    emit(&out)
}

fn config_err_alloc(e: auvkit::allocator::AllocationError) -> CliError {
    CliError::Config(e.to_string())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::EstimateCoeffs {
            vehicle,
            calibrate,
            csv,
        } => estimate_coeffs(&vehicle, calibrate.as_deref(), csv.as_deref()),
        Command::Plan { mission } => plan(&mission),
        Command::Simulate {
            vehicle,
            mission,
            controller,
            current,
            seed,
            out,
        } => simulate(&vehicle, &mission, controller, current, seed, &out),
        Command::Replay {
            vehicle,
            rpm,
            compare,
            current,
            out,
        } => replay_cmd(&vehicle, &rpm, compare.as_deref(), current, out.as_deref()),
        Command::Allocate { vehicle, tau, speed } => allocate_cmd(&vehicle, tau, speed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
