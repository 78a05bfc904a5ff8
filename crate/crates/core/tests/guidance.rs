use auvkit::guidance::ControllerKind;
use auvkit::mission::{Config, MissionPlan};
use auvkit::simulator::{run_mission, Environment, LogMode, MissionOptions, MissionRun, SimState};
use auvkit::vehicle::Pose;

fn fly(controller: ControllerKind, current: f64) -> MissionRun {
    let cfg = Config::default();
    // 2 m to port of a 40 m northbound line
    let plan = MissionPlan::line([0.0, 0.0], [40.0, 0.0], 4.0, 0.2);
    let opts = MissionOptions {
        controller,
        initial: Some(SimState::at_rest(Pose::at(0.0, -2.0, 4.0, 0.0))),
        ..cfg.mission_options()
    };
    run_mission(
        &plan,
        &cfg.vehicle.build().unwrap(),
        &Environment::with_current([0.0, current, 0.0]),
        &opts,
    )
    .unwrap()
}

fn settled_error(run: &MissionRun) -> f64 {
    let tail: Vec<f64> = run
        .log
        .records
        .iter()
        .filter(|r| r.t > 120.0)
        .map(|r| r.e.abs())
        .collect();
    tail.iter().copied().fold(0.0, f64::max)
}

#[test]
fn modified_controller_converges_through_both_modes() {
    let run = fly(ControllerKind::Modified, 0.15);
    let first = &run.log.records[0];
    assert!((first.e.abs() - 2.0).abs() < 1e-12);
    assert_eq!(first.mode, LogMode::Heading);
    assert!(run.log.records.iter().any(|r| r.mode == LogMode::Sway));
    // once in sway mode near the path it stays there
    let last_heading = run
        .log
        .records
        .iter()
        .rposition(|r| r.mode == LogMode::Heading)
        .unwrap();
    assert!(run.log.records[last_heading].t < 60.0);
    assert!(settled_error(&run) < 0.05, "settled error {}", settled_error(&run));
}

#[test]
fn heading_only_controller_leaves_a_current_offset() {
    let modified = fly(ControllerKind::Modified, 0.15);
    let original = fly(ControllerKind::Original, 0.15);
    assert!(original.log.records.iter().all(|r| r.mode == LogMode::Heading));
    assert!(settled_error(&original) > 2.0 * settled_error(&modified));
}

#[test]
fn calm_water_convergence_for_both_controllers() {
    for kind in [ControllerKind::Original, ControllerKind::Modified] {
        let run = fly(kind, 0.0);
        assert!(settled_error(&run) < 0.05, "{kind:?}: {}", settled_error(&run));
    }
}
