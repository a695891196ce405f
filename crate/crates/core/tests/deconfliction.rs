mod common;

use common::cw::{coast, min_distance, position_at};
use nalgebra::Vector3;
use pearlwheel::constellation::SatId;
use pearlwheel::planner::{deconflict, plan_transfer, ManeuverPlan, PlannerError, PlannerSettings, TransferProblem};
use pearlwheel::relmotion::{ChiefOrbit, LvlhState};

const KEEP_OUT_M: f64 = 10.0;

fn chief() -> ChiefOrbit {
    ChiefOrbit::from_altitude(400e3).unwrap()
}

fn transfer(id: u32, from: Vector3<f64>, to: Vector3<f64>) -> ManeuverPlan {
    let settings = PlannerSettings::default();
    let problem = TransferProblem::new(LvlhState::at_rest(from, 0.0), to, Vector3::zeros(), &settings);
    plan_transfer(&problem, &chief(), 10.0, SatId(id)).unwrap()
}

/// At-rest start and end states of a two-burn transfer whose coast arc passes
/// the origin with velocity `v` halfway through the window.
fn through_origin(id: u32, v: Vector3<f64>) -> ManeuverPlan {
    let settings = PlannerSettings {
        impulse_epochs: 2,
        ..Default::default()
    };
    let n = chief().mean_motion();
    let half = settings.time_limit_s / 2.0;
    let (r0, _) = coast(n, Vector3::zeros(), v, -half);
    let (rf, _) = coast(n, Vector3::zeros(), v, half);
    let problem = TransferProblem::new(LvlhState::at_rest(r0, 0.0), rf, Vector3::zeros(), &settings);
    plan_transfer(&problem, &chief(), 10.0, SatId(id)).unwrap()
}

#[test]
fn simultaneous_origin_crossing_is_separated() {
    let raw = vec![
        through_origin(1, Vector3::new(0.0, 0.1, 0.0)),
        through_origin(2, Vector3::new(0.0, 0.0, 0.1)),
    ];
    let n = chief().mean_motion();
    for p in &raw {
        assert!(position_at(p, n, p.problem.time_limit_s / 2.0).norm() < 1e-6);
    }
    assert!(min_distance(&raw, n) < KEEP_OUT_M);

    let out = deconflict(&raw, &chief(), KEEP_OUT_M).unwrap();
    assert!(min_distance(&out, n) >= KEEP_OUT_M);
    assert_eq!(out[0], raw[0], "the higher-priority plan keeps its timing");
    assert!(out[1].departure_delay_s > 0.0);
    for p in &out {
        let end = position_at(p, n, p.problem.time_limit_s);
        assert!((end - p.problem.goal.position_m).norm() < 1e-6);
    }
}

#[test]
fn disjoint_corridors_are_left_alone() {
    let raw = vec![
        transfer(1, Vector3::new(0.0, -20.0, 0.0), Vector3::new(0.0, -60.0, 0.0)),
        transfer(2, Vector3::new(0.0, 100.0, 0.0), Vector3::new(0.0, 140.0, 0.0)),
        transfer(3, Vector3::new(0.0, 0.0, 200.0), Vector3::new(0.0, 0.0, 300.0)),
    ];
    assert!(min_distance(&raw, chief().mean_motion()) >= 10.0 * KEEP_OUT_M);
    assert_eq!(deconflict(&raw, &chief(), KEEP_OUT_M).unwrap(), raw);
}

#[test]
fn coincident_starts_are_reported() {
    let p = Vector3::new(0.0, 5.0, 0.0);
    let raw = vec![
        transfer(1, p, Vector3::new(0.0, 80.0, 0.0)),
        transfer(2, p, Vector3::new(0.0, -80.0, 0.0)),
    ];
    match deconflict(&raw, &chief(), KEEP_OUT_M) {
        Err(PlannerError::DeconflictionFailure { first, second, closest_m, .. }) => {
            assert_eq!((first, second), (SatId(1), SatId(2)));
            assert!(closest_m < KEEP_OUT_M);
        }
        other => panic!("expected a deconfliction failure, got {other:?}"),
    }
}
