use std::collections::BTreeMap;

use pearlwheel::commands::{cmd_drift, cmd_init_plan, cmd_reconfig_plan, cmd_schedule, cmd_simulate, cmd_upkeep, Artifacts, OutputFormat};
use pearlwheel::config::{ScenarioConfig, SolverChoice};
use pearlwheel::constellation::{build_constellation, Constellation};
use pearlwheel::planner::{apply_formation_plan, deployment_cube, plan_formation_init};
use pearlwheel::relmotion::pco_plane_normal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

const CSV: OutputFormat = OutputFormat::Csv;

fn rows<T: for<'de> Deserialize<'de>>(a: &Artifacts, name: &str) -> Vec<T> {
    let file = a.file(name).unwrap_or_else(|| panic!("{name} missing"));
    csv::Reader::from_reader(file.bytes.as_slice())
        .deserialize()
        .map(|r| r.unwrap())
        .collect()
}

fn metric(a: &Artifacts, key: &str) -> f64 {
    a.metrics[key].as_f64().unwrap_or_else(|| panic!("{key} is not a number"))
}

#[derive(Deserialize)]
struct DriftRow {
    rho_m: f64,
    alpha_x_deg: f64,
    drift_rate_mps: f64,
    drift_per_orbit_m: f64,
    a_reading: String,
}

#[test]
fn drift_table_matches_hand_evaluation() {
    let mut config = ScenarioConfig::default();
    config.drift.radii_m = vec![0.0, 100.0, 200.0, 400.0, 800.0];
    let out = cmd_drift(&config, CSV).unwrap();
    let table: Vec<DriftRow> = rows(&out, "drift.csv");
    assert!(out.file("drift.csv").unwrap().bytes.starts_with(b"rho_m,alpha_x_deg,drift_rate_mps,drift_per_orbit_m,a_reading\n"));

    let a = 6_378_137.0 + 400e3;
    let length = |reading: &str| if reading == "altitude" { 400e3 } else { a };
    for r in table.iter().filter(|r| r.rho_m == 0.0) {
        assert_eq!((r.drift_rate_mps, r.drift_per_orbit_m), (0.0, 0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let r = &table[rng.gen_range(0..table.len())];
        let hand = -9.0 * std::f64::consts::PI * r.rho_m.powi(2) / (2.0 * length(&r.a_reading))
            * (2.0 + (2.0 * r.alpha_x_deg.to_radians()).cos());
        assert!((r.drift_per_orbit_m - hand).abs() <= 1e-12 * hand.abs().max(1e-300));
    }
    for r in &table {
        if let Some(d) = table.iter().find(|d| {
            d.rho_m == 2.0 * r.rho_m && d.alpha_x_deg == r.alpha_x_deg && d.a_reading == r.a_reading
        }) {
            assert_eq!(d.drift_per_orbit_m, 4.0 * r.drift_per_orbit_m);
        }
    }
}

#[test]
fn init_sweep_is_linear_and_repeatable() {
    let config = ScenarioConfig::default();
    let a = cmd_init_plan(&config, CSV).unwrap();
    assert_eq!(a, cmd_init_plan(&config, CSV).unwrap());
    assert!(a.metrics["sweep_monotone"].as_bool().unwrap());
    assert!(metric(&a, "sweep_r2") >= 0.95);
    let at_100 = metric(&a, "mean_ns");
    assert!(at_100 / 3.9 <= 3.0 && 3.9 / at_100 <= 3.0, "{at_100}");
}

#[test]
fn init_plan_is_independent_of_thread_count() {
    let config = ScenarioConfig::default();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| cmd_init_plan(&config, CSV).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn identity_reconfiguration_is_free() {
    let mut config = ScenarioConfig::default();
    let n = pco_plane_normal();
    config.planner.reconfig_plane_normal = [n.x, n.y, n.z];
    let a = cmd_reconfig_plan(&config, CSV).unwrap();
    assert!(metric(&a, "reconfig_mean_ns").abs() < 1e-9);
}

#[test]
fn reconfiguration_debits_show_in_fleet_state() {
    let config = ScenarioConfig::default();
    let a = cmd_reconfig_plan(&config, CSV).unwrap();
    let fleet: pearlwheel::constellation::Fleet =
        serde_json::from_slice(&a.file("fleet_state.json").unwrap().bytes).unwrap();
    let per_sat = metric(&a, "init_mean_ns") + metric(&a, "reconfig_mean_ns");
    let used: f64 = fleet.deputies.iter().map(|d| d.fuel_used_ns).sum();
    assert!((used / fleet.deputies.len() as f64 - per_sat).abs() < 1e-9);
    assert!(fleet.deputies.iter().all(|d| d.fuel_used_ns > 0.0));
    assert!((fleet.wheel_plane - config.planner.reconfig_normal().normalize()).norm() < 1e-12);
}

#[derive(Deserialize)]
struct BudgetRow {
    propulsion: String,
    basis: String,
    rho_m: f64,
    impulse_per_year_ns: f64,
    lifetime_years: f64,
}

#[test]
fn upkeep_reference_rows_and_scaling() {
    let config = ScenarioConfig::default();
    let table: Vec<BudgetRow> = rows(&cmd_upkeep(&config, CSV).unwrap(), "budget.csv");
    let reference = |name: &str| {
        table
            .iter()
            .find(|r| r.propulsion == name && r.basis == "reference")
            .unwrap()
            .lifetime_years
    };
    assert!((reference("VACCO MIPS") - 5.2).abs() <= 0.5);
    assert!(reference("Aerojet MPS-120") > 10.0);
    let model = |rho: f64| {
        table
            .iter()
            .find(|r| r.propulsion == "VACCO MIPS" && r.basis == "model" && r.rho_m == rho)
            .unwrap()
            .impulse_per_year_ns
    };
    assert!((model(1000.0) / model(100.0) - 100.0).abs() < 1e-12);
}

#[test]
fn schedule_without_targets_is_empty() {
    let mut config = ScenarioConfig::default();
    config.scheduler.random_targets = 0;
    let a = cmd_schedule(&config, CSV, true).unwrap();
    assert_eq!(metric(&a, "objective"), 0.0);
    assert_eq!(metric(&a, "tasks"), 0.0);
    assert_eq!(metric(&a, "validation_findings"), 0.0);
}

#[test]
fn greedy_never_beats_exact_and_both_validate() {
    for seed in 0..8 {
        let mut config = ScenarioConfig {
            seed,
            ..Default::default()
        };
        config.scheduler.fleets = vec![0];
        config.scheduler.horizon_slots = 2;
        config.scheduler.random_targets = 2;
        config.constellation.tracks[0].deputies_per_fleet = 4;
        let mut objective = BTreeMap::new();
        for solver in [SolverChoice::Exact, SolverChoice::Greedy] {
            config.scheduler.solver = solver;
            let a = cmd_schedule(&config, CSV, true).unwrap();
            assert_eq!(metric(&a, "validation_findings"), 0.0);
            objective.insert(format!("{solver:?}"), metric(&a, "objective"));
        }
        assert!(objective["Greedy"] <= objective["Exact"] + 1e-9, "{objective:?}");
    }
}

fn final_state(a: &Artifacts) -> Constellation {
    Constellation::from_json(std::str::from_utf8(&a.file("final_state.json").unwrap().bytes).unwrap()).unwrap()
}

#[test]
fn zero_orbit_simulation_stops_after_init() {
    let mut config = ScenarioConfig::default();
    config.simulate.orbits = 0;
    let sim = final_state(&cmd_simulate(&config, CSV).unwrap());

    let mut expected = build_constellation(&config.constellation, config.chief_orbit().unwrap()).unwrap();
    let settings = config.planner.settings();
    for (f, fleet) in expected.tracks.iter_mut().flat_map(|t| t.fleets.iter_mut()).enumerate() {
        let deployment = deployment_cube(
            fleet.deputies.len(),
            config.deployment.cube_side_m,
            config.deployment.min_separation_m,
            config.seed + f as u64,
            0.0,
        )
        .unwrap();
        let plan = plan_formation_init(fleet, &deployment, &expected.chief_orbit, &settings).unwrap();
        assert!(apply_formation_plan(fleet, &plan).is_empty());
    }
    assert_eq!(sim, expected);
}

#[derive(Deserialize)]
struct Event {
    seq: usize,
    satellite: u32,
    category: String,
    impulse_ns: f64,
    applied: bool,
}

#[test]
fn fuel_ledger_replays_to_final_state() {
    let mut config = ScenarioConfig::default();
    config.simulate.orbits = 3;
    config.simulate.reconfigure = true;
    let a = cmd_simulate(&config, CSV).unwrap();
    let events: Vec<Event> = rows(&a, "fuel_events.csv");
    assert!(events.iter().enumerate().all(|(i, e)| e.seq == i));
    for category in ["init", "reconfig", "upkeep"] {
        assert!(events.iter().any(|e| e.category == category), "no {category} debits");
    }

    let mut replay: BTreeMap<u32, f64> = BTreeMap::new();
    for e in events.iter().filter(|e| e.applied) {
        *replay.entry(e.satellite).or_default() += e.impulse_ns;
    }
    let state = final_state(&a);
    for s in state.satellites() {
        assert_eq!(s.fuel_used_ns, replay.get(&s.id.0).copied().unwrap_or(0.0), "{}", s.id);
    }
    assert_eq!(a, cmd_simulate(&config, CSV).unwrap());
}
