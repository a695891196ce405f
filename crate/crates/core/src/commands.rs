//! Scenario-level commands behind the `pearlwheel` binary.
//!
//! Each `cmd_*` function is a pure function of the scenario: it returns the
//! files it would write plus summary metrics, so callers can compare outputs
//! byte for byte. [`write_run`] puts them on disk next to a `run_report.json`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{ConfigError, ScenarioConfig, SolverChoice};
use crate::constellation::{
    build_constellation, find_propulsion, propulsion_catalog, Constellation, Fleet, PropulsionSpec, SatId,
};
use crate::planner::{
    apply_formation_plan, deployment_cube, plan_formation_init, plan_reconfiguration, FormationPlan, ManeuverPlan,
    PlannerError,
};
use crate::relmotion::{
    drift_per_orbit_pco_scaled, drift_rate_scaled, ChiefOrbit, DriftScale, RelativeOrbitParams,
};
use crate::scheduler::{
    solve_auto, solve_exact, solve_greedy, validate_schedule, Action, Instance, Schedule, SchedulerError,
};
use crate::upkeep::{budget_report, impulse_per_orbit, BudgetReport, UpkeepError};

/// Wheel radius the quoted reference budget figures refer to.
const REFERENCE_RHO_M: f64 = 100.0;
/// Burns smaller than this are grid epochs the LP left unused.
const MIN_REPORTED_DV_MPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("planner: {0}")]
    Planner(#[from] PlannerError),
    #[error("scheduler: {0}")]
    Scheduler(#[from] SchedulerError),
    #[error("upkeep: {0}")]
    Upkeep(#[from] UpkeepError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CommandError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => 2,
            CommandError::Planner(_) | CommandError::Scheduler(_) | CommandError::Upkeep(_) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Artifacts {
    pub files: Vec<OutputFile>,
    pub metrics: BTreeMap<String, Value>,
    /// Human-readable lines for the terminal.
    pub summary: String,
}

impl Artifacts {
    fn metric(&mut self, key: &str, value: impl Serialize) {
        self.metrics
            .insert(key.to_string(), serde_json::to_value(value).expect("metric serializes"));
    }

    fn table<T: Serialize>(&mut self, stem: &str, rows: &[T], format: OutputFormat) -> Result<(), CommandError> {
        let bytes = match format {
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for r in rows {
                    w.serialize(r)?;
                }
                w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?
            }
            OutputFormat::Json => json_bytes(&rows)?,
        };
        self.files.push(OutputFile {
            name: format!("{stem}.{}", format.extension()),
            bytes,
        });
        Ok(())
    }

    fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CommandError> {
        self.files.push(OutputFile {
            name: name.to_string(),
            bytes: json_bytes(value)?,
        });
        Ok(())
    }

    pub fn file(&self, name: &str) -> Option<&OutputFile> {
        self.files.iter().find(|f| f.name == name)
    }
}

fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, CommandError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub outputs: Vec<String>,
    pub metrics: BTreeMap<String, Value>,
}

/// Writes every artifact plus `run_report.json` into `out_dir`.
pub fn write_run(
    out_dir: &Path,
    command: &str,
    config: &ScenarioConfig,
    artifacts: &Artifacts,
) -> Result<RunReport, CommandError> {
    std::fs::create_dir_all(out_dir)?;
    for f in &artifacts.files {
        std::fs::write(out_dir.join(&f.name), &f.bytes)?;
    }
    let report = RunReport {
        command: command.to_string(),
        config_hash: config.config_hash(),
        seed: config.seed,
        outputs: artifacts.files.iter().map(|f| f.name.clone()).collect(),
        metrics: artifacts.metrics.clone(),
    };
    std::fs::write(out_dir.join("run_report.json"), json_bytes(&report)?)?;
    Ok(report)
}

/// Least-squares line through `(x, y)`: `(slope, intercept, r_squared)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

fn fleet_mut(c: &mut Constellation, index: usize) -> &mut Fleet {
    c.tracks
        .iter_mut()
        .flat_map(|t| t.fleets.iter_mut())
        .nth(index)
        .expect("fleet index validated with the config")
}

fn constellation_with_radius(config: &ScenarioConfig, radius_m: f64) -> Result<Constellation, CommandError> {
    let mut layout = config.constellation.clone();
    layout.wheel_radius_m = radius_m;
    Ok(build_constellation(&layout, config.chief_orbit()?)?)
}

/// Initialization plan for one fleet deployed from the scenario's cube.
fn init_plan(config: &ScenarioConfig, c: &Constellation, fleet_index: usize) -> Result<FormationPlan, CommandError> {
    let fleet = c.fleets().nth(fleet_index).expect("fleet index validated with the config");
    let deployment = deployment_cube(
        fleet.deputies.len(),
        config.deployment.cube_side_m,
        config.deployment.min_separation_m,
        config.seed.wrapping_add(fleet_index as u64),
        0.0,
    )?;
    Ok(plan_formation_init(fleet, &deployment, &c.chief_orbit, &config.planner.settings())?)
}

#[derive(Debug, Serialize)]
struct DriftRow {
    rho_m: f64,
    alpha_x_deg: f64,
    drift_rate_mps: f64,
    drift_per_orbit_m: f64,
    a_reading: &'static str,
}

/// Drift rate and per-orbit drift over the radius and phase grid, under both
/// readings of the length scale.
pub fn cmd_drift(config: &ScenarioConfig, format: OutputFormat) -> Result<Artifacts, CommandError> {
    let chief = config.chief_orbit()?;
    let mut rows = Vec::new();
    for scale in [DriftScale::SemiMajorAxis, DriftScale::Altitude] {
        for &rho in &config.drift.radii_m {
            for &alpha in &config.drift.alpha_x_deg {
                let a = alpha.to_radians();
                rows.push(DriftRow {
                    rho_m: rho,
                    alpha_x_deg: alpha,
                    drift_rate_mps: drift_rate_scaled(&RelativeOrbitParams::pco(rho, a), &chief, scale),
                    drift_per_orbit_m: drift_per_orbit_pco_scaled(rho, a, &chief, scale),
                    a_reading: scale.label(),
                });
            }
        }
    }
    let mut out = Artifacts::default();
    out.table("drift", &rows, format)?;
    for scale in [DriftScale::SemiMajorAxis, DriftScale::Altitude] {
        let d = drift_per_orbit_pco_scaled(100.0, 0.0, &chief, scale);
        out.metric(&format!("drift_per_orbit_m_rho100_{}", scale.label()), d);
        let _ = writeln!(out.summary, "drift per orbit at 100 m, a = {}: {d:.4} m", scale.label());
    }
    out.metric("rows", rows.len());
    Ok(out)
}

#[derive(Debug, Serialize)]
struct PlanRow {
    satellite: SatId,
    burn_epoch_s: f64,
    dvx_mps: f64,
    dvy_mps: f64,
    dvz_mps: f64,
    dv_mps: f64,
    cumulative_ns: f64,
}

fn plan_rows(plans: &[ManeuverPlan]) -> Vec<PlanRow> {
    let mut rows = Vec::new();
    for p in plans {
        let mut cumulative = 0.0;
        for imp in p.impulses.iter().filter(|i| i.magnitude_mps() > MIN_REPORTED_DV_MPS) {
            cumulative += p.mass_kg * imp.magnitude_mps();
            rows.push(PlanRow {
                satellite: p.satellite,
                burn_epoch_s: imp.time_s,
                dvx_mps: imp.delta_v_mps.x,
                dvy_mps: imp.delta_v_mps.y,
                dvz_mps: imp.delta_v_mps.z,
                dv_mps: imp.magnitude_mps(),
                cumulative_ns: cumulative,
            });
        }
    }
    rows
}

#[derive(Debug, Serialize)]
struct SweepRow {
    rho_m: f64,
    mean_ns: f64,
    max_ns: f64,
    fleet_total_ns: f64,
    min_separation_m: f64,
}

/// Initialization plans at the scenario radius and the cost-versus-radius sweep.
pub fn cmd_init_plan(config: &ScenarioConfig, format: OutputFormat) -> Result<Artifacts, CommandError> {
    let fleet = config.planner.fleet_index;
    let mut sweep = Vec::new();
    for &rho in &config.planner.sweep_radii_m {
        let c = constellation_with_radius(config, rho)?;
        let plan = init_plan(config, &c, fleet)?;
        sweep.push(SweepRow {
            rho_m: rho,
            mean_ns: plan.mean_ns(),
            max_ns: plan.max_ns(),
            fleet_total_ns: plan.total_ns,
            min_separation_m: plan.min_separation_m,
        });
    }
    let c = constellation_with_radius(config, config.constellation.wheel_radius_m)?;
    let plan = init_plan(config, &c, fleet)?;

    let mut out = Artifacts::default();
    out.table("init_sweep", &sweep, format)?;
    out.table("init_plans", &plan_rows(&plan.plans), format)?;
    out.metric("wheel_radius_m", config.constellation.wheel_radius_m);
    out.metric("mean_ns", plan.mean_ns());
    out.metric("max_ns", plan.max_ns());
    out.metric("fleet_total_ns", plan.total_ns);
    let _ = writeln!(
        out.summary,
        "init at {} m: mean {:.3} Ns, max {:.3} Ns per satellite",
        config.constellation.wheel_radius_m,
        plan.mean_ns(),
        plan.max_ns()
    );
    if sweep.len() >= 2 {
        let xs: Vec<f64> = sweep.iter().map(|r| r.rho_m).collect();
        let ys: Vec<f64> = sweep.iter().map(|r| r.mean_ns).collect();
        let (slope, intercept, r2) = linear_fit(&xs, &ys);
        let monotone = ys.windows(2).all(|w| w[1] > w[0]);
        out.metric("sweep_slope_ns_per_m", slope);
        out.metric("sweep_intercept_ns", intercept);
        out.metric("sweep_r2", r2);
        out.metric("sweep_monotone", monotone);
        let _ = writeln!(out.summary, "sweep: slope {slope:.5} Ns/m, R^2 {r2:.5}, monotone {monotone}");
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct FleetFuelRow {
    satellite: SatId,
    fuel_used_ns: f64,
    remaining_ns: f64,
}

/// Initialization followed by a plane change, both debited to the fleet.
pub fn cmd_reconfig_plan(config: &ScenarioConfig, format: OutputFormat) -> Result<Artifacts, CommandError> {
    let index = config.planner.fleet_index;
    let mut c = constellation_with_radius(config, config.constellation.wheel_radius_m)?;
    let chief = c.chief_orbit;
    let settings = config.planner.settings();
    let init = init_plan(config, &c, index)?;
    let radius = config.planner.reconfig_radius_m.unwrap_or(config.constellation.wheel_radius_m);
    let normal = config.planner.reconfig_normal();

    let fleet = fleet_mut(&mut c, index);
    let mut exceeded = apply_formation_plan(fleet, &init);
    let reconfig = plan_reconfiguration(fleet, &normal, radius, &chief, &settings, settings.time_limit_s)?;
    exceeded.extend(apply_formation_plan(fleet, &reconfig));
    fleet.wheel_plane = normal.normalize();
    fleet.wheel_radius_m = radius;

    let ratio = reconfig.mean_ns() / init.mean_ns();
    let fuel: Vec<FleetFuelRow> = fleet
        .deputies
        .iter()
        .map(|d| FleetFuelRow {
            satellite: d.id,
            fuel_used_ns: d.fuel_used_ns,
            remaining_ns: d.remaining_impulse_ns(),
        })
        .collect();
    let mut out = Artifacts::default();
    out.table("reconfig_plans", &plan_rows(&reconfig.plans), format)?;
    out.table("fleet_fuel", &fuel, format)?;
    out.json("fleet_state.json", &*fleet)?;
    out.metric("init_mean_ns", init.mean_ns());
    out.metric("reconfig_mean_ns", reconfig.mean_ns());
    out.metric("reconfig_to_init_ratio", ratio);
    out.metric("reconfig_plane_normal", normal.normalize().as_slice());
    out.metric("budget_exceeded", exceeded.len());
    let _ = writeln!(
        out.summary,
        "init {:.3} Ns, reconfiguration {:.3} Ns per satellite, ratio {ratio:.3}",
        init.mean_ns(),
        reconfig.mean_ns()
    );
    Ok(out)
}

#[derive(Debug, Serialize)]
struct BudgetRow {
    propulsion: String,
    basis: &'static str,
    rho_m: f64,
    impulse_per_orbit_ns: f64,
    impulse_per_year_ns: f64,
    init_ns: f64,
    reconfig_reserve_ns: f64,
    upkeep_ns: f64,
    lifetime_years: f64,
}

fn budget_row(r: &BudgetReport, basis: &'static str) -> BudgetRow {
    BudgetRow {
        propulsion: r.propulsion.clone(),
        basis,
        rho_m: r.rho_m,
        impulse_per_orbit_ns: r.impulse_per_orbit_ns,
        impulse_per_year_ns: r.impulse_per_year_ns,
        init_ns: r.allocation.init_ns,
        reconfig_reserve_ns: r.allocation.reconfig_reserve_ns,
        upkeep_ns: r.allocation.upkeep_ns,
        lifetime_years: r.lifetime_years,
    }
}

/// Aligned text table of budget reports.
pub fn render_budget_table(reports: &[(String, BudgetReport)]) -> String {
    let mut s = format!(
        "{:<16} {:<10} {:>7} {:>12} {:>9} {:>9} {:>9} {:>9}\n",
        "propulsion", "basis", "rho_m", "Ns/year", "init", "reserve", "upkeep", "years"
    );
    for (basis, r) in reports {
        let _ = writeln!(
            s,
            "{:<16} {:<10} {:>7.0} {:>12.4} {:>9.3} {:>9.3} {:>9.3} {:>9.3}",
            r.propulsion,
            basis,
            r.rho_m,
            r.impulse_per_year_ns,
            r.allocation.init_ns,
            r.allocation.reconfig_reserve_ns,
            r.allocation.upkeep_ns,
            r.lifetime_years
        );
    }
    for note in reports.iter().flat_map(|(_, r)| r.notes.iter()).collect::<std::collections::BTreeSet<_>>() {
        let _ = writeln!(s, "note: {note}");
    }
    s
}

/// Station-keeping budget and lifetime per propulsion option.
///
/// `model` rows use the planned initialization cost and the drift-based
/// upkeep at each radius; the `reference` row evaluates the quoted figures.
pub fn cmd_upkeep(config: &ScenarioConfig, format: OutputFormat) -> Result<Artifacts, CommandError> {
    let chief = config.chief_orbit()?;
    let u = &config.upkeep;
    let model = u.model(config.constellation.mass_kg);
    let alpha = u.alpha_x_deg.to_radians();
    let options: Vec<PropulsionSpec> = if u.propulsion_options.is_empty() {
        propulsion_catalog()
    } else {
        u.propulsion_options
            .iter()
            .map(|n| find_propulsion(n).expect("validated with the config"))
            .collect()
    };
    let mut init_costs = Vec::new();
    for &rho in &u.radii_m {
        let init = if rho > 0.0 {
            let c = constellation_with_radius(config, rho)?;
            init_plan(config, &c, config.planner.fleet_index)?.mean_ns()
        } else {
            0.0
        };
        init_costs.push((rho, init));
    }

    let mut reports: Vec<(String, BudgetReport)> = Vec::new();
    for p in &options {
        for &(rho, init) in &init_costs {
            let r = budget_report(p, rho, alpha, &chief, &model, init, u.reconfig_fraction, None)?;
            reports.push(("model".into(), r));
        }
        if let (Some(init), Some(annual)) = (u.reference_init_ns, u.reference_annual_ns) {
            let r = budget_report(p, REFERENCE_RHO_M, alpha, &chief, &model, init, u.reconfig_fraction, Some(annual))?;
            reports.push(("reference".into(), r));
        }
    }
    let rows: Vec<BudgetRow> = reports
        .iter()
        .map(|(b, r)| budget_row(r, if b == "model" { "model" } else { "reference" }))
        .collect();

    let mut out = Artifacts::default();
    out.table("budget", &rows, format)?;
    let json_reports: Vec<Value> = reports
        .iter()
        .map(|(b, r)| json!({ "basis": b, "report": r }))
        .collect();
    out.json("budget.json", &json_reports)?;
    for (b, r) in &reports {
        if b == "reference" {
            out.metric(&format!("reference_lifetime_years[{}]", r.propulsion), r.lifetime_years);
        }
    }
    let year = |rho: f64| {
        let per_orbit = impulse_per_orbit(rho, alpha, &chief, &model);
        per_orbit * crate::upkeep::orbits_per_year(&chief)
    };
    out.metric("model_annual_ns_rho100", year(100.0));
    out.metric("model_annual_ratio_1000_over_100", year(1000.0) / year(100.0));
    out.metric("scheme", u.scheme);
    out.metric("drift_scale", u.drift_scale.label());
    out.summary = render_budget_table(&reports);
    Ok(out)
}

#[derive(Debug, Serialize)]
struct ScheduleRow {
    slot: usize,
    satellite: SatId,
    target: String,
    off_nadir_deg: f64,
    momentum_mnms: f64,
    marginal_value: f64,
}

fn schedule_rows(s: &Schedule) -> Vec<ScheduleRow> {
    s.tasks
        .iter()
        .map(|t| ScheduleRow {
            slot: t.slot,
            satellite: t.satellite,
            target: match t.action {
                Action::Observe { target } => target.to_string(),
                Action::Desaturate => "DESAT".to_string(),
            },
            off_nadir_deg: t.off_nadir_rad.to_degrees(),
            momentum_mnms: t.momentum_after_mnms,
            marginal_value: t.marginal_value,
        })
        .collect()
}

fn scheduling_instance(config: &ScenarioConfig, c: &Constellation, seed: u64) -> Instance {
    let s = &config.scheduler;
    let mut inst = Instance::from_constellation(
        c,
        &s.fleets,
        s.targets.clone(),
        s.grid(),
        s.settings(),
        s.track_spacing_km * 1e3,
    );
    if inst.targets.is_empty() {
        inst.targets = inst.random_targets(s.random_targets, seed);
    }
    inst
}

fn run_solver(inst: &Instance, solver: SolverChoice) -> Result<Schedule, SchedulerError> {
    match solver {
        SolverChoice::Auto => solve_auto(inst),
        SolverChoice::Exact => solve_exact(inst),
        SolverChoice::Greedy => solve_greedy(inst),
    }
}

/// One scheduling window over the scenario's participating fleets.
pub fn cmd_schedule(config: &ScenarioConfig, format: OutputFormat, validate: bool) -> Result<Artifacts, CommandError> {
    let c = build_constellation(&config.constellation, config.chief_orbit()?)?;
    let inst = scheduling_instance(config, &c, config.seed);
    let schedule = run_solver(&inst, config.scheduler.solver)?;

    let mut out = Artifacts::default();
    out.table("schedule", &schedule_rows(&schedule), format)?;
    out.json("schedule.json", &schedule)?;
    out.json("instance.json", &inst)?;
    out.metric("objective", schedule.objective_value);
    out.metric("solver", schedule.solver);
    out.metric("tasks", schedule.tasks.len());
    out.metric("desaturations", schedule.desaturations);
    out.metric("nodes_explored", schedule.nodes_explored);
    out.metric("satellites", inst.satellites.len());
    out.metric("targets", inst.targets.len());
    let _ = writeln!(
        out.summary,
        "{:?} schedule: objective {:.4}, {} tasks, {} desaturations",
        schedule.solver,
        schedule.objective_value,
        schedule.tasks.len(),
        schedule.desaturations
    );
    if validate {
        let findings = validate_schedule(&schedule, &inst);
        out.json("validation.json", &findings)?;
        out.metric("validation_findings", findings.len());
        let _ = writeln!(out.summary, "validation: {} findings", findings.len());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FuelCategory {
    Init,
    Reconfig,
    Upkeep,
    Desat,
}

#[derive(Debug, Clone, Serialize)]
pub struct FuelEvent {
    pub seq: usize,
    pub satellite: SatId,
    pub category: FuelCategory,
    pub orbit: Option<u32>,
    pub impulse_ns: f64,
    /// False when the propulsion budget could not cover it.
    pub applied: bool,
}

#[derive(Debug, Serialize)]
struct LedgerRow {
    satellite: SatId,
    init_ns: f64,
    reconfig_ns: f64,
    upkeep_ns: f64,
    desat_ns: f64,
    fuel_used_ns: f64,
    remaining_ns: f64,
    wheel_momentum_mnms: f64,
}

struct Ledger {
    events: Vec<FuelEvent>,
}

impl Ledger {
    fn debit(&mut self, c: &mut Constellation, sat: SatId, category: FuelCategory, orbit: Option<u32>, ns: f64) -> bool {
        let target = c
            .tracks
            .iter_mut()
            .flat_map(|t| t.fleets.iter_mut())
            .flat_map(|f| std::iter::once(&mut f.chief).chain(f.deputies.iter_mut()))
            .find(|s| s.id == sat)
            .expect("ledger satellites come from the constellation");
        let applied = target.debit(ns).is_ok();
        self.events.push(FuelEvent {
            seq: self.events.len(),
            satellite: sat,
            category,
            orbit,
            impulse_ns: ns,
            applied,
        });
        applied
    }

    /// Debits a formation plan and moves each deputy whose debit went through.
    fn apply_plan(&mut self, c: &mut Constellation, fleet: usize, plan: &FormationPlan, category: FuelCategory) {
        for (i, p) in plan.plans.iter().enumerate() {
            if self.debit(c, p.satellite, category, None, p.total_impulse_ns) {
                fleet_mut(c, fleet).deputies[i].rel_orbit = plan.slots[plan.assignment.slot_of[i]];
            }
        }
    }
}

/// Deploy, initialize, optionally reconfigure, then fly `orbits` orbits of
/// scheduling and station keeping while keeping a per-satellite fuel ledger.
pub fn cmd_simulate(config: &ScenarioConfig, format: OutputFormat) -> Result<Artifacts, CommandError> {
    let mut c = build_constellation(&config.constellation, config.chief_orbit()?)?;
    let chief: ChiefOrbit = c.chief_orbit;
    let settings = config.planner.settings();
    let n_fleets = c.fleets().count();
    let mut ledger = Ledger { events: Vec::new() };

    let mut init_means = Vec::new();
    for f in 0..n_fleets {
        let plan = init_plan(config, &c, f)?;
        init_means.push(plan.mean_ns());
        ledger.apply_plan(&mut c, f, &plan, FuelCategory::Init);
    }

    if config.simulate.reconfigure {
        let normal = config.planner.reconfig_normal();
        let radius = config.planner.reconfig_radius_m.unwrap_or(config.constellation.wheel_radius_m);
        for f in 0..n_fleets {
            let fleet = fleet_mut(&mut c, f);
            let plan = plan_reconfiguration(fleet, &normal, radius, &chief, &settings, settings.time_limit_s)?;
            fleet.wheel_plane = normal.normalize();
            fleet.wheel_radius_m = radius;
            ledger.apply_plan(&mut c, f, &plan, FuelCategory::Reconfig);
        }
    }

    let model = config.upkeep.model(config.constellation.mass_kg);
    let mut objective_total = 0.0;
    for orbit in 0..config.simulate.orbits {
        let inst = scheduling_instance(config, &c, config.seed.wrapping_add(1 + u64::from(orbit)));
        let schedule = run_solver(&inst, config.scheduler.solver)?;
        objective_total += schedule.objective_value;
        for task in schedule.tasks.iter().filter(|t| t.action == Action::Desaturate) {
            ledger.debit(
                &mut c,
                task.satellite,
                FuelCategory::Desat,
                Some(orbit),
                config.scheduler.desat_impulse_ns,
            );
        }
        for trace in &schedule.momentum {
            if let Some(&h) = trace.after_slot_mnms.last() {
                for f in 0..n_fleets {
                    if let Some(d) = fleet_mut(&mut c, f).deputies.iter_mut().find(|d| d.id == trace.satellite) {
                        d.wheel_momentum_mnms = h;
                    }
                }
            }
        }
        let upkeep: Vec<(SatId, f64)> = c
            .fleets()
            .flat_map(|f| {
                f.deputies.iter().map(move |d| {
                    let phase = d.rel_orbit.alpha_x_rad;
                    (d.id, impulse_per_orbit(f.wheel_radius_m, phase, &chief, &model))
                })
            })
            .collect();
        for (sat, ns) in upkeep {
            ledger.debit(&mut c, sat, FuelCategory::Upkeep, Some(orbit), ns);
        }
    }

    let mut rows: BTreeMap<SatId, LedgerRow> = BTreeMap::new();
    for s in c.satellites() {
        rows.insert(
            s.id,
            LedgerRow {
                satellite: s.id,
                fuel_used_ns: s.fuel_used_ns,
                remaining_ns: s.remaining_impulse_ns(),
                wheel_momentum_mnms: s.wheel_momentum_mnms,
                init_ns: 0.0,
                reconfig_ns: 0.0,
                upkeep_ns: 0.0,
                desat_ns: 0.0,
            },
        );
    }
    for e in ledger.events.iter().filter(|e| e.applied) {
        let r = rows.get_mut(&e.satellite).expect("known satellite");
        match e.category {
            FuelCategory::Init => r.init_ns += e.impulse_ns,
            FuelCategory::Reconfig => r.reconfig_ns += e.impulse_ns,
            FuelCategory::Upkeep => r.upkeep_ns += e.impulse_ns,
            FuelCategory::Desat => r.desat_ns += e.impulse_ns,
        }
    }
    let rows: Vec<LedgerRow> = rows.into_values().collect();
    let refused = ledger.events.iter().filter(|e| !e.applied).count();
    let total: f64 = c.satellites().map(|s| s.fuel_used_ns).sum();

    let mut out = Artifacts::default();
    out.table("ledger", &rows, format)?;
    out.table("fuel_events", &ledger.events, format)?;
    out.json("final_state.json", &c)?;
    out.metric("orbits", config.simulate.orbits);
    out.metric("satellites", c.satellite_count());
    out.metric("fleet_init_mean_ns", init_means);
    out.metric("fuel_used_total_ns", total);
    out.metric("science_value_total", objective_total);
    out.metric("refused_debits", refused);
    out.metric(
        "desaturations",
        ledger.events.iter().filter(|e| e.category == FuelCategory::Desat).count(),
    );
    let _ = writeln!(
        out.summary,
        "{} satellites, {} orbits: {total:.3} Ns used, science value {objective_total:.3}, {refused} refused debits",
        c.satellite_count(),
        config.simulate.orbits
    );
    Ok(out)
}
