//! Minimum-fuel impulsive transfers for forming and reshaping wheels.
//!
//! A transfer fixes a grid of burn epochs across the window and solves
//!
//! ```text
//! min  sum_k |dv_k|_1
//! s.t. Phi(tf - t0) x0 + sum_k Phi(tf - t_k) B dv_k = x_goal
//! ```
//!
//! as a linear program (each axis split into positive and negative parts).
//! Costs are reported as `mass * sum_k |dv_k|_2`, the impulse actually drawn
//! from the propulsion unit.

use nalgebra::{Matrix6, Vector3, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::{hungarian, AssignmentError};
use crate::constellation::{slots_for, BudgetExceeded, ConstellationError, Fleet, SatId};
use crate::lp::{LinearProgram, LpError, Relation, Sense};
use crate::relmotion::{hcw_stm, params_to_state, propagate, ChiefOrbit, Impulse, LvlhState, RelativeOrbitParams};

pub const DEFAULT_TIME_LIMIT_S: f64 = 900.0;
pub const DEFAULT_IMPULSE_EPOCHS: usize = 20;
pub const DEFAULT_MIN_SEPARATION_M: f64 = 10.0;
pub const MAX_DECONFLICT_ATTEMPTS: usize = 10;
/// Trajectory sampling step for separation checks.
pub const SAMPLE_STEP_S: f64 = 1.0;

pub const POSITION_TOLERANCE_M: f64 = 0.1;
pub const VELOCITY_TOLERANCE_MPS: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlannerError {
    #[error("transfer LP is infeasible; the impulse grid is degenerate")]
    InfeasibleTransfer,
    #[error("LP solver failed after {iterations} iterations: {source}")]
    SolverFailure { source: LpError, iterations: usize },
    #[error("invalid transfer problem: {0}")]
    InvalidProblem(String),
    #[error("{states} deployment states for {slots} slots")]
    SizeMismatch { states: usize, slots: usize },
    #[error("could not separate {first} and {second}: closest approach {closest_m:.2} m at t={time_s} s")]
    DeconflictionFailure {
        first: SatId,
        second: SatId,
        closest_m: f64,
        time_s: f64,
    },
    #[error(transparent)]
    Geometry(#[from] ConstellationError),
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
}

/// Grid and safety settings shared by every transfer in a plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerSettings {
    pub time_limit_s: f64,
    pub impulse_epochs: usize,
    pub min_separation_m: f64,
}

impl Default for PlannerSettings {
    fn default() -> Self {
        Self {
            time_limit_s: DEFAULT_TIME_LIMIT_S,
            impulse_epochs: DEFAULT_IMPULSE_EPOCHS,
            min_separation_m: DEFAULT_MIN_SEPARATION_M,
        }
    }
}

/// Reach `goal` exactly `time_limit_s` after `start.epoch_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferProblem {
    pub start: LvlhState,
    pub goal: LvlhState,
    pub time_limit_s: f64,
    pub n_impulse_epochs: usize,
    pub min_separation_m: f64,
}

impl TransferProblem {
    pub fn new(start: LvlhState, goal_position: Vector3<f64>, goal_velocity: Vector3<f64>, settings: &PlannerSettings) -> Self {
        Self {
            start,
            goal: LvlhState::new(goal_position, goal_velocity, start.epoch_s + settings.time_limit_s),
            time_limit_s: settings.time_limit_s,
            n_impulse_epochs: settings.impulse_epochs,
            min_separation_m: settings.min_separation_m,
        }
    }

    /// Transfer onto a relative orbit, arriving at the phase it has at the end of the window.
    pub fn to_orbit(start: LvlhState, orbit: &RelativeOrbitParams, chief: &ChiefOrbit, settings: &PlannerSettings) -> Self {
        let goal = params_to_state(orbit, chief, start.epoch_s + settings.time_limit_s);
        Self::new(start, goal.position_m, goal.velocity_mps, settings)
    }

    pub fn arrival_s(&self) -> f64 {
        self.start.epoch_s + self.time_limit_s
    }

    fn check(&self) -> Result<(), PlannerError> {
        if !(self.time_limit_s > 0.0) || !self.time_limit_s.is_finite() {
            return Err(PlannerError::InvalidProblem(format!(
                "time limit {} s must be positive",
                self.time_limit_s
            )));
        }
        if self.n_impulse_epochs < 2 {
            return Err(PlannerError::InvalidProblem(format!(
                "{} impulse epochs; at least 2 are needed",
                self.n_impulse_epochs
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManeuverPlan {
    pub satellite: SatId,
    pub problem: TransferProblem,
    /// Delay between the window start and the first burn epoch.
    pub departure_delay_s: f64,
    pub impulses: Vec<Impulse>,
    pub mass_kg: f64,
    /// `mass * sum |dv|_2` (Ns).
    pub total_impulse_ns: f64,
    /// LP objective, `sum |dv|_1` (m/s).
    pub lp_cost_mps: f64,
    /// Dual objective of the same LP (m/s).
    pub lp_dual_cost_mps: f64,
    pub lp_iterations: usize,
}

impl ManeuverPlan {
    pub fn delta_v_mps(&self) -> f64 {
        self.impulses.iter().map(Impulse::magnitude_mps).sum()
    }

    pub fn final_state(&self, chief: &ChiefOrbit) -> LvlhState {
        propagate(&self.problem.start, chief, self.problem.time_limit_s, &self.impulses)
            .expect("plan impulses are sorted and inside the window")
    }

    /// Position and velocity misses at arrival.
    pub fn terminal_error(&self, chief: &ChiefOrbit) -> (f64, f64) {
        let end = self.final_state(chief);
        (
            (end.position_m - self.problem.goal.position_m).norm(),
            (end.velocity_mps - self.problem.goal.velocity_mps).norm(),
        )
    }

    pub fn reaches_goal(&self, chief: &ChiefOrbit) -> bool {
        let (dp, dv) = self.terminal_error(chief);
        dp <= POSITION_TOLERANCE_M && dv <= VELOCITY_TOLERANCE_MPS
    }

    /// Positions at `start, start + step, ...` up to and including arrival.
    pub fn sample_positions(&self, chief: &ChiefOrbit, step_s: f64) -> Vec<Vector3<f64>> {
        let t0 = self.problem.start.epoch_s;
        let count = (self.problem.time_limit_s / step_s).floor() as usize;
        let mut times: Vec<f64> = (0..=count).map(|k| t0 + k as f64 * step_s).collect();
        if times.last().is_some_and(|t| *t < self.problem.arrival_s() - 1e-9) {
            times.push(self.problem.arrival_s());
        }
        let mut out = Vec::with_capacity(times.len());
        let mut event = self.problem.start.to_vector();
        let mut event_t = t0;
        let mut next = 0;
        for t in times {
            while next < self.impulses.len() && self.impulses[next].time_s <= t {
                let imp = &self.impulses[next];
                event = hcw_stm(chief, imp.time_s - event_t) * event;
                event_t = imp.time_s;
                event[3] += imp.delta_v_mps.x;
                event[4] += imp.delta_v_mps.y;
                event[5] += imp.delta_v_mps.z;
                next += 1;
            }
            let x = hcw_stm(chief, t - event_t) * event;
            out.push(Vector3::new(x[0], x[1], x[2]));
        }
        out
    }
}

/// Minimum-fuel plan for a single transfer.
pub fn plan_transfer(problem: &TransferProblem, chief: &ChiefOrbit, mass_kg: f64, satellite: SatId) -> Result<ManeuverPlan, PlannerError> {
    plan_transfer_delayed(problem, chief, mass_kg, satellite, 0.0)
}

/// As [`plan_transfer`], but the satellite coasts for `delay_s` before the first burn epoch.
pub fn plan_transfer_delayed(
    problem: &TransferProblem,
    chief: &ChiefOrbit,
    mass_kg: f64,
    satellite: SatId,
    delay_s: f64,
) -> Result<ManeuverPlan, PlannerError> {
    problem.check()?;
    if !(0.0..problem.time_limit_s).contains(&delay_s) {
        return Err(PlannerError::InvalidProblem(format!(
            "departure delay {delay_s} s leaves no time in a {} s window",
            problem.time_limit_s
        )));
    }
    let n = chief.mean_motion();
    let t_start = problem.start.epoch_s;
    let t_dep = t_start + delay_s;
    let t_end = problem.arrival_s();
    let epochs = problem.n_impulse_epochs;
    let times: Vec<f64> = (0..epochs)
        .map(|k| {
            if k + 1 == epochs {
                t_end
            } else {
                t_dep + (t_end - t_dep) * k as f64 / (epochs - 1) as f64
            }
        })
        .collect();

    let free = hcw_stm(chief, t_end - t_start) * problem.start.to_vector();
    let target = problem.goal.to_vector();
    let miss: Vector6<f64> = target - free;
    // position rows in m * n, i.e. m/s, to match the velocity rows
    let row_scale = |i: usize| if i < 3 { n } else { 1.0 };

    let blocks: Vec<Matrix6<f64>> = times.iter().map(|t| hcw_stm(chief, t_end - t)).collect();
    let mut lp = LinearProgram::new(Sense::Minimize, 6 * epochs);
    for j in 0..6 * epochs {
        lp.set_objective(j, 1.0);
    }
    for i in 0..6 {
        let mut coeffs = Vec::with_capacity(6 * epochs);
        for (k, phi) in blocks.iter().enumerate() {
            for axis in 0..3 {
                let a = phi[(i, 3 + axis)] * row_scale(i);
                if a != 0.0 {
                    coeffs.push((6 * k + 2 * axis, a));
                    coeffs.push((6 * k + 2 * axis + 1, -a));
                }
            }
        }
        lp.add_constraint(coeffs, Relation::Eq, miss[i] * row_scale(i));
    }
    let sol = lp.solve().map_err(|e| match e {
        LpError::Infeasible { .. } => PlannerError::InfeasibleTransfer,
        LpError::IterationLimit { iterations, .. } => PlannerError::SolverFailure { source: e, iterations },
        other => PlannerError::SolverFailure { source: other, iterations: 0 },
    })?;

    let mut impulses = Vec::new();
    for (k, t) in times.iter().enumerate() {
        let dv = Vector3::new(
            sol.x[6 * k] - sol.x[6 * k + 1],
            sol.x[6 * k + 2] - sol.x[6 * k + 3],
            sol.x[6 * k + 4] - sol.x[6 * k + 5],
        );
        if dv.norm() > 1e-12 {
            impulses.push(Impulse::new(*t, dv));
        }
    }
    let delta_v: f64 = impulses.iter().map(Impulse::magnitude_mps).sum();
    Ok(ManeuverPlan {
        satellite,
        problem: *problem,
        departure_delay_s: delay_s,
        impulses,
        mass_kg,
        total_impulse_ns: mass_kg * delta_v,
        lp_cost_mps: sol.objective,
        lp_dual_cost_mps: sol.dual_objective,
        lp_iterations: sol.iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotAssignment {
    /// `slot_of[i]` is the slot given to deployment state `i`.
    pub slot_of: Vec<usize>,
    /// Pairwise transfer costs (Ns), indexed `[state][slot]`.
    pub cost_ns: Vec<Vec<f64>>,
    pub total_ns: f64,
    #[serde(skip)]
    plans: Vec<Vec<ManeuverPlan>>,
}

impl SlotAssignment {
    /// The already-solved plan for state `i` on its assigned slot.
    pub fn plan_for(&self, i: usize) -> &ManeuverPlan {
        &self.plans[i][self.slot_of[i]]
    }
}

/// Minimum total-impulse matching of states to slots.
pub fn assign_slots(
    states: &[LvlhState],
    ids: &[SatId],
    slots: &[RelativeOrbitParams],
    chief: &ChiefOrbit,
    mass_kg: f64,
    settings: &PlannerSettings,
) -> Result<SlotAssignment, PlannerError> {
    if states.len() != slots.len() || ids.len() != states.len() {
        return Err(PlannerError::SizeMismatch {
            states: states.len(),
            slots: slots.len(),
        });
    }
    let plans: Vec<Vec<ManeuverPlan>> = states
        .par_iter()
        .zip(ids.par_iter())
        .map(|(s, id)| {
            slots
                .iter()
                .map(|slot| plan_transfer(&TransferProblem::to_orbit(*s, slot, chief, settings), chief, mass_kg, *id))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cost_ns: Vec<Vec<f64>> = plans
        .iter()
        .map(|row| row.iter().map(|p| p.total_impulse_ns).collect())
        .collect();
    let a = hungarian(&cost_ns)?;
    Ok(SlotAssignment {
        slot_of: a.row_to_col,
        cost_ns,
        total_ns: a.total_cost,
        plans,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormationPlan {
    pub slots: Vec<RelativeOrbitParams>,
    pub assignment: SlotAssignment,
    /// One plan per deputy, in fleet order.
    pub plans: Vec<ManeuverPlan>,
    pub per_satellite_ns: Vec<f64>,
    pub total_ns: f64,
    pub min_separation_m: f64,
}

impl FormationPlan {
    pub fn mean_ns(&self) -> f64 {
        if self.plans.is_empty() {
            0.0
        } else {
            self.total_ns / self.plans.len() as f64
        }
    }

    pub fn max_ns(&self) -> f64 {
        self.per_satellite_ns.iter().cloned().fold(0.0, f64::max)
    }
}

fn formation_plan(
    ids: &[SatId],
    states: &[LvlhState],
    slots: Vec<RelativeOrbitParams>,
    chief: &ChiefOrbit,
    mass_kg: f64,
    settings: &PlannerSettings,
) -> Result<FormationPlan, PlannerError> {
    let assignment = assign_slots(states, ids, &slots, chief, mass_kg, settings)?;
    let raw: Vec<ManeuverPlan> = (0..ids.len()).map(|i| assignment.plan_for(i).clone()).collect();
    let plans = deconflict(&raw, chief, settings.min_separation_m)?;
    let per_satellite_ns: Vec<f64> = plans.iter().map(|p| p.total_impulse_ns).collect();
    let total_ns = per_satellite_ns.iter().sum();
    let min_separation_m = min_pairwise_distance(&plans, chief).map_or(f64::INFINITY, |c| c.distance_m);
    Ok(FormationPlan {
        slots,
        assignment,
        plans,
        per_satellite_ns,
        total_ns,
        min_separation_m,
    })
}

/// Plans every deputy from its deployment state onto the fleet's wheel.
pub fn plan_formation_init(
    fleet: &Fleet,
    deployment: &[LvlhState],
    chief: &ChiefOrbit,
    settings: &PlannerSettings,
) -> Result<FormationPlan, PlannerError> {
    let slots = crate::constellation::wheel_slots(fleet)?;
    if deployment.len() != slots.len() {
        return Err(PlannerError::SizeMismatch {
            states: deployment.len(),
            slots: slots.len(),
        });
    }
    let ids: Vec<SatId> = fleet.deputies.iter().map(|d| d.id).collect();
    let mass = fleet.deputies.first().map_or(1.0, |d| d.mass_kg);
    formation_plan(&ids, deployment, slots, chief, mass, settings)
}

/// Moves a fleet that sits on its wheel onto a wheel with a new plane and radius.
pub fn plan_reconfiguration(
    fleet: &Fleet,
    new_plane: &Vector3<f64>,
    new_radius_m: f64,
    chief: &ChiefOrbit,
    settings: &PlannerSettings,
    start_epoch_s: f64,
) -> Result<FormationPlan, PlannerError> {
    let slots = slots_for(fleet.id, fleet.deputies.len(), new_radius_m, new_plane)?;
    let ids: Vec<SatId> = fleet.deputies.iter().map(|d| d.id).collect();
    let states: Vec<LvlhState> = fleet
        .deputies
        .iter()
        .map(|d| params_to_state(&d.rel_orbit, chief, start_epoch_s))
        .collect();
    let mass = fleet.deputies.first().map_or(1.0, |d| d.mass_kg);
    formation_plan(&ids, &states, slots, chief, mass, settings)
}

/// Debits each plan from its deputy and moves the deputy onto its new slot.
///
/// A deputy whose budget cannot cover its plan keeps its old orbit and fuel
/// state and is reported.
pub fn apply_formation_plan(fleet: &mut Fleet, plan: &FormationPlan) -> Vec<BudgetExceeded> {
    let mut findings = Vec::new();
    for (i, (deputy, maneuver)) in fleet.deputies.iter_mut().zip(&plan.plans).enumerate() {
        match deputy.debit(maneuver.total_impulse_ns) {
            Ok(()) => deputy.rel_orbit = plan.slots[plan.assignment.slot_of[i]],
            Err(e) => findings.push(e),
        }
    }
    findings
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosestApproach {
    pub first: usize,
    pub second: usize,
    pub distance_m: f64,
    pub time_s: f64,
}

fn sample_all(plans: &[ManeuverPlan], chief: &ChiefOrbit) -> Vec<Vec<Vector3<f64>>> {
    plans.iter().map(|p| p.sample_positions(chief, SAMPLE_STEP_S)).collect()
}

fn pair_closest(a: &[Vector3<f64>], b: &[Vector3<f64>]) -> (f64, usize) {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(k, (p, q))| ((p - q).norm(), k))
        .fold((f64::INFINITY, 0), |acc, x| if x.0 < acc.0 { x } else { acc })
}

/// Closest approach over every pair of plans at the sampling resolution.
pub fn min_pairwise_distance(plans: &[ManeuverPlan], chief: &ChiefOrbit) -> Option<ClosestApproach> {
    let samples = sample_all(plans, chief);
    let mut best: Option<ClosestApproach> = None;
    for i in 0..plans.len() {
        for j in i + 1..plans.len() {
            let (d, k) = pair_closest(&samples[i], &samples[j]);
            if best.is_none_or(|b| d < b.distance_m) {
                best = Some(ClosestApproach {
                    first: i,
                    second: j,
                    distance_m: d,
                    time_s: plans[i].problem.start.epoch_s + k as f64 * SAMPLE_STEP_S,
                });
            }
        }
    }
    best
}

/// Re-times departures until every pair keeps `min_separation_m`.
///
/// Priority is ascending satellite id. Satellites are fixed in priority order,
/// each taking the first departure delay `attempt * window / 20`
/// (`attempt = 0..=10`) that clears every satellite fixed before it. When none
/// clears, the higher-priority satellite it comes closest to moves on to its
/// next clearing delay and the pass resumes from there.
pub fn deconflict(plans: &[ManeuverPlan], chief: &ChiefOrbit, min_separation_m: f64) -> Result<Vec<ManeuverPlan>, PlannerError> {
    let n = plans.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| plans[i].satellite);
    type Variant = Option<(ManeuverPlan, Vec<Vector3<f64>>)>;
    let mut cache: Vec<Vec<Variant>> = vec![vec![None; MAX_DECONFLICT_ATTEMPTS + 1]; n];
    for (i, p) in plans.iter().enumerate() {
        cache[i][0] = Some((p.clone(), p.sample_positions(chief, SAMPLE_STEP_S)));
    }
    let mut variant = |i: usize, attempt: usize| -> Result<Vec<Vector3<f64>>, PlannerError> {
        if cache[i][attempt].is_none() {
            let p = &plans[i];
            let delay = attempt as f64 * p.problem.time_limit_s / (2.0 * MAX_DECONFLICT_ATTEMPTS as f64);
            let replanned = plan_transfer_delayed(&p.problem, chief, p.mass_kg, p.satellite, delay)?;
            let pos = replanned.sample_positions(chief, SAMPLE_STEP_S);
            cache[i][attempt] = Some((replanned, pos));
        }
        Ok(cache[i][attempt].as_ref().expect("filled above").1.clone())
    };

    // attempt chosen per satellite, and the lowest attempt a rank may start from
    let mut chosen = vec![0usize; n];
    let mut floor = vec![0usize; n];
    let mut fixed: Vec<Vec<Vector3<f64>>> = Vec::with_capacity(n);
    let mut rank = 0;
    let mut budget = 10 * n * n * (MAX_DECONFLICT_ATTEMPTS + 1);
    while rank < n {
        let j = order[rank];
        // least-bad failing attempt: (distance, sample, blocking rank)
        let mut miss = (f64::INFINITY, 0usize, 0usize);
        let mut found = None;
        for attempt in floor[rank]..=MAX_DECONFLICT_ATTEMPTS {
            budget = budget.saturating_sub(1);
            let pos = variant(j, attempt)?;
            let (d, k, r) = fixed
                .iter()
                .enumerate()
                .map(|(r, q)| {
                    let (d, k) = pair_closest(q, &pos);
                    (d, k, r)
                })
                .fold((f64::INFINITY, 0, 0), |acc, x| if x.0 < acc.0 { x } else { acc });
            if d >= min_separation_m {
                found = Some((attempt, pos));
                break;
            }
            if attempt == floor[rank] || d > miss.0 {
                miss = (d, k, r);
            }
        }
        match found {
            Some((attempt, pos)) => {
                chosen[j] = attempt;
                fixed.push(pos);
                rank += 1;
            }
            None => {
                let (d, k, blocker) = miss;
                let exhausted = chosen[order[blocker]] >= MAX_DECONFLICT_ATTEMPTS;
                if budget == 0 || exhausted || fixed.is_empty() {
                    let first = if fixed.is_empty() { j } else { order[blocker] };
                    return Err(PlannerError::DeconflictionFailure {
                        first: plans[first].satellite,
                        second: plans[j].satellite,
                        closest_m: d,
                        time_s: plans[j].problem.start.epoch_s + k as f64 * SAMPLE_STEP_S,
                    });
                }
                floor[blocker] = chosen[order[blocker]] + 1;
                floor[blocker + 1..].fill(0);
                fixed.truncate(blocker);
                rank = blocker;
            }
        }
    }
    Ok(order
        .iter()
        .map(|&i| (i, cache[i][chosen[i]].take().expect("chosen variants are cached").0))
        .collect::<std::collections::BTreeMap<_, _>>()
        .into_values()
        .collect())
}

/// `count` states at rest, uniform in a cube of side `side_m` around the chief,
/// keeping `min_separation_m` from each other and from the chief.
///
/// Uses ChaCha8 seeded from `seed`; draws are rejected until they keep the spacing.
pub fn deployment_cube(count: usize, side_m: f64, min_separation_m: f64, seed: u64, epoch_s: f64) -> Result<Vec<LvlhState>, PlannerError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = side_m / 2.0;
    let mut points: Vec<Vector3<f64>> = Vec::with_capacity(count);
    let mut tries = 0usize;
    while points.len() < count {
        tries += 1;
        if tries > 100_000 {
            return Err(PlannerError::InvalidProblem(format!(
                "cannot place {count} satellites {min_separation_m} m apart in a {side_m} m cube"
            )));
        }
        let p = Vector3::new(
            rng.gen_range(-half..half),
            rng.gen_range(-half..half),
            rng.gen_range(-half..half),
        );
        if p.norm() >= min_separation_m && points.iter().all(|q| (p - q).norm() >= min_separation_m) {
            points.push(p);
        }
    }
    Ok(points.into_iter().map(|p| LvlhState::at_rest(p, epoch_s)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{build_constellation, ConstellationConfig, TrackConfig};
    use approx::assert_relative_eq;

    fn leo() -> ChiefOrbit {
        ChiefOrbit::new(6.778e6).unwrap()
    }

    fn fleet(deputies: usize, radius: f64) -> Fleet {
        let cfg = ConstellationConfig {
            tracks: vec![TrackConfig {
                fleets: 1,
                deputies_per_fleet: deputies,
                ..Default::default()
            }],
            wheel_radius_m: radius,
            ..Default::default()
        };
        build_constellation(&cfg, leo()).unwrap().tracks[0].fleets[0].clone()
    }

    #[test]
    fn identity_transfer_costs_nothing() {
        let chief = leo();
        let s = params_to_state(&RelativeOrbitParams::pco(100.0, 0.5), &chief, 0.0);
        let settings = PlannerSettings::default();
        let problem = TransferProblem::to_orbit(s, &RelativeOrbitParams::pco(100.0, 0.5), &chief, &settings);
        let plan = plan_transfer(&problem, &chief, 10.0, SatId(1)).unwrap();
        assert!(plan.impulses.is_empty());
        assert!(plan.total_impulse_ns.abs() < 1e-9);
    }

    #[test]
    fn plans_hit_their_goal() {
        let chief = leo();
        let start = LvlhState::at_rest(Vector3::new(12.0, -20.0, 7.0), 0.0);
        let settings = PlannerSettings::default();
        let problem = TransferProblem::to_orbit(start, &RelativeOrbitParams::pco(300.0, 1.2), &chief, &settings);
        let plan = plan_transfer(&problem, &chief, 10.0, SatId(3)).unwrap();
        assert!(plan.reaches_goal(&chief), "{:?}", plan.terminal_error(&chief));
        assert_relative_eq!(plan.total_impulse_ns, 10.0 * plan.delta_v_mps(), max_relative = 1e-12);
        assert!((plan.lp_cost_mps - plan.lp_dual_cost_mps).abs() <= 1e-6 * plan.lp_cost_mps);
    }

    #[test]
    fn degenerate_grid_is_rejected() {
        let chief = leo();
        let settings = PlannerSettings {
            impulse_epochs: 1,
            ..Default::default()
        };
        let problem = TransferProblem::to_orbit(LvlhState::origin(0.0), &RelativeOrbitParams::pco(100.0, 0.0), &chief, &settings);
        assert!(matches!(
            plan_transfer(&problem, &chief, 10.0, SatId(0)),
            Err(PlannerError::InvalidProblem(_))
        ));
    }

    #[test]
    fn delayed_departure_coasts_first() {
        let chief = leo();
        let start = LvlhState::at_rest(Vector3::new(5.0, 5.0, 5.0), 0.0);
        let settings = PlannerSettings::default();
        let problem = TransferProblem::to_orbit(start, &RelativeOrbitParams::pco(100.0, 0.0), &chief, &settings);
        let plan = plan_transfer_delayed(&problem, &chief, 10.0, SatId(0), 300.0).unwrap();
        assert!(plan.impulses.iter().all(|i| i.time_s >= 300.0 - 1e-9));
        assert!(plan.reaches_goal(&chief));
    }

    #[test]
    fn assignment_sizes_must_match() {
        let chief = leo();
        let err = assign_slots(
            &[LvlhState::origin(0.0)],
            &[SatId(0)],
            &[RelativeOrbitParams::pco(100.0, 0.0); 2],
            &chief,
            10.0,
            &PlannerSettings::default(),
        )
        .unwrap_err();
        assert_eq!(err, PlannerError::SizeMismatch { states: 1, slots: 2 });
    }

    #[test]
    fn states_already_on_slots_cost_nothing() {
        let chief = leo();
        let f = fleet(6, 200.0);
        let slots = crate::constellation::wheel_slots(&f).unwrap();
        let deployment: Vec<LvlhState> = slots.iter().map(|s| params_to_state(s, &chief, 0.0)).collect();
        let plan = plan_formation_init(&f, &deployment, &chief, &PlannerSettings::default()).unwrap();
        assert!(plan.total_ns < 1e-9, "{}", plan.total_ns);
    }

    #[test]
    fn same_plane_reconfiguration_is_free() {
        let chief = leo();
        let f = fleet(8, 100.0);
        let plan = plan_reconfiguration(&f, &f.wheel_plane, 100.0, &chief, &PlannerSettings::default(), 0.0).unwrap();
        assert!(plan.total_ns < 1e-9, "{}", plan.total_ns);
    }

    #[test]
    fn budget_overrun_is_reported_not_applied() {
        let chief = leo();
        let mut f = fleet(4, 100.0);
        let deployment = deployment_cube(4, 50.0, 10.0, 7, 0.0).unwrap();
        let plan = plan_formation_init(&f, &deployment, &chief, &PlannerSettings::default()).unwrap();
        f.deputies[2].fuel_used_ns = f.deputies[2].propulsion.total_impulse_ns - 1e-6;
        let findings = apply_formation_plan(&mut f, &plan);
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].sat, f.deputies[2].id);
        for (i, d) in f.deputies.iter().enumerate() {
            if i != 2 {
                assert_relative_eq!(d.fuel_used_ns, plan.plans[i].total_impulse_ns);
            }
        }
    }

    #[test]
    fn deployment_respects_spacing_and_seed() {
        let a = deployment_cube(10, 50.0, 10.0, 42, 0.0).unwrap();
        let b = deployment_cube(10, 50.0, 10.0, 42, 0.0).unwrap();
        assert_eq!(a, b);
        for (i, p) in a.iter().enumerate() {
            assert!(p.position_m.abs().max() <= 25.0);
            assert!(p.position_m.norm() >= 10.0);
            for q in &a[i + 1..] {
                assert!((p.position_m - q.position_m).norm() >= 10.0);
            }
        }
        assert!(deployment_cube(100, 10.0, 10.0, 1, 0.0).is_err());
    }

    #[test]
    fn single_plan_passes_deconfliction_unchanged() {
        let chief = leo();
        let settings = PlannerSettings::default();
        let problem = TransferProblem::to_orbit(LvlhState::at_rest(Vector3::new(10.0, 0.0, 0.0), 0.0), &RelativeOrbitParams::pco(100.0, 0.0), &chief, &settings);
        let plan = plan_transfer(&problem, &chief, 10.0, SatId(0)).unwrap();
        let out = deconflict(std::slice::from_ref(&plan), &chief, 10.0).unwrap();
        assert_eq!(out, vec![plan]);
    }
}
