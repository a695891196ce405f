//! Coordinated pointing of many satellites at a handful of ground targets.
//!
//! Time is cut into slots. In each slot a satellite either observes one target,
//! sits idle holding its attitude, or desaturates its reaction wheels (which
//! points it back at nadir and empties the wheel). Geometry is flat-ground:
//! every satellite flies at the chief altitude and its sub-satellite point
//! advances along-track at the ground-track speed.
//!
//! # Science value
//!
//! The objective is a modelling choice, not a physical law. For each target
//! and slot it is
//!
//! ```text
//! priority * (distinct 10-degree off-nadir bins seen) * (share of the four core imagers seen)
//! ```
//!
//! so several satellites looking from different angles with complementary
//! imagers are worth more than one satellite looking alone.

use std::collections::BTreeSet;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constellation::{Constellation, SatId, SensorKind};

mod exact;
mod greedy;
mod validate;

pub use exact::{solve_exact, solve_exact_traced, NodeTrace};
pub use greedy::solve_greedy;
pub use validate::{validate_schedule, FindingKind, ScheduleFinding};

pub const DEFAULT_SLOT_S: f64 = 30.0;
pub const DEFAULT_MAX_OFF_NADIR_DEG: f64 = 60.0;
/// Wheel momentum gained per degree of slew (mNms/deg).
pub const DEFAULT_KAPPA_MNMS_PER_DEG: f64 = 0.5;
pub const DEFAULT_DESAT_THRESHOLD: f64 = 0.8;
pub const DEFAULT_DESAT_IMPULSE_NS: f64 = 0.05;
/// Largest satellites x slots x targets the exact solver accepts by default.
pub const DEFAULT_EXACT_CAP: usize = 600;
pub const BIN_WIDTH_DEG: f64 = 10.0;

const SLEW_TOLERANCE_DEG: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchedulerError {
    #[error("instance has {size} decision variables, above the exact-solver cap of {cap}")]
    InstanceTooLarge { size: usize, cap: usize },
    #[error("{sat} starts with {momentum_mnms} mNms stored, above its {capacity_mnms} mNms capacity")]
    Infeasible {
        sat: SatId,
        momentum_mnms: f64,
        capacity_mnms: f64,
    },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationTarget {
    pub id: u32,
    /// Along-track ground distance from the lead fleet's sub-satellite point at t = 0.
    pub along_track_m: f64,
    pub cross_track_m: f64,
    pub window_s: [f64; 2],
    pub priority: f64,
}

impl ObservationTarget {
    pub fn overlaps(&self, start_s: f64, end_s: f64) -> bool {
        self.window_s[0] < end_s && self.window_s[1] > start_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub slot_duration_s: f64,
    pub horizon_slots: usize,
}

impl TimeGrid {
    pub fn new(slot_duration_s: f64, horizon_slots: usize) -> Self {
        Self {
            slot_duration_s,
            horizon_slots,
        }
    }

    pub fn slot_start_s(&self, slot: usize) -> f64 {
        slot as f64 * self.slot_duration_s
    }

    pub fn slot_mid_s(&self, slot: usize) -> f64 {
        (slot as f64 + 0.5) * self.slot_duration_s
    }
}

/// Satellite as the scheduler sees it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedSatellite {
    pub id: SatId,
    pub sensor: Option<SensorKind>,
    pub along_track_m: f64,
    pub cross_track_m: f64,
    pub momentum_capacity_mnms: f64,
    pub max_slew_rate_deg_s: f64,
    pub initial_momentum_mnms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulerSettings {
    pub max_off_nadir_rad: f64,
    pub kappa_mnms_per_deg: f64,
    /// Greedy desaturates once stored momentum reaches this share of capacity.
    pub desat_threshold: f64,
    pub desat_impulse_ns: f64,
    pub exact_cap: usize,
}

impl Default for SchedulerSettings {
    fn default() -> Self {
        Self {
            max_off_nadir_rad: DEFAULT_MAX_OFF_NADIR_DEG.to_radians(),
            kappa_mnms_per_deg: DEFAULT_KAPPA_MNMS_PER_DEG,
            desat_threshold: DEFAULT_DESAT_THRESHOLD,
            desat_impulse_ns: DEFAULT_DESAT_IMPULSE_NS,
            exact_cap: DEFAULT_EXACT_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub altitude_m: f64,
    pub ground_speed_mps: f64,
    pub satellites: Vec<SchedSatellite>,
    pub targets: Vec<ObservationTarget>,
    pub grid: TimeGrid,
    pub settings: SchedulerSettings,
}

/// One satellite's decision in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Choice {
    /// Index into [`Instance::targets`].
    Observe(usize),
    Idle,
    Desaturate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Observe { target: u32 },
    Desaturate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointingTask {
    pub satellite: SatId,
    pub slot: usize,
    pub action: Action,
    pub off_nadir_rad: f64,
    pub slew_from_previous_rad: f64,
    pub momentum_after_mnms: f64,
    /// Objective gained by this task given the lower-index satellites' tasks in the same slot.
    pub marginal_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumTrace {
    pub satellite: SatId,
    /// Stored momentum at the end of each slot.
    pub after_slot_mnms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub solver: SolverKind,
    /// Sorted by slot, then by satellite position in the instance.
    pub tasks: Vec<PointingTask>,
    pub objective_value: f64,
    pub momentum: Vec<MomentumTrace>,
    pub desaturations: usize,
    pub nodes_explored: usize,
}

impl Schedule {
    pub fn desat_impulse_ns(&self, sat: SatId, settings: &SchedulerSettings) -> f64 {
        let count = self
            .tasks
            .iter()
            .filter(|t| t.satellite == sat && t.action == Action::Desaturate)
            .count();
        count as f64 * settings.desat_impulse_ns
    }
}

/// A target seen from one satellite during one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Visibility {
    pub off_nadir_rad: f64,
    /// Unit line of sight in (along, cross, up) ground axes.
    pub look: Vector3<f64>,
}

impl Visibility {
    pub fn bin(&self) -> u32 {
        angle_bin(self.off_nadir_rad)
    }
}

pub fn angle_bin(off_nadir_rad: f64) -> u32 {
    (off_nadir_rad.to_degrees() / BIN_WIDTH_DEG).floor() as u32
}

pub fn nadir() -> Vector3<f64> {
    Vector3::new(0.0, 0.0, -1.0)
}

/// Line of sight from a satellite at `(along, cross)` and height `h` to a ground point.
pub fn line_of_sight(sat_along: f64, sat_cross: f64, altitude_m: f64, tgt_along: f64, tgt_cross: f64) -> Visibility {
    let v = Vector3::new(tgt_along - sat_along, tgt_cross - sat_cross, -altitude_m);
    let ground = v.x.hypot(v.y);
    Visibility {
        off_nadir_rad: ground.atan2(altitude_m),
        look: v.normalize(),
    }
}

pub fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    // atan2 form stays accurate for nearly parallel vectors
    a.cross(b).norm().atan2(a.dot(b))
}

/// Dense `[slot][sat][target]` visibility table.
#[derive(Debug, Clone)]
pub struct VisibilityTable {
    n_sats: usize,
    n_targets: usize,
    cells: Vec<Option<Visibility>>,
}

impl VisibilityTable {
    pub fn get(&self, slot: usize, sat: usize, target: usize) -> Option<&Visibility> {
        self.cells[(slot * self.n_sats + sat) * self.n_targets + target].as_ref()
    }

    /// Feasible targets for a satellite in a slot, in index order.
    pub fn targets_for(&self, slot: usize, sat: usize) -> impl Iterator<Item = (usize, &Visibility)> + '_ {
        let base = (slot * self.n_sats + sat) * self.n_targets;
        self.cells[base..base + self.n_targets]
            .iter()
            .enumerate()
            .filter_map(|(t, c)| c.as_ref().map(|v| (t, v)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasiblePointing {
    pub satellite: SatId,
    pub slot: usize,
    pub target: u32,
    pub off_nadir_rad: f64,
}

impl Instance {
    pub fn check(&self) -> Result<(), SchedulerError> {
        let bad = |m: String| Err(SchedulerError::InvalidInstance(m));
        if !(self.grid.slot_duration_s > 0.0) {
            return bad(format!("slot duration {} s must be positive", self.grid.slot_duration_s));
        }
        if !(self.altitude_m > 0.0) {
            return bad(format!("altitude {} m must be positive", self.altitude_m));
        }
        let mut ids = BTreeSet::new();
        for t in &self.targets {
            if !(t.window_s[1] > t.window_s[0]) {
                return bad(format!("target {} has an empty window", t.id));
            }
            if !(t.priority > 0.0) {
                return bad(format!("target {} priority {} must be positive", t.id, t.priority));
            }
            if !ids.insert(t.id) {
                return bad(format!("target id {} is repeated", t.id));
            }
        }
        let mut sats = BTreeSet::new();
        for s in &self.satellites {
            if !sats.insert(s.id) {
                return bad(format!("satellite {} is repeated", s.id));
            }
        }
        Ok(())
    }

    pub fn decision_count(&self) -> usize {
        self.satellites.len() * self.grid.horizon_slots * self.targets.len()
    }

    /// Sub-satellite point of satellite `sat` at the middle of `slot`.
    pub fn ground_point(&self, sat: usize, slot: usize) -> (f64, f64) {
        let s = &self.satellites[sat];
        (
            s.along_track_m + self.ground_speed_mps * self.grid.slot_mid_s(slot),
            s.cross_track_m,
        )
    }

    pub fn visibility(&self, slot: usize, sat: usize, target: usize) -> Option<Visibility> {
        let t = &self.targets[target];
        if !t.overlaps(self.grid.slot_start_s(slot), self.grid.slot_start_s(slot + 1)) {
            return None;
        }
        let (a, c) = self.ground_point(sat, slot);
        let v = line_of_sight(a, c, self.altitude_m, t.along_track_m, t.cross_track_m);
        (v.off_nadir_rad <= self.settings.max_off_nadir_rad).then_some(v)
    }

    pub fn visibility_table(&self) -> VisibilityTable {
        let (ns, nt) = (self.satellites.len(), self.targets.len());
        let mut cells = Vec::with_capacity(self.grid.horizon_slots * ns * nt);
        for k in 0..self.grid.horizon_slots {
            for s in 0..ns {
                for t in 0..nt {
                    cells.push(self.visibility(k, s, t));
                }
            }
        }
        VisibilityTable {
            n_sats: ns,
            n_targets: nt,
            cells,
        }
    }

    pub fn target_index(&self, id: u32) -> Option<usize> {
        self.targets.iter().position(|t| t.id == id)
    }

    pub fn satellite_index(&self, id: SatId) -> Option<usize> {
        self.satellites.iter().position(|s| s.id == id)
    }

    /// Largest slew (deg) that fits in `gap` slots.
    pub fn slew_allowance_deg(&self, sat: usize, gap: usize) -> f64 {
        self.satellites[sat].max_slew_rate_deg_s * self.grid.slot_duration_s * gap as f64
    }

    fn check_initial_momentum(&self) -> Result<(), SchedulerError> {
        for s in &self.satellites {
            if s.initial_momentum_mnms > s.momentum_capacity_mnms {
                return Err(SchedulerError::Infeasible {
                    sat: s.id,
                    momentum_mnms: s.initial_momentum_mnms,
                    capacity_mnms: s.momentum_capacity_mnms,
                });
            }
        }
        Ok(())
    }

    /// Scheduler view of every deputy that carries a sensor.
    ///
    /// `fleets` holds fleet indices counted across tracks; empty selects all.
    /// Track `i` is shifted `i * track_spacing_m` cross-track; each deputy's
    /// wheel position at t = 0 is added to its fleet offset.
    pub fn from_constellation(
        constellation: &Constellation,
        fleets: &[usize],
        targets: Vec<ObservationTarget>,
        grid: TimeGrid,
        settings: SchedulerSettings,
        track_spacing_m: f64,
    ) -> Self {
        let chief = constellation.chief_orbit;
        let mut satellites = Vec::new();
        let mut index = 0;
        for (ti, track) in constellation.tracks.iter().enumerate() {
            for fleet in &track.fleets {
                index += 1;
                if !fleets.is_empty() && !fleets.contains(&(index - 1)) {
                    continue;
                }
                for d in fleet.deputies.iter().filter(|d| d.sensor.is_some()) {
                    let o = &d.rel_orbit;
                    satellites.push(SchedSatellite {
                        id: d.id,
                        sensor: d.sensor,
                        along_track_m: fleet.along_track_offset_m + o.rho_y_m * o.alpha_y_rad.cos() + o.y_offset_m,
                        cross_track_m: ti as f64 * track_spacing_m + o.rho_z_m * o.alpha_z_rad.sin(),
                        momentum_capacity_mnms: d.adcs.momentum_capacity_mnms,
                        max_slew_rate_deg_s: d.adcs.max_slew_rate_deg_s,
                        initial_momentum_mnms: d.wheel_momentum_mnms,
                    });
                }
            }
        }
        Self {
            altitude_m: chief.altitude_m(),
            ground_speed_mps: chief.ground_speed_mps(),
            satellites,
            targets,
            grid,
            settings,
        }
    }

    /// Targets scattered where the satellites' ground tracks will pass.
    pub fn random_targets(&self, count: usize, seed: u64) -> Vec<ObservationTarget> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let horizon_s = self.grid.slot_duration_s * self.grid.horizon_slots as f64;
        let (lo, hi) = self
            .satellites
            .iter()
            .map(|s| s.along_track_m)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(a), hi.max(a)));
        let (lo, hi) = if lo.is_finite() { (lo, hi + self.ground_speed_mps * horizon_s) } else { (0.0, 1.0) };
        let reach = self.altitude_m * self.settings.max_off_nadir_rad.tan().min(1.0);
        let slots = self.grid.horizon_slots.max(1);
        (0..count)
            .map(|i| {
                let start = rng.gen_range(0..slots);
                let len = rng.gen_range(1..=slots.div_ceil(2));
                ObservationTarget {
                    id: i as u32,
                    along_track_m: rng.gen_range(lo..=hi),
                    cross_track_m: rng.gen_range(-reach..=reach),
                    window_s: [
                        self.grid.slot_start_s(start),
                        self.grid.slot_start_s((start + len).min(slots)),
                    ],
                    priority: f64::from(rng.gen_range(2u32..=10)) / 2.0,
                }
            })
            .collect()
    }
}

/// Every feasible (satellite, slot, target) triple with its off-nadir angle.
pub fn feasible_pointings(instance: &Instance) -> Vec<FeasiblePointing> {
    let table = instance.visibility_table();
    let mut out = Vec::new();
    for k in 0..instance.grid.horizon_slots {
        for (s, sat) in instance.satellites.iter().enumerate() {
            for (t, v) in table.targets_for(k, s) {
                out.push(FeasiblePointing {
                    satellite: sat.id,
                    slot: k,
                    target: instance.targets[t].id,
                    off_nadir_rad: v.off_nadir_rad,
                });
            }
        }
    }
    out
}

/// Attitude and wheel state carried from slot to slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SatState {
    pub momentum_mnms: f64,
    pub attitude: Vector3<f64>,
    /// Slot of the last observation or desaturation, `None` before the first one.
    pub last_slot: Option<usize>,
}

impl SatState {
    pub fn initial(sat: &SchedSatellite) -> Self {
        Self {
            momentum_mnms: sat.initial_momentum_mnms,
            attitude: nadir(),
            last_slot: None,
        }
    }

    pub fn is_rested(&self) -> bool {
        self.momentum_mnms == 0.0 && self.attitude == nadir()
    }
}

/// Outcome of applying a choice: the new state plus the slew it took.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Step {
    pub state: SatState,
    pub slew_rad: f64,
}

/// Applies `choice` for satellite `sat` in `slot`; `None` if it breaks a constraint.
pub(crate) fn step(
    inst: &Instance,
    table: &VisibilityTable,
    sat: usize,
    slot: usize,
    state: &SatState,
    choice: Choice,
) -> Option<Step> {
    match choice {
        Choice::Idle => Some(Step {
            state: *state,
            slew_rad: 0.0,
        }),
        Choice::Desaturate => Some(Step {
            state: SatState {
                momentum_mnms: 0.0,
                attitude: nadir(),
                last_slot: Some(slot),
            },
            slew_rad: angle_between(&state.attitude, &nadir()),
        }),
        Choice::Observe(t) => {
            let vis = table.get(slot, sat, t)?;
            let slew = angle_between(&state.attitude, &vis.look);
            let gap = state.last_slot.map_or(slot + 1, |j| slot - j);
            if slew.to_degrees() > inst.slew_allowance_deg(sat, gap) + SLEW_TOLERANCE_DEG {
                return None;
            }
            let momentum = state.momentum_mnms + inst.settings.kappa_mnms_per_deg * slew.to_degrees();
            if momentum > inst.satellites[sat].momentum_capacity_mnms {
                return None;
            }
            Some(Step {
                state: SatState {
                    momentum_mnms: momentum,
                    attitude: vis.look,
                    last_slot: Some(slot),
                },
                slew_rad: slew,
            })
        }
    }
}

/// Looks at one target in one slot, accumulated for scoring.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct LookSet {
    bins: BTreeSet<u32>,
    kinds: BTreeSet<SensorKind>,
}

impl LookSet {
    pub fn add(&mut self, bin: u32, sensor: Option<SensorKind>) {
        self.bins.insert(bin);
        if let Some(k) = sensor.filter(|k| k.is_core_imager()) {
            self.kinds.insert(k);
        }
    }

    pub fn value(&self, priority: f64) -> f64 {
        priority * self.bins.len() as f64 * self.kinds.len() as f64 / SensorKind::REQUIRED.len() as f64
    }
}

/// Science value of a slot's choices (one entry per satellite).
pub(crate) fn slot_value(inst: &Instance, table: &VisibilityTable, slot: usize, choices: &[Choice]) -> f64 {
    let mut looks = vec![LookSet::default(); inst.targets.len()];
    for (s, c) in choices.iter().enumerate() {
        if let Choice::Observe(t) = *c {
            if let Some(v) = table.get(slot, s, t) {
                looks[t].add(v.bin(), inst.satellites[s].sensor);
            }
        }
    }
    looks
        .iter()
        .zip(&inst.targets)
        .map(|(l, t)| l.value(t.priority))
        .sum()
}

/// Objective of a schedule recomputed from its tasks.
pub fn science_value(schedule: &Schedule, instance: &Instance) -> f64 {
    let table = instance.visibility_table();
    let mut total = 0.0;
    for k in 0..instance.grid.horizon_slots {
        let mut choices = vec![Choice::Idle; instance.satellites.len()];
        for task in schedule.tasks.iter().filter(|t| t.slot == k) {
            if let (Some(s), Action::Observe { target }) = (instance.satellite_index(task.satellite), task.action) {
                if let Some(t) = instance.target_index(target) {
                    choices[s] = Choice::Observe(t);
                }
            }
        }
        total += slot_value(instance, &table, k, &choices);
    }
    total
}

/// Turns a slot-major choice matrix into a [`Schedule`].
pub(crate) fn build_schedule(
    inst: &Instance,
    table: &VisibilityTable,
    choices: &[Vec<Choice>],
    solver: SolverKind,
    nodes_explored: usize,
) -> Schedule {
    let ns = inst.satellites.len();
    let mut states: Vec<SatState> = inst.satellites.iter().map(SatState::initial).collect();
    let mut momentum: Vec<MomentumTrace> = inst
        .satellites
        .iter()
        .map(|s| MomentumTrace {
            satellite: s.id,
            after_slot_mnms: Vec::with_capacity(inst.grid.horizon_slots),
        })
        .collect();
    let mut tasks = Vec::new();
    let mut objective = 0.0;
    let mut desaturations = 0;
    for (k, row) in choices.iter().enumerate() {
        let mut partial = vec![Choice::Idle; ns];
        let mut before = 0.0;
        for s in 0..ns {
            let c = row[s];
            let st = step(inst, table, s, k, &states[s], c).expect("solver produced an infeasible step");
            partial[s] = c;
            let after = slot_value(inst, table, k, &partial);
            let action = match c {
                Choice::Observe(t) => Some(Action::Observe {
                    target: inst.targets[t].id,
                }),
                Choice::Desaturate => Some(Action::Desaturate),
                Choice::Idle => None,
            };
            if let Some(action) = action {
                if action == Action::Desaturate {
                    desaturations += 1;
                }
                let off_nadir = match c {
                    Choice::Observe(t) => table.get(k, s, t).map_or(0.0, |v| v.off_nadir_rad),
                    _ => 0.0,
                };
                tasks.push(PointingTask {
                    satellite: inst.satellites[s].id,
                    slot: k,
                    action,
                    off_nadir_rad: off_nadir,
                    slew_from_previous_rad: st.slew_rad,
                    momentum_after_mnms: st.state.momentum_mnms,
                    marginal_value: after - before,
                });
            }
            before = after;
            states[s] = st.state;
            momentum[s].after_slot_mnms.push(st.state.momentum_mnms);
        }
        objective += before;
    }
    Schedule {
        solver,
        tasks,
        objective_value: objective,
        momentum,
        desaturations,
        nodes_explored,
    }
}

/// Picks exact when the instance is under the cap, greedy otherwise.
pub fn solve_auto(instance: &Instance) -> Result<Schedule, SchedulerError> {
    if instance.decision_count() <= instance.settings.exact_cap {
        solve_exact(instance)
    } else {
        solve_greedy(instance)
    }
}

/// Off-nadir angle (rad) to a ground point `along` ahead and `cross` aside.
pub fn off_nadir_angle(along_m: f64, cross_m: f64, altitude_m: f64) -> f64 {
    along_m.hypot(cross_m).atan2(altitude_m)
}
