//! Depth-first branch and bound over per-(slot, satellite) choices.
//!
//! Nodes fix choices slot-major. The bound at a node is the value of the
//! fixed part plus an LP relaxation of the free part that keeps the
//! one-task-per-slot rows and drops slew and momentum limits. Each
//! (target, slot) product `bins * kinds` is linearized with one `w[b, c]`
//! per (bin, kind) pair capped by `y[b]` and `z[c]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    build_schedule, greedy, slot_value, step, Choice, Instance, LookSet, SatState, Schedule, SchedulerError,
    SolverKind, VisibilityTable,
};
use crate::constellation::SensorKind;
use crate::lp::{LinearProgram, Relation, Sense};

const PRUNE_TOLERANCE: f64 = 1e-9;

/// A visited node: the choices it fixes and the bound computed there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeTrace {
    /// Slot-major choices: entry `k * n_sats + s` is satellite `s` in slot `k`.
    pub prefix: Vec<Choice>,
    pub lp_bound: f64,
}

/// Optimal schedule by branch and bound.
pub fn solve_exact(instance: &Instance) -> Result<Schedule, SchedulerError> {
    run(instance, false).map(|(s, _)| s)
}

/// Like [`solve_exact`], also returning the LP bound of every visited node.
pub fn solve_exact_traced(instance: &Instance) -> Result<(Schedule, Vec<NodeTrace>), SchedulerError> {
    run(instance, true).map(|(s, t)| (s, t.unwrap_or_default()))
}

fn run(instance: &Instance, traced: bool) -> Result<(Schedule, Option<Vec<NodeTrace>>), SchedulerError> {
    instance.check()?;
    let size = instance.decision_count();
    if size > instance.settings.exact_cap {
        return Err(SchedulerError::InstanceTooLarge {
            size,
            cap: instance.settings.exact_cap,
        });
    }
    instance.check_initial_momentum()?;

    let incumbent = greedy::solve_greedy(instance)?;
    let table = instance.visibility_table();
    let ns = instance.satellites.len();
    let nk = instance.grid.horizon_slots;
    let mut search = Search {
        inst: instance,
        table: &table,
        ns,
        total: ns * nk,
        prefix: Vec::with_capacity(ns * nk),
        states: instance.satellites.iter().map(SatState::initial).collect(),
        done_value: 0.0,
        best_value: incumbent.objective_value,
        best: None,
        nodes: 0,
        trace: traced.then(Vec::new),
    };
    search.dfs();
    let nodes = search.nodes;
    let trace = search.trace.take();
    let schedule = match search.best {
        Some(flat) => {
            let rows: Vec<Vec<Choice>> = flat.chunks(ns).map(<[Choice]>::to_vec).collect();
            build_schedule(instance, &table, &rows, SolverKind::Exact, nodes)
        }
        None => Schedule {
            solver: SolverKind::Exact,
            nodes_explored: nodes,
            ..incumbent
        },
    };
    Ok((schedule, trace))
}

struct Search<'a> {
    inst: &'a Instance,
    table: &'a VisibilityTable,
    ns: usize,
    total: usize,
    prefix: Vec<Choice>,
    states: Vec<SatState>,
    done_value: f64,
    best_value: f64,
    best: Option<Vec<Choice>>,
    nodes: usize,
    trace: Option<Vec<NodeTrace>>,
}

impl Search<'_> {
    fn dfs(&mut self) {
        self.nodes += 1;
        let i = self.prefix.len();
        if i == self.total {
            if self.done_value > self.best_value + PRUNE_TOLERANCE {
                self.best_value = self.done_value;
                self.best = Some(self.prefix.clone());
            }
            return;
        }

        // The LP bound never exceeds the decoupled one, so pruning on the
        // cheap bound first leaves the explored tree unchanged.
        if self.trace.is_none() && self.decoupled_bound(i) <= self.best_value + PRUNE_TOLERANCE {
            return;
        }
        let bound = self.lp_bound(i);
        if let Some(trace) = self.trace.as_mut() {
            trace.push(NodeTrace {
                prefix: self.prefix.clone(),
                lp_bound: bound,
            });
        }
        if bound <= self.best_value + PRUNE_TOLERANCE {
            return;
        }

        let (k, s) = (i / self.ns, i % self.ns);
        let mut options: Vec<Choice> = self.table.targets_for(k, s).map(|(t, _)| Choice::Observe(t)).collect();
        options.push(Choice::Idle);
        if !self.states[s].is_rested() {
            options.push(Choice::Desaturate);
        }
        for choice in options {
            let Some(next) = step(self.inst, self.table, s, k, &self.states[s], choice) else {
                continue;
            };
            let saved = self.states[s];
            let saved_value = self.done_value;
            self.states[s] = next.state;
            self.prefix.push(choice);
            if s + 1 == self.ns {
                self.done_value += slot_value(self.inst, self.table, k, &self.prefix[k * self.ns..]);
            }
            self.dfs();
            self.prefix.pop();
            self.done_value = saved_value;
            self.states[s] = saved;
        }
    }

    /// Looks already fixed in the current (partial) slot, per target.
    fn fixed_looks(&self, i: usize) -> (usize, Vec<LookSet>) {
        let k0 = i / self.ns;
        let mut looks = vec![LookSet::default(); self.inst.targets.len()];
        for (s, c) in self.prefix[k0 * self.ns..i].iter().enumerate() {
            if let Choice::Observe(t) = *c {
                if let Some(v) = self.table.get(k0, s, t) {
                    looks[t].add(v.bin(), self.inst.satellites[s].sensor);
                }
            }
        }
        (k0, looks)
    }

    fn is_free(&self, i: usize, slot: usize, sat: usize) -> bool {
        slot * self.ns + sat >= i
    }

    /// Value if every free satellite could look at every target it sees.
    fn decoupled_bound(&self, i: usize) -> f64 {
        let (k0, fixed) = self.fixed_looks(i);
        let mut bound = self.done_value;
        for k in k0..self.inst.grid.horizon_slots {
            for (t, target) in self.inst.targets.iter().enumerate() {
                let mut looks = if k == k0 { fixed[t].clone() } else { LookSet::default() };
                for s in 0..self.ns {
                    if self.is_free(i, k, s) {
                        if let Some(v) = self.table.get(k, s, t) {
                            looks.add(v.bin(), self.inst.satellites[s].sensor);
                        }
                    }
                }
                bound += looks.value(target.priority);
            }
        }
        bound
    }

    fn lp_bound(&self, i: usize) -> f64 {
        let (k0, fixed) = self.fixed_looks(i);
        let mut constant = self.done_value;
        let mut n_vars = 0usize;
        let mut new_var = || {
            n_vars += 1;
            n_vars - 1
        };
        let mut objective: Vec<(usize, f64)> = Vec::new();
        let mut rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
        let mut per_task: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();

        for k in k0..self.inst.grid.horizon_slots {
            for (t, target) in self.inst.targets.iter().enumerate() {
                let looks = if k == k0 { fixed[t].clone() } else { LookSet::default() };
                let mut by_bin: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
                let mut by_kind: BTreeMap<SensorKind, Vec<usize>> = BTreeMap::new();
                let mut any_free = false;
                for s in (0..self.ns).filter(|&s| self.is_free(i, k, s)) {
                    let Some(v) = self.table.get(k, s, t) else { continue };
                    any_free = true;
                    let x = new_var();
                    per_task.entry((k, s)).or_default().push(x);
                    by_bin.entry(v.bin()).or_default().push(x);
                    if let Some(kind) = self.inst.satellites[s].sensor.filter(|k| k.is_core_imager()) {
                        by_kind.entry(kind).or_default().push(x);
                    }
                }
                if !any_free {
                    constant += looks.value(target.priority);
                    continue;
                }
                for &b in &looks.bins {
                    by_bin.entry(b).or_default();
                }
                for &c in &looks.kinds {
                    by_kind.entry(c).or_default();
                }
                let mut cover = |members: &Vec<usize>, fixed_on: bool, rows: &mut Vec<(Vec<(usize, f64)>, f64)>| {
                    let y = new_var();
                    let mut row = vec![(y, 1.0)];
                    row.extend(members.iter().map(|&x| (x, -1.0)));
                    rows.push((row, if fixed_on { 1.0 } else { 0.0 }));
                    rows.push((vec![(y, 1.0)], 1.0));
                    y
                };
                let ys: Vec<usize> = by_bin
                    .iter()
                    .map(|(b, m)| cover(m, looks.bins.contains(b), &mut rows))
                    .collect();
                let zs: Vec<usize> = by_kind
                    .iter()
                    .map(|(c, m)| cover(m, looks.kinds.contains(c), &mut rows))
                    .collect();
                let weight = target.priority / SensorKind::REQUIRED.len() as f64;
                for &y in &ys {
                    for &z in &zs {
                        let w = new_var();
                        objective.push((w, weight));
                        rows.push((vec![(w, 1.0), (y, -1.0)], 0.0));
                        rows.push((vec![(w, 1.0), (z, -1.0)], 0.0));
                    }
                }
            }
        }
        if objective.is_empty() {
            return constant;
        }
        let mut lp = LinearProgram::new(Sense::Maximize, n_vars);
        for (v, c) in objective {
            lp.set_objective(v, c);
        }
        for xs in per_task.into_values() {
            lp.add_constraint(xs.into_iter().map(|x| (x, 1.0)).collect(), Relation::Le, 1.0);
        }
        for (row, rhs) in rows {
            lp.add_constraint(row, Relation::Le, rhs);
        }
        match lp.solve() {
            Ok(sol) => constant + sol.objective.max(sol.dual_objective),
            Err(_) => self.decoupled_bound(i),
        }
    }
}
