//! Slot-by-slot marginal-gain heuristic.

use super::{build_schedule, step, Choice, Instance, LookSet, SatState, Schedule, SchedulerError, SolverKind};

const MIN_GAIN: f64 = 1e-12;

/// Fills each slot by repeatedly taking the (satellite, target) pair with the
/// largest marginal gain. Satellites whose wheels hold at least the configured
/// share of capacity desaturate first and sit the slot out.
pub fn solve_greedy(instance: &Instance) -> Result<Schedule, SchedulerError> {
    instance.check()?;
    instance.check_initial_momentum()?;
    let table = instance.visibility_table();
    let ns = instance.satellites.len();
    let mut states: Vec<SatState> = instance.satellites.iter().map(SatState::initial).collect();
    let mut rows = Vec::with_capacity(instance.grid.horizon_slots);

    for k in 0..instance.grid.horizon_slots {
        let mut row = vec![Choice::Idle; ns];
        let mut taken = vec![false; ns];
        for (s, sat) in instance.satellites.iter().enumerate() {
            let h = states[s].momentum_mnms;
            if h > 0.0 && h >= instance.settings.desat_threshold * sat.momentum_capacity_mnms {
                row[s] = Choice::Desaturate;
                taken[s] = true;
            }
        }

        let mut looks = vec![LookSet::default(); instance.targets.len()];
        let mut values = vec![0.0; instance.targets.len()];
        loop {
            let mut best: Option<(f64, usize, usize)> = None;
            for s in (0..ns).filter(|&s| !taken[s]) {
                for (t, vis) in table.targets_for(k, s) {
                    if step(instance, &table, s, k, &states[s], Choice::Observe(t)).is_none() {
                        continue;
                    }
                    let mut trial = looks[t].clone();
                    trial.add(vis.bin(), instance.satellites[s].sensor);
                    let gain = trial.value(instance.targets[t].priority) - values[t];
                    if gain > MIN_GAIN && best.is_none_or(|(g, _, _)| gain > g) {
                        best = Some((gain, s, t));
                    }
                }
            }
            let Some((_, s, t)) = best else { break };
            let vis = table.get(k, s, t).expect("chosen pair is visible");
            looks[t].add(vis.bin(), instance.satellites[s].sensor);
            values[t] = looks[t].value(instance.targets[t].priority);
            row[s] = Choice::Observe(t);
            taken[s] = true;
        }

        for s in 0..ns {
            states[s] = step(instance, &table, s, k, &states[s], row[s])
                .expect("greedy only keeps feasible choices")
                .state;
        }
        rows.push(row);
    }
    Ok(build_schedule(instance, &table, &rows, SolverKind::Greedy, 0))
}

#[cfg(test)]
mod tests {
    use super::super::tests::{instance, sat, target};
    use super::super::*;
    use std::time::Instant;

    #[test]
    fn no_targets_means_no_tasks() {
        let inst = instance(vec![sat(1, SensorKind::RgbNarrow, 0.0)], vec![], 5);
        let s = solve_greedy(&inst).unwrap();
        assert!(s.tasks.is_empty());
        assert_eq!(s.objective_value, 0.0);
        assert_eq!(s.momentum[0].after_slot_mnms, vec![0.0; 5]);
    }

    #[test]
    fn desaturates_near_capacity() {
        let mut s = sat(1, SensorKind::RgbNarrow, 0.0);
        s.initial_momentum_mnms = 85.0;
        let inst = instance(vec![s], vec![target(0, 105_000.0, 0.0, [0.0, 60.0], 1.0)], 2);
        let sch = solve_greedy(&inst).unwrap();
        assert_eq!(sch.tasks[0].action, Action::Desaturate);
        assert_eq!(sch.tasks[0].momentum_after_mnms, 0.0);
        assert_eq!(sch.desaturations, 1);
    }

    #[test]
    fn ties_go_to_lowest_satellite() {
        let inst = instance(
            vec![sat(1, SensorKind::RgbNarrow, 0.0), sat(2, SensorKind::RgbNarrow, 0.0)],
            vec![target(0, 105_000.0, 0.0, [0.0, 30.0], 1.0)],
            1,
        );
        let sch = solve_greedy(&inst).unwrap();
        assert_eq!(sch.tasks.len(), 1);
        assert_eq!(sch.tasks[0].satellite, SatId(1));
    }

    #[test]
    fn canonical_size_is_fast() {
        let sats: Vec<_> = (0..20)
            .map(|i| sat(i, SensorKind::REQUIRED[i as usize % 4], -(i as f64) * 60e3))
            .collect();
        let mut inst = instance(sats, vec![], 20);
        inst.targets = inst.random_targets(5, 42);
        let t = Instant::now();
        let s = solve_greedy(&inst).unwrap();
        assert!(t.elapsed().as_millis() < 100, "{:?}", t.elapsed());
        assert!(s.objective_value > 0.0);
        assert!(validate_schedule(&s, &inst).is_empty());
    }
}
