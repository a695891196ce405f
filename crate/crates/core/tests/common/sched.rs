//! Random small scheduling instances and an exhaustive reference solver.

use pearlwheel::constellation::{SatId, SensorKind};
use pearlwheel::scheduler::{
    Choice, Instance, ObservationTarget, SchedSatellite, SchedulerSettings, TimeGrid,
};
use rand::Rng;

pub const KAPPA: f64 = 0.5;

pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let n_sats = rng.gen_range(1..=4);
    let n_targets = rng.gen_range(0..=3);
    let slots = rng.gen_range(1..=4);
    let kinds = [
        SensorKind::RgbNarrow,
        SensorKind::RgbWide,
        SensorKind::SwirNarrow,
        SensorKind::SwirWide,
        SensorKind::Tir,
    ];
    let satellites = (0..n_sats)
        .map(|i| SchedSatellite {
            id: SatId(10 + i as u32),
            sensor: Some(kinds[rng.gen_range(0..kinds.len())]),
            along_track_m: rng.gen_range(-300e3..300e3),
            cross_track_m: rng.gen_range(-150e3..150e3),
            momentum_capacity_mnms: rng.gen_range(15.0..60.0),
            max_slew_rate_deg_s: rng.gen_range(0.3..1.5),
            initial_momentum_mnms: rng.gen_range(0.0..12.0),
        })
        .collect();
    let targets = (0..n_targets)
        .map(|i| {
            let start = rng.gen_range(0..slots);
            let len = rng.gen_range(1..=2);
            ObservationTarget {
                id: 100 + i as u32,
                along_track_m: rng.gen_range(-100e3..900e3),
                cross_track_m: rng.gen_range(-250e3..250e3),
                window_s: [30.0 * start as f64, 30.0 * (start + len) as f64],
                priority: f64::from(rng.gen_range(1u32..=8)) / 2.0,
            }
        })
        .collect();
    Instance {
        altitude_m: 400e3,
        ground_speed_mps: 7.0e3,
        satellites,
        targets,
        grid: TimeGrid::new(30.0, slots),
        settings: SchedulerSettings {
            kappa_mnms_per_deg: KAPPA,
            ..Default::default()
        },
    }
}

#[derive(Clone)]
struct Timeline {
    choices: Vec<Choice>,
    /// (slot, target, bin, core kind index) per look.
    looks: Vec<(usize, usize, u32, Option<usize>)>,
}

fn core_index(kind: Option<SensorKind>) -> Option<usize> {
    kind.and_then(|k| SensorKind::REQUIRED.iter().position(|&r| r == k))
}

fn angle(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let cx = a[1] * b[2] - a[2] * b[1];
    let cy = a[2] * b[0] - a[0] * b[2];
    let cz = a[0] * b[1] - a[1] * b[0];
    (cx * cx + cy * cy + cz * cz).sqrt().atan2(dot)
}

/// Every feasible choice sequence for one satellite, replayed from scratch.
fn timelines(inst: &Instance, s: usize, fixed: &[Option<Choice>]) -> Vec<Timeline> {
    let sat = &inst.satellites[s];
    let slots = inst.grid.horizon_slots;
    let mut out = Vec::new();
    let mut stack = vec![(
        Vec::<Choice>::new(),
        Vec::new(),
        sat.initial_momentum_mnms,
        [0.0, 0.0, -1.0],
        None::<usize>,
    )];
    while let Some((choices, looks, h, att, last)) = stack.pop() {
        let k = choices.len();
        if k == slots {
            out.push(Timeline { choices, looks });
            continue;
        }
        let mut options = vec![Choice::Idle, Choice::Desaturate];
        options.extend((0..inst.targets.len()).map(Choice::Observe));
        for c in options {
            if fixed[k].is_some_and(|f| f != c) {
                continue;
            }
            let mut next = choices.clone();
            next.push(c);
            match c {
                Choice::Idle => stack.push((next, looks.clone(), h, att, last)),
                Choice::Desaturate => stack.push((next, looks.clone(), 0.0, [0.0, 0.0, -1.0], Some(k))),
                Choice::Observe(t) => {
                    let tgt = &inst.targets[t];
                    let (t0, t1) = (30.0 * k as f64, 30.0 * (k + 1) as f64);
                    if !(tgt.window_s[0] < t1 && tgt.window_s[1] > t0) {
                        continue;
                    }
                    let along = sat.along_track_m + inst.ground_speed_mps * (t0 + 15.0);
                    let d = [tgt.along_track_m - along, tgt.cross_track_m - sat.cross_track_m, -inst.altitude_m];
                    let off = d[0].hypot(d[1]).atan2(inst.altitude_m);
                    if off > inst.settings.max_off_nadir_rad {
                        continue;
                    }
                    let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                    let look = [d[0] / norm, d[1] / norm, d[2] / norm];
                    let slew = angle(att, look).to_degrees();
                    let gap = last.map_or(k + 1, |j| k - j) as f64;
                    if slew > sat.max_slew_rate_deg_s * 30.0 * gap + 1e-9 {
                        continue;
                    }
                    let h2 = h + KAPPA * slew;
                    if h2 > sat.momentum_capacity_mnms {
                        continue;
                    }
                    let bin = (off.to_degrees() / 10.0).floor() as u32;
                    let mut l = looks.clone();
                    l.push((k, t, bin, core_index(sat.sensor)));
                    stack.push((next, l, h2, look, Some(k)));
                }
            }
        }
    }
    out
}

/// Drops timelines whose looks are a strict subset of another's (the score
/// only grows with more looks), keeping one per distinct look set.
fn maximal(mut lines: Vec<Timeline>) -> Vec<Timeline> {
    let key = |t: &Timeline| {
        let mut v: Vec<(usize, usize)> = t.looks.iter().map(|l| (l.0, l.1)).collect();
        v.sort_unstable();
        v
    };
    lines.sort_by_key(|t| std::cmp::Reverse(t.looks.len()));
    let mut kept: Vec<(Vec<(usize, usize)>, Timeline)> = Vec::new();
    for t in lines {
        let k = key(&t);
        if kept.iter().any(|(q, _)| k.iter().all(|x| q.contains(x))) {
            continue;
        }
        kept.push((k, t));
    }
    kept.into_iter().map(|(_, t)| t).collect()
}

fn score(inst: &Instance, bins: &[u32], kinds: &[u8]) -> f64 {
    let nt = inst.targets.len();
    let mut total = 0.0;
    for (i, (&b, &c)) in bins.iter().zip(kinds).enumerate() {
        let p = inst.targets[i % nt].priority;
        total += p * f64::from(b.count_ones()) * f64::from(c.count_ones()) / 4.0;
    }
    total
}

/// Number of combinations the reference solver would enumerate.
pub fn search_size(inst: &Instance) -> f64 {
    let free = vec![None; inst.grid.horizon_slots];
    (0..inst.satellites.len())
        .map(|s| maximal(timelines(inst, s, &free)).len() as f64)
        .product()
}

/// Best score over all assignments consistent with `prefix` (slot-major).
pub fn brute_force(inst: &Instance, prefix: &[Choice]) -> f64 {
    let ns = inst.satellites.len();
    let nk = inst.grid.horizon_slots;
    let nt = inst.targets.len();
    if ns == 0 || nt == 0 {
        return 0.0;
    }
    let per_sat: Vec<Vec<Timeline>> = (0..ns)
        .map(|s| {
            let fixed: Vec<Option<Choice>> = (0..nk).map(|k| prefix.get(k * ns + s).copied()).collect();
            maximal(timelines(inst, s, &fixed))
        })
        .collect();
    if per_sat.iter().any(|v| v.is_empty()) {
        return f64::NEG_INFINITY;
    }
    let mut bins = vec![0u32; nk * nt];
    let mut kinds = vec![0u8; nk * nt];
    let mut best = f64::NEG_INFINITY;
    fn rec(
        inst: &Instance,
        per_sat: &[Vec<Timeline>],
        s: usize,
        bins: &mut Vec<u32>,
        kinds: &mut Vec<u8>,
        best: &mut f64,
    ) {
        if s == per_sat.len() {
            *best = best.max(score(inst, bins, kinds));
            return;
        }
        let nt = inst.targets.len();
        for line in &per_sat[s] {
            let (sb, sk) = (bins.clone(), kinds.clone());
            for &(k, t, b, c) in &line.looks {
                bins[k * nt + t] |= 1 << b;
                if let Some(c) = c {
                    kinds[k * nt + t] |= 1 << c;
                }
            }
            rec(inst, per_sat, s + 1, bins, kinds, best);
            *bins = sb;
            *kinds = sk;
        }
    }
    rec(inst, &per_sat, 0, &mut bins, &mut kinds, &mut best);
    best
}

/// Wheel momentum after each slot, recomputed from slew angles alone.
pub fn replay_momentum(inst: &Instance, schedule: &pearlwheel::scheduler::Schedule, s: usize) -> Vec<f64> {
    use pearlwheel::scheduler::Action;
    let sat = &inst.satellites[s];
    let mut h = sat.initial_momentum_mnms;
    let mut out = Vec::new();
    for k in 0..inst.grid.horizon_slots {
        if let Some(task) = schedule.tasks.iter().find(|t| t.satellite == sat.id && t.slot == k) {
            match task.action {
                Action::Desaturate => h = 0.0,
                Action::Observe { .. } => h += KAPPA * task.slew_from_previous_rad.to_degrees(),
            }
        }
        out.push(h);
    }
    out
}
