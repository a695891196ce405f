//! Replays a schedule against its instance and reports every broken rule.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{angle_between, nadir, science_value, Action, Instance, Schedule};
use crate::constellation::SatId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    DuplicateAssignment,
    UnknownSatellite,
    UnknownTarget,
    SlotOutOfRange,
    NotVisible,
    SlewTooFast,
    MomentumOverCapacity,
    MomentumMismatch,
    DesaturationNotReset,
    ObjectiveMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFinding {
    pub kind: FindingKind,
    pub satellite: Option<SatId>,
    pub slot: Option<usize>,
    pub message: String,
}

fn finding(kind: FindingKind, satellite: Option<SatId>, slot: Option<usize>, message: String) -> ScheduleFinding {
    ScheduleFinding {
        kind,
        satellite,
        slot,
        message,
    }
}

const MOMENTUM_TOLERANCE: f64 = 1e-9;

pub fn validate_schedule(schedule: &Schedule, instance: &Instance) -> Vec<ScheduleFinding> {
    use FindingKind::*;
    let mut out = Vec::new();
    let mut by_sat: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();

    for (i, task) in schedule.tasks.iter().enumerate() {
        let sat = Some(task.satellite);
        let Some(s) = instance.satellite_index(task.satellite) else {
            out.push(finding(UnknownSatellite, sat, Some(task.slot), format!("{} is not in the instance", task.satellite)));
            continue;
        };
        if task.slot >= instance.grid.horizon_slots {
            out.push(finding(SlotOutOfRange, sat, Some(task.slot), format!("slot {} is past the horizon", task.slot)));
            continue;
        }
        if let Action::Observe { target } = task.action {
            if instance.target_index(target).is_none() {
                out.push(finding(UnknownTarget, sat, Some(task.slot), format!("target {target} does not exist")));
                continue;
            }
        }
        let slots = by_sat.entry(s).or_default();
        if slots.insert(task.slot, i).is_some() {
            out.push(finding(
                DuplicateAssignment,
                sat,
                Some(task.slot),
                format!("{} has more than one task in slot {}", task.satellite, task.slot),
            ));
        }
    }

    let kappa = instance.settings.kappa_mnms_per_deg;
    for (s, sat) in instance.satellites.iter().enumerate() {
        let id = Some(sat.id);
        let tasks = by_sat.get(&s);
        let recorded = schedule.momentum.iter().find(|m| m.satellite == sat.id);
        let mut momentum = sat.initial_momentum_mnms;
        let mut attitude = nadir();
        let mut last: Option<usize> = None;
        for k in 0..instance.grid.horizon_slots {
            if let Some(task) = tasks.and_then(|m| m.get(&k)).map(|&i| &schedule.tasks[i]) {
                match task.action {
                    Action::Desaturate => {
                        if task.momentum_after_mnms != 0.0 {
                            out.push(finding(
                                DesaturationNotReset,
                                id,
                                Some(k),
                                format!("desaturation leaves {} mNms", task.momentum_after_mnms),
                            ));
                        }
                        momentum = 0.0;
                        attitude = nadir();
                        last = Some(k);
                    }
                    Action::Observe { target } => {
                        let t = instance.target_index(target).expect("checked above");
                        match instance.visibility(k, s, t) {
                            None => out.push(finding(
                                NotVisible,
                                id,
                                Some(k),
                                format!("target {target} is outside the cone or window"),
                            )),
                            Some(v) => {
                                let slew = angle_between(&attitude, &v.look).to_degrees();
                                let gap = last.map_or(k + 1, |j| k - j);
                                let allowed = instance.slew_allowance_deg(s, gap);
                                if slew > allowed + 1e-9 {
                                    out.push(finding(
                                        SlewTooFast,
                                        id,
                                        Some(k),
                                        format!("slew {slew:.3} deg exceeds {allowed:.3} deg"),
                                    ));
                                }
                                momentum += kappa * slew;
                                attitude = v.look;
                                last = Some(k);
                            }
                        }
                        if (task.momentum_after_mnms - momentum).abs() > MOMENTUM_TOLERANCE {
                            out.push(finding(
                                MomentumMismatch,
                                id,
                                Some(k),
                                format!("recorded {} mNms, replayed {momentum}", task.momentum_after_mnms),
                            ));
                        }
                    }
                }
            }
            if momentum > sat.momentum_capacity_mnms + MOMENTUM_TOLERANCE {
                out.push(finding(
                    MomentumOverCapacity,
                    id,
                    Some(k),
                    format!("{momentum:.3} mNms exceeds {} mNms", sat.momentum_capacity_mnms),
                ));
            }
            if let Some(h) = recorded.and_then(|m| m.after_slot_mnms.get(k)) {
                if (h - momentum).abs() > MOMENTUM_TOLERANCE {
                    out.push(finding(
                        MomentumMismatch,
                        id,
                        Some(k),
                        format!("trajectory says {h} mNms, replayed {momentum}"),
                    ));
                }
            }
        }
    }

    let value = science_value(schedule, instance);
    if (value - schedule.objective_value).abs() > 1e-9 * value.abs().max(1.0) {
        out.push(finding(
            ObjectiveMismatch,
            None,
            None,
            format!("reported objective {} but tasks score {value}", schedule.objective_value),
        ));
    }
    out
}
