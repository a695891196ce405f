//! Closed-form Clohessy-Wiltshire motion, written out independently of the crate.

use nalgebra::{Matrix3, Vector3};
use pearlwheel::planner::ManeuverPlan;

/// State transition blocks `[rr, rv, vr, vv]` over `t` at mean motion `n`.
pub fn blocks(n: f64, t: f64) -> [Matrix3<f64>; 4] {
    let (s, c) = (n * t).sin_cos();
    let rr = Matrix3::new(4.0 - 3.0 * c, 0.0, 0.0, 6.0 * (s - n * t), 1.0, 0.0, 0.0, 0.0, c);
    let rv = Matrix3::new(
        s / n,
        2.0 * (1.0 - c) / n,
        0.0,
        -2.0 * (1.0 - c) / n,
        (4.0 * s - 3.0 * n * t) / n,
        0.0,
        0.0,
        0.0,
        s / n,
    );
    let vr = Matrix3::new(3.0 * n * s, 0.0, 0.0, -6.0 * n * (1.0 - c), 0.0, 0.0, 0.0, 0.0, -n * s);
    let vv = Matrix3::new(c, 2.0 * s, 0.0, -2.0 * s, 4.0 * c - 3.0, 0.0, 0.0, 0.0, c);
    [rr, rv, vr, vv]
}

pub fn coast(n: f64, r: Vector3<f64>, v: Vector3<f64>, t: f64) -> (Vector3<f64>, Vector3<f64>) {
    let [rr, rv, vr, vv] = blocks(n, t);
    (rr * r + rv * v, vr * r + vv * v)
}

/// Position at `t` seconds after the plan's start, applying burns up to `t`.
pub fn position_at(plan: &ManeuverPlan, n: f64, t: f64) -> Vector3<f64> {
    let t0 = plan.problem.start.epoch_s;
    let (mut r, mut v) = (plan.problem.start.position_m, plan.problem.start.velocity_mps);
    let mut now = t0;
    for imp in plan.impulses.iter().filter(|i| i.time_s <= t0 + t) {
        (r, v) = coast(n, r, v, imp.time_s - now);
        v += imp.delta_v_mps;
        now = imp.time_s;
    }
    coast(n, r, v, t0 + t - now).0
}

/// Smallest pairwise distance over whole-second samples of the window.
pub fn min_distance(plans: &[ManeuverPlan], n: f64) -> f64 {
    let window = plans[0].problem.time_limit_s;
    let mut best = f64::INFINITY;
    let mut t = 0.0;
    while t <= window {
        let pos: Vec<_> = plans.iter().map(|p| position_at(p, n, t)).collect();
        for i in 0..pos.len() {
            for j in i + 1..pos.len() {
                best = best.min((pos[i] - pos[j]).norm());
            }
        }
        t += 1.0;
    }
    best
}
