//! Schedules one pointing window for two fleets, solving a small instance
//! exactly and the full one greedily, then replays both through the validator.
//!
//! `cargo run --example pointing_schedule`

use std::time::Instant;

use pearlwheel::constellation::{build_constellation, ConstellationConfig};
use pearlwheel::relmotion::ChiefOrbit;
use pearlwheel::scheduler::{
    solve_exact, solve_greedy, validate_schedule, Action, Instance, SchedulerSettings, TimeGrid,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chief = ChiefOrbit::from_altitude(400e3)?;
    let c = build_constellation(&ConstellationConfig::default(), chief)?;

    let mut full = Instance::from_constellation(&c, &[0, 1], Vec::new(), TimeGrid::new(30.0, 20), SchedulerSettings::default(), 0.0);
    full.targets = full.random_targets(5, 42);
    let t = Instant::now();
    let greedy = solve_greedy(&full)?;
    println!(
        "greedy on {} satellites x {} slots: value {:.3}, {} tasks, {} desaturations in {:?}",
        full.satellites.len(),
        full.grid.horizon_slots,
        greedy.objective_value,
        greedy.tasks.len(),
        greedy.desaturations,
        t.elapsed()
    );
    println!("findings: {}", validate_schedule(&greedy, &full).len());

    let mut small = full.clone();
    small.satellites.truncate(4);
    small.grid = TimeGrid::new(30.0, 3);
    small.targets = small.random_targets(3, 7);
    let exact = solve_exact(&small)?;
    let quick = solve_greedy(&small)?;
    println!(
        "\nsmall instance: exact {:.3} ({} nodes), greedy {:.3}",
        exact.objective_value, exact.nodes_explored, quick.objective_value
    );
    for task in &exact.tasks {
        let what = match task.action {
            Action::Observe { target } => format!("target {target}"),
            Action::Desaturate => "desaturate".to_string(),
        };
        println!(
            "  slot {} {} {what:<11} off-nadir {:>5.1} deg, wheel {:>5.2} mNms",
            task.slot,
            task.satellite,
            task.off_nadir_rad.to_degrees(),
            task.momentum_after_mnms
        );
    }
    println!("findings: {}", validate_schedule(&exact, &small).len());
    Ok(())
}
