//! Plans the initialization of one fleet from a random deployment cube and
//! sweeps the cost over wheel radius.
//!
//! `cargo run --example formation_init`

use pearlwheel::constellation::{build_constellation, ConstellationConfig};
use pearlwheel::planner::{deployment_cube, plan_formation_init, PlannerSettings};
use pearlwheel::relmotion::ChiefOrbit;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chief = ChiefOrbit::from_altitude(400e3)?;
    let settings = PlannerSettings::default();
    println!("{:>8} {:>10} {:>10} {:>12} {:>10}", "rho_m", "mean_Ns", "max_Ns", "fleet_Ns", "min_sep_m");
    for rho in (1..=10).map(|k| 100.0 * f64::from(k)) {
        let layout = ConstellationConfig {
            wheel_radius_m: rho,
            ..Default::default()
        };
        let c = build_constellation(&layout, chief)?;
        let fleet = c.fleets().next().expect("default layout has fleets");
        let deployment = deployment_cube(fleet.deputies.len(), 50.0, 20.0, 42, 0.0)?;
        let plan = plan_formation_init(fleet, &deployment, &chief, &settings)?;
        println!(
            "{rho:>8.0} {:>10.3} {:>10.3} {:>12.3} {:>10.2}",
            plan.mean_ns(),
            plan.max_ns(),
            plan.total_ns,
            plan.min_separation_m
        );
        if rho == 100.0 {
            for p in &plan.plans {
                let burns = p.impulses.iter().filter(|i| i.magnitude_mps() > 1e-9).count();
                println!(
                    "    {} delay {:>4.0} s, {burns} burns, {:.4} m/s (LP {:.4}, dual {:.4})",
                    p.satellite,
                    p.departure_delay_s,
                    p.delta_v_mps(),
                    p.lp_cost_mps,
                    p.lp_dual_cost_mps
                );
            }
        }
    }
    Ok(())
}
