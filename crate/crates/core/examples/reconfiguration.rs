//! Initializes a fleet, then moves its wheel to a new plane and compares the
//! two costs.
//!
//! `cargo run --example reconfiguration`

use nalgebra::Vector3;
use pearlwheel::constellation::{build_constellation, ConstellationConfig};
use pearlwheel::planner::{apply_formation_plan, deployment_cube, plan_formation_init, plan_reconfiguration, PlannerSettings};
use pearlwheel::relmotion::{pco_plane_normal, ChiefOrbit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chief = ChiefOrbit::from_altitude(400e3)?;
    let settings = PlannerSettings::default();
    let mut c = build_constellation(&ConstellationConfig::default(), chief)?;
    let fleet = &mut c.tracks[0].fleets[0];

    let deployment = deployment_cube(fleet.deputies.len(), 50.0, 20.0, 42, 0.0)?;
    let init = plan_formation_init(fleet, &deployment, &chief, &settings)?;
    apply_formation_plan(fleet, &init);
    println!("init: mean {:.3} Ns per satellite", init.mean_ns());

    let normal = Vector3::new(1.0, 0.0, 2.0);
    println!(
        "plane change {:.1} deg from the PCO plane",
        normal.normalize().angle(&pco_plane_normal()).to_degrees()
    );
    let reconfig = plan_reconfiguration(fleet, &normal, fleet.wheel_radius_m, &chief, &settings, settings.time_limit_s)?;
    let exceeded = apply_formation_plan(fleet, &reconfig);
    println!(
        "reconfiguration: mean {:.3} Ns, ratio {:.3}, {} budget overruns",
        reconfig.mean_ns(),
        reconfig.mean_ns() / init.mean_ns(),
        exceeded.len()
    );
    for d in &fleet.deputies {
        println!("{} used {:.3} Ns, {:.1} Ns left", d.id, d.fuel_used_ns, d.remaining_impulse_ns());
    }
    Ok(())
}
