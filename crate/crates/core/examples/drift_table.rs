//! Along-track drift of projected circular orbits over radius and phase,
//! under both readings of the drift length scale.
//!
//! `cargo run --example drift_table`

use pearlwheel::relmotion::{drift_per_orbit_pco_scaled, ChiefOrbit, DriftScale};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chief = ChiefOrbit::from_altitude(400e3)?;
    println!("chief period {:.1} s, mean motion {:.6} rad/s", chief.period_s(), chief.mean_motion());
    for scale in [DriftScale::SemiMajorAxis, DriftScale::Altitude] {
        println!("\nlength scale: {} ({:.0} m)", scale.label(), scale.length_m(&chief));
        println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "rho_m", "a=0", "a=45", "a=90", "a=135");
        for rho in (1..=10).map(|k| 100.0 * f64::from(k)) {
            let row: Vec<String> = [0.0f64, 45.0, 90.0, 135.0]
                .iter()
                .map(|a| format!("{:>12.4}", drift_per_orbit_pco_scaled(rho, a.to_radians(), &chief, scale)))
                .collect();
            println!("{rho:>8.0} {}", row.join(" "));
        }
    }
    Ok(())
}
