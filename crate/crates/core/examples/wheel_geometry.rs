//! Builds the default constellation, checks its layout rules and shows the
//! wheel slots of the first fleet together with the revisit timing.
//!
//! `cargo run --example wheel_geometry`

use pearlwheel::constellation::{
    build_constellation, has_errors, nadir_revisit_delay, pointing_error_footprint_m, validate, wheel_slots,
    ConstellationConfig,
};
use pearlwheel::relmotion::{params_to_state, ChiefOrbit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chief = ChiefOrbit::from_altitude(400e3)?;
    let c = build_constellation(&ConstellationConfig::default(), chief)?;
    println!("{} tracks, {} fleets, {} satellites", c.tracks.len(), c.fleets().count(), c.satellite_count());

    let findings = validate(&c);
    for f in &findings {
        println!("{:?} {:?} {}: {}", f.severity, f.code, f.subject, f.message);
    }
    println!("layout valid: {}", !has_errors(&findings));

    let fleet = c.fleets().next().expect("default layout has fleets");
    println!("\nfleet {} wheel radius {} m", fleet.id, fleet.wheel_radius_m);
    for (d, slot) in fleet.deputies.iter().zip(wheel_slots(fleet)?) {
        let s = params_to_state(&slot, &chief, 0.0);
        let p = s.position_m;
        println!(
            "{} {:<12} x {:>8.2} y {:>8.2} z {:>8.2}  |yz| {:>7.2} m",
            d.id,
            d.sensor.map_or("-".to_string(), |k| format!("{k:?}")),
            p.x,
            p.y,
            p.z,
            p.y.hypot(p.z)
        );
    }

    let fleets: Vec<_> = c.tracks[0].fleets.iter().collect();
    for pair in fleets.windows(2) {
        let sep = (pair[1].along_track_offset_m - pair[0].along_track_offset_m).abs();
        println!("pearls {} -> {}: {:.0} km, revisit {:.1} s", pair[0].id, pair[1].id, sep / 1e3, nadir_revisit_delay(sep, &chief));
    }
    let adcs = &fleet.chief.adcs;
    println!("{} pointing footprint at nadir {:.1} m", adcs.name, pointing_error_footprint_m(adcs, &chief));
    Ok(())
}
