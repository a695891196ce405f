//! Station-keeping cost per year and mission lifetime for each propulsion
//! unit in the catalog.
//!
//! `cargo run --example upkeep_budget`

use pearlwheel::commands::render_budget_table;
use pearlwheel::constellation::propulsion_catalog;
use pearlwheel::relmotion::{ChiefOrbit, DriftScale};
use pearlwheel::upkeep::{annual_budget, budget_report, CorrectionScheme, UpkeepModel, DEFAULT_RECONFIG_FRACTION};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chief = ChiefOrbit::from_altitude(400e3)?;
    for scheme in [CorrectionScheme::CancelAndRestore, CorrectionScheme::RateNull] {
        for scale in [DriftScale::SemiMajorAxis, DriftScale::Altitude] {
            let model = UpkeepModel {
                correction_scheme: scheme,
                drift_scale: scale,
                ..Default::default()
            };
            println!(
                "{scheme:?} / {}: {:.3} Ns/year at 100 m, {:.3} at 1000 m",
                scale.label(),
                annual_budget(100.0, 0.0, &chief, &model),
                annual_budget(1000.0, 0.0, &chief, &model)
            );
        }
    }

    let model = UpkeepModel::default();
    let mut reports = Vec::new();
    for p in propulsion_catalog() {
        let modelled = budget_report(&p, 100.0, 0.0, &chief, &model, 2.6, DEFAULT_RECONFIG_FRACTION, None)?;
        let quoted = budget_report(&p, 100.0, 0.0, &chief, &model, 3.9, DEFAULT_RECONFIG_FRACTION, Some(31.0))?;
        reports.push(("model".to_string(), modelled));
        reports.push(("reference".to_string(), quoted));
    }
    println!();
    print!("{}", render_budget_table(&reports));
    Ok(())
}
