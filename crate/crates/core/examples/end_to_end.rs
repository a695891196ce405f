//! Runs every command on one scenario and writes the artifacts to a directory.
//!
//! `cargo run --example end_to_end -- [scenario.json] [out_dir]`

use std::path::PathBuf;

use pearlwheel::commands::{self, OutputFormat};
use pearlwheel::config::ScenarioConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let mut config = match args.next() {
        Some(path) => ScenarioConfig::from_path(path.as_ref())?,
        None => ScenarioConfig::default(),
    };
    config.simulate.orbits = config.simulate.orbits.max(3);
    config.simulate.reconfigure = true;
    let out = PathBuf::from(args.next().unwrap_or_else(|| "out/end_to_end".into()));
    println!("scenario hash {}", config.config_hash());

    let f = OutputFormat::Csv;
    let runs = [
        ("drift", commands::cmd_drift(&config, f)?),
        ("init-plan", commands::cmd_init_plan(&config, f)?),
        ("reconfig-plan", commands::cmd_reconfig_plan(&config, f)?),
        ("upkeep", commands::cmd_upkeep(&config, f)?),
        ("schedule", commands::cmd_schedule(&config, f, true)?),
        ("simulate", commands::cmd_simulate(&config, f)?),
    ];
    for (name, artifacts) in &runs {
        let report = commands::write_run(&out.join(name), name, &config, artifacts)?;
        println!("\n[{name}] {}", report.outputs.join(", "));
        print!("{}", artifacts.summary);
    }
    Ok(())
}
