use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pearlwheel::commands::{self, Artifacts, CommandError, OutputFormat};
use pearlwheel::config::{ScenarioConfig, SolverChoice};

#[derive(Parser)]
#[command(name = "pearlwheel", version, about = "Wheel-formation NanoSat constellation planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (JSON); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the scheduler solver choice.
    #[arg(long, global = true)]
    solver: Option<Solver>,
    #[arg(long, global = true, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Drift rate and per-orbit drift over the radius and phase grid.
    Drift,
    /// Formation initialization plans and the cost-versus-radius sweep.
    InitPlan,
    /// Plane-change reconfiguration after initialization.
    ReconfigPlan,
    /// Station-keeping budget and lifetime per propulsion option.
    Upkeep,
    /// Coordinated pointing schedule for one window.
    Schedule {
        /// Replay the schedule and write the findings.
        #[arg(long)]
        validate: bool,
    },
    /// Deploy, initialize and fly the configured number of orbits.
    Simulate,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Exact,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// The invocation without the program name or the output directory.
fn command_echo() -> String {
    let mut args = std::env::args().skip(1);
    let mut kept = Vec::new();
    while let Some(a) = args.next() {
        if a == "--out" {
            args.next();
        } else if !a.starts_with("--out=") {
            kept.push(a);
        }
    }
    kept.join(" ")
}

fn run(cli: Cli) -> Result<(), CommandError> {
    let mut config = match &cli.config {
        Some(path) => ScenarioConfig::from_path(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(s) = cli.solver {
        config.scheduler.solver = match s {
            Solver::Exact => SolverChoice::Exact,
            Solver::Greedy => SolverChoice::Greedy,
        };
    }
    config.validate()?;
    let format = match cli.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    let artifacts: Artifacts = match cli.command {
        Command::Drift => commands::cmd_drift(&config, format)?,
        Command::InitPlan => commands::cmd_init_plan(&config, format)?,
        Command::ReconfigPlan => commands::cmd_reconfig_plan(&config, format)?,
        Command::Upkeep => commands::cmd_upkeep(&config, format)?,
        Command::Schedule { validate } => commands::cmd_schedule(&config, format, validate)?,
        Command::Simulate => commands::cmd_simulate(&config, format)?,
    };
    commands::write_run(&cli.out, &command_echo(), &config, &artifacts)?;
    // a closed stdout (e.g. piped into head) is not a failure of the run
    let mut stdout = std::io::stdout().lock();
    let _ = write!(stdout, "{}", artifacts.summary);
    let _ = writeln!(stdout, "wrote {} files to {}", artifacts.files.len() + 1, cli.out.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
