use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gradobs_cli::commands::{self, EXIT_ERROR};
use gradobs_cli::{Outcome, Overrides, Result, ScenarioConfig};

/// Strategic sensor checks and boundary gradient observers for 2-D diffusion on rectangles.
#[derive(Debug, Parser)]
#[command(name = "gradobs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rank test of the sensor set on the first J eigenvalue groups (exit 2 if not strategic).
    RankCheck(Common),
    /// Gain design and coupled plant/observer simulation (exit 3 if not detectable, 4 if the
    /// fitted decay rate is below 0.9 x margin).
    Simulate(Common),
    /// Rank test over a grid of sensor positions from the scenario's [sweep] table.
    Sweep(Common),
    /// Neutral-mode example: whole-domain detectability, regional reconstruction, m = 1 family.
    #[command(name = "example-3-7")]
    Example37(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Add one error-coefficient column per mode to trajectory.csv.
    #[arg(long)]
    emit_mode_coeffs: bool,
    /// Override both truncation bounds.
    #[arg(long)]
    truncation: Option<usize>,
    /// Override the decay margin.
    #[arg(long)]
    margin: Option<f64>,
    /// Reconstruct the whole state instead of the boundary region.
    #[arg(long)]
    target_omega: bool,
}

impl Common {
    fn load(&self) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::from_path(&self.config)?;
        Overrides {
            truncation: self.truncation,
            margin: self.margin,
            target_omega: self.target_omega,
        }
        .apply(&mut cfg)?;
        Ok(cfg)
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::RankCheck(c) => commands::rank_check(&c.load()?, &c.out),
        Command::Simulate(c) => commands::simulate(&c.load()?, &c.out, c.emit_mode_coeffs),
        Command::Sweep(c) => commands::sweep(&c.load()?, &c.out),
        Command::Example37(c) => commands::example_3_7(&c.load()?, &c.out, c.emit_mode_coeffs),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            // A closed pipe (e.g. `| head`) must not turn a finished run into a panic.
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", outcome.message);
            for f in &outcome.files {
                let _ = writeln!(stdout, "wrote {}", f.display());
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
