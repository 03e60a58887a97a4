use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use peakshave_cli::commands::{self, Overrides};
use peakshave_cli::run_config::BoundArg;

/// Battery + HVAC dispatch optimization against TOU energy prices and
/// time-of-peak demand charges: design-phase assessment, payback analysis
/// and a moving-horizon runtime controller.
#[derive(Parser)]
#[command(name = "peakshave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Run configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override which relaxed demand-price bounds to run.
    #[arg(long, value_enum)]
    bound: Option<BoundArg>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            bound: self.bound,
            out: self.out.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit the cycle-life law and emit the piecewise discharge-cost curve.
    FitDegradation {
        #[command(flatten)]
        common: Common,
        /// Cycle-life test points as a `dod,cycles` CSV (default: the
        /// points in the battery config).
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Exact tariff bills of the raw load, one row per billing cycle.
    Bill {
        #[command(flatten)]
        common: Common,
    },
    /// Design-phase annual assessment and payback at both demand-price
    /// bounds.
    Assess {
        #[command(flatten)]
        common: Common,
    },
    /// Moving-horizon runtime control compared against the design phase.
    Runtime {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::FitDegradation { common, points } => {
            commands::cmd_fit_degradation(&common.config, points.as_deref(), &common.overrides())
        }
        Command::Bill { common } => commands::cmd_bill(&common.config, &common.overrides()),
        Command::Assess { common } => commands::cmd_assess(&common.config, &common.overrides()),
        Command::Runtime { common } => commands::cmd_runtime(&common.config, &common.overrides()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
