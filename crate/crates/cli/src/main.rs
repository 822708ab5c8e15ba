use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use pursuit_cli::commands::{self, CliError};
use pursuit_cli::verify::{VerifyOptions, CASES};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pursuit",
    version,
    about = "Pure pursuit of an evader on an ellipse"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write trajectory.csv and summary.txt.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Write phase-portrait samples and an SVG plot.
    Portrait {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Find the periodic orbit of a slower pursuer (0 < n < 1).
    Orbit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report capture bounds and the measured capture angle (n > 1).
    Capture {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the reference verification cases.
    Verify {
        /// Run a single case (1-8).
        #[arg(long)]
        case: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scale applied to the closed-form capture bound (negative control).
        #[arg(long, hide = true, default_value_t = 1.0)]
        fault_bound_scale: f64,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Simulate { config, out } => {
            commands::simulate(&commands::load_scenario(&config)?, &out)
        }
        Command::Portrait { config, out } => {
            commands::portrait(&commands::load_scenario(&config)?, &out)
        }
        Command::Orbit { config, out } => {
            commands::orbit(&commands::load_scenario(&config)?, out.as_deref())
        }
        Command::Capture { config } => commands::capture(&commands::load_scenario(&config)?),
        Command::Verify {
            case,
            out,
            fault_bound_scale,
        } => {
            let ids: Vec<u32> = case.map_or_else(|| CASES.to_vec(), |c| vec![c]);
            let opts = VerifyOptions {
                bound_scale: fault_bound_scale,
            };
            let (text, reports) = commands::verify(&ids, &opts, out.as_deref())?;
            print!("{text}");
            let failed = reports.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(CliError::Verification {
                    failed,
                    total: reports.len(),
                });
            }
            Ok(String::new())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
