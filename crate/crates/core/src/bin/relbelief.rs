use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relbelief::reproduce::{reproduce, ReproId};
use relbelief::Error;

#[derive(Parser)]
#[command(name = "relbelief", version, about = "Relative belief robustness and prior-data conflict checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a published table or scalar set as CSV.
    Reproduce {
        /// table1..table9, scalars1a, scalars1b, scalars2a, scalars2b, scalars3a..scalars3d
        id: ReproId,
        /// Round values to this many decimals (ties to even).
        #[arg(long)]
        digits: Option<usize>,
    },
    /// Run a grid analysis described by a TOML config.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_CONFIG: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config { .. } => ExitCode::from(EXIT_CONFIG),
        _ => ExitCode::from(EXIT_NUMERIC),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Reproduce { id, digits } => match reproduce(id) {
            Ok(r) => {
                print!("{}", r.to_csv(digits));
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Cmd::Analyze { config, out } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", config.display());
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let csv = match relbelief::analyze::analyze_str(&text) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            match out {
                None => print!("{csv}"),
                Some(p) => {
                    if let Err(e) = std::fs::write(&p, csv) {
                        eprintln!("error: cannot write {}: {e}", p.display());
                        return ExitCode::FAILURE;
                    }
                }
            }
            ExitCode::SUCCESS
        }
    }
}
