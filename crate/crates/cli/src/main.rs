//! `cubit`: design and analysis of quantum-capacitance qubits from the shell.

mod commands;
mod config;
mod quantity;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cubit_core::Error;

use config::CircuitArgs;

#[derive(Debug, Parser)]
#[command(name = "cubit", version, about = "Quantum-capacitance qubit design toolkit")]
struct Cli {
    /// Print a version banner on stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate C_Q(V), Q(V) and the stored energy of the quantum capacitor.
    Cq(CqArgs),
    /// Analyze one circuit: frequency, anharmonicity, tau, zero-point amplitudes.
    Design(DesignArgs),
    /// Evaluate a temperature and/or area grid.
    Sweep(SweepArgs),
    /// Recompute the reference design tables with deviations.
    Tables(TablesArgs),
    /// Temperature sensitivities of frequency and anharmonicity.
    Sens(SensArgs),
    /// Feasibility thresholds only.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, clap::Args)]
pub struct CqArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    /// Largest bias voltage; defaults to 20 thermal voltages (2 k_B T / e).
    #[arg(long)]
    vmax: Option<String>,
    /// Number of voltage samples, symmetric about zero.
    #[arg(long, default_value_t = 201)]
    points: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    /// Write here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct DesignArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct SweepArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    /// Temperatures: comma list or start:stop:count (defaults to --temp).
    #[arg(long)]
    temps: Option<String>,
    /// Areas: comma list or start:stop:count (defaults to --area).
    #[arg(long)]
    areas: Option<String>,
    /// Comma list from f_actual, A, tau, V_zp, n_zp (default: all).
    #[arg(long)]
    quantities: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct TablesArgs {
    /// Which tables, comma separated.
    #[arg(long, default_value = "1,2,3")]
    which: String,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct SensArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    /// Central-difference step (default 1mK).
    #[arg(long)]
    dt: Option<String>,
    /// Temperatures for the power-law fit of A(T) (default T0 to 4 T0, 7 points).
    #[arg(long)]
    fit_temps: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct CheckArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    /// Qubit frequency to test against 2 k_B T / h; computed from the circuit if omitted.
    #[arg(long)]
    frequency: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NumericDomain(_) | Error::Solver(_) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    if cli.verbose {
        eprintln!("cubit {}", env!("CARGO_PKG_VERSION"));
    }
    match cli.command {
        Command::Cq(args) => commands::cq(args),
        Command::Design(args) => commands::design(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Tables(args) => commands::tables(args),
        Command::Sens(args) => commands::sens(args),
        Command::Check(args) => commands::check(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    let rendered = e.render().to_string();
                    let first = rendered.lines().next().unwrap_or("usage error");
                    let message = first.strip_prefix("error: ").unwrap_or(first);
                    eprintln!("error[usage]: {message} (see --help)");
                    ExitCode::from(2)
                }
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {message}", e.code());
            ExitCode::from(exit_code(&e))
        }
    }
}
