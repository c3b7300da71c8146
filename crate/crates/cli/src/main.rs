mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use semilayer::model::Mutation;
use semilayer::symkernel::DEFAULT_SEED;

use crate::output::{emit, CliError};

/// Verification suites and tables for the superintegrable position-dependent-mass model on the semi-infinite layer.
#[derive(Parser, Debug)]
#[command(name = "semilayer", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Deformation parameter q as an exact rational ("3/2", "0.5", "2").
    #[arg(long, global = true, default_value = "1")]
    pub q: String,
    /// Potential parameter k as an exact rational.
    #[arg(long, global = true, default_value = "1")]
    pub k: String,
    /// Seed for the randomized numeric equality oracle.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output format; defaults to csv for sample-psi and table otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here (atomically) instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Deliberate single-sign mutation for control runs.
    #[arg(long, global = true, default_value = "none", value_parser = parse_mutation)]
    pub mutate: Mutation,
    /// Quadrature grid as NXxNY (each at least 16).
    #[arg(long, global = true, default_value = "200x64")]
    pub grid: String,
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    s.parse()
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Operator identities, first-order algebra, quadratic algebra and Casimir.
    VerifyAlgebra,
    /// Classical Poisson-algebra suite.
    VerifyClassical,
    /// Energies and degeneracies, each confirmed by the representation solver.
    Spectrum {
        #[arg(long, default_value_t = 4)]
        nmax: u32,
    },
    /// Parafermionic representation data per level.
    RepTable {
        #[arg(long, default_value_t = 6)]
        nmax: u32,
    },
    /// Closed-form tridiagonal matrix of L at one level.
    LMatrix {
        #[arg(long = "N")]
        level: u32,
    },
    /// Numeric second-basis construction compared with the closed forms.
    Crosscheck {
        #[arg(long, default_value_t = 4)]
        nmax: u32,
    },
    /// Samples a first-basis wavefunction on a regular grid.
    SamplePsi {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        l: u32,
        #[arg(long, default_value_t = 40)]
        nx: usize,
        #[arg(long, default_value_t = 21)]
        ny: usize,
        #[arg(long, default_value_t = 4.0)]
        xmax: f64,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    semilayer::symkernel::set_oracle_seed(cli.common.seed);
    let c = &cli.common;
    let (outcome, default_format) = match cli.command {
        Command::VerifyAlgebra => (commands::verify_algebra(c)?, Format::Table),
        Command::VerifyClassical => (commands::verify_classical(c)?, Format::Table),
        Command::Spectrum { nmax } => (commands::spectrum(c, nmax)?, Format::Table),
        Command::RepTable { nmax } => (commands::rep_table(c, nmax)?, Format::Table),
        Command::LMatrix { level } => (commands::l_matrix(c, level)?, Format::Table),
        Command::Crosscheck { nmax } => (commands::crosscheck(c, nmax)?, Format::Table),
        Command::SamplePsi { n, l, nx, ny, xmax } => (commands::sample_psi(c, n, l, nx, ny, xmax)?, Format::Csv),
    };
    emit(&outcome, c.format.unwrap_or(default_format), c.output.as_deref())?;
    for f in &outcome.failures {
        eprintln!("FAIL: {f}");
    }
    Ok(outcome.failures.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
