use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use feigen_core::bases::{BasisKind, Constraint};
use feigen_core::operators::{Linearization, Variant};

#[derive(Parser, Debug)]
#[command(name = "feigen", version, about = "Fixed points and spectra of period-doubling operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve the fixed-point equation and write the solution.
    Solve(RunArgs),
    /// Solve, then compute and classify the spectrum of the linearization.
    Spectrum(RunArgs),
    /// Check explicit eigenfunctions and identities at a fixed point.
    Verify(VerifyArgs),
    /// Write coefficient decay and eigenfunction samples for plotting.
    Plotdata(PlotArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Significant decimal digits of the arithmetic.
    #[arg(long, default_value_t = 64)]
    pub digits: u32,
    /// Chebyshev grid size.
    #[arg(long, default_value_t = 32)]
    pub nodes: usize,
    #[arg(long, default_value = "T", value_parser = parse_variant)]
    pub operator: Variant,
    #[arg(long, default_value = "full", value_parser = parse_linearization)]
    pub linearization: Linearization,
    #[arg(long, default_value = "cheb", value_parser = parse_basis)]
    pub basis: BasisKind,
    /// Highest power (monomial kinds) or number of even powers; defaults
    /// to `--nodes` for the grid.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Fixed coefficient, e.g. `a0=1`.
    #[arg(long = "constrain", value_parser = parse_constraint)]
    pub constraints: Vec<Constraint>,
    /// Pinned value `g0=V` of g(0).
    #[arg(long = "pin", value_parser = parse_pin)]
    pub pins: Vec<String>,
    /// Extremum of order 2k.
    #[arg(long, default_value_t = 1)]
    pub extremum_order: u32,
    /// Chebyshev coefficients `index value` per line.
    #[arg(long)]
    pub seed_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = JacobianArg::Fd)]
    pub jacobian: JacobianArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output directory.
    #[arg(long, default_value = "feigen-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Solution file to check; solved afresh when absent.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    /// Members `mu g(x / mu)` of the scaling family to compare.
    #[arg(long = "mu")]
    pub mus: Vec<String>,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    /// Directory holding `solution.json`; plot files are written there too.
    #[arg(long, default_value = "feigen-out")]
    pub out: PathBuf,
    /// 1-based index of the eigenvalue whose eigenfunction is sampled.
    #[arg(long, default_value_t = 1)]
    pub eigen: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum JacobianArg {
    Fd,
    Exact,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: feigen_core::Error| e.to_string())
}

fn parse_linearization(s: &str) -> Result<Linearization, String> {
    s.parse().map_err(|e: feigen_core::Error| e.to_string())
}

fn parse_basis(s: &str) -> Result<BasisKind, String> {
    s.parse().map_err(|e: feigen_core::Error| e.to_string())
}

fn parse_constraint(s: &str) -> Result<Constraint, String> {
    s.parse().map_err(|e: feigen_core::Error| e.to_string())
}

/// Only `g0=V` is supported; the value is kept as text until the precision
/// is known.
fn parse_pin(s: &str) -> Result<String, String> {
    match s.split_once('=') {
        Some((lhs, rhs)) if lhs.trim() == "g0" && !rhs.trim().is_empty() => Ok(rhs.trim().to_string()),
        _ => Err(format!("pin `{s}` is not of the form g0=V")),
    }
}
