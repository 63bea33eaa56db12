//! `heavytail-ineq`: constants tables, verification sweeps, spectral probes and
//! Fokker–Planck entropy-decay runs.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

mod commands;
mod range;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use range::Sweep;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "heavytail-ineq",
    version,
    about = "Weighted functional inequalities for heavy-tailed densities"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Output file (standard output when absent).
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate closed-form constants over parameter sweeps.
    Constants(ConstantsArgs),
    /// Check catalog inequalities against a test-function corpus.
    Verify(VerifyArgs),
    /// Estimate best weighted-Poincaré constants from the discretized spectral problem.
    Spectral(SpectralArgs),
    /// Evolve a Fokker–Planck equation and fit the entropy decay rate.
    Evolve(EvolveArgs),
    /// Summarize the default catalog sweep per inequality family.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("table").required(true).multiple(false)))]
pub struct ConstantsArgs {
    /// rho(beta) of the Cauchy-type Chernoff inequality.
    #[arg(long, group = "table")]
    pub chernoff_rho: bool,
    /// gamma(kappa) of the standard inverse Gamma Chernoff inequality.
    #[arg(long, group = "table")]
    pub chernoff_gamma: bool,
    /// Bakry–Emery constant of the Cauchy-type log-Sobolev inequality.
    #[arg(long, group = "table")]
    pub lsi_cauchy: bool,
    /// Bakry–Emery constant of the inverse Gamma log-Sobolev inequality.
    #[arg(long, group = "table")]
    pub lsi_invgamma: bool,
    /// Same, in the standard inverse Gamma parametrization.
    #[arg(long, group = "table")]
    pub lsi_invgamma_std: bool,
    /// Prefactor 1/(beta-1) of the Bobkov–Ledoux inequality.
    #[arg(long, group = "table")]
    pub bobkov_ledoux: bool,
    /// D(beta, m) of the inverse Gamma Wirtinger inequality.
    #[arg(long, group = "table")]
    pub wirtinger_d: bool,
    /// Optimal drift exponent alpha with a numerical cross-check.
    #[arg(long, group = "table")]
    pub alpha_opt: bool,
    #[arg(long)]
    pub beta: Option<Sweep>,
    #[arg(long)]
    pub kappa: Option<Sweep>,
    #[arg(long)]
    pub alpha: Option<Sweep>,
    #[arg(long)]
    pub m: Option<Sweep>,
    /// Density family for --alpha-opt.
    #[arg(long, value_enum, default_value_t = ChernoffKind::Cauchy)]
    pub family: ChernoffKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChernoffKind {
    Cauchy,
    Invgamma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CorpusKind {
    Default,
    Real,
    Half,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Catalog entry, or ALL for every entry at its default points.
    #[arg(long)]
    pub catalog: String,
    #[arg(long)]
    pub beta: Option<Sweep>,
    #[arg(long)]
    pub alpha: Option<Sweep>,
    #[arg(long)]
    pub m: Option<Sweep>,
    #[arg(long)]
    pub kappa: Option<Sweep>,
    #[arg(long)]
    pub lambda: Option<Sweep>,
    #[arg(long)]
    pub p: Option<Sweep>,
    /// Use the median-anchored Wirtinger form.
    #[arg(long)]
    pub zeroed: bool,
    /// Density descriptor for the general Wirtinger entries, e.g. "family=cauchy beta=1".
    #[arg(long)]
    pub density: Option<String>,
    /// Ascending potential coefficients for BRASCAMP_LIEB, e.g. "0,0,0.5".
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long, value_enum, default_value_t = CorpusKind::Default)]
    pub corpus: CorpusKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpectralFamily {
    Cauchy,
    Invgamma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpectralWeight {
    /// `1 + x^2` (Cauchy) or `x^2` (inverse Gamma).
    Chernoff,
    One,
}

#[derive(Args, Debug)]
pub struct SpectralArgs {
    #[arg(long, value_enum, default_value_t = SpectralFamily::Cauchy)]
    pub family: SpectralFamily,
    #[arg(long)]
    pub beta: Sweep,
    /// Scale of the inverse Gamma family.
    #[arg(long, default_value = "1")]
    pub m: Sweep,
    #[arg(long, value_enum, default_value_t = SpectralWeight::Chernoff)]
    pub weight: SpectralWeight,
    /// Grid cells (comma separated for a refinement study).
    #[arg(long, value_delimiter = ',', default_value = "2048")]
    pub n: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvolveModel {
    Invgamma,
    Cauchy,
    Ou,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Log-normal bump (half-line) or shifted Gaussian (line).
    Bump,
    /// Equal mixture of the steady state and the bump.
    Mixture,
    /// Steady state with `m` doubled (inverse Gamma), `beta` raised by one (Cauchy) or mean moved to 2 (OU).
    Shifted,
    /// The steady state itself.
    Steady,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    ChangCooper,
    Centered,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[arg(long, value_enum)]
    pub model: EvolveModel,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long, value_enum, default_value_t = Preset::Bump)]
    pub preset: Preset,
    #[arg(long, default_value_t = 512)]
    pub n_cells: usize,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, value_enum, default_value_t = SchemeArg::ChangCooper)]
    pub scheme: SchemeArg,
    /// Keep every k-th state in the snapshot file.
    #[arg(long, default_value_t = 0)]
    pub snapshot_stride: usize,
    /// Run manifest (JSON).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Snapshots `(t, x, f)` (CSV).
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Catalog entries to include (all when absent).
    #[arg(long, value_delimiter = ',')]
    pub catalog: Vec<String>,
    #[arg(long, value_enum, default_value_t = CorpusKind::Default)]
    pub corpus: CorpusKind,
    /// Also write every verification row to this file.
    #[arg(long)]
    pub rows: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("heavytail-ineq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
