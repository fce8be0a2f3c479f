//! `su11`: metric operators for the non-Hermitian oscillator from the command line.
//!
//! Exit status: 0 success, 1 a residual or check exceeded its tolerance,
//! 2 invalid input (the violated constraint is named), 3 numerical failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::FileConfig;
use crate::report::OutputFormat;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl From<su11::Error> for CliError {
    fn from(e: su11::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "su11", version, about = "Metric operators and Hermitian counterparts of H = 2ωK₀ + 2αK₋ + 2βK₊")]
struct Cli {
    /// Flat `key = value` file (TOML syntax); flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format [default: csv for sweep, table otherwise].
    #[arg(long, global = true, value_enum)]
    output: Option<OutputFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct BasisArgs {
    /// Realization descriptor, e.g. discrete:k=0.25, oscillator, multiboson:l=3,residues=0.25,0.5,0.75,
    /// radial:L=1, conformal:k=0.75,c=1 [default: discrete:k=0.25].
    #[arg(long)]
    pub realization: Option<String>,
    /// Basis dimension N [default: 200].
    #[arg(long = "n")]
    pub n: Option<usize>,
    /// Trusted block size T [default: 50].
    #[arg(long = "t")]
    pub t: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TolArgs {
    /// [default: 1e-6]
    #[arg(long)]
    pub tol_herm: Option<f64>,
    /// [default: 1e-7]
    #[arg(long)]
    pub tol_eq10: Option<f64>,
    /// [default: 1e-6]
    #[arg(long)]
    pub tol_intertwine: Option<f64>,
    /// [default: 1e-6]
    #[arg(long)]
    pub tol_quasi: Option<f64>,
    /// [default: 1e-12]
    #[arg(long)]
    pub tol_commute: Option<f64>,
    /// [default: 1e-5]
    #[arg(long)]
    pub tol_eigvec: Option<f64>,
    /// Relative spectrum deviation from 2√(ω² − 4αβ)(n + k) [default: 1e-6].
    #[arg(long)]
    pub tol_spectrum: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check ω, α, β and print the admissible z set.
    #[command(allow_negative_numbers = true)]
    Validate {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Normal and antinormal factorizations of exp(2εK₀ + 2ηK₋ + 2η*K₊).
    #[command(allow_negative_numbers = true)]
    Disentangle {
        #[arg(long)]
        epsilon: Option<f64>,
        /// Real part of η.
        #[arg(long)]
        eta: Option<f64>,
        /// Imaginary part of η [default: 0].
        #[arg(long)]
        eta_im: Option<f64>,
    },
    /// Solve for the metric at one z: ε, η, μ, ν, U, V, W and h.
    #[command(allow_negative_numbers = true)]
    Metric {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        z: Option<f64>,
    },
    /// Lowest eigenvalues of h in a truncated realization against the harmonic law.
    #[command(allow_negative_numbers = true)]
    Spectrum {
        #[command(flatten)]
        params: ParamArgs,
        /// [default: 0]
        #[arg(long)]
        z: Option<f64>,
        #[command(flatten)]
        basis: BasisArgs,
        /// Number of eigenvalues [default: 5].
        #[arg(long)]
        count: Option<usize>,
    },
    /// Metric data and residuals over evenly spaced z values, one row per z.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        z_from: Option<f64>,
        #[arg(long)]
        z_to: Option<f64>,
        /// Number of z values, endpoints included.
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        basis: BasisArgs,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Finite-difference spectrum of the position-dependent-mass counterpart.
    #[command(allow_negative_numbers = true)]
    Pdm {
        #[command(flatten)]
        params: ParamArgs,
        /// [default: 0]
        #[arg(long)]
        z: Option<f64>,
        /// Exponent in g(x) = −e^{−sx}/s [default: 1].
        #[arg(long)]
        s: Option<f64>,
        /// Integration constant τ [default: 5].
        #[arg(long)]
        tau: Option<f64>,
        /// [default: -4]
        #[arg(long)]
        x_min: Option<f64>,
        /// [default: 1.5]
        #[arg(long)]
        x_max: Option<f64>,
        /// Interior grid points; comma-separated for a refinement study [default: 500,1000,2000,4000].
        #[arg(long)]
        points: Option<String>,
        /// Number of eigenvalues [default: 3].
        #[arg(long)]
        count: Option<usize>,
        /// Relative tolerance against √(ω² − 4αβ)(m + ½) [default: 0.01].
        #[arg(long)]
        rel_tol: Option<f64>,
    },
    /// Full residual report for one z in a truncated realization.
    #[command(allow_negative_numbers = true)]
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        /// [default: 0]
        #[arg(long)]
        z: Option<f64>,
        #[command(flatten)]
        basis: BasisArgs,
        /// Number of eigenvalues [default: 5].
        #[arg(long)]
        count: Option<usize>,
        #[command(flatten)]
        tol: TolArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli
        .config
        .as_deref()
        .map(FileConfig::load)
        .transpose()
        .map(Option::unwrap_or_default)
        .and_then(|file| {
            let format = match cli.output {
                Some(f) => f,
                None => file.or(
                    None,
                    "output",
                    if matches!(cli.command, Command::Sweep { .. }) { "csv".to_string() } else { "table".to_string() },
                )
                .and_then(|s| match s.as_str() {
                    "csv" => Ok(OutputFormat::Csv),
                    "table" => Ok(OutputFormat::Table),
                    _ => Err(CliError::Input(format!("output must be 'table' or 'csv', got '{s}'"))),
                })?,
            };
            commands::run(&cli.command, &file).map(|outcome| (outcome, format))
        });
    match result {
        Ok((outcome, format)) => {
            print!("{}", outcome.report.render(format));
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
