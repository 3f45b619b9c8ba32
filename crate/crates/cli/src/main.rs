mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use emz_spectral::ordered_rep::DEFAULT_BUDGET;
use emz_spectral::quasidiff::{DEFAULT_TOL_ODE, DEFAULT_TOL_QUAD};
use emz_spectral::realset::Window;
use emz_spectral::Error;

pub const EXIT_OTHER: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_UNSUPPORTED: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

/// Spectral analysis of direct sums of self-adjoint quasi-differential operators.
#[derive(Debug, Parser)]
#[command(name = "emz-spectral", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Analysis window, overriding the file's.
    #[arg(long, global = true, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    window: Option<Vec<f64>>,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[arg(long, global = true, default_value_t = DEFAULT_TOL_ODE)]
    tol_ode: f64,

    #[arg(long, global = true, default_value_t = DEFAULT_TOL_QUAD)]
    tol_quad: f64,

    /// Atom-matching tolerance, overriding the file's `eps_atom`.
    #[arg(long, global = true)]
    eps_atom: Option<f64>,

    /// Report path (written atomically); stdout if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Cap on band intersections when building multiplicity sets.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelFunction {
    /// `F = 1` on Δ.
    Chi,
    /// `F(λ) = λ`.
    Lambda,
    /// `F(λ) = cos λ`.
    Cos,
    Zero,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Schema and Shin-Zettl checks.
    Validate { input: PathBuf },
    /// Superposition graph of the slots.
    Graph { input: PathBuf },
    /// Spectral index, partition and cyclic-vector plan.
    Index { input: PathBuf },
    /// θ, multiplicity sets, distortion and provenance.
    OrderedRep { input: PathBuf },
    /// Transform and reconstruct a vector over the eigenfunction kernels.
    Expand {
        input: PathBuf,
        /// JSON `{slot_id: [[λ, re, im], …]}`; random (from the seed) if absent.
        #[arg(long)]
        vector: Option<PathBuf>,
        /// Keep the N atoms closest to zero.
        #[arg(long)]
        truncate: Option<usize>,
        /// Random vectors in the Parseval check.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// The integral operator K(F; ·,·) with cross-checks and kernel samples.
    Kernelop {
        input: PathBuf,
        /// Closed interval Δ; the window if absent.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, conflicts_with = "empty_delta")]
        delta: Option<Vec<f64>>,
        #[arg(long)]
        empty_delta: bool,
        #[arg(long, value_enum, default_value_t = KernelFunction::Chi)]
        function: KernelFunction,
        /// Sampled F as JSON `{"xs": […], "values": [[re, im], …]}`, overriding `--function`.
        #[arg(long)]
        function_samples: Option<PathBuf>,
        /// CSV of `K(F; x, s)` samples.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Sample points per coordinate for the CSV.
        #[arg(long, default_value_t = 21)]
        grid: usize,
        /// Random vectors in the cross-checks.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Quadrature check of the Lagrange identity for inline matrices
    /// (the second derivative on [0, 1] when there are none).
    LagrangeCheck {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        pairs: usize,
        #[arg(long, default_value_t = 10_000)]
        panels: usize,
    },
}

/// Validated run settings shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub window: Option<Window>,
    pub seed: u64,
    pub tol_ode: f64,
    pub tol_quad: f64,
    pub eps_atom: Option<f64>,
    pub out: Option<PathBuf>,
    pub budget: usize,
}

/// A failed run: message and exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::EnumerationBudgetExceeded { .. } => EXIT_BUDGET,
            Error::UnsupportedFamily(_)
            | Error::SymbolicACUnsupported(_)
            | Error::ContinuousSpectrumOnly(_)
            | Error::UnknownSolutionBasis(_) => EXIT_UNSUPPORTED,
            Error::WindowMismatch(..)
            | Error::InvalidWindow(..)
            | Error::InvalidSet(_)
            | Error::InvalidMeasure(_)
            | Error::InvalidMatrix(_)
            | Error::DimensionMismatch { .. }
            | Error::UnboundedFunction(_)
            | Error::Schema(_) => EXIT_VALIDATION,
            Error::StepSizeTooCoarse { .. } | Error::QuadratureFailure(_) => EXIT_OTHER,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_OTHER,
            message: e.to_string(),
        }
    }
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }
}

fn config(cli: &Cli) -> Result<RunConfig, Failure> {
    let window = match &cli.window {
        Some(w) => Some(Window::new(w[0], w[1])?),
        None => None,
    };
    for (name, v) in [("tol-ode", cli.tol_ode), ("tol-quad", cli.tol_quad)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Failure::validation(format!("--{name} must be positive, got {v}")));
        }
    }
    if let Some(e) = cli.eps_atom {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Failure::validation(format!("--eps-atom must be positive, got {e}")));
        }
    }
    let command = match cli.command {
        Command::Validate { .. } => "validate",
        Command::Graph { .. } => "graph",
        Command::Index { .. } => "index",
        Command::OrderedRep { .. } => "ordered-rep",
        Command::Expand { .. } => "expand",
        Command::Kernelop { .. } => "kernelop",
        Command::LagrangeCheck { .. } => "lagrange-check",
    };
    Ok(RunConfig {
        command,
        window,
        seed: cli.seed,
        tol_ode: cli.tol_ode,
        tol_quad: cli.tol_quad,
        eps_atom: cli.eps_atom,
        out: cli.out.clone(),
        budget: cli.budget,
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let cfg = config(&cli)?;
    match cli.command {
        Command::Validate { input } => commands::validate(&cfg, &input),
        Command::Graph { input } => commands::graph(&cfg, &input),
        Command::Index { input } => commands::index(&cfg, &input),
        Command::OrderedRep { input } => commands::ordered_rep(&cfg, &input),
        Command::Expand {
            input,
            vector,
            truncate,
            samples,
        } => commands::expand(&cfg, &input, vector.as_deref(), truncate, samples),
        Command::Kernelop {
            input,
            delta,
            empty_delta,
            function,
            function_samples,
            csv,
            grid,
            samples,
        } => commands::kernelop(
            &cfg,
            &input,
            &commands::KernelopArgs {
                delta: delta.map(|d| (d[0], d[1])),
                empty_delta,
                function,
                function_samples,
                csv,
                grid,
                samples,
            },
        ),
        Command::LagrangeCheck { input, pairs, panels } => {
            commands::lagrange_check(&cfg, input.as_deref(), pairs, panels)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EMZ_SPECTRAL_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
