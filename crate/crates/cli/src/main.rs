use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use polydist_cli::commands::{
    self, BoundsOptions, FixtureOptions, Format, GammaChoice, PerturbOptions, SweepOptions, WeightsMode,
};
use polydist_cli::error::{CliError, EXIT_VERIFY_FAILED};
use polydist_core::Strategy;

/// Bounds on the distance from a matrix polynomial to polynomials with prescribed eigenvalues.
///
/// Exit codes: 0 success, 1 I/O error, 2 invalid input, 3 infeasible
/// construction, 4 numerical failure, 5 verification failed.
#[derive(Parser)]
#[command(name = "polydist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    /// w = {1, 0, ..., 0}
    Unit,
    /// w_j = ||A_j||_2
    Norms,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    MinUpper,
    MaxLower,
    MinGap,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::MinUpper => Strategy::MinUpper,
            StrategyArg::MaxLower => Strategy::MaxLower,
            StrategyArg::MinGap => Strategy::MinGap,
        }
    }
}

fn weights_mode(w: Option<WeightsArg>) -> WeightsMode {
    match w {
        None => WeightsMode::Auto,
        Some(WeightsArg::Unit) => WeightsMode::Unit,
        Some(WeightsArg::Norms) => WeightsMode::Norms,
    }
}

#[derive(Subcommand)]
enum Command {
    /// Optimize the lower and upper bounds over gamma.
    Bounds {
        file: PathBuf,
        /// Gamma range lo:hi (default: from the file, else 0:10).
        #[arg(long)]
        range: Option<String>,
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
        /// Number of log-spaced grid points before refinement.
        #[arg(long)]
        grid: Option<usize>,
        /// Overrides the file's weights.
        #[arg(long, value_enum)]
        weights: Option<WeightsArg>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate both bounds on a log-spaced gamma grid (CSV).
    Sweep {
        file: PathBuf,
        #[arg(long)]
        range: Option<String>,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, value_enum)]
        weights: Option<WeightsArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the perturbed polynomial Q.
    #[command(group(ArgGroup::new("which").required(true).args(["gamma", "optimal", "gamma0"])))]
    Perturb {
        file: PathBuf,
        #[arg(long)]
        gamma: Option<f64>,
        /// Use the gamma that minimizes the upper bound.
        #[arg(long)]
        optimal: bool,
        /// The constant perturbation of A_0.
        #[arg(long)]
        gamma0: bool,
        #[arg(long)]
        range: Option<String>,
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum)]
        weights: Option<WeightsArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that every target is an eigenvalue of a polynomial.
    Verify {
        qfile: PathBuf,
        /// JSON list of [re, im] pairs, or a file holding one or a problem file.
        #[arg(long)]
        targets: String,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a built-in problem: example1, example2, frank:<n>, random:<n>:<m>:<k>.
    Fixture {
        name: String,
        /// Seed for random fixtures.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Move the random polynomial so the targets are eigenvalues.
        #[arg(long)]
        planted: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn range(s: &Option<String>) -> Result<Option<(f64, f64)>, CliError> {
    s.as_deref().map(commands::parse_range).transpose()
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Bounds { file, range: r, strategy, grid, weights, format, out } => {
            let opts = BoundsOptions {
                range: range(&r)?,
                strategy: strategy.map(Into::into),
                grid,
                weights: weights_mode(weights),
                format: match format {
                    FormatArg::Json => Format::Json,
                    FormatArg::Text => Format::Text,
                },
            };
            emit(&commands::bounds(&file, &opts)?, &out)?;
        }
        Command::Sweep { file, range: r, points, weights, out } => {
            let opts = SweepOptions { range: range(&r)?, points, weights: weights_mode(weights) };
            emit(&commands::sweep(&file, &opts)?, &out)?;
        }
        Command::Perturb { file, gamma, optimal, gamma0, range: r, strategy, grid, weights, out } => {
            let choice = match (gamma, optimal, gamma0) {
                (Some(g), _, _) => {
                    if !(g >= 0.0) || !g.is_finite() {
                        return Err(CliError::parse(format!("--gamma must be finite and nonnegative, got {g}")));
                    }
                    GammaChoice::Fixed(g)
                }
                (None, true, _) => GammaChoice::Optimal,
                _ => GammaChoice::Zero,
            };
            let opts = PerturbOptions {
                gamma: choice,
                range: range(&r)?,
                strategy: strategy.map(Into::into),
                grid,
                weights: weights_mode(weights),
            };
            emit(&commands::perturb(&file, &opts)?, &out)?;
        }
        Command::Verify { qfile, targets, tol, out } => {
            let (text, pass) = commands::verify(&qfile, &targets, tol)?;
            emit(&text, &out)?;
            if !pass {
                eprintln!("verification failed: some targets are not eigenvalues within {tol:e}");
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
        Command::Fixture { name, seed, planted, out } => {
            emit(&commands::fixture(&name, &FixtureOptions { seed, planted })?, &out)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("polydist: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
