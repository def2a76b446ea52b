//! Command-line front end: loads problem and preference specifications from
//! JSON files, runs the core operations, and emits machine-readable tables.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit code for malformed input.
const EXIT_INPUT: u8 = 1;
/// Exit code when the solver hits its iteration limit.
const EXIT_ITERATION_LIMIT: u8 = 2;
/// Exit code when any extraction row fails to bracket.
const EXIT_ROW_FAILURE: u8 = 3;

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "demandkit",
    version,
    about = "Consumer-theory toolkit: demand solving, axiom checks, utility extraction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutArg {
    /// Write the result table as CSV to this path (a reproducibility
    /// manifest lands next to it).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a utility-maximization problem file.
    Demand {
        /// JSON problem file: { "utility": {...}, "p": [...], "r": ... }
        problem: PathBuf,
        /// Solver tolerance on the relative projected-gradient norm.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run the axiom falsifier battery against a preference file.
    Axioms {
        /// JSON preference file: { "utility": {...} } or
        /// { "specimen": "name", "dimension": n }
        preference: PathBuf,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Upper corner of the sampling box.
        #[arg(long, default_value_t = 10.0)]
        box_upper: f64,
        /// Neighborhood radius for the nonsatiation search.
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Acceptance tolerance for bisection-generated indifferent pairs.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Extract the represented utility value for each bundle in a file.
    Extract {
        preference: PathBuf,
        /// JSON bundle list: { "bundles": [[...], ...] }
        bundles: PathBuf,
        /// Absolute tolerance on the extracted scale.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 1e6)]
        max_bracket: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Evaluate the demand-PDE residual of a utility over a random interior grid.
    #[command(name = "pde-check")]
    PdeCheck {
        /// JSON file: { "utility": {...}, "p": [...]? }; prices default to
        /// the family's own.
        utility: PathBuf,
        #[arg(long, default_value_t = 1000)]
        grid_points: usize,
        #[arg(long, default_value_t = 0.1)]
        grid_low: f64,
        #[arg(long, default_value_t = 10.0)]
        grid_high: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Scaled residual threshold for the pass/fail verdict.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Sweep income or one price over a grid and tabulate demand.
    #[command(name = "indirect-sweep")]
    IndirectSweep {
        problem: PathBuf,
        /// What to sweep: "r" or "p<i>" (1-based), e.g. "p2".
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: OutArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Demand {
            problem,
            tol,
            max_iters,
            out,
        } => commands::demand(&problem, tol, max_iters, out.out.as_deref()),
        Command::Axioms {
            preference,
            samples,
            seed,
            box_upper,
            epsilon,
            tol,
            out,
        } => commands::axioms(
            &preference,
            samples,
            seed,
            box_upper,
            epsilon,
            tol,
            out.out.as_deref(),
        ),
        Command::Extract {
            preference,
            bundles,
            tol,
            max_bracket,
            out,
        } => commands::extract(&preference, &bundles, tol, max_bracket, out.out.as_deref()),
        Command::PdeCheck {
            utility,
            grid_points,
            grid_low,
            grid_high,
            seed,
            tol,
            out,
        } => commands::pde_check(
            &utility,
            grid_points,
            grid_low,
            grid_high,
            seed,
            tol,
            out.out.as_deref(),
        ),
        Command::IndirectSweep {
            problem,
            param,
            from,
            to,
            points,
            tol,
            out,
        } => commands::indirect_sweep(&problem, &param, from, to, points, tol, out.out.as_deref()),
    };
    match outcome {
        Ok(commands::Outcome::Success) => ExitCode::SUCCESS,
        Ok(commands::Outcome::IterationLimit) => ExitCode::from(EXIT_ITERATION_LIMIT),
        Ok(commands::Outcome::RowFailures) => ExitCode::from(EXIT_ROW_FAILURE),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
