//! Command-line front end: `dfsl <command> --config <path> [--strict] [--out <dir>]`.
//!
//! Exit status: 0 on success, 1 when `--strict` is set and a comparison
//! hypothesis is unmet, a predicate is violated, or a verify check is
//! nonzero (also used for solver and I/O failures), 2 on input errors.

mod config;
mod output;

use std::path::{Path, PathBuf};

use clap::Parser;
use num_rational::BigRational;
use thiserror::Error;

pub use config::{
    parse_config, parse_config_for, CoefficientSpec, Coefficients, Command, ConfigError, RunConfig,
};

use crate::comparison::{run_comparison_with, ComparisonProblem, ComparisonReport, Selection};
use crate::dfsl::{assemble, eigensolve, EigenSystem};
use crate::error::Error;
use crate::frackernel::{kernel, FracOrder};
use crate::operators::{build_operator, verify_by_parts};
use crate::scalar::{Backend, Scalar};
use output::{write_atomic, Csv};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Domain(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            // a bad grid/order combination detected late is still an input error
            CliError::Domain(Error::IrrationalScale { .. } | Error::SizeOverflow { .. }) => 2,
            CliError::Domain(_) | CliError::Io { .. } => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dfsl",
    version,
    about = "Discrete fractional Sturm-Liouville toolkit"
)]
pub struct Args {
    pub command: Command,
    #[arg(long)]
    pub config: PathBuf,
    /// Exit 1 when a comparison hypothesis is unmet or a check is violated.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    /// Human-readable notes about failed checks; nonempty means `--strict` exits 1.
    pub failures: Vec<String>,
}

impl RunOutcome {
    fn write(&mut self, path: PathBuf, contents: &str) -> Result<(), CliError> {
        write_atomic(&path, contents).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.files.push(path);
        Ok(())
    }
}

macro_rules! dispatch {
    ($config:expr, $f:ident($($arg:expr),*)) => {
        match $config.backend {
            Backend::ExactRational => $f::<BigRational>($($arg),*)?,
            Backend::Float64 => $f::<f64>($($arg),*)?,
        }
    };
}

pub fn run(config: &RunConfig, out: &Path) -> Result<RunOutcome, CliError> {
    std::fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let mut outcome = RunOutcome::default();
    match config.command {
        Command::Kernels => run_kernels(config, out, &mut outcome)?,
        Command::Opmat => dispatch!(config, run_opmat(config, out, &mut outcome)),
        Command::Verify => dispatch!(config, run_verify(config, out, &mut outcome)),
        Command::Eig => dispatch!(config, run_eig(config, out, &mut outcome)),
        Command::Compare => run_compare(config, out, &mut outcome)?,
        Command::Sweep => run_sweep(config, out, &mut outcome)?,
    }
    Ok(outcome)
}

fn run_kernels(config: &RunConfig, out: &Path, outcome: &mut RunOutcome) -> Result<(), CliError> {
    let mu = config.order();
    let rows: Vec<String> = match config.backend {
        Backend::ExactRational => {
            render(kernel::<BigRational>(config.kernel, &mu, config.len)?.coeffs)
        }
        Backend::Float64 => render(kernel::<f64>(config.kernel, &mu, config.len)?.coeffs),
    };
    let mut csv = Csv::new(&["j", "coefficient"]);
    for (j, c) in rows.into_iter().enumerate() {
        csv.row([j.to_string(), c]);
    }
    outcome.write(out.join("kernels.csv"), &csv.finish())
}

fn render<T: Scalar>(values: Vec<T>) -> Vec<String> {
    values.iter().map(T::render).collect()
}

fn run_opmat<T: Scalar>(
    config: &RunConfig,
    out: &Path,
    outcome: &mut RunOutcome,
) -> Result<(), CliError> {
    let m = build_operator::<T>(config.operator, &config.order(), config.grid())?;
    let header: Vec<String> = (0..m.n()).map(|j| format!("c{j}")).collect();
    let mut csv = Csv::new(&header);
    for i in 0..m.n() {
        csv.row(m.entries.row(i).iter().map(T::render));
    }
    outcome.write(out.join("operator.csv"), &csv.finish())
}

fn run_verify<T: Scalar>(
    config: &RunConfig,
    out: &Path,
    outcome: &mut RunOutcome,
) -> Result<(), CliError> {
    let mu = config.order();
    let grid = config.grid();
    let (left_kind, right_kind) = config.variant.operator_pair();
    let left = build_operator::<T>(left_kind, &mu, grid)?;
    let right = build_operator::<T>(right_kind, &mu, grid)?;
    let by_parts = verify_by_parts(&left, &right, config.trials, config.seed)?;
    let transpose = right.entries.max_abs_diff(&left.entries.transpose());
    let coef = config.coefficients();
    let op = assemble(
        config.variant,
        grid,
        &mu,
        &coef.p.to_grid_function::<T>(grid)?,
        &coef.q.to_grid_function::<T>(grid)?,
    )?;
    let symmetry = op.matrix.asymmetry();

    let limit = match T::BACKEND {
        Backend::ExactRational => 0.0,
        Backend::Float64 => 1e-12,
    };
    let mut csv = Csv::new(&["check", "variant", "mu", "n", "trials", "discrepancy"]);
    for (check, value) in [
        ("by_parts", by_parts),
        ("transpose", transpose),
        ("symmetry", symmetry),
    ] {
        if value.to_f64() > limit {
            outcome.failures.push(format!(
                "{check} discrepancy {} exceeds {limit}",
                value.render()
            ));
        }
        csv.row([
            check.to_string(),
            config.variant.to_string(),
            mu.to_string(),
            grid.n().to_string(),
            config.trials.to_string(),
            value.render(),
        ]);
    }
    outcome.write(out.join("verify.csv"), &csv.finish())
}

fn run_eig<T: Scalar>(
    config: &RunConfig,
    out: &Path,
    outcome: &mut RunOutcome,
) -> Result<(), CliError> {
    let grid = config.grid();
    let coef = config.coefficients();
    let op = assemble(
        config.variant,
        grid,
        &config.order(),
        &coef.p.to_grid_function::<T>(grid)?,
        &coef.q.to_grid_function::<T>(grid)?,
    )?;
    let system = eigensolve(&op, &coef.r.to_grid_function::<T>(grid)?, &config.eigen)?;
    outcome.write(out.join("eigen.csv"), &eigen_csv(&system))?;
    if config.eigenvectors {
        let mut header = vec!["t".to_string()];
        header.extend((1..=system.len()).map(|k| format!("u{k}")));
        let mut csv = Csv::new(&header);
        for (i, t) in grid.points().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend((0..system.len()).map(|k| system.eigenvectors[(i, k)].render()));
            csv.row(row);
        }
        outcome.write(out.join("eigenvectors.csv"), &csv.finish())?;
    }
    Ok(())
}

fn eigen_csv(system: &EigenSystem) -> String {
    let mut csv = Csv::new(&["k", "eigenvalue", "residual"]);
    for (k, (lambda, res)) in system.eigenvalues.iter().zip(&system.residuals).enumerate() {
        csv.row([(k + 1).to_string(), lambda.render(), res.render()]);
    }
    csv.finish()
}

/// The comparison problem described by `config` at order `mu`.
pub fn comparison_problem(config: &RunConfig, mu: FracOrder) -> ComparisonProblem {
    let coef = config.coefficients();
    ComparisonProblem {
        variant: config.variant,
        grid: config.grid().clone(),
        mu,
        p: coef.p.clone(),
        q1: coef.q1.clone(),
        q2: coef.q2.clone(),
        r: coef.r.clone(),
        selection: config.selection,
        seed: config.seed,
    }
}

fn compare_one(
    config: &RunConfig,
    mu: FracOrder,
) -> Result<Result<ComparisonReport, Error>, CliError> {
    match run_comparison_with(
        &comparison_problem(config, mu),
        config.zero_tol,
        &config.eigen,
    ) {
        Ok(report) => Ok(Ok(report)),
        Err(e @ Error::HypothesisUnmet { .. }) => Ok(Err(e)),
        Err(e) => Err(e.into()),
    }
}

fn note_verdicts(report: &ComparisonReport, mu: &FracOrder, outcome: &mut RunOutcome) {
    for (name, v) in [
        ("first", &report.verdict_first),
        ("second", &report.verdict_second),
    ] {
        if !v.holds() {
            outcome
                .failures
                .push(format!("mu = {mu}: {name} comparison violated"));
        }
    }
}

fn run_compare(config: &RunConfig, out: &Path, outcome: &mut RunOutcome) -> Result<(), CliError> {
    let mu = config.order();
    match compare_one(config, mu)? {
        Ok(report) => {
            note_verdicts(&report, &mu, outcome);
            outcome.write(out.join("report.json"), &report.to_json())
        }
        Err(e) => {
            outcome.failures.push(e.to_string());
            Ok(())
        }
    }
}

fn run_sweep(config: &RunConfig, out: &Path, outcome: &mut RunOutcome) -> Result<(), CliError> {
    let mut csv = Csv::new(&[
        "mu",
        "k1",
        "k2",
        "lambda1",
        "lambda2",
        "zeros_u",
        "zeros_v",
        "verdict_first",
        "verdict_second",
        "verdict_first_swapped",
        "verdict_second_swapped",
    ]);
    let Selection { k1, k2 } = config.selection;
    for mu in &config.mu {
        let mut row = vec![mu.to_string(), k1.to_string(), k2.to_string()];
        match compare_one(config, *mu)? {
            Ok(report) => {
                note_verdicts(&report, mu, outcome);
                let name = format!("report_mu_{}_{}.json", mu.numer(), mu.denom());
                outcome.write(out.join(name), &report.to_json())?;
                row.extend([
                    report.eigen.lambda1.render(),
                    report.eigen.lambda2.render(),
                    report.counts.n_u.to_string(),
                    report.counts.n_v.to_string(),
                    report.verdict_first.label().to_string(),
                    report.verdict_second.label().to_string(),
                    report.verdict_first_swapped.label().to_string(),
                    report.verdict_second_swapped.label().to_string(),
                ]);
            }
            Err(e) => {
                outcome.failures.push(format!("mu = {mu}: {e}"));
                row.extend(["", "", "", ""].map(String::from));
                row.extend(["hypothesis_unmet"; 4].map(String::from));
            }
        }
        csv.row(row);
    }
    outcome.write(out.join("sweep_summary.csv"), &csv.finish())
}

/// Parses arguments, runs, reports to stderr, and returns the exit status.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("dfsl: cannot read {}: {e}", args.config.display());
            return 2;
        }
    };
    let result = parse_config_for(&text, Some(args.command))
        .map_err(CliError::from)
        .and_then(|config| run(&config, &args.out));
    match result {
        Ok(outcome) => {
            for path in &outcome.files {
                eprintln!("wrote {}", path.display());
            }
            for note in &outcome.failures {
                eprintln!("dfsl: {note}");
            }
            if args.strict && !outcome.failures.is_empty() {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("dfsl: {e}");
            e.exit_code()
        }
    }
}
