//! TOML run configuration.
//!
//! ```toml
//! command = "compare"        # kernels | opmat | verify | eig | compare | sweep
//! backend = "rational"       # rational | float
//! variant = "GL"             # GL | RL
//! mu = "1/2"                 # "p/q", decimal string or number; a list for sweep
//! seed = 0
//!
//! [kernel]        # kind = "gl" | "rl_sum" | "rl_diff", len = 8
//! [operator]      # kind = "DeltaLeftDiff" | ... (opmat)
//! [grid]          # a = 0, b = 17, h = "1"
//! [coefficients]  # p, q, q1, q2, r: a constant or a list of interior values
//! [selection]     # k1, k2 (1-based eigenpair indices)
//! [solver]        # tol, max_sweeps, zero_tol
//! [verify]        # trials
//! [output]        # eigenvectors = true
//! ```

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;
use toml::{Table, Value};

use crate::comparison::{ExactValues, Selection, DEFAULT_ZERO_TOL};
use crate::dfsl::{EigenOptions, Variant};
use crate::frackernel::{FracOrder, KernelKind};
use crate::operators::{GridSpec, OperatorKind};
use crate::scalar::{parse_rational, Backend};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Kernels,
    Opmat,
    Verify,
    Eig,
    Compare,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Kernels => "kernels",
            Command::Opmat => "opmat",
            Command::Verify => "verify",
            Command::Eig => "eig",
            Command::Compare => "compare",
            Command::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Command::Kernels,
            Command::Opmat,
            Command::Verify,
            Command::Eig,
            Command::Compare,
            Command::Sweep,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientSpec {
    Constant(BigRational),
    Values(Vec<BigRational>),
}

impl CoefficientSpec {
    pub fn expand(&self, key: &str, n: usize) -> Result<ExactValues, ConfigError> {
        match self {
            CoefficientSpec::Constant(c) => Ok(ExactValues::constant(n, c.clone())),
            CoefficientSpec::Values(v) if v.len() == n => Ok(ExactValues(v.clone())),
            CoefficientSpec::Values(v) => Err(invalid(
                key,
                format!(
                    "expected {n} values (one per interior point), found {}",
                    v.len()
                ),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub p: ExactValues,
    pub q: ExactValues,
    pub q1: ExactValues,
    pub q2: ExactValues,
    pub r: ExactValues,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub backend: Backend,
    pub variant: Variant,
    /// One order, or the strictly increasing sweep list.
    pub mu: Vec<FracOrder>,
    pub seed: u64,
    pub kernel: KernelKind,
    pub len: usize,
    pub operator: OperatorKind,
    /// Absent only for `kernels`.
    pub grid: Option<GridSpec>,
    pub coefficients: Option<Coefficients>,
    pub selection: Selection,
    pub eigen: EigenOptions,
    pub zero_tol: f64,
    pub trials: usize,
    pub eigenvectors: bool,
}

impl RunConfig {
    pub fn order(&self) -> FracOrder {
        self.mu[0]
    }

    /// Panics for `kernels` configs, which carry no grid.
    pub fn grid(&self) -> &GridSpec {
        self.grid.as_ref().expect("command requires a grid")
    }

    pub fn coefficients(&self) -> &Coefficients {
        self.coefficients.as_ref().expect("command requires a grid")
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

struct Section<'a> {
    path: String,
    table: &'a Table,
    allowed: &'static [&'static str],
}

impl<'a> Section<'a> {
    fn new(
        path: &str,
        table: &'a Table,
        allowed: &'static [&'static str],
    ) -> Result<Self, ConfigError> {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(invalid(&join(path, key), "unknown key"));
            }
        }
        Ok(Self {
            path: path.to_string(),
            table,
            allowed,
        })
    }

    fn key(&self, name: &str) -> String {
        debug_assert!(self.allowed.contains(&name));
        join(&self.path, name)
    }

    fn get(&self, name: &str) -> Option<&'a Value> {
        self.table.get(name)
    }

    fn sub(
        &self,
        name: &str,
        allowed: &'static [&'static str],
    ) -> Result<Section<'a>, ConfigError> {
        static EMPTY: std::sync::OnceLock<Table> = std::sync::OnceLock::new();
        match self.get(name) {
            None => Section::new(&self.key(name), EMPTY.get_or_init(Table::new), allowed),
            Some(Value::Table(t)) => Section::new(&self.key(name), t, allowed),
            Some(_) => Err(invalid(&self.key(name), "expected a table")),
        }
    }

    fn string(&self, name: &str) -> Result<Option<&'a str>, ConfigError> {
        match self.get(name) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(invalid(&self.key(name), "expected a string")),
        }
    }

    fn parsed<T: FromStr<Err = String>>(&self, name: &str, default: T) -> Result<T, ConfigError> {
        match self.string(name)? {
            None => Ok(default),
            Some(s) => s.parse().map_err(|e: String| invalid(&self.key(name), e)),
        }
    }

    fn integer(&self, name: &str) -> Result<Option<i64>, ConfigError> {
        match self.get(name) {
            None => Ok(None),
            Some(Value::Integer(i)) => Ok(Some(*i)),
            Some(_) => Err(invalid(&self.key(name), "expected an integer")),
        }
    }

    fn count(&self, name: &str, default: usize) -> Result<usize, ConfigError> {
        match self.integer(name)? {
            None => Ok(default),
            Some(i) if i >= 0 => Ok(i as usize),
            Some(i) => Err(invalid(
                &self.key(name),
                format!("must be nonnegative, got {i}"),
            )),
        }
    }

    fn float(&self, name: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get(name) {
            None => Ok(default),
            Some(Value::Float(f)) => Ok(*f),
            Some(Value::Integer(i)) => Ok(*i as f64),
            Some(_) => Err(invalid(&self.key(name), "expected a number")),
        }
    }

    fn boolean(&self, name: &str, default: bool) -> Result<bool, ConfigError> {
        match self.get(name) {
            None => Ok(default),
            Some(Value::Boolean(b)) => Ok(*b),
            Some(_) => Err(invalid(&self.key(name), "expected true or false")),
        }
    }

    fn rational(&self, name: &str) -> Result<Option<BigRational>, ConfigError> {
        self.get(name)
            .map(|v| rational_value(v).map_err(|m| invalid(&self.key(name), m)))
            .transpose()
    }

    fn coefficient(&self, name: &str, default: i64) -> Result<CoefficientSpec, ConfigError> {
        let key = self.key(name);
        match self.get(name) {
            None => Ok(CoefficientSpec::Constant(BigRational::from_integer(
                default.into(),
            ))),
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, v)| rational_value(v).map_err(|m| invalid(&format!("{key}[{i}]"), m)))
                .collect::<Result<Vec<_>, _>>()
                .map(CoefficientSpec::Values),
            Some(v) => rational_value(v)
                .map(CoefficientSpec::Constant)
                .map_err(|m| invalid(&key, m)),
        }
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

/// Numbers may be written as TOML integers, floats, or strings (`"p/q"`, `"0.3"`).
fn rational_value(v: &Value) -> Result<BigRational, String> {
    match v {
        Value::Integer(i) => Ok(BigRational::from_integer((*i).into())),
        Value::Float(f) if f.is_finite() => parse_rational(&format!("{f}")),
        Value::String(s) => parse_rational(s),
        _ => Err("expected a number or a \"p/q\" string".into()),
    }
}

fn order_value(key: &str, v: &Value, backend: Backend) -> Result<FracOrder, ConfigError> {
    let r = rational_value(v).map_err(|m| invalid(key, m))?;
    if r <= BigRational::zero() || r > BigRational::one() {
        return Err(invalid(key, "mu must lie in (0,1]"));
    }
    FracOrder::parse(&r.to_string(), backend).map_err(|e| invalid(key, e.to_string()))
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_for(text, None)
}

/// Like [`parse_config`], with the command supplied on the command line.
/// A `command` key in the file must then agree with it.
pub fn parse_config_for(text: &str, command: Option<Command>) -> Result<RunConfig, ConfigError> {
    let doc: Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ConfigError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let top = Section::new(
        "",
        &doc,
        &[
            "command",
            "backend",
            "variant",
            "mu",
            "seed",
            "kernel",
            "operator",
            "grid",
            "coefficients",
            "selection",
            "solver",
            "verify",
            "output",
        ],
    )?;

    let command = match (top.string("command")?, command) {
        (None, Some(c)) => c,
        (None, None) => return Err(invalid("command", "missing")),
        (Some(s), cli) => {
            let c: Command = s.parse().map_err(|e: String| invalid("command", e))?;
            if let Some(cli) = cli.filter(|cli| *cli != c) {
                return Err(invalid(
                    "command",
                    format!("file says {c:?} but the command line says {cli:?}"),
                ));
            }
            c
        }
    };
    let backend: Backend = top.parsed("backend", Backend::ExactRational)?;
    let variant: Variant = top.parsed("variant", Variant::GL)?;
    let seed = top.count("seed", 0)? as u64;

    let mu = match top.get("mu") {
        None => return Err(invalid("mu", "missing")),
        Some(Value::Array(items)) => {
            if command != Command::Sweep {
                return Err(invalid("mu", "a list of orders is only accepted by sweep"));
            }
            if items.is_empty() {
                return Err(invalid("mu", "sweep needs at least one order"));
            }
            let orders = items
                .iter()
                .enumerate()
                .map(|(i, v)| order_value(&format!("mu[{i}]"), v, backend))
                .collect::<Result<Vec<_>, _>>()?;
            if orders
                .windows(2)
                .any(|w| w[0].as_rational() >= w[1].as_rational())
            {
                return Err(invalid("mu", "sweep orders must be strictly increasing"));
            }
            orders
        }
        Some(v) => vec![order_value("mu", v, backend)?],
    };

    let kernel_sec = top.sub("kernel", &["kind", "len"])?;
    let kernel: KernelKind = kernel_sec.parsed("kind", KernelKind::GL)?;
    let len = kernel_sec.count("len", 8)?;
    if len == 0 {
        return Err(invalid("kernel.len", "must be at least 1"));
    }
    let operator: OperatorKind = top
        .sub("operator", &["kind"])?
        .parsed("kind", OperatorKind::DeltaLeftDiff)?;

    let grid_sec = top.sub("grid", &["a", "b", "h"])?;
    let grid = if command == Command::Kernels {
        None
    } else {
        let a = grid_sec.integer("a")?.unwrap_or(0);
        let b = grid_sec
            .integer("b")?
            .ok_or_else(|| invalid("grid.b", "missing"))?;
        let h = grid_sec.rational("h")?.unwrap_or_else(BigRational::one);
        Some(GridSpec::new(a, b, h).map_err(|e| invalid("grid", e.to_string()))?)
    };

    let coef_sec = top.sub("coefficients", &["p", "q", "q1", "q2", "r"])?;
    let coefficients = match &grid {
        None => None,
        Some(g) => {
            let n = g.n();
            let expand = |name: &str, default: i64| {
                coef_sec
                    .coefficient(name, default)?
                    .expand(&coef_sec.key(name), n)
            };
            Some(Coefficients {
                p: expand("p", 1)?,
                q: expand("q", 0)?,
                q1: expand("q1", 0)?,
                q2: expand("q2", 0)?,
                r: expand("r", 1)?,
            })
        }
    };
    if let Some(c) = &coefficients {
        for (name, values) in [("coefficients.p", &c.p), ("coefficients.r", &c.r)] {
            if let Some(i) = values.0.iter().position(|v| *v <= BigRational::zero()) {
                return Err(invalid(&format!("{name}[{i}]"), "must be positive"));
            }
        }
    }

    let sel = top.sub("selection", &["k1", "k2"])?;
    let selection = Selection {
        k1: sel.count("k1", 2)?,
        k2: sel.count("k2", 1)?,
    };
    if let Some(g) = &grid {
        for (name, k) in [
            ("selection.k1", selection.k1),
            ("selection.k2", selection.k2),
        ] {
            if k == 0 || k > g.n() {
                return Err(invalid(name, format!("must lie in 1..={}", g.n())));
            }
        }
    }

    let solver = top.sub("solver", &["tol", "max_sweeps", "zero_tol"])?;
    let defaults = EigenOptions::default();
    let eigen = EigenOptions {
        tol: solver.float("tol", defaults.tol)?,
        max_sweeps: solver.count("max_sweeps", defaults.max_sweeps)?,
    };
    if !(eigen.tol >= 1e-14) {
        return Err(invalid("solver.tol", "must be at least 1e-14"));
    }
    let zero_tol = solver.float("zero_tol", DEFAULT_ZERO_TOL)?;
    if !(zero_tol >= 0.0) {
        return Err(invalid("solver.zero_tol", "must be nonnegative"));
    }

    let trials = top.sub("verify", &["trials"])?.count("trials", 20)?;
    let eigenvectors = top
        .sub("output", &["eigenvectors"])?
        .boolean("eigenvectors", false)?;

    Ok(RunConfig {
        command,
        backend,
        variant,
        mu,
        seed,
        kernel,
        len,
        operator,
        grid,
        coefficients,
        selection,
        eigen,
        zero_tol,
        trials,
        eigenvectors,
    })
}
