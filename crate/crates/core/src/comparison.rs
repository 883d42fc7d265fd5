//! Generalized zeros of grid functions and the interlacing predicates of the
//! two Sturm comparison theorems.
//!
//! A generalized zero is either a point where `|u(t)| <= tol·‖u‖_∞`
//! (positioned at `t`) or a strict sign change between adjacent interior
//! points `t-1, t` (positioned at `t - 1/2`). Points outside the interior are
//! never inspected.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use serde::{Serialize, Serializer};

use crate::dfsl::{assemble, eigensolve, EigenOptions, Variant};
use crate::error::{Error, Result};
use crate::frackernel::FracOrder;
use crate::operators::{GridFunction, GridSpec};
use crate::scalar::{Backend, Scalar};

pub const DEFAULT_ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    ExactZero { t: i64 },
    SignChange { left: i64, right: i64 },
}

impl Node {
    /// Position in half-steps: `2t` for an exact zero, `2t - 1` for a sign change ending at `t`.
    pub fn half_steps(&self) -> i64 {
        match *self {
            Node::ExactZero { t } => 2 * t,
            Node::SignChange { right, .. } => 2 * right - 1,
        }
    }

    pub fn position(&self) -> f64 {
        self.half_steps() as f64 / 2.0
    }

    /// Inverse of [`Node::position`]; `None` unless `x` is a multiple of 1/2.
    pub fn from_position(x: f64) -> Option<Node> {
        let twice = x * 2.0;
        if !twice.is_finite() || twice.fract() != 0.0 || twice.abs() > 1e15 {
            return None;
        }
        let h = twice as i64;
        Some(if h % 2 == 0 {
            Node::ExactZero { t: h / 2 }
        } else {
            let right = (h + 1).div_euclid(2);
            Node::SignChange {
                left: right - 1,
                right,
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    nodes: Vec<Node>,
    tolerance: f64,
}

impl NodeSet {
    /// Nodes must be strictly increasing in position.
    pub fn new(nodes: Vec<Node>, tolerance: f64) -> Result<Self> {
        if nodes
            .windows(2)
            .any(|w| w[0].half_steps() >= w[1].half_steps())
        {
            return Err(Error::Domain(
                "node positions must be strictly increasing".into(),
            ));
        }
        Ok(Self { nodes, tolerance })
    }

    pub fn from_positions(positions: &[f64]) -> Result<Self> {
        let nodes = positions
            .iter()
            .map(|&x| {
                Node::from_position(x)
                    .ok_or_else(|| Error::Domain(format!("{x} is not a node position")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(nodes, 0.0)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.nodes.iter().map(Node::position).collect()
    }

    fn any_strictly_between(&self, lo: i64, hi: i64) -> bool {
        self.nodes
            .iter()
            .any(|n| n.half_steps() > lo && n.half_steps() < hi)
    }
}

impl Serialize for NodeSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.nodes.iter().map(Node::position))
    }
}

pub fn find_generalized_zeros<T: Scalar>(u: &GridFunction<T>, tol: f64) -> Result<NodeSet> {
    let values: Vec<f64> = u.values().iter().map(T::to_f64).collect();
    let norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if norm == 0.0 {
        return Err(Error::TrivialSolution);
    }
    let is_zero: Vec<bool> = values.iter().map(|v| v.abs() <= tol * norm).collect();
    let grid = u.grid();
    let mut nodes = Vec::new();
    for i in 0..values.len() {
        if is_zero[i] {
            nodes.push(Node::ExactZero { t: grid.point(i) });
        } else if i > 0 && !is_zero[i - 1] && values[i - 1] * values[i] < 0.0 {
            nodes.push(Node::SignChange {
                left: grid.point(i - 1),
                right: grid.point(i),
            });
        }
    }
    NodeSet::new(nodes, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Consecutive zeros of `u` with no zero of `v` strictly between them.
    NoZeroBetween {
        left: f64,
        right: f64,
    },
    CountDeficit {
        zeros_u: usize,
        zeros_v: usize,
    },
    /// The `k`-th zero of `v` (1-based) is not strictly left of the `k`-th zero of `u`.
    OrderFailure {
        k: usize,
        u_position: f64,
        v_position: f64,
    },
}

impl Witness {
    /// Confirms the violation from the zero sets alone.
    pub fn recheck(&self, zu: &NodeSet, zv: &NodeSet) -> bool {
        match *self {
            Witness::NoZeroBetween { left, right } => {
                let pu = zu.positions();
                let consecutive = pu.windows(2).any(|w| w[0] == left && w[1] == right);
                consecutive && !zv.positions().iter().any(|&x| x > left && x < right)
            }
            Witness::CountDeficit { zeros_u, zeros_v } => {
                zeros_u == zu.len() && zeros_v == zv.len() && zeros_v < zeros_u
            }
            Witness::OrderFailure {
                k,
                u_position,
                v_position,
            } => {
                k >= 1
                    && zu.positions().get(k - 1) == Some(&u_position)
                    && zv.positions().get(k - 1) == Some(&v_position)
                    && v_position >= u_position
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    VacuouslyHolds,
    Violated { witness: Witness },
}

impl Verdict {
    /// True for both `Holds` and `VacuouslyHolds`.
    pub fn holds(&self) -> bool {
        !matches!(self, Verdict::Violated { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::VacuouslyHolds => "vacuously_holds",
            Verdict::Violated { .. } => "violated",
        }
    }
}

/// Between every two consecutive zeros of `u` lies a zero of `v`.
pub fn check_first_comparison(zu: &NodeSet, zv: &NodeSet) -> Verdict {
    if zu.len() < 2 {
        return Verdict::VacuouslyHolds;
    }
    for w in zu.nodes().windows(2) {
        if !zv.any_strictly_between(w[0].half_steps(), w[1].half_steps()) {
            return Verdict::Violated {
                witness: Witness::NoZeroBetween {
                    left: w[0].position(),
                    right: w[1].position(),
                },
            };
        }
    }
    Verdict::Holds
}

/// `v` has at least as many zeros as `u`, and its `k`-th zero lies strictly
/// left of the `k`-th zero of `u`.
pub fn check_second_comparison(zu: &NodeSet, zv: &NodeSet) -> Verdict {
    if zv.len() < zu.len() {
        return Verdict::Violated {
            witness: Witness::CountDeficit {
                zeros_u: zu.len(),
                zeros_v: zv.len(),
            },
        };
    }
    for (k, (nu, nv)) in zu.nodes().iter().zip(zv.nodes()).enumerate() {
        if nv.half_steps() >= nu.half_steps() {
            return Verdict::Violated {
                witness: Witness::OrderFailure {
                    k: k + 1,
                    u_position: nu.position(),
                    v_position: nv.position(),
                },
            };
        }
    }
    Verdict::Holds
}

/// Exact coefficient values, serialized as `"p/q"` strings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactValues(pub Vec<BigRational>);

impl ExactValues {
    pub fn constant(n: usize, c: BigRational) -> Self {
        Self(vec![c; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_grid_function<T: Scalar>(&self, grid: &GridSpec) -> Result<GridFunction<T>> {
        GridFunction::new(grid.clone(), self.0.iter().map(T::from_rational).collect())
    }
}

impl Serialize for ExactValues {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(|v| v.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Selection {
    /// 1-based eigenpair index for the `q1` equation.
    pub k1: usize,
    /// 1-based eigenpair index for the `q2` equation.
    pub k2: usize,
}

/// Two DFSL equations sharing `p` and `r` but with potentials `q1`, `q2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonProblem {
    pub variant: Variant,
    pub grid: GridSpec,
    pub mu: FracOrder,
    pub p: ExactValues,
    pub q1: ExactValues,
    pub q2: ExactValues,
    pub r: ExactValues,
    pub selection: Selection,
    pub seed: u64,
}

impl ComparisonProblem {
    pub fn backend(&self) -> Backend {
        self.mu.backend()
    }
}

/// Solutions `u`, `v` with their effective potentials `k = q1 - λ₁r`, `m = q2 - λ₂r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonPair {
    pub u: GridFunction<f64>,
    pub v: GridFunction<f64>,
    pub k: Vec<f64>,
    pub m: Vec<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub residual1: f64,
    pub residual2: f64,
}

fn build_pair_in<T: Scalar>(
    problem: &ComparisonProblem,
    opts: &EigenOptions,
) -> Result<ComparisonPair> {
    let grid = &problem.grid;
    let p = problem.p.to_grid_function::<T>(grid)?;
    let q1 = problem.q1.to_grid_function::<T>(grid)?;
    let q2 = problem.q2.to_grid_function::<T>(grid)?;
    let r = problem.r.to_grid_function::<T>(grid)?;
    let n = grid.n();
    let Selection { k1, k2 } = problem.selection;
    for k in [k1, k2] {
        if k == 0 || k > n {
            return Err(Error::SelectionOutOfRange { index: k, n });
        }
    }
    let sys1 = eigensolve(
        &assemble(problem.variant, grid, &problem.mu, &p, &q1)?,
        &r,
        opts,
    )?;
    let sys2 = eigensolve(
        &assemble(problem.variant, grid, &problem.mu, &p, &q2)?,
        &r,
        opts,
    )?;
    let (lambda1, lambda2) = (sys1.eigenvalues[k1 - 1], sys2.eigenvalues[k2 - 1]);
    let weights: Vec<f64> = r.values().iter().map(T::to_f64).collect();
    let k: Vec<f64> = q1
        .values()
        .iter()
        .zip(&weights)
        .map(|(q, w)| q.to_f64() - lambda1 * w)
        .collect();
    let m: Vec<f64> = q2
        .values()
        .iter()
        .zip(&weights)
        .map(|(q, w)| q.to_f64() - lambda2 * w)
        .collect();
    if let Some(i) = (0..n).find(|&i| !(k[i] < m[i])) {
        return Err(Error::HypothesisUnmet {
            t: grid.point(i),
            k: k[i],
            m: m[i],
        });
    }
    Ok(ComparisonPair {
        u: GridFunction::new(grid.clone(), sys1.eigenvector(k1 - 1))?,
        v: GridFunction::new(grid.clone(), sys2.eigenvector(k2 - 1))?,
        k,
        m,
        lambda1,
        lambda2,
        residual1: sys1.residuals[k1 - 1],
        residual2: sys2.residuals[k2 - 1],
    })
}

/// Assembles both operators in the problem's backend, solves them, and
/// enforces the hypothesis `k(t) < m(t)` at every interior point.
pub fn build_comparison_pair(
    problem: &ComparisonProblem,
    opts: &EigenOptions,
) -> Result<ComparisonPair> {
    match problem.backend() {
        Backend::ExactRational => build_pair_in::<BigRational>(problem, opts),
        Backend::Float64 => build_pair_in::<f64>(problem, opts),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroCounts {
    pub n_u: usize,
    pub n_v: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenSummary {
    pub lambda1: f64,
    pub lambda2: f64,
    pub residuals: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub backend: Backend,
    pub seed: u64,
    pub version: String,
    pub zero_tol: f64,
    pub eigen_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub problem: ComparisonProblem,
    pub zeros_u: NodeSet,
    pub zeros_v: NodeSet,
    pub effective_k: Vec<f64>,
    pub effective_m: Vec<f64>,
    pub verdict_first: Verdict,
    pub verdict_second: Verdict,
    /// Both predicates with the roles of `u` and `v` exchanged.
    pub verdict_first_swapped: Verdict,
    pub verdict_second_swapped: Verdict,
    pub counts: ZeroCounts,
    /// Entry `k-1` is whether the `k`-th zero of `v` lies strictly left of the `k`-th zero of `u`.
    pub kth_zero_order: Vec<bool>,
    pub eigen: EigenSummary,
    pub meta: ReportMeta,
    #[serde(skip)]
    pub runtime: Duration,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn run_comparison(problem: &ComparisonProblem, tol: f64) -> Result<ComparisonReport> {
    run_comparison_with(problem, tol, &EigenOptions::default())
}

pub fn run_comparison_with(
    problem: &ComparisonProblem,
    tol: f64,
    opts: &EigenOptions,
) -> Result<ComparisonReport> {
    let start = Instant::now();
    let pair = build_comparison_pair(problem, opts)?;
    let zu = find_generalized_zeros(&pair.u, tol)?;
    let zv = find_generalized_zeros(&pair.v, tol)?;
    let kth_zero_order = zu
        .nodes()
        .iter()
        .zip(zv.nodes())
        .map(|(nu, nv)| nv.half_steps() < nu.half_steps())
        .collect();
    Ok(ComparisonReport {
        problem: problem.clone(),
        verdict_first: check_first_comparison(&zu, &zv),
        verdict_second: check_second_comparison(&zu, &zv),
        verdict_first_swapped: check_first_comparison(&zv, &zu),
        verdict_second_swapped: check_second_comparison(&zv, &zu),
        counts: ZeroCounts {
            n_u: zu.len(),
            n_v: zv.len(),
        },
        kth_zero_order,
        zeros_u: zu,
        zeros_v: zv,
        effective_k: pair.k,
        effective_m: pair.m,
        eigen: EigenSummary {
            lambda1: pair.lambda1,
            lambda2: pair.lambda2,
            residuals: [pair.residual1, pair.residual2],
        },
        meta: ReportMeta {
            backend: problem.backend(),
            seed: problem.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            zero_tol: tol,
            eigen_tol: opts.tol,
        },
        runtime: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use num_traits::{One, Zero};

    use super::*;

    fn set(positions: &[f64]) -> NodeSet {
        NodeSet::from_positions(positions).unwrap()
    }

    fn zeros_of(values: &[f64], tol: f64) -> NodeSet {
        let g = GridSpec::with_interior(values.len()).unwrap();
        find_generalized_zeros(&GridFunction::new(g, values.to_vec()).unwrap(), tol).unwrap()
    }

    #[test]
    fn zero_detection_examples() {
        let z = zeros_of(&[1.0, -1.0, 1.0], 1e-10);
        assert_eq!(
            z.nodes(),
            &[
                Node::SignChange { left: 1, right: 2 },
                Node::SignChange { left: 2, right: 3 }
            ]
        );
        assert_eq!(z.positions(), vec![1.5, 2.5]);
        let z = zeros_of(&[1.0, 0.0, -1.0], 1e-10);
        assert_eq!(z.nodes(), &[Node::ExactZero { t: 2 }]);
        assert!(zeros_of(&[2.0, 1.0, 3.0], 1e-10).is_empty());
        let g = GridSpec::with_interior(3).unwrap();
        assert_eq!(
            find_generalized_zeros(&GridFunction::constant(g, 0.0), 1e-10),
            Err(Error::TrivialSolution)
        );
    }

    #[test]
    fn relative_tolerance() {
        let z = zeros_of(&[1e6, 1e-5, -1e6], 1e-10);
        assert_eq!(z.nodes(), &[Node::ExactZero { t: 2 }]);
        let z = zeros_of(&[1e6, 1e-3, -1e6], 1e-10);
        assert_eq!(z.nodes(), &[Node::SignChange { left: 2, right: 3 }]);
    }

    #[test]
    fn node_positions_round_trip() {
        for node in [
            Node::ExactZero { t: -3 },
            Node::SignChange { left: -1, right: 0 },
            Node::SignChange { left: 4, right: 5 },
        ] {
            assert_eq!(Node::from_position(node.position()), Some(node));
        }
        assert_eq!(Node::from_position(0.25), None);
        assert!(NodeSet::from_positions(&[2.0, 2.0]).is_err());
    }

    #[test]
    fn first_comparison_examples() {
        assert_eq!(
            check_first_comparison(&set(&[2.0, 5.0]), &set(&[3.0])),
            Verdict::Holds
        );
        let v = check_first_comparison(&set(&[2.0, 5.0]), &set(&[6.0]));
        assert_eq!(
            v,
            Verdict::Violated {
                witness: Witness::NoZeroBetween {
                    left: 2.0,
                    right: 5.0
                }
            }
        );
        assert_eq!(
            check_first_comparison(&set(&[4.0]), &set(&[])),
            Verdict::VacuouslyHolds
        );
        // endpoints do not count
        assert!(!check_first_comparison(&set(&[2.0, 5.0]), &set(&[2.0, 5.0])).holds());
    }

    #[test]
    fn second_comparison_examples() {
        assert_eq!(
            check_second_comparison(&set(&[3.0, 6.0]), &set(&[2.0, 5.0])),
            Verdict::Holds
        );
        assert_eq!(
            check_second_comparison(&set(&[3.0, 6.0]), &set(&[2.0])),
            Verdict::Violated {
                witness: Witness::CountDeficit {
                    zeros_u: 2,
                    zeros_v: 1
                }
            }
        );
        assert_eq!(
            check_second_comparison(&set(&[3.0]), &set(&[3.0])),
            Verdict::Violated {
                witness: Witness::OrderFailure {
                    k: 1,
                    u_position: 3.0,
                    v_position: 3.0
                }
            }
        );
    }

    #[test]
    fn witnesses_recheck() {
        let (zu, zv) = (set(&[2.0, 5.0]), set(&[6.0]));
        if let Verdict::Violated { witness } = check_first_comparison(&zu, &zv) {
            assert!(witness.recheck(&zu, &zv));
            assert!(!witness.recheck(&zu, &set(&[3.0])));
        } else {
            panic!("expected a violation");
        }
        let (zu, zv) = (set(&[3.0]), set(&[3.5]));
        if let Verdict::Violated { witness } = check_second_comparison(&zu, &zv) {
            assert!(witness.recheck(&zu, &zv));
        } else {
            panic!("expected a violation");
        }
    }

    fn classical_problem(n: usize, k1: usize, k2: usize) -> ComparisonProblem {
        let grid = GridSpec::with_interior(n).unwrap();
        let one = ExactValues::constant(n, BigRational::one());
        let zero = ExactValues::constant(n, BigRational::zero());
        ComparisonProblem {
            variant: Variant::GL,
            grid,
            mu: FracOrder::one(Backend::ExactRational),
            p: one.clone(),
            q1: zero.clone(),
            q2: zero,
            r: one,
            selection: Selection { k1, k2 },
            seed: 0,
        }
    }

    #[test]
    fn hypothesis_bookkeeping() {
        let opts = EigenOptions::default();
        assert!(matches!(
            build_comparison_pair(&classical_problem(9, 1, 2), &opts),
            Err(Error::HypothesisUnmet { .. })
        ));
        assert!(matches!(
            build_comparison_pair(&classical_problem(9, 2, 2), &opts),
            Err(Error::HypothesisUnmet { .. })
        ));
        assert!(matches!(
            build_comparison_pair(&classical_problem(9, 10, 1), &opts),
            Err(Error::SelectionOutOfRange { index: 10, n: 9 })
        ));
        let pair = build_comparison_pair(&classical_problem(9, 3, 1), &opts).unwrap();
        assert!(pair.k.iter().zip(&pair.m).all(|(k, m)| k < m));
    }

    #[test]
    fn shifted_potential_same_index() {
        // with r = 1 the shift moves λ by the same amount, so k and m coincide
        let mut problem = classical_problem(9, 2, 2);
        problem.q2 = ExactValues::constant(9, BigRational::new(1.into(), 2.into()));
        match build_comparison_pair(&problem, &EigenOptions::default()) {
            Err(Error::HypothesisUnmet { k, m, .. }) => assert!((m - k).abs() < 1e-12),
            Ok(pair) => {
                for (k, m) in pair.k.iter().zip(&pair.m) {
                    assert!((m - k).abs() < 1e-12);
                }
            }
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn classical_instance_report() {
        // u = 3rd eigenvector (two sign changes), v = 1st (none)
        let report = run_comparison(&classical_problem(9, 3, 1), DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(report.counts, ZeroCounts { n_u: 2, n_v: 0 });
        let Verdict::Violated { witness } = report.verdict_first else {
            panic!("v has no zero to interlace");
        };
        assert!(witness.recheck(&report.zeros_u, &report.zeros_v));
        assert!(matches!(
            report.verdict_second,
            Verdict::Violated {
                witness: Witness::CountDeficit {
                    zeros_u: 2,
                    zeros_v: 0
                }
            }
        ));
        assert_eq!(report.verdict_first_swapped, Verdict::VacuouslyHolds);
        assert!(report.kth_zero_order.is_empty());
    }

    #[test]
    fn report_json_is_stable() {
        let problem = classical_problem(9, 3, 2);
        let a = run_comparison(&problem, DEFAULT_ZERO_TOL)
            .unwrap()
            .to_json();
        let b = run_comparison(&problem, DEFAULT_ZERO_TOL)
            .unwrap()
            .to_json();
        assert_eq!(a, b);
        let parsed: serde_json::Value = serde_json::from_str(&a).unwrap();
        for key in [
            "problem",
            "zeros_u",
            "zeros_v",
            "effective_k",
            "effective_m",
            "verdict_first",
            "verdict_second",
            "eigen",
            "meta",
        ] {
            assert!(parsed.get(key).is_some(), "missing {key}");
        }
        assert_eq!(parsed["problem"]["mu"]["mu"], "1");
        assert_eq!(parsed["meta"]["backend"], "rational");
    }
}
