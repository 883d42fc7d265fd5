//! Discrete fractional Sturm-Liouville operators
//! `L = M_left · diag(p) · M_right + diag(q)` and their weighted eigenproblems.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frackernel::FracOrder;
use crate::matrix::DenseMatrix;
use crate::operators::{build_operator, ensure_same_grid, GridFunction, GridSpec, OperatorKind};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    /// Riemann-Liouville nabla left/right differences.
    RL,
    /// Grünwald-Letnikov delta left/right differences.
    GL,
}

impl Variant {
    pub fn operator_pair(self) -> (OperatorKind, OperatorKind) {
        match self {
            Variant::RL => (OperatorKind::NablaLeftDiff, OperatorKind::NablaRightDiff),
            Variant::GL => (OperatorKind::DeltaLeftDiff, OperatorKind::DeltaRightDiff),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "RL" | "rl" => Ok(Variant::RL),
            "GL" | "gl" => Ok(Variant::GL),
            other => Err(format!(
                "unknown variant {other:?} (expected \"RL\" or \"GL\")"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfslOperator<T> {
    pub variant: Variant,
    pub grid: GridSpec,
    pub mu: FracOrder,
    pub p: GridFunction<T>,
    pub q: GridFunction<T>,
    /// `M_left · diag(p) · M_right`, the potential-free part.
    pub principal: DenseMatrix<T>,
    /// `principal + diag(q)`.
    pub matrix: DenseMatrix<T>,
}

impl<T: Scalar> DfslOperator<T> {
    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn apply(&self, u: &GridFunction<T>) -> Result<GridFunction<T>> {
        ensure_same_grid(&self.grid, u.grid())?;
        GridFunction::new(self.grid.clone(), self.matrix.mul_vec(u.values()))
    }
}

fn ensure_positive<T: Scalar>(what: &'static str, f: &GridFunction<T>) -> Result<()> {
    match f.values().iter().position(|v| *v <= T::zero()) {
        Some(index) => Err(Error::NonPositive {
            what,
            index,
            value: f.values()[index].to_f64(),
        }),
        None => Ok(()),
    }
}

pub fn assemble<T: Scalar>(
    variant: Variant,
    grid: &GridSpec,
    mu: &FracOrder,
    p: &GridFunction<T>,
    q: &GridFunction<T>,
) -> Result<DfslOperator<T>> {
    ensure_same_grid(grid, p.grid())?;
    ensure_same_grid(grid, q.grid())?;
    ensure_positive("p", p)?;
    let (left_kind, right_kind) = variant.operator_pair();
    let left = build_operator::<T>(left_kind, mu, grid)?;
    let right = build_operator::<T>(right_kind, mu, grid)?;
    let principal = left.entries.matmul(&right.entries.scale_rows(p.values()));
    let matrix = principal.add_diagonal(q.values());
    Ok(DfslOperator {
        variant,
        grid: grid.clone(),
        mu: *mu,
        p: p.clone(),
        q: q.clone(),
        principal,
        matrix,
    })
}

/// `Σ_s [v(s)(L₀u)(s) - u(s)(L₀v)(s)]` with `L₀` the potential-free part.
pub fn lagrange_sum<T: Scalar>(
    op: &DfslOperator<T>,
    u: &GridFunction<T>,
    v: &GridFunction<T>,
) -> Result<T> {
    ensure_same_grid(&op.grid, u.grid())?;
    ensure_same_grid(&op.grid, v.grid())?;
    let lu = op.principal.mul_vec(u.values());
    let lv = op.principal.mul_vec(v.values());
    let sum = (0..op.n()).fold(T::zero(), |acc, i| {
        acc + v.values()[i].clone() * lu[i].clone() - u.values()[i].clone() * lv[i].clone()
    });
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Rotation stops once every off-diagonal entry is at most `tol · ‖A‖_F`.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            max_sweeps: 100,
        }
    }
}

impl EigenOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` pairs with `eigenvalues[k]`; columns are `r`-orthonormal.
    pub eigenvectors: DenseMatrix<f64>,
    pub residuals: Vec<f64>,
    pub sweeps: usize,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.column(k)
    }
}

/// Solves `L u = λ diag(r) u` through the congruence `C = R^{-1/2} L R^{-1/2}`,
/// diagonalized by cyclic Jacobi rotations.
///
/// Each eigenvector is signed so that its largest-magnitude component
/// (first one on ties) is positive.
pub fn eigensolve<T: Scalar>(
    op: &DfslOperator<T>,
    r: &GridFunction<T>,
    opts: &EigenOptions,
) -> Result<EigenSystem> {
    ensure_same_grid(&op.grid, r.grid())?;
    ensure_positive("r", r)?;
    if !(opts.tol >= 1e-14) {
        return Err(Error::Domain(format!(
            "tolerance must be >= 1e-14, got {}",
            opts.tol
        )));
    }
    let n = op.n();
    let weights: Vec<f64> = r.values().iter().map(T::to_f64).collect();
    let inv_sqrt: Vec<f64> = weights.iter().map(|w| 1.0 / w.sqrt()).collect();
    let l = op.matrix.to_f64();
    let mut c = DenseMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            c[(i, j)] = inv_sqrt[i] * l[(i, j)] * inv_sqrt[j];
        }
    }
    // symmetrize away representation error
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = m;
            c[(j, i)] = m;
        }
    }
    let (values, vectors, sweeps) = jacobi_eigen(c, opts)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[x].total_cmp(&values[y]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let mut eigenvectors = DenseMatrix::<f64>::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut u: Vec<f64> = (0..n).map(|i| inv_sqrt[i] * vectors[(i, k)]).collect();
        let lead = u.iter().enumerate().fold(
            0,
            |best, (i, v)| if v.abs() > u[best].abs() { i } else { best },
        );
        if u[lead] < 0.0 {
            u.iter_mut().for_each(|v| *v = -*v);
        }
        for (i, v) in u.into_iter().enumerate() {
            eigenvectors[(i, col)] = v;
        }
    }
    let residuals = (0..n)
        .map(|k| residual_f64(&l, &weights, eigenvalues[k], &eigenvectors.column(k)))
        .collect();
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
        residuals,
        sweeps,
    })
}

/// Cyclic Jacobi on a symmetric matrix; returns unsorted eigenvalues,
/// the accumulated rotation (eigenvectors in columns) and the sweep count.
pub(crate) fn jacobi_eigen(
    mut a: DenseMatrix<f64>,
    opts: &EigenOptions,
) -> Result<(Vec<f64>, DenseMatrix<f64>, usize)> {
    let n = a.rows();
    let mut v = DenseMatrix::<f64>::identity(n);
    let threshold = opts.tol * a.frobenius_norm();
    let max_off = |a: &DenseMatrix<f64>| {
        let mut m = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                m = m.max(a[(i, j)].abs());
            }
        }
        m
    };
    let mut sweeps = 0;
    loop {
        let off = max_off(&a);
        if off <= threshold {
            break;
        }
        if sweeps == opts.max_sweeps {
            return Err(Error::NoConvergence {
                sweeps,
                off_diagonal: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= threshold {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                // signum(0.0) == 1.0, so equal diagonals rotate by pi/4
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[(i, i)]).collect();
    Ok((values, v, sweeps))
}

fn residual_f64(l: &DenseMatrix<f64>, r: &[f64], lambda: f64, u: &[f64]) -> f64 {
    l.mul_vec(u)
        .iter()
        .zip(r.iter().zip(u))
        .map(|(lu, (ri, ui))| {
            let d = lu - lambda * ri * ui;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// `‖L u − λ diag(r) u‖₂`, evaluated in floating point.
pub fn residual<T: Scalar>(
    op: &DfslOperator<T>,
    r: &GridFunction<T>,
    lambda: f64,
    u: &GridFunction<f64>,
) -> Result<f64> {
    ensure_same_grid(&op.grid, r.grid())?;
    ensure_same_grid(&op.grid, u.grid())?;
    let weights: Vec<f64> = r.values().iter().map(T::to_f64).collect();
    Ok(residual_f64(
        &op.matrix.to_f64(),
        &weights,
        lambda,
        u.values(),
    ))
}

/// Largest entry of `|UᵀRU − I|`.
pub fn weighted_orthonormality_defect(system: &EigenSystem, r: &[f64]) -> f64 {
    let n = system.len();
    let u = &system.eigenvectors;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let g: f64 = (0..n).map(|k| u[(k, i)] * r[k] * u[(k, j)]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;
    use crate::scalar::Backend;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn unit_fns<T: Scalar>(grid: &GridSpec) -> (GridFunction<T>, GridFunction<T>) {
        (
            GridFunction::constant(grid.clone(), T::one()),
            GridFunction::constant(grid.clone(), T::zero()),
        )
    }

    #[test]
    fn classical_gl_matrix() {
        let g = GridSpec::with_interior(3).unwrap();
        let (p, zero) = unit_fns::<Q>(&g);
        let op = assemble(
            Variant::GL,
            &g,
            &FracOrder::one(Backend::ExactRational),
            &p,
            &zero,
        )
        .unwrap();
        let expected = [[1, -1, 0], [-1, 2, -1], [0, -1, 2]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(op.matrix[(i, j)], q(expected[i][j], 1));
            }
        }
    }

    #[test]
    fn rl_half_is_toeplitz_gram() {
        let g = GridSpec::with_interior(3).unwrap();
        let mu = FracOrder::new(1, 2, Backend::ExactRational).unwrap();
        let (p, zero) = unit_fns::<Q>(&g);
        let op = assemble(Variant::RL, &g, &mu, &p, &zero).unwrap();
        let col = [q(1, 1), q(-1, 2), q(-1, 8)];
        let mut t = DenseMatrix::<Q>::zeros(3, 3);
        for i in 0..3 {
            for j in 0..=i {
                t[(i, j)] = col[i - j].clone();
            }
        }
        assert_eq!(op.matrix, t.matmul(&t.transpose()));
    }

    #[test]
    fn potential_is_a_diagonal_shift() {
        let g = GridSpec::with_interior(5).unwrap();
        let mu = FracOrder::new(2, 3, Backend::ExactRational).unwrap();
        let (p, zero) = unit_fns::<Q>(&g);
        let c = GridFunction::constant(g.clone(), q(7, 3));
        for variant in [Variant::RL, Variant::GL] {
            let base = assemble(variant, &g, &mu, &p, &zero).unwrap();
            let shifted = assemble(variant, &g, &mu, &p, &c).unwrap();
            assert_eq!(shifted.matrix, base.matrix.add_diagonal(c.values()));
        }
    }

    #[test]
    fn assemble_rejects_bad_inputs() {
        let g = GridSpec::with_interior(3).unwrap();
        let mu = FracOrder::new(1, 2, Backend::Float64).unwrap();
        let bad_p = GridFunction::new(g.clone(), vec![1.0, 0.0, 1.0]).unwrap();
        let zero = GridFunction::constant(g.clone(), 0.0);
        assert!(matches!(
            assemble(Variant::RL, &g, &mu, &bad_p, &zero),
            Err(Error::NonPositive {
                what: "p",
                index: 1,
                ..
            })
        ));
        let other = GridSpec::with_interior(4).unwrap();
        let p = GridFunction::constant(g.clone(), 1.0);
        let wrong_q = GridFunction::constant(other, 0.0);
        assert!(matches!(
            assemble(Variant::GL, &g, &mu, &p, &wrong_q),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn lagrange_sum_vanishes() {
        let g = GridSpec::with_interior(8).unwrap();
        let mu = FracOrder::new(1, 2, Backend::ExactRational).unwrap();
        let p = GridFunction::from_fn(g.clone(), |t| q(t + 1, 2));
        let qf = GridFunction::from_fn(g.clone(), |t| q(t * t - 5, 1));
        let op = assemble(Variant::GL, &g, &mu, &p, &qf).unwrap();
        let u = GridFunction::from_fn(g.clone(), |t| q((t * 7) % 5 - 2, 1));
        let v = GridFunction::from_fn(g.clone(), |t| q((t * 3) % 7 - 3, 1));
        assert_eq!(lagrange_sum(&op, &u, &v).unwrap(), q(0, 1));
        assert_eq!(lagrange_sum(&op, &u, &u).unwrap(), q(0, 1));
    }

    #[test]
    fn diagonal_eigenproblem() {
        let g = GridSpec::with_interior(3).unwrap();
        let mu = FracOrder::new(1, 2, Backend::Float64).unwrap();
        let (p, zero) = unit_fns::<f64>(&g);
        let mut op = assemble(Variant::GL, &g, &mu, &p, &zero).unwrap();
        op.matrix = DenseMatrix::from_diagonal(&[3.0, 1.0, 2.0]);
        let r = GridFunction::constant(g.clone(), 1.0);
        let sys = eigensolve(&op, &r, &EigenOptions::default()).unwrap();
        assert_eq!(sys.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert_eq!(sys.eigenvector(0), vec![0.0, 1.0, 0.0]);
        assert_eq!(sys.eigenvector(1), vec![0.0, 0.0, 1.0]);
        assert_eq!(sys.eigenvector(2), vec![1.0, 0.0, 0.0]);
        assert_eq!(sys.sweeps, 0);
    }

    #[test]
    fn eigensolve_rejects_bad_weight_and_tol() {
        let g = GridSpec::with_interior(3).unwrap();
        let mu = FracOrder::new(1, 2, Backend::Float64).unwrap();
        let (p, zero) = unit_fns::<f64>(&g);
        let op = assemble(Variant::GL, &g, &mu, &p, &zero).unwrap();
        let r = GridFunction::new(g.clone(), vec![1.0, -1.0, 1.0]).unwrap();
        assert!(matches!(
            eigensolve(&op, &r, &EigenOptions::default()),
            Err(Error::NonPositive { what: "r", .. })
        ));
        let r = GridFunction::constant(g.clone(), 1.0);
        assert!(eigensolve(&op, &r, &EigenOptions::with_tol(1e-16)).is_err());
    }

    #[test]
    fn sweep_cap_is_reported() {
        let g = GridSpec::with_interior(6).unwrap();
        let mu = FracOrder::new(1, 3, Backend::Float64).unwrap();
        let (p, zero) = unit_fns::<f64>(&g);
        let op = assemble(Variant::RL, &g, &mu, &p, &zero).unwrap();
        let r = GridFunction::constant(g.clone(), 1.0);
        let opts = EigenOptions {
            tol: 1e-14,
            max_sweeps: 1,
        };
        assert!(matches!(
            eigensolve(&op, &r, &opts),
            Err(Error::NoConvergence { sweeps: 1, .. })
        ));
    }

    #[test]
    fn residual_edge_cases() {
        let g = GridSpec::with_interior(5).unwrap();
        let mu = FracOrder::one(Backend::Float64);
        let (p, zero) = unit_fns::<f64>(&g);
        let op = assemble(Variant::GL, &g, &mu, &p, &zero).unwrap();
        let r = GridFunction::constant(g.clone(), 1.0);
        let u0 = GridFunction::constant(g.clone(), 0.0);
        assert_eq!(residual(&op, &r, 1.3, &u0).unwrap(), 0.0);

        let sys = eigensolve(&op, &r, &EigenOptions::default()).unwrap();
        let u = sys.eigenvector(2);
        let lambda = sys.eigenvalues[2];
        let mut last = residual(
            &op,
            &r,
            lambda,
            &GridFunction::new(g.clone(), u.clone()).unwrap(),
        )
        .unwrap();
        assert!(last <= 1e-10);
        for eps in [1e-6, 1e-4, 1e-2] {
            let mut w = u.clone();
            w[0] += eps;
            let res = residual(&op, &r, lambda, &GridFunction::new(g.clone(), w).unwrap()).unwrap();
            assert!(res > last);
            last = res;
        }
    }
}
