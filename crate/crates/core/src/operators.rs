//! Dense matrix realizations of the six fractional operators on a finite
//! uniform grid.
//!
//! Functions live on the interior points `t = a+1, ..., b-1` and are extended
//! by zero outside them. Under that convention every left operator is a
//! lower-triangular Toeplitz matrix, every right operator upper-triangular,
//! and each right difference is exactly the transpose of its left partner.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frackernel::{gl_kernel, rl_diff_kernel, rl_sum_kernel, FracOrder, KernelSeq};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

pub const MAX_DENSE_SIZE: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridSpec {
    a: i64,
    b: i64,
    h: BigRational,
}

impl GridSpec {
    pub fn new(a: i64, b: i64, h: BigRational) -> Result<Self> {
        if b < a.saturating_add(3) {
            return Err(Error::InvalidGrid(format!(
                "need b >= a + 3 for two interior points, got a = {a}, b = {b}"
            )));
        }
        if !h.is_positive() {
            return Err(Error::InvalidGrid(format!(
                "step h must be positive, got {h}"
            )));
        }
        Ok(Self { a, b, h })
    }

    pub fn unit(a: i64, b: i64) -> Result<Self> {
        Self::new(a, b, BigRational::one())
    }

    /// Unit-step grid `0..=n+1` with `n` interior points.
    pub fn with_interior(n: usize) -> Result<Self> {
        Self::unit(0, n as i64 + 1)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn h(&self) -> &BigRational {
        &self.h
    }

    /// Number of interior points, `b - a - 1`.
    pub fn n(&self) -> usize {
        (self.b - self.a - 1) as usize
    }

    /// Grid coordinate of interior index `i`.
    pub fn point(&self, i: usize) -> i64 {
        self.a + 1 + i as i64
    }

    pub fn points(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.n()).map(|i| self.point(i))
    }
}

impl Serialize for GridSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("GridSpec", 3)?;
        s.serialize_field("a", &self.a)?;
        s.serialize_field("b", &self.b)?;
        s.serialize_field("h", &self.h.to_string())?;
        s.end()
    }
}

/// Values of a function on the interior points; `values[i] = x(a+1+i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    grid: GridSpec,
    values: Vec<T>,
}

impl<T: Scalar> GridFunction<T> {
    pub fn new(grid: GridSpec, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::GridMismatch {
                expected: grid.n(),
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: GridSpec, c: T) -> Self {
        let values = vec![c; grid.n()];
        Self { grid, values }
    }

    pub fn from_fn(grid: GridSpec, f: impl FnMut(i64) -> T) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        ensure_same_grid(&self.grid, &other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    pub fn to_f64(&self) -> GridFunction<f64> {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(T::to_f64).collect(),
        }
    }
}

pub(crate) fn ensure_same_grid(expected: &GridSpec, found: &GridSpec) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::GridMismatch {
            expected: expected.n(),
            found: found.n(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OperatorKind {
    NablaLeftSum,
    NablaRightSum,
    NablaLeftDiff,
    NablaRightDiff,
    DeltaLeftDiff,
    DeltaRightDiff,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 6] = [
        OperatorKind::NablaLeftSum,
        OperatorKind::NablaRightSum,
        OperatorKind::NablaLeftDiff,
        OperatorKind::NablaRightDiff,
        OperatorKind::DeltaLeftDiff,
        OperatorKind::DeltaRightDiff,
    ];

    pub fn is_left(self) -> bool {
        matches!(
            self,
            OperatorKind::NablaLeftSum | OperatorKind::NablaLeftDiff | OperatorKind::DeltaLeftDiff
        )
    }

    pub fn is_grunwald_letnikov(self) -> bool {
        matches!(
            self,
            OperatorKind::DeltaLeftDiff | OperatorKind::DeltaRightDiff
        )
    }

    /// The adjoint partner under the summation-by-parts identity.
    pub fn partner(self) -> OperatorKind {
        match self {
            OperatorKind::NablaLeftSum => OperatorKind::NablaRightSum,
            OperatorKind::NablaRightSum => OperatorKind::NablaLeftSum,
            OperatorKind::NablaLeftDiff => OperatorKind::NablaRightDiff,
            OperatorKind::NablaRightDiff => OperatorKind::NablaLeftDiff,
            OperatorKind::DeltaLeftDiff => OperatorKind::DeltaRightDiff,
            OperatorKind::DeltaRightDiff => OperatorKind::DeltaLeftDiff,
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl std::str::FromStr for OperatorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        OperatorKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| format!("unknown operator kind {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<T> {
    pub kind: OperatorKind,
    pub mu: FracOrder,
    pub grid: GridSpec,
    pub entries: DenseMatrix<T>,
}

impl<T: Scalar> OperatorMatrix<T> {
    pub fn n(&self) -> usize {
        self.entries.rows()
    }
}

/// Lower (or upper) triangular Toeplitz matrix whose first column (row) is `kernel`.
fn triangular_toeplitz<T: Scalar>(kernel: &[T], scale: &T, lower: bool) -> DenseMatrix<T> {
    let n = kernel.len();
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = scale.clone() * kernel[i - j].clone();
            if lower {
                m[(i, j)] = v;
            } else {
                m[(j, i)] = v;
            }
        }
    }
    m
}

/// Builds the matrix `M` with `(M x)(t)` equal to the defining sum of `kind`
/// when `x` vanishes off the interior points.
///
/// * nabla sums: `Σ_{s=a+1}^{t} c_{t-s} x(s)` and `Σ_{s=t}^{b-1} c_{s-t} x(s)`
///   with `c_j = Γ(j+mu)/(Γ(mu) j!)`.
/// * nabla differences: the backward difference of the left sum of order
///   `1-mu`, and minus the forward difference of the right sum of order `1-mu`.
/// * delta differences: the Grünwald-Letnikov sums scaled by `h^-mu`.
pub fn build_operator<T: Scalar>(
    kind: OperatorKind,
    mu: &FracOrder,
    grid: &GridSpec,
) -> Result<OperatorMatrix<T>> {
    let n = grid.n();
    if n > MAX_DENSE_SIZE {
        return Err(Error::SizeOverflow {
            n,
            cap: MAX_DENSE_SIZE,
        });
    }
    let kernel: KernelSeq<T> = match kind {
        OperatorKind::NablaLeftSum | OperatorKind::NablaRightSum => rl_sum_kernel(mu, n)?,
        OperatorKind::NablaLeftDiff | OperatorKind::NablaRightDiff => rl_diff_kernel(mu, n)?,
        OperatorKind::DeltaLeftDiff | OperatorKind::DeltaRightDiff => gl_kernel(mu, n)?,
    };
    let scale = if kind.is_grunwald_letnikov() {
        T::inv_pow(grid.h(), mu.numer(), mu.denom())?
    } else {
        T::one()
    };
    Ok(OperatorMatrix {
        kind,
        mu: *mu,
        grid: grid.clone(),
        entries: triangular_toeplitz(&kernel.coeffs, &scale, kind.is_left()),
    })
}

pub fn apply<T: Scalar>(m: &OperatorMatrix<T>, x: &GridFunction<T>) -> Result<GridFunction<T>> {
    ensure_same_grid(&m.grid, x.grid())?;
    GridFunction::new(m.grid.clone(), m.entries.mul_vec(x.values()))
}

/// Checks the summation-by-parts identity `Σ u·(L v) = Σ v·(R u)` on random
/// integer-valued pairs and returns the largest discrepancy seen.
pub fn verify_by_parts<T: Scalar>(
    left: &OperatorMatrix<T>,
    right: &OperatorMatrix<T>,
    trials: usize,
    seed: u64,
) -> Result<T> {
    let matched = left.kind.is_left()
        && !left.kind.is_sum_kind()
        && right.kind == left.kind.partner()
        && left.mu == right.mu;
    if !matched {
        return Err(Error::MismatchedPair {
            left: format!("{}(mu={})", left.kind, left.mu),
            right: format!("{}(mu={})", right.kind, right.mu),
        });
    }
    ensure_same_grid(&left.grid, &right.grid)?;
    let grid = &left.grid;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for _ in 0..trials {
        let mut draw = || -> GridFunction<T> {
            let values = (0..grid.n())
                .map(|_| T::from_int(rng.random_range(-9..=9)))
                .collect();
            GridFunction {
                grid: grid.clone(),
                values,
            }
        };
        let u = draw();
        let v = draw();
        let lhs = u.dot(&apply(left, &v)?)?;
        let rhs = v.dot(&apply(right, &u)?)?;
        let d = (lhs - rhs).abs();
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}

impl OperatorKind {
    fn is_sum_kind(self) -> bool {
        matches!(
            self,
            OperatorKind::NablaLeftSum | OperatorKind::NablaRightSum
        )
    }
}
