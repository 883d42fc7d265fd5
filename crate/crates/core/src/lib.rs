//! Discrete fractional Sturm-Liouville operators.
//!
//! The crate builds the Riemann-Liouville nabla and Grünwald-Letnikov delta
//! fractional operators as dense matrices on a finite grid, assembles
//! `L = M_left · diag(p) · M_right + diag(q)`, solves the weighted symmetric
//! eigenproblem `L u = λ r u`, and checks Sturm-type zero interlacing between
//! solutions of two such equations.

// `!(x >= bound)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod comparison;
pub mod dfsl;
pub mod error;
pub mod frackernel;
pub mod matrix;
pub mod operators;
pub mod scalar;

pub use comparison::{
    check_first_comparison, check_second_comparison, find_generalized_zeros, run_comparison,
    ComparisonProblem, ComparisonReport, Node, NodeSet, Verdict, Witness,
};
pub use dfsl::{
    assemble, eigensolve, lagrange_sum, residual, DfslOperator, EigenOptions, EigenSystem, Variant,
};
pub use error::{Error, Result};
pub use frackernel::{gl_kernel, rl_diff_kernel, rl_sum_kernel, FracOrder, KernelKind, KernelSeq};
pub use matrix::DenseMatrix;
pub use operators::{
    apply, build_operator, verify_by_parts, GridFunction, GridSpec, OperatorKind, OperatorMatrix,
};
pub use scalar::{Backend, Scalar};
