//! C ABI over `dfsl-core`.
//!
//! Conventions:
//! - every fallible function returns a [`DfslStatus`]; on failure the message
//!   is available from [`dfsl_last_error`] on the same thread;
//! - output buffers are caller-allocated and passed with their length in
//!   elements; a short buffer yields `DFSL_STATUS_BUFFER_TOO_SMALL`;
//! - operators and eigen systems are opaque handles released with their
//!   `_free` function; strings returned by the library are released with
//!   [`dfsl_string_free`];
//! - numeric work runs on the `f64` backend, except [`dfsl_compare_toml`],
//!   which honours the backend named in the config.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dfsl_core::cli::{comparison_problem, parse_config_for, Command, ConfigError};
use dfsl_core::comparison::run_comparison_with;
use dfsl_core::frackernel::kernel;
use dfsl_core::{
    assemble, build_operator, check_first_comparison, check_second_comparison, eigensolve,
    find_generalized_zeros, Backend, DfslOperator as CoreOperator, EigenOptions, EigenSystem,
    Error, FracOrder, GridFunction, GridSpec, KernelKind, NodeSet, OperatorKind, Variant, Verdict,
};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfslStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidOrder = 3,
    InvalidGrid = 4,
    NonPositive = 5,
    SizeOverflow = 6,
    IrrationalScale = 7,
    NoConvergence = 8,
    TrivialSolution = 9,
    HypothesisUnmet = 10,
    BufferTooSmall = 11,
    Config = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfslKernel {
    RlSum = 0,
    RlDiff = 1,
    Gl = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfslOperatorKind {
    NablaLeftSum = 0,
    NablaRightSum = 1,
    NablaLeftDiff = 2,
    NablaRightDiff = 3,
    DeltaLeftDiff = 4,
    DeltaRightDiff = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfslVariant {
    Rl = 0,
    Gl = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfslVerdict {
    Holds = 0,
    VacuouslyHolds = 1,
    Violated = 2,
}

/// Grid `{a, a+h, ..., b}` with `h = h_num / h_den`; the interior has
/// `(b - a) - 1` points.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DfslGrid {
    pub a: i64,
    pub b: i64,
    pub h_num: i64,
    pub h_den: i64,
}

/// Assembled operator `L` on the `f64` backend.
pub struct DfslOperator(CoreOperator<f64>);

/// Eigenpairs of `L u = λ r u`, ascending.
pub struct DfslEigenSystem(EigenSystem);

struct Failure(DfslStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidOrder { .. } => DfslStatus::InvalidOrder,
            Error::InvalidGrid(_) | Error::GridMismatch { .. } => DfslStatus::InvalidGrid,
            Error::NonPositive { .. } => DfslStatus::NonPositive,
            Error::SizeOverflow { .. } => DfslStatus::SizeOverflow,
            Error::IrrationalScale { .. } => DfslStatus::IrrationalScale,
            Error::NoConvergence { .. } => DfslStatus::NoConvergence,
            Error::TrivialSolution => DfslStatus::TrivialSolution,
            Error::HypothesisUnmet { .. } => DfslStatus::HypothesisUnmet,
            _ => DfslStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure(DfslStatus::Config, e.to_string())
    }
}

type FfiResult<T = ()> = Result<T, Failure>;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> FfiResult) -> DfslStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DfslStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("internal panic: {message}"));
            DfslStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(DfslStatus::NullPointer, format!("{what} is null"))
}

fn too_small(needed: usize, given: usize) -> Failure {
    Failure(
        DfslStatus::BufferTooSmall,
        format!("buffer holds {given} elements, {needed} needed"),
    )
}

unsafe fn input<'a>(ptr: *const f64, len: usize, what: &str) -> FfiResult<&'a [f64]> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn output(out: *mut f64, out_len: usize, values: &[f64]) -> FfiResult {
    if values.len() > out_len {
        return Err(too_small(values.len(), out_len));
    }
    if values.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(null("output buffer"));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> FfiResult {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn handle<'a, T>(ptr: *const T) -> FfiResult<&'a T> {
    ptr.as_ref().ok_or_else(|| null("handle"))
}

fn order(num: i64, den: i64) -> FfiResult<FracOrder> {
    Ok(FracOrder::new(num, den, Backend::Float64)?)
}

fn grid(g: DfslGrid) -> FfiResult<GridSpec> {
    if g.h_den == 0 {
        return Err(Error::InvalidGrid("h_den must be nonzero".into()).into());
    }
    let h = BigRational::new(BigInt::from(g.h_num), BigInt::from(g.h_den));
    Ok(GridSpec::new(g.a, g.b, h)?)
}

fn grid_function(g: &GridSpec, values: &[f64]) -> FfiResult<GridFunction<f64>> {
    Ok(GridFunction::new(g.clone(), values.to_vec())?)
}

fn node_set(positions: &[f64]) -> FfiResult<NodeSet> {
    Ok(NodeSet::from_positions(positions)?)
}

fn verdict(v: Verdict) -> DfslVerdict {
    match v {
        Verdict::Holds => DfslVerdict::Holds,
        Verdict::VacuouslyHolds => DfslVerdict::VacuouslyHolds,
        Verdict::Violated { .. } => DfslVerdict::Violated,
    }
}

impl From<DfslKernel> for KernelKind {
    fn from(k: DfslKernel) -> Self {
        match k {
            DfslKernel::RlSum => KernelKind::RLSum,
            DfslKernel::RlDiff => KernelKind::RLDiff,
            DfslKernel::Gl => KernelKind::GL,
        }
    }
}

impl From<DfslOperatorKind> for OperatorKind {
    fn from(k: DfslOperatorKind) -> Self {
        match k {
            DfslOperatorKind::NablaLeftSum => OperatorKind::NablaLeftSum,
            DfslOperatorKind::NablaRightSum => OperatorKind::NablaRightSum,
            DfslOperatorKind::NablaLeftDiff => OperatorKind::NablaLeftDiff,
            DfslOperatorKind::NablaRightDiff => OperatorKind::NablaRightDiff,
            DfslOperatorKind::DeltaLeftDiff => OperatorKind::DeltaLeftDiff,
            DfslOperatorKind::DeltaRightDiff => OperatorKind::DeltaRightDiff,
        }
    }
}

impl From<DfslVariant> for Variant {
    fn from(v: DfslVariant) -> Self {
        match v {
            DfslVariant::Rl => Variant::RL,
            DfslVariant::Gl => Variant::GL,
        }
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dfsl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread (empty if none). The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dfsl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Writes the first `len` kernel coefficients for order `mu_num / mu_den`.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dfsl_kernel(
    kind: DfslKernel,
    mu_num: i64,
    mu_den: i64,
    len: usize,
    out: *mut f64,
) -> DfslStatus {
    guard(|| {
        let seq = kernel::<f64>(kind.into(), &order(mu_num, mu_den)?, len)?;
        output(out, len, &seq.coeffs)
    })
}

/// Writes the `n × n` operator matrix row-major, `n` the interior size.
///
/// # Safety
/// `out` must point to `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dfsl_operator_matrix(
    kind: DfslOperatorKind,
    mu_num: i64,
    mu_den: i64,
    grid_spec: DfslGrid,
    out: *mut f64,
    out_len: usize,
) -> DfslStatus {
    guard(|| {
        let m = build_operator::<f64>(kind.into(), &order(mu_num, mu_den)?, &grid(grid_spec)?)?;
        let flat: Vec<f64> = m.entries.to_rows().into_iter().flatten().collect();
        output(out, out_len, &flat)
    })
}

/// Assembles `L = M_left · diag(p) · M_right + diag(q)`; `p` and `q` hold
/// `n` interior values each.
///
/// # Safety
/// `p` and `q` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dfsl_assemble(
    variant: DfslVariant,
    mu_num: i64,
    mu_den: i64,
    grid_spec: DfslGrid,
    p: *const f64,
    q: *const f64,
    n: usize,
    out: *mut *mut DfslOperator,
) -> DfslStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output handle"));
        }
        let g = grid(grid_spec)?;
        let p = grid_function(&g, input(p, n, "p")?)?;
        let q = grid_function(&g, input(q, n, "q")?)?;
        let op = assemble(variant.into(), &g, &order(mu_num, mu_den)?, &p, &q)?;
        write(out, Box::into_raw(Box::new(DfslOperator(op))))
    })
}

/// Interior size of an operator, or 0 for a null handle.
///
/// # Safety
/// `op` must be null or a live handle from [`dfsl_assemble`].
#[no_mangle]
pub unsafe extern "C" fn dfsl_operator_dim(op: *const DfslOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.grid.n())
}

/// Copies the assembled matrix row-major.
///
/// # Safety
/// `op` must be a live handle; `out` must point to `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dfsl_operator_entries(
    op: *const DfslOperator,
    out: *mut f64,
    out_len: usize,
) -> DfslStatus {
    guard(|| {
        let flat: Vec<f64> = handle(op)?
            .0
            .matrix
            .to_rows()
            .into_iter()
            .flatten()
            .collect();
        output(out, out_len, &flat)
    })
}

/// # Safety
/// `op` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn dfsl_operator_free(op: *mut DfslOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Solves `L u = λ r u`. A nonpositive `tol` selects the default.
///
/// # Safety
/// `op` must be a live handle, `r` must point to `n` readable doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dfsl_eigensolve(
    op: *const DfslOperator,
    r: *const f64,
    n: usize,
    tol: f64,
    out: *mut *mut DfslEigenSystem,
) -> DfslStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output handle"));
        }
        let op = &handle(op)?.0;
        let r = grid_function(&op.grid, input(r, n, "r")?)?;
        let opts = if tol > 0.0 {
            EigenOptions::with_tol(tol)
        } else {
            EigenOptions::default()
        };
        let sys = eigensolve(op, &r, &opts)?;
        write(out, Box::into_raw(Box::new(DfslEigenSystem(sys))))
    })
}

/// Number of eigenpairs, or 0 for a null handle.
///
/// # Safety
/// `sys` must be null or a live handle from [`dfsl_eigensolve`].
#[no_mangle]
pub unsafe extern "C" fn dfsl_eigen_dim(sys: *const DfslEigenSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.eigenvalues.len())
}

/// # Safety
/// `sys` must be a live handle; `out` must point to `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dfsl_eigen_values(
    sys: *const DfslEigenSystem,
    out: *mut f64,
    out_len: usize,
) -> DfslStatus {
    guard(|| output(out, out_len, &handle(sys)?.0.eigenvalues))
}

/// Residuals `‖L u − λ r u‖₂`, one per eigenpair.
///
/// # Safety
/// `sys` must be a live handle; `out` must point to `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dfsl_eigen_residuals(
    sys: *const DfslEigenSystem,
    out: *mut f64,
    out_len: usize,
) -> DfslStatus {
    guard(|| output(out, out_len, &handle(sys)?.0.residuals))
}

/// Eigenvector `k` (0-based), r-normalized.
///
/// # Safety
/// `sys` must be a live handle; `out` must point to `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dfsl_eigen_vector(
    sys: *const DfslEigenSystem,
    k: usize,
    out: *mut f64,
    out_len: usize,
) -> DfslStatus {
    guard(|| {
        let sys = &handle(sys)?.0;
        let n = sys.eigenvalues.len();
        if k >= n {
            return Err(Error::SelectionOutOfRange { index: k, n }.into());
        }
        output(out, out_len, &sys.eigenvector(k))
    })
}

/// # Safety
/// `sys` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn dfsl_eigen_free(sys: *mut DfslEigenSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Generalized zeros of `values` (interior points `1..=n` of a unit grid)
/// as positions: an integer for a vanishing point, a half-integer for a sign
/// change. `count` receives the number found, also when the buffer is short.
///
/// # Safety
/// `values` must point to `n` readable doubles, `out` to `cap` writable
/// doubles, and `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dfsl_find_zeros(
    values: *const f64,
    n: usize,
    tol: f64,
    out: *mut f64,
    cap: usize,
    count: *mut usize,
) -> DfslStatus {
    guard(|| {
        let g = GridSpec::with_interior(n)?;
        let u = grid_function(&g, input(values, n, "values")?)?;
        let positions = find_generalized_zeros(&u, tol)?.positions();
        write(count, positions.len())?;
        output(out, cap, &positions)
    })
}

unsafe fn check(
    zu: *const f64,
    nu: usize,
    zv: *const f64,
    nv: usize,
    out: *mut DfslVerdict,
    predicate: fn(&NodeSet, &NodeSet) -> Verdict,
) -> DfslStatus {
    guard(|| {
        let zu = node_set(input(zu, nu, "zeros_u")?)?;
        let zv = node_set(input(zv, nv, "zeros_v")?)?;
        write(out, verdict(predicate(&zu, &zv)))
    })
}

/// Interlacing check: a zero of `v` strictly between consecutive zeros of `u`.
/// Zero sets are strictly increasing position arrays.
///
/// # Safety
/// `zu`/`zv` must point to `nu`/`nv` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dfsl_check_first(
    zu: *const f64,
    nu: usize,
    zv: *const f64,
    nv: usize,
    out: *mut DfslVerdict,
) -> DfslStatus {
    check(zu, nu, zv, nv, out, check_first_comparison)
}

/// Count and ordering check: `v` has at least as many zeros as `u` and each
/// `k`-th zero of `v` lies strictly left of the `k`-th zero of `u`.
///
/// # Safety
/// `zu`/`zv` must point to `nu`/`nv` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dfsl_check_second(
    zu: *const f64,
    nu: usize,
    zv: *const f64,
    nv: usize,
    out: *mut DfslVerdict,
) -> DfslStatus {
    check(zu, nu, zv, nv, out, check_second_comparison)
}

/// Runs a comparison described by a TOML config (the `compare` grammar of
/// the `dfsl` CLI) and returns the JSON report; free it with
/// [`dfsl_string_free`].
///
/// # Safety
/// `config` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dfsl_compare_toml(
    config: *const c_char,
    out: *mut *mut c_char,
) -> DfslStatus {
    guard(|| {
        if config.is_null() {
            return Err(null("config"));
        }
        if out.is_null() {
            return Err(null("output string"));
        }
        let text = CStr::from_ptr(config)
            .to_str()
            .map_err(|e| Failure(DfslStatus::Config, format!("config is not UTF-8: {e}")))?;
        let config = parse_config_for(text, Some(Command::Compare))?;
        let problem = comparison_problem(&config, config.order());
        let report = run_comparison_with(&problem, config.zero_tol, &config.eigen)?;
        let json = CString::new(report.to_json()).expect("JSON has no NUL");
        write(out, json.into_raw())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn dfsl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
