//! Scalar special functions and the coefficient sequences (kernels) behind
//! every fractional operator.
//!
//! All kernels come from multiplicative recurrences, so for a rational order
//! they are exact in the [`BigRational`] backend. Gamma is only ever evaluated
//! by [`log_gamma`] and the float paths of the factorial functions.

use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Backend, Scalar};

/// Fractional order `mu = num/den` in `(0, 1]`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FracOrder {
    num: i64,
    den: i64,
    backend: Backend,
}

impl FracOrder {
    pub fn new(num: i64, den: i64, backend: Backend) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidOrder { num, den });
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = -num;
            den = -den;
        }
        if num <= 0 || num > den {
            return Err(Error::InvalidOrder { num, den });
        }
        Ok(Self { num, den, backend })
    }

    /// Accepts `"p/q"` or a decimal literal such as `"0.999"`.
    pub fn parse(text: &str, backend: Backend) -> Result<Self> {
        let r = parse_rational(text).map_err(Error::Domain)?;
        let num = i64::try_from(r.numer())
            .map_err(|_| Error::Domain(format!("order {text} too large")))?;
        let den = i64::try_from(r.denom())
            .map_err(|_| Error::Domain(format!("order {text} too large")))?;
        Self::new(num, den, backend)
    }

    pub fn one(backend: Backend) -> Self {
        Self {
            num: 1,
            den: 1,
            backend,
        }
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> i64 {
        self.den
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn with_backend(self, backend: Backend) -> Self {
        Self { backend, ..self }
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn as_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    pub fn value<T: Scalar>(&self) -> T {
        T::from_ratio(self.num, self.den)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for FracOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for FracOrder {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("FracOrder", 2)?;
        s.serialize_field("mu", &self.to_string())?;
        s.serialize_field("backend", &self.backend)?;
        s.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum KernelKind {
    /// weights of the nabla fractional sum
    RLSum,
    /// weights of the Riemann-Liouville nabla fractional difference
    RLDiff,
    /// Grünwald-Letnikov coefficients
    GL,
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::RLSum => "rl_sum",
            KernelKind::RLDiff => "rl_diff",
            KernelKind::GL => "gl",
        })
    }
}

impl std::str::FromStr for KernelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rl_sum" => Ok(KernelKind::RLSum),
            "rl_diff" => Ok(KernelKind::RLDiff),
            "gl" => Ok(KernelKind::GL),
            other => Err(format!(
                "unknown kernel {other:?} (expected \"rl_sum\", \"rl_diff\" or \"gl\")"
            )),
        }
    }
}

/// Lag-indexed coefficients: `coeffs[j]` multiplies the value `j` steps away.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSeq<T> {
    pub kind: KernelKind,
    pub mu: FracOrder,
    pub coeffs: Vec<T>,
}

impl<T> KernelSeq<T> {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

fn check_len(len: usize) -> Result<()> {
    if len == 0 {
        Err(Error::Domain("kernel length must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `c_j = Γ(j+ν)/(Γ(ν) j!)` by `c_{j+1} = c_j (j+ν)/(j+1)`. Valid for any `ν >= 0`;
/// `ν = 0` gives the identity kernel `[1, 0, 0, ...]`.
fn sum_weights<T: Scalar>(order: T, len: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(len);
    let mut c = T::one();
    for j in 0..len {
        out.push(c.clone());
        let jt = T::from_int(j as i64);
        c = c * (jt.clone() + order.clone()) / (jt + T::one());
    }
    out
}

pub fn rl_sum_kernel<T: Scalar>(mu: &FracOrder, len: usize) -> Result<KernelSeq<T>> {
    check_len(len)?;
    Ok(KernelSeq {
        kind: KernelKind::RLSum,
        mu: *mu,
        coeffs: sum_weights(mu.value::<T>(), len),
    })
}

/// `b_s = (-1)^s mu(mu-1)...(mu-s+1)/s!` by `b_{s+1} = b_s (s-mu)/(s+1)`.
pub fn gl_kernel<T: Scalar>(mu: &FracOrder, len: usize) -> Result<KernelSeq<T>> {
    check_len(len)?;
    let m = mu.value::<T>();
    let mut coeffs = Vec::with_capacity(len);
    let mut b = T::one();
    for s in 0..len {
        coeffs.push(b.clone());
        let st = T::from_int(s as i64);
        b = b * (st.clone() - m.clone()) / (st + T::one());
    }
    Ok(KernelSeq {
        kind: KernelKind::GL,
        mu: *mu,
        coeffs,
    })
}

/// Backward difference of the order `1-mu` sum weights: `d_0 = 1`,
/// `d_j = c_j - c_{j-1}` with `c = sum_weights(1-mu)`.
///
/// The difference is evaluated as `c_{j-1} ((j-mu)/j - 1) = -mu c_{j-1} / j`,
/// which is the same number without the cancellation in the float backend.
/// At `mu = 1` this is the plain backward difference `[1, -1, 0, ...]`.
pub fn rl_diff_kernel<T: Scalar>(mu: &FracOrder, len: usize) -> Result<KernelSeq<T>> {
    check_len(len)?;
    let m = mu.value::<T>();
    let c = sum_weights(T::one() - m.clone(), len);
    let mut coeffs = Vec::with_capacity(len);
    coeffs.push(T::one());
    for j in 1..len {
        coeffs.push(-(m.clone() * c[j - 1].clone()) / T::from_int(j as i64));
    }
    Ok(KernelSeq {
        kind: KernelKind::RLDiff,
        mu: *mu,
        coeffs,
    })
}

pub fn kernel<T: Scalar>(kind: KernelKind, mu: &FracOrder, len: usize) -> Result<KernelSeq<T>> {
    match kind {
        KernelKind::RLSum => rl_sum_kernel(mu, len),
        KernelKind::RLDiff => rl_diff_kernel(mu, len),
        KernelKind::GL => gl_kernel(mu, len),
    }
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `zeta(k) - 1` for `k = 2..=30`.
#[allow(clippy::excessive_precision)]
const ZETA_MINUS_ONE: [f64; 29] = [
    0.644_934_066_848_226_4,
    0.202_056_903_159_594_3,
    0.082_323_233_711_138_19,
    0.036_927_755_143_369_93,
    0.017_343_061_984_449_14,
    0.008_349_277_381_922_827,
    0.004_077_356_197_944_339,
    0.002_008_392_826_082_214,
    0.000_994_575_127_818_085_3,
    0.000_494_188_604_119_464_6,
    0.000_246_086_553_308_048_3,
    0.000_122_713_347_578_489_1,
    6.124_813_505_870_483e-5,
    3.058_823_630_702_049e-5,
    1.528_225_940_865_187e-5,
    7.637_197_637_899_762e-6,
    3.817_293_264_999_84e-6,
    1.908_212_716_553_939e-6,
    9.539_620_338_727_961e-7,
    4.769_329_867_878_065e-7,
    2.384_505_027_277_33e-7,
    1.192_199_259_653_111e-7,
    5.960_818_905_125_948e-8,
    2.980_350_351_465_228e-8,
    1.490_155_482_836_504e-8,
    7.450_711_789_835_429e-9,
    3.725_334_024_788_457e-9,
    1.862_659_723_513_049e-9,
    9.313_274_324_196_682e-10,
];

/// `ln Γ(2+z)` for `|z| <= 1/2` from its Taylor series about 2.
fn log_gamma_near_two(z: f64) -> f64 {
    let mut sum = (1.0 - EULER_GAMMA) * z;
    let mut zk = -z;
    for (i, zeta) in ZETA_MINUS_ONE.iter().enumerate() {
        let k = i + 2;
        zk *= -z;
        sum += zeta * zk / k as f64;
    }
    sum
}

/// Stirling series, accurate to full precision for `x >= 10`.
fn log_gamma_stirling(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for c in COEFFS {
        series += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// Natural log of Γ(x) for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    if x >= 10.0 {
        return Ok(log_gamma_stirling(x));
    }
    if x < 0.5 {
        return Ok(log_gamma(x + 1.0)? - x.ln());
    }
    if x < 1.5 {
        // Γ(x) = Γ(2+z)/(1+z) with z = x-1 exact, so no rounding enters near x = 1
        let z = x - 1.0;
        return Ok(log_gamma_near_two(z) - z.ln_1p());
    }
    // reduce into [1.5, 2.5)
    let mut y = x;
    let mut prod = 1.0;
    while y >= 2.5 {
        y -= 1.0;
        prod *= y;
    }
    Ok(log_gamma_near_two(y - 2.0) + prod.ln())
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// `(ln |Γ(x)|, sign Γ(x))` for any non-pole real `x`.
fn log_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x > 0.0 {
        return Ok((log_gamma(x)?, 1.0));
    }
    if is_pole(x) {
        return Err(Error::Domain(format!("Γ has a pole at {x}")));
    }
    let s = (PI * x).sin();
    Ok((PI.ln() - s.abs().ln() - log_gamma(1.0 - x)?, s.signum()))
}

fn as_nonnegative_int(x: f64) -> Option<u64> {
    (x >= 0.0 && x.fract() == 0.0 && x < 1e15).then_some(x as u64)
}

/// Ratio `Γ(top)/Γ(bottom)` via logs.
fn gamma_ratio(top: f64, bottom: f64) -> Result<f64> {
    let (lt, st) = log_gamma_signed(top)?;
    let (lb, sb) = log_gamma_signed(bottom)?;
    Ok(st * sb * (lt - lb).exp())
}

/// `t^(α) = Γ(t+1)/Γ(t-α+1)`; a plain product when α is a nonnegative integer.
pub fn falling_factorial<T: Scalar>(t: T, alpha: T) -> Result<T> {
    let (tf, af) = (t.to_f64(), alpha.to_f64());
    if is_pole(tf + 1.0) || is_pole(tf - af + 1.0) {
        return Err(Error::Domain(format!(
            "falling factorial {tf}^({af}) hits a gamma pole"
        )));
    }
    if let Some(k) = as_nonnegative_int(af).filter(|_| T::from_int(af as i64) == alpha) {
        let mut acc = T::one();
        for i in 0..k {
            acc = acc * (t.clone() - T::from_int(i as i64));
        }
        return Ok(acc);
    }
    if T::BACKEND == Backend::ExactRational {
        return Err(Error::Domain(
            "exact falling factorial needs a nonnegative integer exponent".into(),
        ));
    }
    Ok(from_f64::<T>(gamma_ratio(tf + 1.0, tf - af + 1.0)?))
}

/// `t^(α rising) = Γ(t+α)/Γ(t)`; a plain product when α is a nonnegative integer.
pub fn rising_factorial<T: Scalar>(t: T, alpha: T) -> Result<T> {
    let (tf, af) = (t.to_f64(), alpha.to_f64());
    if is_pole(tf) || is_pole(tf + af) {
        return Err(Error::Domain(format!(
            "rising factorial {tf}^({af}) hits a gamma pole"
        )));
    }
    if let Some(k) = as_nonnegative_int(af).filter(|_| T::from_int(af as i64) == alpha) {
        let mut acc = T::one();
        for i in 0..k {
            acc = acc * (t.clone() + T::from_int(i as i64));
        }
        return Ok(acc);
    }
    if T::BACKEND == Backend::ExactRational {
        return Err(Error::Domain(
            "exact rising factorial needs a nonnegative integer exponent".into(),
        ));
    }
    Ok(from_f64::<T>(gamma_ratio(tf + af, tf)?))
}

fn from_f64<T: Scalar>(v: f64) -> T {
    let r = BigRational::from_float(v).unwrap_or_default();
    T::from_rational(&r)
}
