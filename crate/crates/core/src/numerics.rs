//! Exact and log-domain combinatorics, compensated summation and the Gaussian tail.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Exact non-negative count.
pub type BigCount = BigUint;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("log_binomial({n}, {k}) is outside 0 <= k <= n")]
    Domain { n: i64, k: i64 },
    #[error("non-finite intermediate value in {0}")]
    NonFinite(&'static str),
}

/// C(n, k) exactly. Zero when k < 0, k > n or n < 0.
pub fn binomial(n: i64, k: i64) -> BigCount {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// C(n, k) as f64 with the same zero convention as [`binomial`].
pub fn binomial_f64(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if k <= 1000 {
        let mut acc = 1.0f64;
        for i in 1..=k {
            acc = acc * ((n - k + i) as f64) / (i as f64);
        }
        acc.round_if_small()
    } else {
        log_binomial_unchecked(n, k).exp()
    }
}

trait RoundIfSmall {
    fn round_if_small(self) -> Self;
}

impl RoundIfSmall for f64 {
    // Below 2^53 every binomial is an integer representable exactly.
    fn round_if_small(self) -> f64 {
        if self < 9.0e15 {
            self.round()
        } else {
            self
        }
    }
}

/// Natural logarithm of a non-negative quantity.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogValue(f64);

impl LogValue {
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);
    pub const ONE: LogValue = LogValue(0.0);

    pub fn from_ln(ln: f64) -> Self {
        LogValue(ln)
    }

    pub fn from_value(x: f64) -> Self {
        debug_assert!(x >= 0.0);
        LogValue(x.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn exp(self) -> f64 {
        self.0.exp()
    }

    pub fn powi(self, e: i64) -> Self {
        if e == 0 {
            LogValue::ONE
        } else {
            LogValue(self.0 * e as f64)
        }
    }

    /// ln(a + b) without leaving the log domain.
    pub fn log_add(self, other: LogValue) -> LogValue {
        let (hi, lo) = if self.0 >= other.0 {
            (self.0, other.0)
        } else {
            (other.0, self.0)
        };
        if hi == f64::NEG_INFINITY {
            return LogValue::ZERO;
        }
        LogValue(hi + (lo - hi).exp().ln_1p())
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        LogValue(self.0 + rhs.0)
    }
}

impl Div for LogValue {
    type Output = LogValue;
    fn div(self, rhs: LogValue) -> LogValue {
        LogValue(self.0 - rhs.0)
    }
}

/// ln C(n, k).
///
/// Short products are summed term by term; otherwise via log-gamma.
pub fn log_binomial(n: i64, k: i64) -> Result<LogValue, NumericsError> {
    if k < 0 || k > n {
        return Err(NumericsError::Domain { n, k });
    }
    Ok(log_binomial_unchecked(n, k))
}

fn log_binomial_unchecked(n: i64, k: i64) -> LogValue {
    let k = k.min(n - k);
    if k == 0 {
        return LogValue::ONE;
    }
    if k <= 32 {
        let mut s = NeumaierSum::new();
        for i in 1..=k {
            s.add(((n - k + i) as f64 / i as f64).ln());
        }
        return LogValue(s.value());
    }
    let (n, k) = (n as f64, k as f64);
    LogValue(libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0))
}

/// Gaussian tail Q(x) = P(N(0,1) > x).
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// ln Q(x), usable far beyond the range where Q(x) underflows.
pub fn log_q_function(x: f64) -> f64 {
    if x < 30.0 {
        return q_function(x).ln();
    }
    // Asymptotic expansion of the Mills ratio.
    let x2 = x * x;
    let mut term = 1.0;
    let mut series = 1.0;
    for j in 1..8 {
        term *= -((2 * j - 1) as f64) / x2;
        series += term;
    }
    -0.5 * x2 - (x * (2.0 * std::f64::consts::PI).sqrt()).ln() + series.ln()
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of signed reals, accumulated in iteration order.
pub fn stable_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    terms.into_iter().collect::<NeumaierSum>().value()
}

/// Sum of quantities given by their logarithms.
pub fn log_sum<I: IntoIterator<Item = LogValue>>(terms: I) -> LogValue {
    let terms: Vec<LogValue> = terms.into_iter().collect();
    let hi = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return LogValue::ZERO;
    }
    let s = stable_sum(terms.iter().map(|t| (t.0 - hi).exp()));
    LogValue(hi + s.ln())
}

/// Arithmetic needed by the closed-form DTP formulas.
///
/// Implemented for `f64` (float path) and `BigRational` (exact path).
pub trait Prob:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    fn from_count(c: &BigCount) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn to_f64(&self) -> f64;

    fn binom(n: i64, k: i64) -> Self {
        Self::from_count(&binomial(n, k))
    }

    fn from_u64(v: u64) -> Self {
        Self::from_count(&BigUint::from(v))
    }

    fn half(&self) -> Self {
        self.clone() / Self::from_u64(2)
    }

    fn powu(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Prob for f64 {
    fn from_count(c: &BigCount) -> f64 {
        c.to_f64().unwrap_or(f64::INFINITY)
    }

    fn from_rational(r: &BigRational) -> f64 {
        rational_to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn binom(n: i64, k: i64) -> f64 {
        binomial_f64(n, k)
    }

    fn from_u64(v: u64) -> f64 {
        v as f64
    }

    fn half(&self) -> f64 {
        0.5 * self
    }

    fn powu(&self, e: u32) -> f64 {
        self.powi(e as i32)
    }
}

impl Prob for BigRational {
    fn from_count(c: &BigCount) -> BigRational {
        BigRational::from_integer(c.clone().into())
    }

    fn from_rational(r: &BigRational) -> BigRational {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

/// Correctly scaled conversion that survives numerators beyond f64 range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    let neg = r.numer().sign() == num_bigint::Sign::Minus;
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let shift = num.bits() as i64 - den.bits() as i64 - 60;
    let q = if shift >= 0 {
        num / (den << shift as u64)
    } else {
        (num << (-shift) as u64) / den
    };
    let v = q.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32);
    if neg {
        -v
    } else {
        v
    }
}
