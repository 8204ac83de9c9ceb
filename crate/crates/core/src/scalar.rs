//! Scalar field abstraction shared by the exact and floating-point code paths.
//!
//! Every algebraic residual in this crate is written once over [`Scalar`] and
//! instantiated with [`Rational`] (exact mode) or `f64` (float mode).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use crate::error::{GeomError, Result};

/// Exact rational numbers with arbitrary-precision numerator and denominator.
pub type Rational = BigRational;

/// Arithmetic needed by the residual evaluators.
pub trait Scalar: Clone + Debug + PartialOrd + Signed + Send + Sync + 'static {
    fn from_rational(q: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact textual form (`p/q`), only available for exact scalars.
    fn exact_string(&self) -> Option<String>;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }
}

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn exact_string(&self) -> Option<String> {
        Some(format_rational(self))
    }
}

impl Scalar for f64 {
    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn exact_string(&self) -> Option<String> {
        None
    }
}

/// Arithmetic mode of an algebraic check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Rational,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Rational => "rational",
            Mode::Float => "float",
        }
    }
}

/// Parses `"p/q"` or `"p"` (integers, optional sign) into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || GeomError::Parse(format!("invalid rational literal {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(GeomError::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Exact conversion of a finite float (every finite `f64` is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::from_f64(x).ok_or_else(|| GeomError::Parse(format!("non-finite number {x}")))
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom() == &BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}
