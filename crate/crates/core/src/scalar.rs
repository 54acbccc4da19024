//! Scalar abstraction for the polynomial algebra.
//!
//! The same polynomial and tensor code serves the exact-rational refutation
//! pipeline and the floating-point labs, so the coefficient type is a trait
//! parameter. `Rat` keeps every result in lowest terms with a positive
//! denominator (the `num-rational` constructors enforce both), which is the
//! canonical form assumed throughout.

use num_bigint::BigInt;
use num_traits::{Num, NumAssign, One, Signed, Zero};
use serde_json::Value;
use std::fmt::Debug;
use std::ops::Neg;

use crate::error::CoreError;
use crate::Rat;

/// Coefficient scalar: a commutative ring with exact or approximate
/// arithmetic, plus the JSON coefficient encoding used by the file formats
/// (rationals as `"p/q"` strings, floats as JSON numbers).
pub trait Scalar:
    Clone + PartialEq + Debug + Zero + One + Neg<Output = Self> + Num + NumAssign + Send + Sync + 'static
{
    /// True when arithmetic is exact and equality comparisons are meaningful
    /// identities rather than tolerance checks.
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    fn coeff_to_json(&self) -> Value;

    fn coeff_from_json(v: &Value) -> Result<Self, CoreError>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn coeff_to_json(&self) -> Value {
        serde_json::json!(self)
    }

    fn coeff_from_json(v: &Value) -> Result<Self, CoreError> {
        v.as_f64()
            .ok_or_else(|| CoreError::CoeffParse(format!("expected a number, got {v}")))
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }

    fn coeff_to_json(&self) -> Value {
        Value::String(format!("{}/{}", self.numer(), self.denom()))
    }

    fn coeff_from_json(v: &Value) -> Result<Self, CoreError> {
        let s = v
            .as_str()
            .ok_or_else(|| CoreError::CoeffParse(format!("expected a \"p/q\" string, got {v}")))?;
        parse_rational(s)
    }
}

/// Parses `"p/q"` or a bare integer `"p"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rat, CoreError> {
    let (num_str, den_str) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let numer = BigInt::from_str_radix(num_str.trim(), 10)
        .map_err(|e| CoreError::CoeffParse(format!("bad numerator in {s:?}: {e}")))?;
    let denom = BigInt::from_str_radix(den_str.trim(), 10)
        .map_err(|e| CoreError::CoeffParse(format!("bad denominator in {s:?}: {e}")))?;
    if denom.is_zero() {
        return Err(CoreError::CoeffParse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(numer, denom))
}

/// Bit complexity of an integer: `1 + ceil(log2 |p|)`, with 1 for |p| <= 1.
pub fn bit_complexity_int(v: &BigInt) -> u64 {
    let a = v.abs();
    if a <= BigInt::one() {
        1
    } else {
        // ceil(log2 a) = bits(a - 1) for a >= 2
        1 + (a - BigInt::one()).bits()
    }
}

/// Bit complexity of a rational: sum of the bit complexities of numerator
/// and denominator.
pub fn bit_complexity(r: &Rat) -> u64 {
    bit_complexity_int(r.numer()) + bit_complexity_int(r.denom())
}
