//! Exact rational scalars and their textual form.
//!
//! `Rational` is `num_rational::BigRational`, which already keeps values in
//! lowest terms with a positive denominator. This module adds the string
//! format used on every external surface (`"p/q"`, bare integers, and exact
//! decimals such as `"1.25"`), serde helpers, and a few exact constants.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serializer};

use super::SymExprError;

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `n!` as an exact rational.
pub fn factorial(n: u32) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    Rational::from_integer(acc)
}

/// Parses `"p/q"`, `"n"` or an exact decimal such as `"-0.125"`.
pub fn parse_rational(text: &str) -> Result<Rational, SymExprError> {
    let s = text.trim();
    let bad = || SymExprError::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(SymExprError::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.starts_with('-');
        let digits = int_part.trim_start_matches(['-', '+']);
        if frac_part.is_empty() && digits.is_empty() {
            return Err(bad());
        }
        if !digits.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let all = format!("{digits}{frac_part}");
        let mantissa = if all.is_empty() { BigInt::zero() } else { BigInt::from_str(&all).map_err(|_| bad())? };
        let scale = num_traits::pow(BigInt::from(10), frac_part.len());
        let value = Rational::new(mantissa, scale);
        return Ok(if negative { -value } else { value });
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

/// Exact conversion of a finite float (every finite `f64` is a dyadic rational).
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Huge numerator and denominator: scale both down before dividing.
    let n = q.numer();
    let d = q.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

pub fn sign(q: &Rational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

/// Integer value of `q` if it is an integer that fits in an `i64`.
pub fn as_i64(q: &Rational) -> Option<i64> {
    if is_integer(q) {
        q.numer().to_i64()
    } else {
        None
    }
}

pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

/// Serde adapter: rationals as strings, bare JSON integers accepted on input.
pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(t) => parse_rational(&t).map_err(de::Error::custom),
            Repr::Int(i) => Ok(rat(i)),
        }
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&format_rational(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        #[derive(Deserialize)]
        struct Wrapped(#[serde(with = "super::serde_str")] Rational);
        let v: Vec<Wrapped> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|w| w.0).collect())
    }
}
