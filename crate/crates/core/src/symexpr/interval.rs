use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{format_rational, parse_rational, rat, to_f64, Rational};
use super::SymExprError;

/// Open interval `(lo, hi)`; `None` stands for `-inf` / `+inf` respectively.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Option<Rational>,
    hi: Option<Rational>,
}

impl Interval {
    pub fn new(lo: Option<Rational>, hi: Option<Rational>) -> Result<Self, SymExprError> {
        if let (Some(a), Some(b)) = (&lo, &hi) {
            if a >= b {
                return Err(SymExprError::EmptyInterval(format!("({a}, {b})")));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn open(lo: Rational, hi: Rational) -> Result<Self, SymExprError> {
        Self::new(Some(lo), Some(hi))
    }

    /// `(0, inf)`
    pub fn positive_reals() -> Self {
        Self { lo: Some(rat(0)), hi: None }
    }

    /// `(1, inf)`, where `ln x > 0`.
    pub fn beyond_one() -> Self {
        Self { lo: Some(rat(1)), hi: None }
    }

    pub fn lo(&self) -> Option<&Rational> {
        self.lo.as_ref()
    }

    pub fn hi(&self) -> Option<&Rational> {
        self.hi.as_ref()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|a| a < x) && self.hi.as_ref().is_none_or(|b| x < b)
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.lo.as_ref().is_none_or(|a| to_f64(a) < x) && self.hi.as_ref().is_none_or(|b| x < to_f64(b))
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lo_ok = match (&other.lo, &self.lo) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(o), Some(s)) => s >= o,
        };
        let hi_ok = match (&other.hi, &self.hi) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(o), Some(s)) => s <= o,
        };
        lo_ok && hi_ok
    }

    /// True when the interval lies inside `(0, inf)`, the natural domain of log-power terms.
    pub fn is_positive(&self) -> bool {
        self.lo.as_ref().is_some_and(|a| !a.is_negative())
    }

    /// True when the interval lies inside `[1, inf)`, where `ln x > 0` at every point.
    pub fn is_beyond_one(&self) -> bool {
        self.lo.as_ref().is_some_and(|a| *a >= rat(1))
    }

    /// Float endpoints with `+inf` replaced by `horizon`; a zero lower end becomes `1/horizon`.
    pub fn clamp(&self, horizon: f64) -> Result<(f64, f64), SymExprError> {
        let lo = match &self.lo {
            None => return Err(SymExprError::Domain("interval extends to -inf".into())),
            Some(a) if a.is_negative() => return Err(SymExprError::Domain(format!("interval starts at {a} < 0"))),
            Some(a) if a.is_zero() => 1.0 / horizon,
            Some(a) => to_f64(a),
        };
        let hi = self.hi.as_ref().map_or(horizon, to_f64);
        if !(lo < hi) {
            return Err(SymExprError::Domain(format!("clamped interval ({lo}, {hi}) is empty; raise the horizon")));
        }
        Ok((lo, hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lo.as_ref().map_or("-inf".to_string(), format_rational);
        let hi = self.hi.as_ref().map_or("inf".to_string(), format_rational);
        write!(f, "({lo}, {hi})")
    }
}

fn parse_endpoint(s: &str, lower: bool) -> Result<Option<Rational>, SymExprError> {
    match s.trim() {
        "inf" | "+inf" | "infinity" if !lower => Ok(None),
        "-inf" | "-infinity" if lower => Ok(None),
        t => parse_rational(t).map(Some),
    }
}

impl std::str::FromStr for Interval {
    type Err = SymExprError;

    /// Accepts `"1,inf"` or `"(0, 3/2)"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) =
            inner.split_once(',').ok_or_else(|| SymExprError::Parse(format!("expected lo,hi but got {s:?}")))?;
        Interval::new(parse_endpoint(a, true)?, parse_endpoint(b, false)?)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let lo = self.lo.as_ref().map_or("-inf".to_string(), format_rational);
        let hi = self.hi.as_ref().map_or("inf".to_string(), format_rational);
        [lo, hi].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let [a, b]: [String; 2] = Deserialize::deserialize(d)?;
        let lo = parse_endpoint(&a, true).map_err(D::Error::custom)?;
        let hi = parse_endpoint(&b, false).map_err(D::Error::custom)?;
        Interval::new(lo, hi).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::rational::ratio;

    #[test]
    fn rejects_empty() {
        assert!(Interval::open(rat(2), rat(2)).is_err());
        assert!(Interval::open(rat(3), rat(2)).is_err());
    }

    #[test]
    fn membership_is_open() {
        let iv = Interval::beyond_one();
        assert!(!iv.contains(&rat(1)));
        assert!(iv.contains(&ratio(3, 2)));
        assert!(!iv.contains_f64(1.0));
    }

    #[test]
    fn subsets() {
        let sub = Interval::open(rat(2), rat(5)).unwrap();
        assert!(sub.is_subset_of(&Interval::beyond_one()));
        assert!(Interval::beyond_one().is_subset_of(&Interval::positive_reals()));
        assert!(!Interval::positive_reals().is_subset_of(&Interval::beyond_one()));
    }

    #[test]
    fn parses_and_serializes() {
        let iv: Interval = "1,inf".parse().unwrap();
        assert_eq!(iv, Interval::beyond_one());
        let json = serde_json::to_string(&iv).unwrap();
        assert_eq!(json, r#"["1","inf"]"#);
        let back: Interval = serde_json::from_str(r#"["1/2","3"]"#).unwrap();
        assert_eq!(back, Interval::open(ratio(1, 2), rat(3)).unwrap());
        assert!(serde_json::from_str::<Interval>(r#"["3","1"]"#).is_err());
    }

    #[test]
    fn clamping() {
        assert_eq!(Interval::beyond_one().clamp(1e4).unwrap(), (1.0, 1e4));
        assert_eq!(Interval::positive_reals().clamp(1e4).unwrap(), (1e-4, 1e4));
        assert!(Interval::new(None, Some(rat(1))).unwrap().clamp(1e4).is_err());
    }
}
