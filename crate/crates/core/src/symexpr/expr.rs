use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{as_i64, from_f64, is_integer, rat, to_f64, Rational};
use super::SymExprError;

/// One term `coeff * x^alpha * ln(x)^logpow` with `coeff != 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogPowTerm {
    coeff: Rational,
    alpha: Rational,
    logpow: u32,
}

impl LogPowTerm {
    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn logpow(&self) -> u32 {
        self.logpow
    }
}

/// A finite sum of [`LogPowTerm`]s in canonical form.
///
/// Terms are sorted by `(alpha, logpow)` ascending, keys are unique and no
/// coefficient is zero, so structural equality is mathematical equality.
/// The empty sum is the zero function.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LogPowExpr {
    terms: Vec<LogPowTerm>,
}

type TermKey = (Rational, u32);

impl LogPowExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, rat(0), 0)
    }

    pub fn term(coeff: Rational, alpha: Rational, logpow: u32) -> Self {
        Self::from_terms([(coeff, alpha, logpow)])
    }

    /// `x^alpha`
    pub fn x_pow(alpha: Rational) -> Self {
        Self::term(rat(1), alpha, 0)
    }

    /// `ln x`
    pub fn ln() -> Self {
        Self::term(rat(1), rat(0), 1)
    }

    /// `x^alpha * ln(x)^logpow` with unit coefficient.
    pub fn monomial(alpha: Rational, logpow: u32) -> Self {
        Self::term(rat(1), alpha, logpow)
    }

    /// Polynomial from ascending coefficients `c_0 + c_1 x + ...`.
    pub fn polynomial(coeffs: &[Rational]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(k, c)| (c.clone(), rat(k as i64), 0)))
    }

    /// Builds a canonical expression, merging like terms and dropping zeros.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Rational, Rational, u32)>,
    {
        let mut acc: BTreeMap<TermKey, Rational> = BTreeMap::new();
        for (coeff, alpha, logpow) in terms {
            if coeff.is_zero() {
                continue;
            }
            *acc.entry((alpha, logpow)).or_insert_with(Rational::zero) += coeff;
        }
        Self::from_map(acc)
    }

    fn from_map(map: BTreeMap<TermKey, Rational>) -> Self {
        let terms = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((alpha, logpow), coeff)| LogPowTerm { coeff, alpha, logpow })
            .collect();
        Self { terms }
    }

    fn raw_terms(&self) -> impl Iterator<Item = (Rational, Rational, u32)> + '_ {
        self.terms.iter().map(|t| (t.coeff.clone(), t.alpha.clone(), t.logpow))
    }

    pub fn terms(&self) -> &[LogPowTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_logpow(&self) -> u32 {
        self.terms.iter().map(|t| t.logpow).max().unwrap_or(0)
    }

    pub fn min_alpha(&self) -> Option<&Rational> {
        self.terms.iter().map(|t| &t.alpha).min()
    }

    /// Coefficient of `x^alpha * ln(x)^logpow`, zero if absent.
    pub fn coeff_of(&self, alpha: &Rational, logpow: u32) -> Rational {
        self.terms
            .iter()
            .find(|t| &t.alpha == alpha && t.logpow == logpow)
            .map_or_else(Rational::zero, |t| t.coeff.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.raw_terms().chain(other.raw_terms()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| LogPowTerm { coeff: &t.coeff * c, alpha: t.alpha.clone(), logpow: t.logpow })
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().flat_map(|a| {
            other.terms.iter().map(move |b| (&a.coeff * &b.coeff, &a.alpha + &b.alpha, a.logpow + b.logpow))
        }))
    }

    /// Multiplies by `x^beta`.
    pub fn shift_alpha(&self, beta: &Rational) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| LogPowTerm { coeff: t.coeff.clone(), alpha: &t.alpha + beta, logpow: t.logpow })
                .collect(),
        }
    }

    /// `D(c x^a ln^m x) = c a x^(a-1) ln^m x + c m x^(a-1) ln^(m-1) x`
    pub fn differentiate(&self) -> Self {
        Self::from_terms(self.terms.iter().flat_map(|t| {
            let alpha = &t.alpha - rat(1);
            let power_rule = (&t.coeff * &t.alpha, alpha.clone(), t.logpow);
            let log_rule = (t.logpow > 0).then(|| (&t.coeff * rat(t.logpow as i64), alpha, t.logpow - 1));
            std::iter::once(power_rule).chain(log_rule)
        }))
    }

    pub fn differentiate_n(&self, n: usize) -> Self {
        let mut f = self.clone();
        for _ in 0..n {
            if f.is_zero() {
                break;
            }
            f = f.differentiate();
        }
        f
    }

    /// True when every term has an integer exponent and no logarithm.
    pub fn is_laurent_polynomial(&self) -> bool {
        self.terms.iter().all(|t| t.logpow == 0 && is_integer(&t.alpha))
    }

    /// Ascending coefficients when this is an ordinary polynomial
    /// (no logarithms, nonnegative integer exponents).
    pub fn as_polynomial(&self) -> Option<Vec<Rational>> {
        let mut coeffs = Vec::new();
        for t in &self.terms {
            if t.logpow != 0 || t.alpha.is_negative() {
                return None;
            }
            let k = usize::try_from(as_i64(&t.alpha)?).ok()?;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Rational::zero());
            }
            coeffs[k] = t.coeff.clone();
        }
        Some(coeffs)
    }

    /// Writes a log-free expression as `x^beta * P(x)` with `P(0) != 0`.
    ///
    /// Returns `None` for expressions with logarithms, for zero, or when two
    /// exponents differ by a non-integer.
    pub fn factor_power(&self) -> Option<(Rational, Vec<Rational>)> {
        let beta = self.min_alpha()?.clone();
        let poly = self.shift_alpha(&-beta.clone()).as_polynomial()?;
        Some((beta, poly))
    }

    /// Float evaluation of the sum at `x > 0`.
    pub fn evaluate(&self, x: f64) -> Result<f64, SymExprError> {
        self.evaluator().evaluate(x)
    }

    /// Evaluation at a rational point, exact when the expression is a
    /// Laurent polynomial and rounded once at the end.
    pub fn evaluate_at(&self, x: &Rational) -> Result<f64, SymExprError> {
        match self.evaluate_exact(x)? {
            Some(v) => Ok(to_f64(&v)),
            None => self.evaluate(to_f64(x)),
        }
    }

    /// Exact value at a rational point, or `None` if the expression has
    /// logarithms or fractional exponents.
    pub fn evaluate_exact(&self, x: &Rational) -> Result<Option<Rational>, SymExprError> {
        if !x.is_positive() {
            return Err(SymExprError::Domain(format!("evaluation at x = {x} <= 0")));
        }
        if !self.is_laurent_polynomial() {
            return Ok(None);
        }
        let mut sum = Rational::zero();
        for t in &self.terms {
            let k = as_i64(&t.alpha).ok_or_else(|| SymExprError::Domain("exponent out of range".into()))?;
            let k = i32::try_from(k).map_err(|_| SymExprError::Domain("exponent out of range".into()))?;
            sum += &t.coeff * num_traits::Pow::pow(x, k);
        }
        Ok(Some(sum))
    }

    pub fn evaluator(&self) -> Evaluator {
        Evaluator {
            terms: self
                .terms
                .iter()
                .map(|t| FloatTerm {
                    coeff: to_f64(&t.coeff),
                    alpha: to_f64(&t.alpha),
                    int_alpha: as_i64(&t.alpha).and_then(|k| i32::try_from(k).ok()),
                    logpow: t.logpow as i32,
                })
                .collect(),
        }
    }

    /// Exact coefficients from floats. Non-finite input is rejected.
    pub fn from_f64_coeffs(coeffs: &[f64]) -> Option<Vec<Rational>> {
        coeffs.iter().map(|&c| from_f64(c)).collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct FloatTerm {
    coeff: f64,
    alpha: f64,
    int_alpha: Option<i32>,
    logpow: i32,
}

/// Float image of a [`LogPowExpr`], for repeated evaluation in numeric oracles.
#[derive(Debug, Clone)]
pub struct Evaluator {
    terms: Vec<FloatTerm>,
}

impl Evaluator {
    pub fn evaluate(&self, x: f64) -> Result<f64, SymExprError> {
        if !(x > 0.0) {
            return Err(SymExprError::Domain(format!("evaluation at x = {x} <= 0")));
        }
        Ok(self.evaluate_unchecked(x))
    }

    /// Neumaier-compensated sum; caller guarantees `x > 0`.
    pub fn evaluate_unchecked(&self, x: f64) -> f64 {
        let ln = x.ln();
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for t in &self.terms {
            let power = match t.int_alpha {
                Some(k) => x.powi(k),
                None => x.powf(t.alpha),
            };
            let v = t.coeff * power * ln.powi(t.logpow);
            let s = sum + v;
            if sum.abs() >= v.abs() {
                comp += (sum - s) + v;
            } else {
                comp += (v - s) + sum;
            }
            sum = s;
        }
        sum + comp
    }
}

impl Add for &LogPowExpr {
    type Output = LogPowExpr;
    fn add(self, rhs: Self) -> LogPowExpr {
        LogPowExpr::add(self, rhs)
    }
}

impl Sub for &LogPowExpr {
    type Output = LogPowExpr;
    fn sub(self, rhs: Self) -> LogPowExpr {
        LogPowExpr::sub(self, rhs)
    }
}

impl Mul for &LogPowExpr {
    type Output = LogPowExpr;
    fn mul(self, rhs: Self) -> LogPowExpr {
        LogPowExpr::mul(self, rhs)
    }
}

impl Neg for &LogPowExpr {
    type Output = LogPowExpr;
    fn neg(self) -> LogPowExpr {
        self.scale(&rat(-1))
    }
}

impl fmt::Display for LogPowExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, t) in self.terms.iter().enumerate() {
            let negative = t.coeff.is_negative();
            let mag = t.coeff.abs();
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            if !t.alpha.is_zero() {
                if t.alpha.is_one() {
                    factors.push("x".to_string());
                } else if is_integer(&t.alpha) && t.alpha.is_positive() {
                    factors.push(format!("x^{}", t.alpha));
                } else {
                    factors.push(format!("x^({})", t.alpha));
                }
            }
            match t.logpow {
                0 => {}
                1 => factors.push("ln(x)".into()),
                m => factors.push(format!("ln(x)^{m}")),
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else if is_integer(&mag) {
                write!(f, "{mag}*{}", factors.join("*"))?;
            } else {
                write!(f, "({mag})*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    #[serde(with = "super::rational::serde_str")]
    coeff: Rational,
    #[serde(with = "super::rational::serde_str")]
    alpha: Rational,
    logpow: u32,
}

impl Serialize for LogPowExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|t| TermRepr { coeff: t.coeff.clone(), alpha: t.alpha.clone(), logpow: t.logpow })
            .collect();
        reprs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogPowExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let reprs: Vec<TermRepr> = Vec::deserialize(d)?;
        Ok(Self::from_terms(reprs.into_iter().map(|r| (r.coeff, r.alpha, r.logpow))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::rational::{factorial, ratio};

    fn x() -> LogPowExpr {
        LogPowExpr::x_pow(rat(1))
    }

    fn x_ln() -> LogPowExpr {
        LogPowExpr::monomial(rat(1), 1)
    }

    #[test]
    fn add_examples() {
        assert!(x_ln().add(&x_ln().scale(&rat(-1))).is_zero());

        let lhs = LogPowExpr::term(rat(2), rat(2), 0);
        let rhs = LogPowExpr::from_terms([(rat(3), rat(2), 0), (rat(1), rat(1), 0)]);
        let want = LogPowExpr::from_terms([(rat(5), rat(2), 0), (rat(1), rat(1), 0)]);
        assert_eq!(lhs.add(&rhs), want);

        let sum = LogPowExpr::ln().add(&x_ln());
        let keys: Vec<_> = sum.terms().iter().map(|t| (t.coeff().clone(), t.alpha().clone(), t.logpow())).collect();
        assert_eq!(keys, vec![(rat(1), rat(0), 1), (rat(1), rat(1), 1)]);
    }

    #[test]
    fn scale_examples() {
        let x_plus_1 = LogPowExpr::polynomial(&[rat(1), rat(1)]);
        assert!(x_plus_1.scale(&rat(0)).is_zero());
        assert_eq!(x_ln().scale(&rat(-2)), LogPowExpr::term(rat(-2), rat(1), 1));
        assert_eq!(LogPowExpr::x_pow(ratio(1, 2)).scale(&ratio(1, 3)), LogPowExpr::term(ratio(1, 3), ratio(1, 2), 0));
    }

    #[test]
    fn differentiate_examples() {
        assert_eq!(LogPowExpr::ln().differentiate(), LogPowExpr::x_pow(rat(-1)));
        let want = LogPowExpr::ln().add(&LogPowExpr::constant(rat(1)));
        assert_eq!(x_ln().differentiate(), want);
        assert!(LogPowExpr::constant(rat(5)).differentiate().is_zero());
    }

    #[test]
    fn differentiate_n_examples() {
        let x2ln = LogPowExpr::monomial(rat(2), 1);
        assert_eq!(x2ln.differentiate_n(3), LogPowExpr::term(rat(2), rat(-1), 0));

        // ((x + 1) ln x)'' = x^-1 - x^-2
        let p_ln = LogPowExpr::polynomial(&[rat(1), rat(1)]).mul(&LogPowExpr::ln());
        let want = LogPowExpr::from_terms([(rat(1), rat(-1), 0), (rat(-1), rat(-2), 0)]);
        assert_eq!(p_ln.differentiate_n(2), want);

        // C_2 = 2 C_1 + 1! = 3
        let want = LogPowExpr::from_terms([(rat(2), rat(0), 1), (rat(3), rat(0), 0)]);
        assert_eq!(x2ln.differentiate_n(2), want);

        assert_eq!(x2ln.differentiate_n(0), x2ln);
    }

    #[test]
    fn evaluate_examples() {
        let p = LogPowExpr::polynomial(&[rat(-1), rat(0), rat(1)]);
        assert_eq!(p.evaluate(1.0).unwrap(), 0.0);
        assert!((LogPowExpr::ln().evaluate(std::f64::consts::E).unwrap() - 1.0).abs() <= 1e-12);
        let want = 2.0 * 2f64.ln();
        assert!((x_ln().evaluate(2.0).unwrap() - want).abs() <= 1e-12);
        assert!((want - 1.3862943611).abs() < 1e-10);
        assert!(matches!(p.evaluate(0.0), Err(SymExprError::Domain(_))));
        assert!(matches!(p.evaluate(-1.0), Err(SymExprError::Domain(_))));
    }

    #[test]
    fn exact_fast_path() {
        let p = LogPowExpr::polynomial(&[rat(-1), rat(0), rat(1)]);
        assert_eq!(p.evaluate_exact(&ratio(1, 2)).unwrap(), Some(ratio(-3, 4)));
        assert_eq!(x_ln().evaluate_exact(&rat(2)).unwrap(), None);
        assert_eq!(p.evaluate_at(&rat(3)).unwrap(), 8.0);
        assert!(p.evaluate_exact(&rat(0)).is_err());
    }

    #[test]
    fn equality_is_canonical() {
        let d = x_ln().differentiate();
        assert_eq!(d, LogPowExpr::ln().add(&LogPowExpr::constant(rat(1))));
        assert_eq!(LogPowExpr::constant(rat(0)), LogPowExpr::zero());
        assert_eq!(x(), LogPowExpr::term(rat(1), rat(1), 0));
        assert_eq!(x(), LogPowExpr::from_terms([(rat(1), rat(1), 0), (rat(0), rat(7), 3)]));
    }

    #[test]
    fn polynomial_views() {
        let e = LogPowExpr::polynomial(&[rat(2), rat(-3), rat(1)]);
        assert_eq!(e.as_polynomial().unwrap(), vec![rat(2), rat(-3), rat(1)]);
        assert!(x_ln().as_polynomial().is_none());
        assert!(LogPowExpr::x_pow(rat(-1)).as_polynomial().is_none());

        let shifted = e.shift_alpha(&rat(-3));
        let (beta, poly) = shifted.factor_power().unwrap();
        assert_eq!(beta, rat(-3));
        assert_eq!(poly, vec![rat(2), rat(-3), rat(1)]);
        let mixed = LogPowExpr::x_pow(ratio(1, 2)).add(&x());
        assert!(mixed.factor_power().is_none());
    }

    #[test]
    fn json_format() {
        let e = LogPowExpr::from_terms([(ratio(1, 2), rat(1), 1), (rat(-3), ratio(-1, 3), 0)]);
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, r#"[{"coeff":"-3","alpha":"-1/3","logpow":0},{"coeff":"1/2","alpha":"1","logpow":1}]"#);
        let back: LogPowExpr = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
        let merged: LogPowExpr = serde_json::from_str(
            r#"[{"coeff":"1","alpha":"2","logpow":0},{"coeff":"-1","alpha":"2","logpow":0},{"coeff":2,"alpha":0,"logpow":1}]"#,
        )
        .unwrap();
        assert_eq!(merged, LogPowExpr::term(rat(2), rat(0), 1));
    }

    #[test]
    fn display() {
        let e = LogPowExpr::from_terms([(rat(2), rat(2), 1), (rat(-1), rat(0), 0), (ratio(1, 2), ratio(1, 2), 0)]);
        assert_eq!(e.to_string(), "-1 + (1/2)*x^(1/2) + 2*x^2*ln(x)");
        assert_eq!(LogPowExpr::zero().to_string(), "0");
    }

    #[test]
    fn factorial_times_inverse_x() {
        // D^{k+1}(x^k ln x) = k! / x
        for k in 0..=10u32 {
            let f = LogPowExpr::monomial(rat(k as i64), 1);
            assert_eq!(f.differentiate_n(k as usize + 1), LogPowExpr::term(factorial(k), rat(-1), 0));
        }
    }
}
