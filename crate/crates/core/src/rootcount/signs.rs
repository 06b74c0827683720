//! Descartes' rule of signs and the Budan–Fourier theorem on exact polynomials.

use num_traits::{Signed, Zero};

use super::RootCountError;
use crate::symexpr::rational::{rat, sign};
use crate::symexpr::{Interval, LogPowExpr, Rational};

/// Strict sign changes in `coeffs` after deleting zeros.
pub fn sign_variations(coeffs: &[Rational]) -> usize {
    sign_variations_of(coeffs.iter().map(sign))
}

pub(crate) fn sign_variations_of(signs: impl IntoIterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for s in signs.into_iter().filter(|&s| s != 0) {
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

fn require_polynomial(poly: &LogPowExpr) -> Result<Vec<Rational>, RootCountError> {
    let coeffs = poly.as_polynomial().ok_or_else(|| RootCountError::NotPolynomial(poly.to_string()))?;
    if coeffs.is_empty() {
        return Err(RootCountError::ZeroExpression);
    }
    Ok(coeffs)
}

/// Upper bound on the number of positive roots (counted with multiplicity),
/// with the same parity as the true count.
pub fn descartes_bound(poly: &LogPowExpr) -> Result<usize, RootCountError> {
    Ok(sign_variations(&require_polynomial(poly)?))
}

/// Budan–Fourier bound `V(lo) - V(hi)` on the number of roots in `(lo, hi]`.
///
/// Infinite endpoints use the limiting signs of the derivative sequence.
pub fn budan_fourier_bound(poly: &LogPowExpr, interval: &Interval) -> Result<usize, RootCountError> {
    let coeffs = require_polynomial(poly)?;
    Ok(budan_fourier_coeffs(&coeffs, interval))
}

pub(crate) fn budan_fourier_coeffs(coeffs: &[Rational], interval: &Interval) -> usize {
    let derivs = derivative_sequence(coeffs);
    let v_lo = match interval.lo() {
        Some(a) => variations_at(&derivs, a),
        None => variations_at_infinity(&derivs, true),
    };
    let v_hi = match interval.hi() {
        Some(b) => variations_at(&derivs, b),
        None => variations_at_infinity(&derivs, false),
    };
    v_lo.saturating_sub(v_hi)
}

/// `p, p', ..., p^(deg)` as ascending coefficient vectors.
fn derivative_sequence(coeffs: &[Rational]) -> Vec<Vec<Rational>> {
    let mut trimmed = coeffs.to_vec();
    while trimmed.last().is_some_and(Zero::is_zero) {
        trimmed.pop();
    }
    let mut seq = Vec::with_capacity(trimmed.len());
    let mut cur = trimmed;
    while !cur.is_empty() {
        let next: Vec<Rational> = cur.iter().enumerate().skip(1).map(|(k, c)| c * rat(k as i64)).collect();
        seq.push(cur);
        cur = next;
    }
    seq
}

fn horner(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn variations_at(derivs: &[Vec<Rational>], x: &Rational) -> usize {
    sign_variations_of(derivs.iter().map(|d| sign(&horner(d, x))))
}

fn variations_at_infinity(derivs: &[Vec<Rational>], negative: bool) -> usize {
    sign_variations_of(derivs.iter().map(|d| {
        let lead = d.last().map_or(0, sign);
        let odd_degree = (d.len() - 1) % 2 == 1;
        if negative && odd_degree {
            -lead
        } else {
            lead
        }
    }))
}

/// True when the nonzero coefficients all share a sign.
pub(crate) fn all_same_sign<'a>(coeffs: impl IntoIterator<Item = &'a Rational>) -> bool {
    let mut seen_pos = false;
    let mut seen_neg = false;
    for c in coeffs {
        seen_pos |= c.is_positive();
        seen_neg |= c.is_negative();
    }
    !(seen_pos && seen_neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::ratio;

    fn poly(c: &[i64]) -> LogPowExpr {
        LogPowExpr::polynomial(&c.iter().map(|&k| rat(k)).collect::<Vec<_>>())
    }

    #[test]
    fn sign_variation_examples() {
        assert_eq!(sign_variations(&[rat(1), rat(-3), rat(2)]), 2);
        assert_eq!(sign_variations(&[rat(1), rat(0), rat(1)]), 0);
        assert_eq!(sign_variations(&[]), 0);
        assert_eq!(sign_variations(&[rat(-1), rat(0), rat(0), rat(4), rat(-2)]), 2);
    }

    #[test]
    fn descartes_examples() {
        assert_eq!(descartes_bound(&poly(&[2, -3, 1])).unwrap(), 2);
        assert_eq!(descartes_bound(&poly(&[1, 0, 1])).unwrap(), 0);
        assert_eq!(descartes_bound(&poly(&[-1, 1])).unwrap(), 1);
        assert!(matches!(descartes_bound(&LogPowExpr::ln()), Err(RootCountError::NotPolynomial(_))));
        assert!(matches!(descartes_bound(&LogPowExpr::zero()), Err(RootCountError::ZeroExpression)));
    }

    #[test]
    fn budan_fourier_examples() {
        // p = x^2 - 3x + 2; at 0: (2, -3, 2) -> 2 changes; at 3: (2, 3, 2) -> 0.
        let p = poly(&[2, -3, 1]);
        assert_eq!(budan_fourier_bound(&p, &Interval::open(rat(0), rat(3)).unwrap()).unwrap(), 2);
        // at 3/2: (-1/4, 0, 2) -> 1 change.
        assert_eq!(budan_fourier_bound(&p, &Interval::open(rat(0), ratio(3, 2)).unwrap()).unwrap(), 1);
        assert_eq!(budan_fourier_bound(&poly(&[1, 0, 1]), &Interval::open(rat(0), rat(10)).unwrap()).unwrap(), 0);
    }

    #[test]
    fn budan_fourier_at_infinity_matches_descartes() {
        let p = poly(&[-6, 11, -6, 1]);
        assert_eq!(budan_fourier_bound(&p, &Interval::positive_reals()).unwrap(), 3);
        assert_eq!(descartes_bound(&p).unwrap(), 3);
        let whole = Interval::new(None, None).unwrap();
        assert_eq!(budan_fourier_bound(&p, &whole).unwrap(), 3);
        let q = poly(&[1, 0, 1]);
        assert_eq!(budan_fourier_bound(&q, &whole).unwrap(), 2);
    }
}
