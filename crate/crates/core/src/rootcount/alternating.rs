use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::RootCountError;
use crate::symexpr::rational::{rat, serde_str};
use crate::symexpr::{LogPowExpr, Rational};

/// One summand `sign * c_j * a_j * x^j` of an alternating form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternatingTerm {
    pub j: usize,
    /// `(-1)^(N-1+j)`
    pub sign: i8,
    #[serde(with = "serde_str")]
    pub c: Rational,
    #[serde(with = "serde_str")]
    pub a: Rational,
}

/// `D^N(p(x) ln x) = x^-N * sum_j (-1)^(N-1+j) c_j a_j x^j` with every `c_j > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternatingForm {
    pub power: usize,
    pub terms: Vec<AlternatingTerm>,
}

impl AlternatingForm {
    pub fn constants(&self) -> Vec<Rational> {
        self.terms.iter().map(|t| t.c.clone()).collect()
    }

    /// Ascending coefficients of `sum_j (-1)^(N-1+j) c_j a_j x^j`.
    pub fn polynomial(&self) -> Vec<Rational> {
        self.terms.iter().map(|t| rat(t.sign as i64) * &t.c * &t.a).collect()
    }

    /// The full derivative `x^-N * polynomial`.
    pub fn to_expr(&self) -> LogPowExpr {
        LogPowExpr::polynomial(&self.polynomial()).shift_alpha(&rat(-(self.power as i64)))
    }
}

fn alternating_sign(n: usize, j: usize) -> i8 {
    if (n - 1 + j).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Differentiates `p(x) ln x` exactly `N` times and factors the result as an
/// alternating combination of the coefficients of `p`.
///
/// Each `c_j` comes from the unit probe `p = x^j`; the full derivative is then
/// checked term by term against `sign_j * c_j * a_j`. Any failure (a leftover
/// logarithm, a missing `x^-N` factor, a nonpositive `c_j`) is reported as a
/// [`RootCountError::LemmaViolation`].
pub fn extract_alternating_form(p_coeffs: &[Rational], n: usize) -> Result<AlternatingForm, RootCountError> {
    if n < 2 {
        return Err(RootCountError::InvalidArgument(format!("N must be at least 2, got {n}")));
    }
    if p_coeffs.len() > n {
        return Err(RootCountError::InvalidArgument(format!(
            "p has {} coefficients but must lie in degree <= {}",
            p_coeffs.len(),
            n - 1
        )));
    }
    let shift = rat(n as i64);
    let p_ln = LogPowExpr::polynomial(p_coeffs).mul(&LogPowExpr::ln());
    let scaled = p_ln.differentiate_n(n).shift_alpha(&shift);
    let combined = scaled.as_polynomial().ok_or_else(|| {
        RootCountError::LemmaViolation(format!("x^{n} * D^{n}(p ln x) = {scaled} is not a polynomial"))
    })?;
    if combined.len() > n {
        return Err(RootCountError::LemmaViolation(format!("degree of {scaled} exceeds {}", n - 1)));
    }

    let mut terms = Vec::with_capacity(n);
    for j in 0..n {
        let probe = LogPowExpr::monomial(rat(j as i64), 1).differentiate_n(n).shift_alpha(&shift);
        let value = probe.coeff_of(&rat(j as i64), 0);
        if probe.len() != 1 || value.is_zero() {
            return Err(RootCountError::LemmaViolation(format!(
                "x^{n} * D^{n}(x^{j} ln x) = {probe} is not a single x^{j} term"
            )));
        }
        let sign = alternating_sign(n, j);
        let c = &value * rat(sign as i64);
        if !c.is_positive() {
            return Err(RootCountError::LemmaViolation(format!("c_{j} = {c} is not positive for N = {n}")));
        }
        let a = p_coeffs.get(j).cloned().unwrap_or_else(Rational::zero);
        let got = combined.get(j).cloned().unwrap_or_else(Rational::zero);
        if got != &value * &a {
            return Err(RootCountError::LemmaViolation(format!(
                "coefficient of x^{j} is {got}, expected {} * {a}",
                value
            )));
        }
        terms.push(AlternatingTerm { j, sign, c, a });
    }
    Ok(AlternatingForm { power: n, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::rational::factorial;

    #[test]
    fn two_applications_of_the_product_rule() {
        // ((a1 x + a0) ln x)'' = (a1 x - a0) / x^2
        let form = extract_alternating_form(&[rat(5), rat(3)], 2).unwrap();
        assert_eq!(form.constants(), vec![rat(1), rat(1)]);
        assert_eq!(form.polynomial(), vec![rat(-5), rat(3)]);
        assert_eq!(form.terms[0].sign, -1);
        assert_eq!(form.terms[1].sign, 1);
    }

    #[test]
    fn third_derivative_constants() {
        // D^3(p ln x) = x^-3 (2 a2 x^2 - a1 x + 2 a0)
        let form = extract_alternating_form(&[rat(1), rat(1), rat(1)], 3).unwrap();
        assert_eq!(form.constants(), vec![rat(2), rat(1), rat(2)]);
        assert_eq!(form.polynomial(), vec![rat(2), rat(-1), rat(2)]);
    }

    #[test]
    fn constants_match_leibniz_closed_form() {
        // Leibniz: D^N(x^j ln x) = (-1)^(N-1-j) j! (N-1-j)! x^(j-N) for j < N.
        for n in 2..=8usize {
            let form = extract_alternating_form(&vec![rat(1); n], n).unwrap();
            for (j, c) in form.constants().iter().enumerate() {
                assert_eq!(*c, factorial(j as u32) * factorial((n - 1 - j) as u32), "N={n} j={j}");
            }
        }
    }

    #[test]
    fn short_p_is_padded() {
        let form = extract_alternating_form(&[rat(2)], 4).unwrap();
        assert_eq!(form.terms.len(), 4);
        assert!(form.terms[1..].iter().all(|t| t.a.is_zero()));
        let direct = LogPowExpr::constant(rat(2)).mul(&LogPowExpr::ln()).differentiate_n(4);
        assert_eq!(form.to_expr(), direct);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(extract_alternating_form(&[rat(1)], 1), Err(RootCountError::InvalidArgument(_))));
        assert!(matches!(
            extract_alternating_form(&[rat(1), rat(1), rat(1)], 2),
            Err(RootCountError::InvalidArgument(_))
        ));
    }
}
