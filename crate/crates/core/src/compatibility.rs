//! k-compatibility certificates and the unisolvence bound they imply.
//!
//! `F` is k-compatible with `Pi_n` of degree `l` on `I` when, for every
//! polynomial `q` of degree at most `n`, `D^k(F q) = F~ * q~` with `F~`
//! monotone and nonvanishing on `I` and `q~` having at most `l` roots there.
//! For `p + F q` with `deg p = m < k` the `k`-th derivative kills `p`, so such
//! members have at most `k + l` roots.
//!
//! Certificates are built from the monomial probes `q = x^t`, `t = 0..=n`; by
//! linearity they cover the whole of `Pi_n`. `F~` is always a single power
//! `x^beta`, which makes monotonicity and nonvanishing on a positive interval
//! automatic.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alternant::linalg::rank;
use crate::rootcount::sign_variations;
use crate::symexpr::rational::{factorial, rat, serde_str, serde_vec, sign};
use crate::symexpr::{Interval, LogPowExpr, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompatibilityError {
    #[error("not {k}-compatible: {reason}")]
    NotCompatible { k: usize, reason: String },
    #[error("proposition inapplicable: {0}")]
    Inapplicable(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatibilityOptions {
    /// Also compute the Descartes count of `q~` for `q` with same-sign coefficients.
    pub sign_restricted_descartes: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub t: usize,
    /// Ascending coefficients of `q~` for `q = x^t`.
    #[serde(with = "serde_vec")]
    pub quotient: Vec<Rational>,
    /// `D^k(F x^t) - F~ q~` vanished identically.
    pub residual_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatibilityCertificate {
    #[serde(rename = "F")]
    pub f: LogPowExpr,
    pub k: usize,
    pub n: usize,
    pub l: usize,
    #[serde(rename = "tilde_F")]
    pub tilde_f: LogPowExpr,
    pub interval: Interval,
    pub monotone: bool,
    pub nonvanishing: bool,
    /// Root bound for `q~` restricted to `q` with coefficients of one sign.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign_restricted_l: Option<usize>,
    pub probe_results: Vec<ProbeRecord>,
}

impl CompatibilityCertificate {
    /// `q~` for an arbitrary `q` (ascending coefficients, degree `<= n`).
    pub fn quotient_for(&self, q: &[Rational]) -> Result<Vec<Rational>, CompatibilityError> {
        if q.len() > self.n + 1 {
            return Err(CompatibilityError::InvalidArgument(format!("q has degree above n = {}", self.n)));
        }
        let width = self.probe_results.iter().map(|p| p.quotient.len()).max().unwrap_or(0);
        let mut out = vec![Rational::zero(); width];
        for (coef, probe) in q.iter().zip(&self.probe_results) {
            for (slot, v) in out.iter_mut().zip(&probe.quotient) {
                *slot += coef * v;
            }
        }
        Ok(out)
    }

    /// Checks `D^k(F q) = F~ q~` exactly for one `q`.
    pub fn holds_for(&self, q: &[Rational]) -> Result<bool, CompatibilityError> {
        let lhs = self.f.mul(&LogPowExpr::polynomial(q)).differentiate_n(self.k);
        let rhs = self.tilde_f.mul(&LogPowExpr::polynomial(&self.quotient_for(q)?));
        Ok(lhs == rhs)
    }
}

pub fn check_compatibility(
    f: &LogPowExpr,
    k: usize,
    n: usize,
    interval: &Interval,
) -> Result<CompatibilityCertificate, CompatibilityError> {
    check_compatibility_with(f, k, n, interval, &CompatibilityOptions::default())
}

pub fn check_compatibility_with(
    f: &LogPowExpr,
    k: usize,
    n: usize,
    interval: &Interval,
    options: &CompatibilityOptions,
) -> Result<CompatibilityCertificate, CompatibilityError> {
    let not = |reason: String| CompatibilityError::NotCompatible { k, reason };
    if !interval.is_positive() {
        return Err(CompatibilityError::InvalidInterval(format!(
            "{interval} is not inside (0, inf), where log-power functions are smooth"
        )));
    }
    if f.is_zero() {
        return Err(not("F is identically zero".into()));
    }

    let derivs: Vec<LogPowExpr> =
        (0..=n).map(|t| f.mul(&LogPowExpr::x_pow(rat(t as i64))).differentiate_n(k)).collect();
    if let Some(t) = derivs.iter().position(LogPowExpr::is_zero) {
        return Err(not(format!("D^{k}(F x^{t}) vanishes identically")));
    }
    if let Some(d) = derivs.iter().find(|d| d.max_logpow() > 0) {
        return Err(not(format!("logarithm survives differentiation: {d}")));
    }

    let beta = derivs.iter().filter_map(|d| d.min_alpha().cloned()).min().expect("nonzero derivatives have terms");
    let tilde_f = LogPowExpr::x_pow(beta.clone());
    let mut probes = Vec::with_capacity(n + 1);
    for (t, d) in derivs.iter().enumerate() {
        let quotient = d
            .shift_alpha(&-beta.clone())
            .as_polynomial()
            .ok_or_else(|| not(format!("D^{k}(F x^{t}) = {d} is not x^({beta}) times a polynomial")))?;
        let residual = d.sub(&tilde_f.mul(&LogPowExpr::polynomial(&quotient)));
        probes.push(ProbeRecord { t, quotient, residual_zero: residual.is_zero() });
    }
    if probes.iter().any(|p| !p.residual_zero) {
        return Err(not("factorization residual is nonzero".into()));
    }

    let width = probes.iter().map(|p| p.quotient.len()).max().unwrap_or(0);
    let rows: Vec<Vec<Rational>> = probes
        .iter()
        .map(|p| {
            let mut row = p.quotient.clone();
            row.resize(width, Rational::zero());
            row
        })
        .collect();
    if rank(&rows) < n + 1 {
        return Err(not("some nonzero q gives q~ = 0".into()));
    }
    let l = width - 1;

    let sign_restricted_l = options.sign_restricted_descartes.then(|| sign_restricted_bound(&probes)).flatten();

    Ok(CompatibilityCertificate {
        f: f.clone(),
        k,
        n,
        l,
        tilde_f,
        interval: interval.clone(),
        // x^beta is monotone and positive on any positive interval.
        monotone: true,
        nonvanishing: true,
        sign_restricted_l,
        probe_results: probes,
    })
}

/// When every probe quotient is a single monomial of its own degree, a `q` with
/// same-sign coefficients yields a `q~` whose sign pattern is fixed.
fn sign_restricted_bound(probes: &[ProbeRecord]) -> Option<usize> {
    let mut by_degree: Vec<(usize, i8)> = Vec::with_capacity(probes.len());
    for p in probes {
        let mut nonzero = p.quotient.iter().enumerate().filter(|(_, c)| !c.is_zero());
        let (deg, c) = nonzero.next()?;
        if nonzero.next().is_some() {
            return None;
        }
        by_degree.push((deg, sign(c)));
    }
    by_degree.sort_unstable();
    if by_degree.windows(2).any(|w| w[0].0 == w[1].0) {
        return None;
    }
    let signs: Vec<Rational> = by_degree.iter().map(|&(_, s)| rat(s as i64)).collect();
    Some(sign_variations(&signs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnisolvenceBound {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub bound: usize,
    /// `k + l < m + n + 2`: the span of dimension `m + n + 2` interpolates uniquely.
    pub unisolvent: bool,
}

/// Root bound `k + l` for `p + F q`, `p` of degree `m < k`.
pub fn unisolvence_bound(m: usize, n: usize, k: usize, l: usize) -> Result<UnisolvenceBound, CompatibilityError> {
    if k <= m {
        return Err(CompatibilityError::Inapplicable(format!("need k > m, got k = {k}, m = {m}")));
    }
    let bound = k + l;
    Ok(UnisolvenceBound { m, n, k, l, bound, unisolvent: bound < m + n + 2 })
}

/// Root bound for `p + x^i ln(x) q` on `(1, inf)`, `deg p <= m`, `deg q <= n`.
///
/// `2n + i` when `m < n + i`; `m + n + 1` when `i = 0` and `m > n`; otherwise
/// unknown.
pub fn refined_mixed_bound(i: usize, m: usize, n: usize) -> Option<usize> {
    if m < n + i {
        Some(2 * n + i)
    } else if i == 0 && m > n {
        Some(m + n + 1)
    } else {
        None
    }
}

/// The objects behind the `2n + i` bound for one `q` of exact degree `n`:
/// `D^(n+i)(x^i ln(x) q) = x^-n G` and `D^n G = A ln x + B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedRefinement {
    pub i: usize,
    pub n: usize,
    #[serde(rename = "G")]
    pub g: LogPowExpr,
    pub dn_g: LogPowExpr,
    #[serde(with = "serde_str")]
    pub ln_coeff: Rational,
    #[serde(with = "serde_str")]
    pub constant: Rational,
}

impl MixedRefinement {
    /// `A` and `B` share the sign of the leading coefficient of `q`, so
    /// `D^n G` has no root on `(1, inf)`.
    pub fn is_definite(&self) -> bool {
        sign(&self.ln_coeff) != 0 && sign(&self.ln_coeff) == sign(&self.constant)
    }
}

pub fn mixed_refinement(i: usize, n: usize, q: &[Rational]) -> Result<MixedRefinement, CompatibilityError> {
    if q.len() != n + 1 || q[n].is_zero() {
        return Err(CompatibilityError::InvalidArgument(format!("q must have exact degree {n}")));
    }
    let bad = |what: String| CompatibilityError::NotCompatible { k: n + i, reason: what };
    let f = LogPowExpr::monomial(rat(i as i64), 1).mul(&LogPowExpr::polynomial(q));
    let g = f.differentiate_n(n + i).shift_alpha(&rat(n as i64));
    let lead = &q[n];
    let want_ln = lead * factorial((n + i) as u32);
    let ln_part = LogPowExpr::term(want_ln.clone(), rat(n as i64), 1);
    if g.coeff_of(&rat(n as i64), 1) != want_ln || g.sub(&ln_part).as_polynomial().is_none() {
        return Err(bad(format!("G = {g} is not c x^{n} ln x plus a polynomial")));
    }
    let dn_g = g.differentiate_n(n);
    let ln_coeff = dn_g.coeff_of(&rat(0), 1);
    let constant = dn_g.coeff_of(&rat(0), 0);
    let shape = LogPowExpr::from_terms([(ln_coeff.clone(), rat(0), 1), (constant.clone(), rat(0), 0)]);
    if shape != dn_g {
        return Err(bad(format!("D^{n} G = {dn_g} is not A ln x + B")));
    }
    if ln_coeff != lead * factorial((n + i) as u32) * factorial(n as u32) {
        return Err(bad(format!("ln coefficient of D^{n} G is {ln_coeff}")));
    }
    if constant.is_negative() != lead.is_negative() {
        return Err(bad(format!("constant of D^{n} G has the wrong sign: {constant}")));
    }
    Ok(MixedRefinement { i, n, g, dn_g, ln_coeff, constant })
}
