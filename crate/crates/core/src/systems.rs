//! Named function families and their theoretical root bounds.
//!
//! | kind        | basis                                        | size      | bound on `(.)#`      |
//! |-------------|----------------------------------------------|-----------|----------------------|
//! | `Power`     | `x^r, x^(r+1), ..., x^(r+n-1)`               | `n`       | `n - 1`              |
//! | `LogPoly`   | `1, ..., x^(n-1), ln x, ..., x^(n-1) ln x`   | `2n`      | `2n - 1`             |
//! | `Mixed`     | `1, ..., x^m, x^i ln x, ..., x^(i+n) ln x`   | `m+n+2`   | `2n + i` if `m < n+i` |
//! | `GeneralLn` | `1, ..., x^m, ln x, ..., x^n ln x` (`m > n`) | `m+n+2`   | `m + n + 1`          |
//!
//! Member coefficients are ordered as the basis: polynomial part first
//! (ascending degree), then the logarithmic part (ascending degree).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compatibility::refined_mixed_bound;
use crate::symexpr::rational::{self, rat, Rational};
use crate::symexpr::{Interval, LogPowExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("invalid system: {0}")]
    Invalid(String),
    #[error("expected {expected} coefficients, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("sharpness witnesses exist only for power systems")]
    WrongKind,
    #[error("duplicate root {0}")]
    DuplicateRoot(String),
    #[error("root {root} outside {interval}")]
    RootOutsideInterval { root: String, interval: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemKind {
    Power {
        #[serde(with = "rational::serde_str")]
        r: Rational,
        n: usize,
    },
    #[serde(rename = "logpoly")]
    LogPoly {
        n: usize,
    },
    Mixed {
        i: usize,
        m: usize,
        n: usize,
    },
    GeneralLn {
        m: usize,
        n: usize,
    },
    Custom {
        basis: Vec<LogPowExpr>,
    },
}

impl SystemKind {
    /// The widest interval the family is considered on.
    pub fn default_interval(&self) -> Interval {
        match self {
            SystemKind::Power { .. } | SystemKind::Custom { .. } => Interval::positive_reals(),
            _ => Interval::beyond_one(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SystemRepr {
    #[serde(flatten)]
    kind: SystemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    interval: Option<Interval>,
}

/// A function family together with the interval it is studied on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SystemRepr", into = "SystemRepr")]
pub struct FunctionSystem {
    kind: SystemKind,
    interval: Interval,
}

impl TryFrom<SystemRepr> for FunctionSystem {
    type Error = SystemError;

    fn try_from(repr: SystemRepr) -> Result<Self, SystemError> {
        let sys = FunctionSystem::new(repr.kind)?;
        match repr.interval {
            Some(iv) => sys.with_interval(iv),
            None => Ok(sys),
        }
    }
}

impl From<FunctionSystem> for SystemRepr {
    fn from(sys: FunctionSystem) -> Self {
        let interval = (sys.interval != sys.kind.default_interval()).then_some(sys.interval);
        SystemRepr { kind: sys.kind, interval }
    }
}

fn monomials(alphas: impl Iterator<Item = Rational>, logpow: u32) -> impl Iterator<Item = LogPowExpr> {
    alphas.map(move |a| LogPowExpr::monomial(a, logpow))
}

fn int_range(lo: usize, hi_inclusive: usize) -> impl Iterator<Item = Rational> {
    (lo..=hi_inclusive).map(|k| rat(k as i64))
}

impl FunctionSystem {
    pub fn new(kind: SystemKind) -> Result<Self, SystemError> {
        match &kind {
            SystemKind::Power { n, .. } | SystemKind::LogPoly { n } if *n == 0 => {
                return Err(SystemError::Invalid("n must be positive".into()));
            }
            SystemKind::GeneralLn { m, n } if m <= n => {
                return Err(SystemError::Invalid(format!("general_ln requires m > n, got m={m}, n={n}")));
            }
            SystemKind::Custom { basis } if basis.is_empty() => {
                return Err(SystemError::Invalid("custom basis is empty".into()));
            }
            _ => {}
        }
        let interval = kind.default_interval();
        Ok(Self { kind, interval })
    }

    pub fn power(r: Rational, n: usize) -> Result<Self, SystemError> {
        Self::new(SystemKind::Power { r, n })
    }

    pub fn log_poly(n: usize) -> Result<Self, SystemError> {
        Self::new(SystemKind::LogPoly { n })
    }

    pub fn mixed(i: usize, m: usize, n: usize) -> Result<Self, SystemError> {
        Self::new(SystemKind::Mixed { i, m, n })
    }

    pub fn general_ln(m: usize, n: usize) -> Result<Self, SystemError> {
        Self::new(SystemKind::GeneralLn { m, n })
    }

    pub fn custom(basis: Vec<LogPowExpr>) -> Result<Self, SystemError> {
        Self::new(SystemKind::Custom { basis })
    }

    /// Restricts the family to a sub-interval of its default interval.
    pub fn with_interval(mut self, interval: Interval) -> Result<Self, SystemError> {
        let widest = self.kind.default_interval();
        if !interval.is_subset_of(&widest) {
            return Err(SystemError::Invalid(format!("interval {interval} is not inside {widest}")));
        }
        self.interval = interval;
        Ok(self)
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn basis(&self) -> Vec<LogPowExpr> {
        match &self.kind {
            SystemKind::Power { r, n } => monomials((0..*n).map(|j| r + rat(j as i64)), 0).collect(),
            SystemKind::LogPoly { n } => {
                monomials(int_range(0, n - 1), 0).chain(monomials(int_range(0, n - 1), 1)).collect()
            }
            SystemKind::Mixed { i, m, n } => {
                monomials(int_range(0, *m), 0).chain(monomials(int_range(*i, i + n), 1)).collect()
            }
            SystemKind::GeneralLn { m, n } => {
                monomials(int_range(0, *m), 0).chain(monomials(int_range(0, *n), 1)).collect()
            }
            SystemKind::Custom { basis } => basis.clone(),
        }
    }

    pub fn dimension(&self) -> usize {
        match &self.kind {
            SystemKind::Power { n, .. } => *n,
            SystemKind::LogPoly { n } => 2 * n,
            SystemKind::Mixed { m, n, .. } | SystemKind::GeneralLn { m, n } => m + n + 2,
            SystemKind::Custom { basis } => basis.len(),
        }
    }

    /// Upper bound on the number of distinct roots of any nonzero member on
    /// the family's interval, or `None` when no bound is known.
    pub fn root_bound(&self) -> Option<usize> {
        match &self.kind {
            SystemKind::Power { n, .. } => Some(n - 1),
            SystemKind::LogPoly { n } => Some(2 * n - 1),
            SystemKind::Mixed { i, m, n } => refined_mixed_bound(*i, *m, *n),
            SystemKind::GeneralLn { m, n } => Some(m + n + 1),
            SystemKind::Custom { .. } => None,
        }
    }

    /// Short justification of [`root_bound`](Self::root_bound).
    pub fn bound_source(&self) -> String {
        match &self.kind {
            SystemKind::Power { .. } => "x^r * p(x) with deg p <= n-1: at most n-1 roots on (0,inf)".into(),
            SystemKind::LogPoly { .. } => {
                "ln(x)p(x)+q(x), deg p,q <= n-1: D^n f = x^-n * (alternating combination of p), at most 2n-1 roots on (1,inf)".into()
            }
            SystemKind::Mixed { i, m, n } => match refined_mixed_bound(*i, *m, *n) {
                Some(_) if m < &(n + i) => {
                    "p(x)+x^i ln(x) q(x), m < n+i: D^(n+i) f = x^-n G(x) with D^n G > 0, at most 2n+i roots on (1,inf)".into()
                }
                Some(_) => "p(x)+ln(x)q(x), m > n: ln x is (n+1)-compatible with degree n, at most m+n+1 roots".into(),
                None => "no bound known for m >= n+i".into(),
            },
            SystemKind::GeneralLn { .. } => {
                "p(x)+ln(x)q(x), m > n: ln x is (n+1)-compatible with degree n, at most m+n+1 roots".into()
            }
            SystemKind::Custom { .. } => "unknown; use the derivative-chain bound on individual members".into(),
        }
    }

    /// `sum coeffs[j] * basis[j]`
    pub fn member(&self, coeffs: &[Rational]) -> Result<LogPowExpr, SystemError> {
        let basis = self.basis();
        if coeffs.len() != basis.len() {
            return Err(SystemError::LengthMismatch { expected: basis.len(), got: coeffs.len() });
        }
        Ok(basis.iter().zip(coeffs).fold(LogPowExpr::zero(), |acc, (g, c)| acc.add(&g.scale(c))))
    }

    /// Coordinates of `f` in the basis, when every basis function is a single
    /// term and `f` lies in their span.
    pub fn coefficients_of(&self, f: &LogPowExpr) -> Option<Vec<Rational>> {
        let basis = self.basis();
        let mut coords = Vec::with_capacity(basis.len());
        for g in &basis {
            let [t] = g.terms() else { return None };
            coords.push(f.coeff_of(t.alpha(), t.logpow()) / t.coeff());
        }
        (self.member(&coords).ok()? == *f).then_some(coords)
    }

    /// True when every basis function is a Laurent polynomial, so matrix
    /// entries at rational nodes are exact.
    pub fn is_exactly_evaluable(&self) -> bool {
        self.basis().iter().all(LogPowExpr::is_laurent_polynomial)
    }

    /// `x^r * (x - x_1) ... (x - x_{n-1})`: a member of a power system with
    /// exactly `n - 1` roots, showing the bound `n - 1` is attained.
    pub fn sharpness_witness(&self, roots: &[Rational]) -> Result<LogPowExpr, SystemError> {
        let SystemKind::Power { r, n } = &self.kind else {
            return Err(SystemError::WrongKind);
        };
        if roots.len() != n - 1 {
            return Err(SystemError::LengthMismatch { expected: n - 1, got: roots.len() });
        }
        let mut seen = HashSet::new();
        for root in roots {
            if !seen.insert(root) {
                return Err(SystemError::DuplicateRoot(root.to_string()));
            }
            if !self.interval.contains(root) {
                return Err(SystemError::RootOutsideInterval {
                    root: root.to_string(),
                    interval: self.interval.to_string(),
                });
            }
        }
        let product = roots
            .iter()
            .fold(LogPowExpr::x_pow(r.clone()), |acc, root| acc.mul(&LogPowExpr::polynomial(&[-root.clone(), rat(1)])));
        Ok(product)
    }
}
