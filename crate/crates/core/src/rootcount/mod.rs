//! Root-count upper bounds (symbolic) and observed root counts (numeric oracle)
//! for log-power expressions on an interval.
//!
//! All counts are counts of distinct roots.

mod alternating;
mod chain;
mod numeric;
mod signs;

pub use alternating::{extract_alternating_form, AlternatingForm, AlternatingTerm};
pub use chain::{derivative_chain_bound, ChainBound, ChainStep};
pub use numeric::{numeric_count_roots, NumericRoots, OracleParams, DEFAULT_GRID_POINTS, DEFAULT_HORIZON, DEFAULT_TOL};
pub use signs::{budan_fourier_bound, descartes_bound, sign_variations};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symexpr::{Interval, LogPowExpr, SymExprError};

pub const DEFAULT_MAX_DEPTH: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootCountError {
    #[error("not a polynomial: {0}")]
    NotPolynomial(String),
    #[error("the zero function has infinitely many roots")]
    ZeroExpression,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("lemma violated: {0}")]
    LemmaViolation(String),
    #[error(transparent)]
    Domain(#[from] SymExprError),
}

/// Symbolic bound next to what the numeric oracle actually sees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootCountReport {
    pub expr: LogPowExpr,
    pub interval: Interval,
    #[serde(with = "bound_serde")]
    pub bound: Option<usize>,
    pub bound_chain: Vec<ChainStep>,
    pub observed: usize,
    pub observed_roots: Vec<(f64, f64)>,
}

impl RootCountReport {
    /// False only when the oracle saw more roots than the bound allows.
    pub fn is_consistent(&self) -> bool {
        self.bound.is_none_or(|b| self.observed <= b)
    }
}

pub fn root_count_report(
    f: &LogPowExpr,
    interval: &Interval,
    max_depth: usize,
    params: &OracleParams,
) -> Result<RootCountReport, RootCountError> {
    let ChainBound { bound, chain } = derivative_chain_bound(f, interval, max_depth);
    let observed = numeric_count_roots(f, interval, params)?;
    Ok(RootCountReport {
        expr: f.clone(),
        interval: interval.clone(),
        bound,
        bound_chain: chain,
        observed: observed.count,
        observed_roots: observed.brackets,
    })
}

/// `Option<usize>` as a JSON number or the string `"unknown"`.
pub mod bound_serde {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &Option<usize>, s: S) -> Result<S::Ok, S::Error> {
        match b {
            Some(v) => s.serialize_u64(*v as u64),
            None => s.serialize_str("unknown"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<usize>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(usize),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Some(v)),
            Repr::Text(t) if t == "unknown" => Ok(None),
            Repr::Text(t) => Err(de::Error::custom(format!("expected a count or \"unknown\", got {t:?}"))),
        }
    }
}
