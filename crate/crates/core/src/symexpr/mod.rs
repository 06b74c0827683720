//! Exact algebra and calculus on log-power expressions
//! `sum c * x^alpha * ln(x)^m` with rational `c` and `alpha`.
//!
//! The class is closed under differentiation, so every function the root
//! counting and compatibility machinery needs (members of a span, their
//! derivatives, factored quotients) is represented exactly.

mod expr;
mod interval;
pub mod rational;

pub use expr::{Evaluator, LogPowExpr, LogPowTerm};
pub use interval::Interval;
pub use rational::{factorial, parse_rational, rat, ratio, Rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymExprError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty interval {0}")]
    EmptyInterval(String),
}
