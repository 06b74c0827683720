//! Brute-force root counting: sign changes on a geometric grid, refined by bisection.
//!
//! The count is a lower bound on the number of distinct roots. Roots of even
//! multiplicity and pairs of roots closer than the grid spacing can be missed,
//! but a reported bracket always contains a sign change (or an exact zero), so
//! the oracle never invents roots.

use serde::{Deserialize, Serialize};

use super::RootCountError;
use crate::symexpr::{Evaluator, Interval, LogPowExpr};

pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_HORIZON: f64 = 1e4;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleParams {
    pub grid_points: usize,
    pub tol: f64,
    /// Stand-in for `+inf`; a zero lower endpoint is clamped to `1 / horizon`.
    pub horizon: f64,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self { grid_points: DEFAULT_GRID_POINTS, tol: DEFAULT_TOL, horizon: DEFAULT_HORIZON }
    }
}

impl OracleParams {
    fn validate(&self) -> Result<(), RootCountError> {
        if self.grid_points < 2 {
            return Err(RootCountError::InvalidArgument("grid_points must be at least 2".into()));
        }
        if !(self.tol > 0.0) || !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(RootCountError::InvalidArgument("tol and horizon must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericRoots {
    pub count: usize,
    /// Disjoint `(a, b)` brackets, each holding one sign change.
    pub brackets: Vec<(f64, f64)>,
}

pub fn numeric_count_roots(
    f: &LogPowExpr,
    interval: &Interval,
    params: &OracleParams,
) -> Result<NumericRoots, RootCountError> {
    params.validate()?;
    if f.is_zero() {
        return Err(RootCountError::ZeroExpression);
    }
    let (lo, hi) = interval.clamp(params.horizon)?;
    let eval = f.evaluator();
    let brackets = scan(&eval, lo, hi, params);
    Ok(NumericRoots { count: brackets.len(), brackets })
}

fn scan(eval: &Evaluator, lo: f64, hi: f64, params: &OracleParams) -> Vec<(f64, f64)> {
    let (log_lo, log_hi) = (lo.ln(), hi.ln());
    let steps = (params.grid_points + 1) as f64;
    let mut brackets = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    // Interior points only: the interval is open.
    for k in 1..=params.grid_points {
        let x = (log_lo + (log_hi - log_lo) * (k as f64) / steps).exp();
        let fx = eval.evaluate_unchecked(x);
        if !fx.is_finite() {
            prev = None;
            continue;
        }
        if fx == 0.0 {
            brackets.push((x, x));
            prev = None;
            continue;
        }
        if let Some((px, pf)) = prev {
            if (pf < 0.0) != (fx < 0.0) {
                brackets.push(bisect(eval, (px, pf), (x, fx), params.tol));
            }
        }
        prev = Some((x, fx));
    }
    brackets
}

fn bisect(eval: &Evaluator, (mut a, fa): (f64, f64), (mut b, _): (f64, f64), tol: f64) -> (f64, f64) {
    let a_negative = fa < 0.0;
    for _ in 0..MAX_BISECTIONS {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = eval.evaluate_unchecked(m);
        if fm == 0.0 {
            return (m, m);
        }
        if (fm < 0.0) == a_negative {
            a = m;
        } else {
            b = m;
        }
    }
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::rat;

    #[test]
    fn quadratic_with_two_roots() {
        let f = LogPowExpr::polynomial(&[rat(6), rat(-5), rat(1)]);
        let r = numeric_count_roots(&f, &Interval::beyond_one(), &OracleParams::default()).unwrap();
        assert_eq!(r.count, 2);
        assert!((r.brackets[0].0 - 2.0).abs() < 1e-9 && (r.brackets[0].1 - 2.0).abs() < 1e-9);
        assert!((r.brackets[1].0 - 3.0).abs() < 1e-9);
        for (a, b) in &r.brackets {
            assert!(b - a <= 1e-10 + 1e-15);
        }
    }

    #[test]
    fn log_minus_one() {
        let f = LogPowExpr::ln().sub(&LogPowExpr::constant(rat(1)));
        let r = numeric_count_roots(&f, &Interval::beyond_one(), &OracleParams::default()).unwrap();
        assert_eq!(r.count, 1);
        assert!((r.brackets[0].0 - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn no_real_roots() {
        let f = LogPowExpr::polynomial(&[rat(1), rat(0), rat(1)]);
        let r = numeric_count_roots(&f, &Interval::positive_reals(), &OracleParams::default()).unwrap();
        assert_eq!(r.count, 0);
        assert!(r.brackets.is_empty());
    }

    #[test]
    fn open_endpoint_zero_is_not_counted() {
        // ln x vanishes at 1, which is outside (1, inf).
        let r = numeric_count_roots(&LogPowExpr::ln(), &Interval::beyond_one(), &OracleParams::default()).unwrap();
        assert_eq!(r.count, 0);
    }

    #[test]
    fn rejects_bad_input() {
        let p = OracleParams { grid_points: 1, ..Default::default() };
        assert!(numeric_count_roots(&LogPowExpr::ln(), &Interval::beyond_one(), &p).is_err());
        assert!(matches!(
            numeric_count_roots(&LogPowExpr::zero(), &Interval::beyond_one(), &OracleParams::default()),
            Err(RootCountError::ZeroExpression)
        ));
        let neg = Interval::new(None, Some(rat(3))).unwrap();
        assert!(numeric_count_roots(&LogPowExpr::ln(), &neg, &OracleParams::default()).is_err());
    }

    #[test]
    fn deterministic() {
        let f = LogPowExpr::ln().mul(&LogPowExpr::polynomial(&[rat(-3), rat(1)])).add(&LogPowExpr::constant(rat(1)));
        let p = OracleParams::default();
        assert_eq!(
            numeric_count_roots(&f, &Interval::beyond_one(), &p).unwrap(),
            numeric_count_roots(&f, &Interval::beyond_one(), &p).unwrap()
        );
    }
}
