//! Alternant matrices `A(G, X) = [g_j(x_i)]`, their invertibility, and
//! interpolation in the span of `G`.
//!
//! When every basis function is a Laurent polynomial the matrix is built from
//! exact rationals and the determinant comes from Bareiss elimination, so the
//! invertibility verdict is exact. Otherwise entries are floats and the verdict
//! compares `|det|` against `threshold * prod_i max_j |a_ij|`.

pub mod linalg;

use std::sync::OnceLock;

use num_traits::Zero;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::symexpr::rational::{format_rational, from_f64, to_f64};
use crate::symexpr::{LogPowExpr, Rational, SymExprError};
use crate::systems::{FunctionSystem, SystemError};
use linalg::{bareiss_determinant, mat_vec, max_abs, norm1, solve_exact, LuFactors};

pub const DEFAULT_REL_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlternantError {
    #[error("expected {expected} nodes, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("duplicate node {0}")]
    DuplicateNode(String),
    #[error("node {node} outside {interval}")]
    NodeOutsideInterval { node: String, interval: String },
    #[error("matrix is singular to tolerance")]
    Singular,
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Eval(#[from] SymExprError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Entries {
    Exact(Vec<Vec<Rational>>),
    Float(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Determinant {
    Exact(Rational),
    Float(f64),
}

impl Determinant {
    pub fn to_f64(&self) -> f64 {
        match self {
            Determinant::Exact(q) => to_f64(q),
            Determinant::Float(v) => *v,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Determinant::Exact(q) => q.is_zero(),
            Determinant::Float(v) => *v == 0.0,
        }
    }
}

impl Serialize for Determinant {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Determinant::Exact(q) => s.serialize_str(&format_rational(q)),
            Determinant::Float(v) => s.serialize_f64(*v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    PartialPivotLu,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvertibilityVerdict {
    pub invertible: bool,
    pub determinant: Determinant,
    /// 1-norm condition number estimate; absent when the float LU is singular.
    pub condition_estimate: Option<f64>,
    pub method: Method,
    /// Relative threshold used on the float path.
    pub threshold: Option<f64>,
    /// `prod_i max_j |a_ij|`, the scale `|det|` is compared against.
    pub row_scale: f64,
}

/// `[g_j(x_i)]` for a function system and strictly increasing nodes.
#[derive(Debug)]
pub struct AlternantMatrix {
    system: FunctionSystem,
    nodes: Vec<Rational>,
    entries: Entries,
    float: Vec<Vec<f64>>,
    lu: OnceLock<LuFactors>,
}

impl Clone for AlternantMatrix {
    fn clone(&self) -> Self {
        Self {
            system: self.system.clone(),
            nodes: self.nodes.clone(),
            entries: self.entries.clone(),
            float: self.float.clone(),
            lu: OnceLock::new(),
        }
    }
}

/// Sorts `nodes` and checks they are distinct and inside `system`'s interval.
fn prepare_nodes(system: &FunctionSystem, nodes: &[Rational]) -> Result<Vec<Rational>, AlternantError> {
    let expected = system.dimension();
    if nodes.len() != expected {
        return Err(AlternantError::SizeMismatch { expected, got: nodes.len() });
    }
    let mut sorted = nodes.to_vec();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(AlternantError::DuplicateNode(w[0].to_string()));
    }
    if let Some(x) = sorted.iter().find(|x| !system.interval().contains(x)) {
        return Err(AlternantError::NodeOutsideInterval {
            node: x.to_string(),
            interval: system.interval().to_string(),
        });
    }
    Ok(sorted)
}

impl AlternantMatrix {
    pub fn build(system: &FunctionSystem, nodes: &[Rational]) -> Result<Self, AlternantError> {
        let nodes = prepare_nodes(system, nodes)?;
        let basis = system.basis();
        let entries = if system.is_exactly_evaluable() {
            let rows = nodes
                .iter()
                .map(|x| {
                    basis
                        .iter()
                        .map(|g| Ok(g.evaluate_exact(x)?.expect("Laurent polynomial evaluates exactly")))
                        .collect::<Result<Vec<_>, SymExprError>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            Entries::Exact(rows)
        } else {
            let rows = nodes
                .iter()
                .map(|x| basis.iter().map(|g| g.evaluate_at(x)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            Entries::Float(rows)
        };
        let float = match &entries {
            Entries::Exact(rows) => rows.iter().map(|r| r.iter().map(to_f64).collect()).collect(),
            Entries::Float(rows) => rows.clone(),
        };
        Ok(Self { system: system.clone(), nodes, entries, float, lu: OnceLock::new() })
    }

    pub fn system(&self) -> &FunctionSystem {
        &self.system
    }

    pub fn nodes(&self) -> &[Rational] {
        &self.nodes
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.entries, Entries::Exact(_))
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Entries as floats (rounded once from the exact values on the exact path).
    pub fn to_f64(&self) -> &[Vec<f64>] {
        &self.float
    }

    fn lu(&self) -> &LuFactors {
        self.lu.get_or_init(|| LuFactors::new(&self.float))
    }

    pub fn determinant(&self) -> Determinant {
        match &self.entries {
            Entries::Exact(rows) => Determinant::Exact(bareiss_determinant(rows)),
            Entries::Float(_) => Determinant::Float(self.lu().determinant()),
        }
    }

    pub fn condition_estimate(&self) -> Option<f64> {
        let lu = self.lu();
        if lu.is_singular() {
            return None;
        }
        lu.inverse_norm1_estimate().map(|inv| inv * norm1(&self.float))
    }

    pub fn row_scale(&self) -> f64 {
        self.float.iter().map(|row| max_abs(row)).product()
    }

    pub fn is_invertible(&self, rel_threshold: f64) -> InvertibilityVerdict {
        let determinant = self.determinant();
        let row_scale = self.row_scale();
        let condition_estimate = self.condition_estimate();
        match &determinant {
            Determinant::Exact(q) => InvertibilityVerdict {
                invertible: !q.is_zero(),
                determinant,
                condition_estimate,
                method: Method::Exact,
                threshold: None,
                row_scale,
            },
            Determinant::Float(d) => InvertibilityVerdict {
                invertible: d.abs() > rel_threshold * row_scale,
                determinant,
                condition_estimate,
                method: Method::PartialPivotLu,
                threshold: Some(rel_threshold),
                row_scale,
            },
        }
    }

    /// Entries as CSV, one matrix row per line, nodes in the first column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node");
        for j in 0..self.size() {
            out.push_str(&format!(",g{j}"));
        }
        out.push('\n');
        for (x, row) in self.nodes.iter().zip(&self.float) {
            out.push_str(&format_rational(x));
            for v in row {
                out.push_str(&format!(",{v:e}"));
            }
            out.push('\n');
        }
        out
    }
}

impl Serialize for AlternantMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(untagged)]
        enum EntriesView<'a> {
            Exact(Vec<Vec<String>>),
            Float(&'a [Vec<f64>]),
        }
        #[derive(Serialize)]
        struct View<'a> {
            system: &'a FunctionSystem,
            nodes: Vec<String>,
            exact: bool,
            entries: EntriesView<'a>,
        }
        let entries = match &self.entries {
            Entries::Exact(rows) => {
                EntriesView::Exact(rows.iter().map(|r| r.iter().map(format_rational).collect()).collect())
            }
            Entries::Float(rows) => EntriesView::Float(rows),
        };
        View {
            system: &self.system,
            nodes: self.nodes.iter().map(format_rational).collect(),
            exact: self.is_exact(),
            entries,
        }
        .serialize(s)
    }
}

/// Result of interpolating `values` at `nodes` in the span of a system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interpolant {
    #[serde(with = "crate::symexpr::rational::serde_vec")]
    pub coefficients: Vec<Rational>,
    pub coefficients_f64: Vec<f64>,
    pub expr: LogPowExpr,
    /// `||A a - v||_inf`
    pub residual: f64,
    pub exact: bool,
}

pub fn solve_interpolation(
    system: &FunctionSystem,
    nodes: &[Rational],
    values: &[Rational],
) -> Result<Interpolant, AlternantError> {
    if values.len() != nodes.len() {
        return Err(AlternantError::SizeMismatch { expected: nodes.len(), got: values.len() });
    }
    // Pair values with nodes before sorting so the pairing survives.
    let mut pairs: Vec<(Rational, Rational)> = nodes.iter().cloned().zip(values.iter().cloned()).collect();
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    let (nodes, values): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let matrix = AlternantMatrix::build(system, &nodes)?;
    let values_f64: Vec<f64> = values.iter().map(to_f64).collect();

    if let Entries::Exact(rows) = &matrix.entries {
        let coefficients = solve_exact(rows, &values).ok_or(AlternantError::Singular)?;
        let expr = system.member(&coefficients)?;
        return Ok(Interpolant {
            coefficients_f64: coefficients.iter().map(to_f64).collect(),
            coefficients,
            expr,
            residual: 0.0,
            exact: true,
        });
    }

    if !matrix.is_invertible(DEFAULT_REL_THRESHOLD).invertible {
        return Err(AlternantError::Singular);
    }
    let a = matrix.to_f64();
    let lu = matrix.lu();
    let mut x = lu.solve(&values_f64).ok_or(AlternantError::Singular)?;
    let r: Vec<f64> = mat_vec(a, &x).iter().zip(&values_f64).map(|(ax, v)| v - ax).collect();
    if let Some(dx) = lu.solve(&r) {
        for (xi, di) in x.iter_mut().zip(dx) {
            *xi += di;
        }
    }
    let residual = max_abs(&mat_vec(a, &x).iter().zip(&values_f64).map(|(ax, v)| ax - v).collect::<Vec<_>>());
    let coefficients: Vec<Rational> =
        x.iter().map(|&c| from_f64(c)).collect::<Option<_>>().ok_or(AlternantError::Singular)?;
    let expr = system.member(&coefficients)?;
    Ok(Interpolant { coefficients, coefficients_f64: x, expr, residual, exact: false })
}
