//! Seeded randomized campaigns that hold the symbolic bounds against the
//! numeric oracles, plus exact checks of the derivative lemmas.
//!
//! Every trial draws from its own ChaCha stream keyed by `(seed, trial)`, so a
//! report depends only on its configuration; trials run in parallel and are
//! aggregated in trial order.

mod lemmas;
pub mod sampling;

pub use lemmas::{verify_lemma, LemmaId, LemmaParams};

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::alternant::{AlternantError, AlternantMatrix};
use crate::rootcount::{numeric_count_roots, OracleParams, RootCountError};
use crate::symexpr::rational::{format_rational, rat};
use crate::symexpr::{Interval, Rational};
use crate::systems::{FunctionSystem, SystemError};
use sampling::{random_nonzero_vector, trial_rng, NodeSampler};

pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_COEFF_BOUND: i64 = 1000;
pub const DEFAULT_MIN_GAP: f64 = 0.05;
pub const DEFAULT_THRESHOLD: f64 = crate::alternant::DEFAULT_REL_THRESHOLD;
/// Width of the default node range above the lower end of an unbounded interval.
pub const DEFAULT_NODE_SPAN: i64 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("{0} has no known root bound; supply one with \"bound\"")]
    UnknownBound(String),
    #[error("invalid campaign config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Alternant(#[from] AlternantError),
    #[error(transparent)]
    RootCount(#[from] RootCountError),
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_coeff_bound() -> i64 {
    DEFAULT_COEFF_BOUND
}

fn default_min_gap() -> f64 {
    DEFAULT_MIN_GAP
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub spec: FunctionSystem,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Coefficients are `p/q` with `|p| <= coeff_bound`, `1 <= q <= coeff_bound`.
    #[serde(default = "default_coeff_bound")]
    pub coeff_bound: i64,
    /// Defaults to the system dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_count: Option<usize>,
    /// Must be bounded and inside the system interval; defaults to the system
    /// interval cut to `DEFAULT_NODE_SPAN` units when it is unbounded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_range: Option<Interval>,
    #[serde(default = "default_min_gap")]
    pub min_gap: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(flatten)]
    pub oracle: OracleParams,
    /// Replaces the system's own root bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    /// Power systems only: add the sharpness witness with these roots as an extra trial.
    #[serde(default, skip_serializing_if = "Vec::is_empty", with = "crate::symexpr::rational::serde_vec")]
    pub witness_roots: Vec<Rational>,
}

impl CampaignConfig {
    pub fn new(spec: FunctionSystem) -> Self {
        Self {
            spec,
            trials: DEFAULT_TRIALS,
            seed: 0,
            coeff_bound: DEFAULT_COEFF_BOUND,
            node_count: None,
            node_range: None,
            min_gap: DEFAULT_MIN_GAP,
            threshold: DEFAULT_THRESHOLD,
            oracle: OracleParams::default(),
            bound: None,
            witness_roots: Vec::new(),
        }
    }

    pub fn trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn node_range(mut self, range: Interval) -> Self {
        self.node_range = Some(range);
        self
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::InvalidConfig("trials must be at least 1".into()));
        }
        if self.coeff_bound < 1 {
            return Err(HarnessError::InvalidConfig("coeff_bound must be at least 1".into()));
        }
        if !(self.min_gap > 0.0) || !(self.threshold > 0.0) {
            return Err(HarnessError::InvalidConfig("min_gap and threshold must be positive".into()));
        }
        if let Some(range) = &self.node_range {
            if !range.is_subset_of(self.spec.interval()) {
                return Err(HarnessError::InvalidConfig(format!(
                    "node range {range} is not inside {}",
                    self.spec.interval()
                )));
            }
        }
        Ok(())
    }

    fn effective_node_range(&self) -> Interval {
        if let Some(range) = &self.node_range {
            return range.clone();
        }
        let interval = self.spec.interval();
        match (interval.lo(), interval.hi()) {
            (Some(_), Some(_)) => interval.clone(),
            (lo, _) => {
                let lo = lo.cloned().unwrap_or_else(|| rat(0));
                let hi = &lo + rat(DEFAULT_NODE_SPAN);
                Interval::open(lo, hi).expect("nonempty span")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub detail: String,
    pub instance: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub campaign: String,
    pub config: Value,
    pub pass: bool,
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_observed_roots: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_abs_determinant: Option<f64>,
    /// Smallest `|det| / prod_i max_j |a_ij|` seen.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_relative_determinant: Option<f64>,
    /// Observed root count -> number of trials.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub histogram: BTreeMap<usize, usize>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub tables: Value,
    pub wall_time_ms: u64,
}

impl CampaignReport {
    fn new(campaign: &str, config: Value, trials: usize) -> Self {
        Self {
            campaign: campaign.to_string(),
            config,
            pass: true,
            trials,
            bound: None,
            violations: Vec::new(),
            max_observed_roots: None,
            min_abs_determinant: None,
            min_relative_determinant: None,
            histogram: BTreeMap::new(),
            tables: Value::Null,
            wall_time_ms: 0,
        }
    }

    fn finish(mut self, started: Instant) -> Self {
        self.violations.sort_by_key(|v| v.trial);
        self.pass = self.violations.is_empty();
        self.wall_time_ms = started.elapsed().as_millis() as u64;
        self
    }

    /// JSON with the wall time zeroed; equal for equal configurations.
    pub fn canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.wall_time_ms = 0;
        serde_json::to_string(&copy).expect("report serializes")
    }

    /// One-line summary for terminals.
    pub fn summary(&self) -> String {
        let mut line = format!(
            "{} {}: {} trials, {} violations",
            self.campaign,
            if self.pass { "PASS" } else { "FAIL" },
            self.trials,
            self.violations.len()
        );
        if let Some(b) = self.bound {
            line.push_str(&format!(", bound {b}"));
        }
        if let Some(m) = self.max_observed_roots {
            line.push_str(&format!(", max observed roots {m}"));
        }
        if let Some(d) = self.min_abs_determinant {
            line.push_str(&format!(", min |det| {d:e}"));
        }
        if let Some(d) = self.min_relative_determinant {
            line.push_str(&format!(", min relative det {d:e}"));
        }
        line.push_str(&format!(", {} ms", self.wall_time_ms));
        line
    }
}

fn coeffs_json(c: &[Rational]) -> Value {
    json!(c.iter().map(format_rational).collect::<Vec<_>>())
}

/// Draws random nonzero members and checks that the oracle never sees more
/// roots than the bound.
pub fn run_root_bound_campaign(cfg: &CampaignConfig) -> Result<CampaignReport, HarnessError> {
    let started = Instant::now();
    cfg.validate()?;
    let system = &cfg.spec;
    let bound = cfg
        .bound
        .or_else(|| system.root_bound())
        .ok_or_else(|| HarnessError::UnknownBound(serde_json::to_string(system).unwrap_or_default()))?;
    let dim = system.dimension();

    let mut members: Vec<Vec<Rational>> = Vec::new();
    if !cfg.witness_roots.is_empty() {
        let witness = system.sharpness_witness(&cfg.witness_roots)?;
        let coords = system
            .coefficients_of(&witness)
            .ok_or_else(|| HarnessError::InvalidConfig("witness is not in the span".into()))?;
        members.push(coords);
    }

    let random: Vec<Vec<Rational>> =
        (0..cfg.trials).map(|t| random_nonzero_vector(&mut trial_rng(cfg.seed, t), dim, cfg.coeff_bound)).collect();
    let all: Vec<(usize, Vec<Rational>)> = random.into_iter().chain(members).enumerate().collect();

    let outcomes: Vec<Result<(usize, usize, Option<Violation>), HarnessError>> = all
        .par_iter()
        .map(|(trial, coeffs)| {
            let f = system.member(coeffs)?;
            let roots = numeric_count_roots(&f, system.interval(), &cfg.oracle)?;
            let violation = (roots.count > bound).then(|| Violation {
                trial: *trial,
                detail: format!("observed {} roots, bound {bound}", roots.count),
                instance: json!({ "coeffs": coeffs_json(coeffs), "member": f.to_string(), "brackets": roots.brackets }),
            });
            Ok((*trial, roots.count, violation))
        })
        .collect();

    let mut report = CampaignReport::new("root_bound", serde_json::to_value(cfg).unwrap_or(Value::Null), all.len());
    report.bound = Some(bound);
    for outcome in outcomes {
        let (_, count, violation) = outcome?;
        *report.histogram.entry(count).or_insert(0) += 1;
        report.max_observed_roots = Some(report.max_observed_roots.map_or(count, |m| m.max(count)));
        report.violations.extend(violation);
    }
    Ok(report.finish(started))
}

/// Draws random well-separated node sets and checks that every alternant
/// matrix passes the invertibility test.
pub fn run_invertibility_campaign(cfg: &CampaignConfig) -> Result<CampaignReport, HarnessError> {
    let started = Instant::now();
    cfg.validate()?;
    let system = &cfg.spec;
    let dim = system.dimension();
    if let Some(count) = cfg.node_count {
        if count != dim {
            return Err(HarnessError::InvalidConfig(format!("node_count {count} differs from dimension {dim}")));
        }
    }
    let range = cfg.effective_node_range();
    let sampler = NodeSampler::new(&range, cfg.min_gap, dim).ok_or_else(|| {
        HarnessError::InvalidConfig(format!("{dim} nodes with gap {} do not fit in {range}", cfg.min_gap))
    })?;

    let outcomes: Vec<Result<(f64, f64, Option<Violation>), HarnessError>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let nodes = sampler.sample(&mut trial_rng(cfg.seed, trial), dim);
            let matrix = AlternantMatrix::build(system, &nodes)?;
            let verdict = matrix.is_invertible(cfg.threshold);
            let det = verdict.determinant.to_f64().abs();
            let relative = if verdict.row_scale > 0.0 { det / verdict.row_scale } else { 0.0 };
            let violation = (!verdict.invertible).then(|| Violation {
                trial,
                detail: format!("determinant {det:e} fails the invertibility test"),
                instance: json!({ "nodes": coeffs_json(&nodes), "verdict": verdict }),
            });
            Ok((det, relative, violation))
        })
        .collect();

    let mut report = CampaignReport::new("invertibility", serde_json::to_value(cfg).unwrap_or(Value::Null), cfg.trials);
    for outcome in outcomes {
        let (det, relative, violation) = outcome?;
        report.min_abs_determinant = Some(report.min_abs_determinant.map_or(det, |m| m.min(det)));
        report.min_relative_determinant = Some(report.min_relative_determinant.map_or(relative, |m| m.min(relative)));
        report.violations.extend(violation);
    }
    report.tables = json!({ "node_range": range });
    Ok(report.finish(started))
}
