//! Exact checks of the derivative identities behind the root bounds.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::sampling::{random_nonzero_vector, trial_rng};
use super::{coeffs_json, CampaignReport, HarnessError, Violation, DEFAULT_COEFF_BOUND};
use crate::rootcount::{extract_alternating_form, numeric_count_roots, OracleParams};
use crate::symexpr::rational::{factorial, format_rational, rat};
use crate::symexpr::{Interval, LogPowExpr, Rational};
use crate::systems::FunctionSystem;

/// Largest derivative order or dimension accepted.
pub const MAX_LEMMA_ORDER: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    /// `D^(k+1)(x^k ln x) = k! x^-1`
    LogDerivative1,
    /// `D^N(p ln x) = x^-N sum_j (-1)^(N-1+j) c_j a_j x^j`, `c_j > 0`
    LogDerivative2,
    /// `D^k(x^k ln x) = k! ln x + C_k`, `C_1 = 1`, `C_(k+1) = (k+1) C_k + k!`
    LogDerivative3,
    /// Roots of `f` exceed those of `f'` by at most one.
    DerivativeRoots,
    /// `D^N(x^j ln x)` has sign `(-1)^(N-1+j)` for `j < N`.
    AlternatingSigns,
}

impl LemmaId {
    pub const ALL: [LemmaId; 5] = [
        LemmaId::LogDerivative1,
        LemmaId::LogDerivative2,
        LemmaId::LogDerivative3,
        LemmaId::DerivativeRoots,
        LemmaId::AlternatingSigns,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::LogDerivative1 => "log_derivative_1",
            LemmaId::LogDerivative2 => "log_derivative_2",
            LemmaId::LogDerivative3 => "log_derivative_3",
            LemmaId::DerivativeRoots => "derivative_roots",
            LemmaId::AlternatingSigns => "alternating_signs",
        }
    }
}

impl std::str::FromStr for LemmaId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        LemmaId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| HarnessError::InvalidConfig(format!("unknown lemma {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LemmaParams {
    /// Largest `k` for the `log_derivative_1` and `_3` identities.
    pub kmax: usize,
    pub nmin: usize,
    /// Largest `N` for `log_derivative_2`, `alternating_signs` and the
    /// `H_N` families sampled by `derivative_roots`.
    pub nmax: usize,
    /// Random polynomials per `N`, or random members in total for `derivative_roots`.
    pub samples: usize,
    pub seed: u64,
    pub coeff_bound: i64,
    #[serde(flatten)]
    pub oracle: OracleParams,
}

impl Default for LemmaParams {
    fn default() -> Self {
        Self {
            kmax: 10,
            nmin: 2,
            nmax: 8,
            samples: 100,
            seed: 0,
            coeff_bound: DEFAULT_COEFF_BOUND,
            oracle: OracleParams::default(),
        }
    }
}

impl LemmaParams {
    fn validate(&self, id: LemmaId) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::InvalidConfig(msg));
        if self.kmax > MAX_LEMMA_ORDER || self.nmax > MAX_LEMMA_ORDER {
            return bad(format!("kmax and nmax must be at most {MAX_LEMMA_ORDER}"));
        }
        let nmin = match id {
            LemmaId::DerivativeRoots => 1,
            _ => 2,
        };
        if self.nmin < nmin || self.nmin > self.nmax {
            return bad(format!("need {nmin} <= nmin <= nmax, got nmin {} nmax {}", self.nmin, self.nmax));
        }
        if self.coeff_bound < 1 {
            return bad("coeff_bound must be at least 1".into());
        }
        if id == LemmaId::LogDerivative3 && self.kmax < 1 {
            return bad("log_derivative_3 starts at k = 1".into());
        }
        Ok(())
    }
}

/// Runs the exact (or, for `derivative_roots`, oracle-backed) check of one lemma.
pub fn verify_lemma(id: LemmaId, params: &LemmaParams) -> Result<CampaignReport, HarnessError> {
    let started = Instant::now();
    params.validate(id)?;
    let config = json!({ "lemma": id, "params": params });
    let mut report = match id {
        LemmaId::LogDerivative1 => log_derivative_1(params),
        LemmaId::LogDerivative2 => log_derivative_2(params),
        LemmaId::LogDerivative3 => log_derivative_3(params),
        LemmaId::DerivativeRoots => derivative_roots(params)?,
        LemmaId::AlternatingSigns => alternating_signs(params),
    };
    report.campaign = id.name().to_string();
    report.config = config;
    Ok(report.finish(started))
}

fn x_k_ln(k: usize) -> LogPowExpr {
    LogPowExpr::monomial(rat(k as i64), 1)
}

fn log_derivative_1(p: &LemmaParams) -> CampaignReport {
    let mut report = CampaignReport::new("", Value::Null, p.kmax + 1);
    for k in 0..=p.kmax {
        let got = x_k_ln(k).differentiate_n(k + 1);
        let want = LogPowExpr::term(factorial(k as u32), rat(-1), 0);
        if got != want {
            report.violations.push(Violation {
                trial: k,
                detail: format!("D^{}(x^{k} ln x) = {got}, expected {want}", k + 1),
                instance: json!({ "k": k, "got": got, "expected": want }),
            });
        }
    }
    report
}

fn log_derivative_3(p: &LemmaParams) -> CampaignReport {
    let mut report = CampaignReport::new("", Value::Null, p.kmax);
    let mut c = rat(1);
    let mut sequence = Vec::new();
    for k in 1..=p.kmax {
        if k > 1 {
            c = rat(k as i64) * &c + factorial(k as u32 - 1);
        }
        let got = x_k_ln(k).differentiate_n(k);
        let want = LogPowExpr::from_terms([(factorial(k as u32), rat(0), 1), (c.clone(), rat(0), 0)]);
        if got != want {
            report.violations.push(Violation {
                trial: k,
                detail: format!("D^{k}(x^{k} ln x) = {got}, expected {want}"),
                instance: json!({ "k": k, "got": got, "expected": want }),
            });
        }
        sequence.push(format_rational(&got.coeff_of(&rat(0), 0)));
    }
    report.tables = json!({ "C_k": sequence });
    report
}

fn log_derivative_2(p: &LemmaParams) -> CampaignReport {
    let ns: Vec<usize> = (p.nmin..=p.nmax).collect();
    let mut report = CampaignReport::new("", Value::Null, ns.len() * p.samples);
    let mut tables = serde_json::Map::new();
    for (block, &n) in ns.iter().enumerate() {
        let outcomes: Vec<(usize, Vec<Rational>, Result<Vec<Rational>, String>)> = (0..p.samples)
            .into_par_iter()
            .map(|s| {
                let trial = block * p.samples + s;
                let coeffs = random_nonzero_vector(&mut trial_rng(p.seed, trial), n, p.coeff_bound);
                let outcome = extract_alternating_form(&coeffs, n).map_err(|e| e.to_string()).and_then(|form| {
                    let direct = LogPowExpr::polynomial(&coeffs).mul(&LogPowExpr::ln()).differentiate_n(n);
                    if form.to_expr() == direct {
                        Ok(form.constants())
                    } else {
                        Err(format!("alternating form {} differs from D^{n}(p ln x) = {direct}", form.to_expr()))
                    }
                });
                (trial, coeffs, outcome)
            })
            .collect();
        let mut reference: Option<Vec<Rational>> = None;
        for (trial, coeffs, outcome) in outcomes {
            let detail = match outcome {
                Err(e) => Some(e),
                Ok(c) => match &reference {
                    None => {
                        reference = Some(c);
                        None
                    }
                    Some(r) if *r != c => Some(format!("constants {c:?} depend on p")),
                    Some(_) => None,
                },
            };
            if let Some(detail) = detail {
                report.violations.push(Violation {
                    trial,
                    detail,
                    instance: json!({ "N": n, "p": coeffs_json(&coeffs) }),
                });
            }
        }
        if let Some(r) = reference {
            tables.insert(n.to_string(), coeffs_json(&r));
        }
    }
    report.tables = json!({ "c_j": tables });
    report
}

fn alternating_signs(p: &LemmaParams) -> CampaignReport {
    let ns: Vec<usize> = (p.nmin..=p.nmax).collect();
    let mut report = CampaignReport::new("", Value::Null, ns.iter().sum());
    let mut trial = 0;
    for &n in &ns {
        for j in 0..n {
            let d = x_k_ln(j).differentiate_n(n);
            let [t] = d.terms() else {
                report.violations.push(Violation {
                    trial,
                    detail: format!("D^{n}(x^{j} ln x) = {d} is not a single term"),
                    instance: json!({ "N": n, "j": j }),
                });
                trial += 1;
                continue;
            };
            let expected_negative = (n - 1 + j) % 2 == 1;
            let shape_ok = t.logpow() == 0 && *t.alpha() == rat(j as i64 - n as i64);
            let sign_ok = (*t.coeff() < rat(0)) == expected_negative && *t.coeff() != rat(0);
            if !(shape_ok && sign_ok) {
                report.violations.push(Violation {
                    trial,
                    detail: format!("D^{n}(x^{j} ln x) = {d} has the wrong shape or sign"),
                    instance: json!({ "N": n, "j": j, "derivative": d }),
                });
            }
            trial += 1;
        }
    }
    report
}

/// Random members of `H_N` on `(1, inf)`: the oracle may undercount `f'`
/// at tangencies, so this is evidence rather than proof.
fn derivative_roots(p: &LemmaParams) -> Result<CampaignReport, HarnessError> {
    let ns: Vec<usize> = (p.nmin.max(1)..=p.nmax.min(4)).collect();
    let total = p.samples;
    let interval = Interval::beyond_one();
    let outcomes: Vec<Result<(usize, usize, Option<Violation>), HarnessError>> = (0..total)
        .into_par_iter()
        .map(|trial| {
            let n = ns[trial % ns.len()];
            let system = FunctionSystem::log_poly(n)?;
            let coeffs = random_nonzero_vector(&mut trial_rng(p.seed, trial), system.dimension(), p.coeff_bound);
            let f = system.member(&coeffs)?;
            let df = f.differentiate();
            let roots_f = numeric_count_roots(&f, &interval, &p.oracle)?.count;
            let roots_df = if df.is_zero() { 0 } else { numeric_count_roots(&df, &interval, &p.oracle)?.count };
            let violation = (roots_f > roots_df + 1).then(|| Violation {
                trial,
                detail: format!("f has {roots_f} roots but f' only {roots_df}"),
                instance: json!({ "N": n, "coeffs": coeffs_json(&coeffs) }),
            });
            Ok((roots_f, roots_df, violation))
        })
        .collect();
    let mut report = CampaignReport::new("", Value::Null, total);
    for outcome in outcomes {
        let (roots_f, _, violation) = outcome?;
        *report.histogram.entry(roots_f).or_insert(0) += 1;
        report.max_observed_roots = Some(report.max_observed_roots.map_or(roots_f, |m| m.max(roots_f)));
        report.violations.extend(violation);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_identity_holds() {
        let r = verify_lemma(LemmaId::LogDerivative1, &LemmaParams::default()).unwrap();
        assert!(r.pass);
        assert_eq!(r.trials, 11);
        assert_eq!(r.campaign, "log_derivative_1");
    }

    #[test]
    fn constant_sequence() {
        let r = verify_lemma(LemmaId::LogDerivative3, &LemmaParams { kmax: 5, ..Default::default() }).unwrap();
        assert!(r.pass);
        assert_eq!(r.tables["C_k"], json!(["1", "3", "11", "50", "274"]));
    }

    #[test]
    fn alternating_constants_table() {
        let params = LemmaParams { nmax: 4, samples: 10, ..Default::default() };
        let r = verify_lemma(LemmaId::LogDerivative2, &params).unwrap();
        assert!(r.pass, "{:?}", r.violations);
        assert_eq!(r.tables["c_j"]["2"], json!(["1", "1"]));
        assert_eq!(r.tables["c_j"]["3"], json!(["2", "1", "2"]));
        assert_eq!(r.tables["c_j"]["4"], json!(["6", "2", "2", "6"]));
    }

    #[test]
    fn signs_and_roots() {
        assert!(verify_lemma(LemmaId::AlternatingSigns, &LemmaParams::default()).unwrap().pass);
        let params = LemmaParams { nmin: 1, nmax: 3, samples: 60, ..Default::default() };
        assert!(verify_lemma(LemmaId::DerivativeRoots, &params).unwrap().pass);
    }

    #[test]
    fn parses_ids_and_checks_ranges() {
        assert_eq!("log_derivative_2".parse::<LemmaId>().unwrap(), LemmaId::LogDerivative2);
        assert!("nope".parse::<LemmaId>().is_err());
        let too_big = LemmaParams { kmax: 99, ..Default::default() };
        assert!(verify_lemma(LemmaId::LogDerivative1, &too_big).is_err());
        let bad_n = LemmaParams { nmin: 1, ..Default::default() };
        assert!(verify_lemma(LemmaId::LogDerivative2, &bad_n).is_err());
    }
}
