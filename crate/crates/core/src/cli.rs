//! Command-line front end. [`dispatch`] does all the work and returns the
//! text to print, so nothing reaches stdout before a command has succeeded.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::alternant::{solve_interpolation, AlternantError, AlternantMatrix, Determinant, DEFAULT_REL_THRESHOLD};
use crate::compatibility::{check_compatibility_with, CompatibilityError, CompatibilityOptions};
use crate::harness::{
    run_invertibility_campaign, run_root_bound_campaign, verify_lemma, CampaignConfig, CampaignReport, HarnessError,
    LemmaId, LemmaParams,
};
use crate::rootcount::{root_count_report, OracleParams, DEFAULT_MAX_DEPTH};
use crate::symexpr::rational::{format_rational, parse_rational};
use crate::symexpr::{Interval, LogPowExpr, Rational};
use crate::systems::FunctionSystem;

pub const HORIZON_ENV: &str = "ALTKIT_HORIZON";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Malformed(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) => EXIT_MALFORMED,
            CliError::Failed(_) => EXIT_FAILURE,
        }
    }
}

fn malformed(e: impl std::fmt::Display) -> CliError {
    CliError::Malformed(e.to_string())
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

impl From<AlternantError> for CliError {
    fn from(e: AlternantError) -> Self {
        match e {
            AlternantError::Singular => failed(e),
            _ => malformed(e),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        malformed(e)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "altkit",
    version,
    about = "Root-count bounds and alternant invertibility for log-power function systems"
)]
pub struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SpecArg {
    /// System as JSON text or a path to a JSON file, e.g. '{"kind":"logpoly","n":3}'.
    #[arg(long)]
    pub spec: String,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Stand-in for +inf; overrides ALTKIT_HORIZON.
    #[arg(long)]
    pub horizon: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CampaignMode {
    RootBound,
    Invertibility,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the basis functions.
    Basis(SpecArg),
    /// Theoretical root bound of the system and where it comes from.
    Bound(SpecArg),
    /// Symbolic bound and observed roots of one member.
    MemberRoots {
        #[command(flatten)]
        spec: SpecArg,
        /// Comma-separated coefficients in basis order.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Alternant matrix at the given nodes.
    Matrix {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, allow_hyphen_values = true)]
        nodes: String,
        /// Write entries as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Invertibility verdict for the alternant matrix.
    Invert {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, allow_hyphen_values = true)]
        nodes: String,
        #[arg(long, default_value_t = DEFAULT_REL_THRESHOLD)]
        threshold: f64,
    },
    /// Member of the span through the given values.
    Interpolate {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, allow_hyphen_values = true)]
        nodes: String,
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Certificate that D^k(F q) = F~ q~ for every q of degree <= n.
    Certify {
        /// F as a JSON term list or a path, e.g. '[{"coeff":"1","alpha":"0","logpow":1}]'.
        #[arg(long = "F")]
        f: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n: usize,
        /// Try k = 1..=K and report the smallest that certifies.
        #[arg(long)]
        sweep_kmax: Option<usize>,
        #[arg(long, default_value = "1,inf")]
        interval: String,
        #[arg(long)]
        sign_restricted: bool,
    },
    /// Exact lemma checks.
    Verify {
        /// One of log_derivative_1, log_derivative_2, log_derivative_3, derivative_roots, alternating_signs, all.
        #[arg(long)]
        lemma: String,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long)]
        nmin: Option<usize>,
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Randomized campaign from a config file.
    Campaign {
        /// Config as JSON text or a path.
        #[arg(long)]
        config: String,
        #[arg(long, value_enum, default_value_t = CampaignMode::RootBound)]
        mode: CampaignMode,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<String>,
    },
}

/// Exit code plus the complete text for stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dispatch {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn dispatch<I, T>(argv: I) -> Dispatch
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Dispatch { code: EXIT_MALFORMED, stdout: String::new(), stderr: text }
            } else {
                Dispatch { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    match run(&cli) {
        Ok((stdout, ok)) => Dispatch { code: if ok { EXIT_OK } else { EXIT_FAILURE }, stdout, stderr: String::new() },
        Err(e) => Dispatch { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

/// Inline JSON when the argument looks like JSON, otherwise the file it names.
fn read_json_arg(arg: &str) -> Result<String, CliError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(Path::new(arg)).map_err(|e| malformed(format!("cannot read {arg}: {e}")))
}

fn parse_spec(arg: &SpecArg) -> Result<FunctionSystem, CliError> {
    serde_json::from_str(&read_json_arg(&arg.spec)?).map_err(|e| malformed(format!("bad system spec: {e}")))
}

fn parse_list(text: &str) -> Result<Vec<Rational>, CliError> {
    text.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_rational(s.trim()).map_err(malformed)).collect()
}

fn env_horizon() -> Result<Option<f64>, CliError> {
    match std::env::var(HORIZON_ENV) {
        Ok(v) => v.trim().parse::<f64>().map(Some).map_err(|_| malformed(format!("{HORIZON_ENV}={v} is not a number"))),
        Err(_) => Ok(None),
    }
}

fn oracle_params(args: &OracleArgs) -> Result<OracleParams, CliError> {
    let mut p = OracleParams::default();
    if let Some(h) = env_horizon()? {
        p.horizon = h;
    }
    if let Some(g) = args.grid_points {
        p.grid_points = g;
    }
    if let Some(t) = args.tol {
        p.tol = t;
    }
    if let Some(h) = args.horizon {
        p.horizon = h;
    }
    Ok(p)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn determinant_text(d: &Determinant) -> String {
    match d {
        Determinant::Exact(q) => format_rational(q),
        Determinant::Float(v) => format!("{v:e}"),
    }
}

fn bound_text(b: Option<usize>) -> String {
    b.map_or_else(|| "unknown".to_string(), |b| b.to_string())
}

/// Runs a parsed command; the flag is false when a check failed.
pub fn run(cli: &Cli) -> Result<(String, bool), CliError> {
    let json = cli.json;
    let mut out = String::new();
    let ok = match &cli.command {
        Command::Basis(spec) => {
            let system = parse_spec(spec)?;
            let basis = system.basis();
            if json {
                out = to_json(&json!({ "system": system, "interval": system.interval(), "basis": basis }));
            } else {
                for (j, g) in basis.iter().enumerate() {
                    writeln!(out, "g{j} = {g}").unwrap();
                }
            }
            true
        }
        Command::Bound(spec) => {
            let system = parse_spec(spec)?;
            let bound = system.root_bound();
            if json {
                out = to_json(&json!({
                    "bound": bound.map_or(json!("unknown"), |b| json!(b)),
                    "interval": system.interval(),
                    "source": system.bound_source(),
                }));
            } else {
                writeln!(out, "{}", bound_text(bound)).unwrap();
                writeln!(out, "on {}: {}", system.interval(), system.bound_source()).unwrap();
            }
            true
        }
        Command::MemberRoots { spec, coeffs, max_depth, oracle } => {
            let system = parse_spec(spec)?;
            let coeffs = parse_list(coeffs)?;
            let f = system.member(&coeffs).map_err(malformed)?;
            let params = oracle_params(oracle)?;
            let report = root_count_report(&f, system.interval(), *max_depth, &params).map_err(malformed)?;
            let consistent = report.is_consistent();
            if json {
                out = to_json(&report);
            } else {
                writeln!(out, "f = {}", report.expr).unwrap();
                writeln!(out, "bound: {}", bound_text(report.bound)).unwrap();
                for step in &report.bound_chain {
                    writeln!(out, "  {}", step.reason).unwrap();
                }
                writeln!(out, "observed: {}", report.observed).unwrap();
                for (a, b) in &report.observed_roots {
                    writeln!(out, "  root in [{a}, {b}]").unwrap();
                }
            }
            consistent
        }
        Command::Matrix { spec, nodes, csv } => {
            let system = parse_spec(spec)?;
            let matrix = AlternantMatrix::build(&system, &parse_list(nodes)?)?;
            if json {
                out = to_json(&matrix);
            } else if *csv {
                out = matrix.to_csv();
            } else {
                for row in matrix.to_f64() {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v:>14.6e}")).collect();
                    writeln!(out, "{}", cells.join(" ")).unwrap();
                }
            }
            true
        }
        Command::Invert { spec, nodes, threshold } => {
            if !(*threshold > 0.0) {
                return Err(malformed("threshold must be positive"));
            }
            let system = parse_spec(spec)?;
            let matrix = AlternantMatrix::build(&system, &parse_list(nodes)?)?;
            let verdict = matrix.is_invertible(*threshold);
            if json {
                out = to_json(&verdict);
            } else {
                writeln!(out, "invertible: {}", verdict.invertible).unwrap();
                writeln!(out, "determinant: {}", determinant_text(&verdict.determinant)).unwrap();
                let method = serde_json::to_value(verdict.method).unwrap();
                writeln!(out, "method: {}", method.as_str().unwrap_or_default()).unwrap();
                if let Some(t) = verdict.threshold {
                    writeln!(out, "threshold: {t:e} (times row scale {:e})", verdict.row_scale).unwrap();
                }
                if let Some(c) = verdict.condition_estimate {
                    writeln!(out, "condition estimate: {c:e}").unwrap();
                }
            }
            verdict.invertible
        }
        Command::Interpolate { spec, nodes, values } => {
            let system = parse_spec(spec)?;
            let f = solve_interpolation(&system, &parse_list(nodes)?, &parse_list(values)?)?;
            if json {
                out = to_json(&f);
            } else {
                let coeffs: Vec<String> = if f.exact {
                    f.coefficients.iter().map(format_rational).collect()
                } else {
                    f.coefficients_f64.iter().map(|c| format!("{c:e}")).collect()
                };
                writeln!(out, "coefficients: {}", coeffs.join(", ")).unwrap();
                writeln!(out, "residual: {:e}", f.residual).unwrap();
                writeln!(out, "f = {}", f.expr).unwrap();
            }
            true
        }
        Command::Certify { f, k, n, sweep_kmax, interval, sign_restricted } => {
            let f: LogPowExpr =
                serde_json::from_str(&read_json_arg(f)?).map_err(|e| malformed(format!("bad expression: {e}")))?;
            let interval: Interval = interval.parse().map_err(malformed)?;
            let options = CompatibilityOptions { sign_restricted_descartes: *sign_restricted };
            let ks: Vec<usize> = match (k, sweep_kmax) {
                (_, Some(kmax)) => (1..=*kmax).collect(),
                (Some(k), None) => vec![*k],
                (None, None) => return Err(malformed("certify needs --k or --sweep-kmax")),
            };
            let mut attempts = Vec::new();
            let mut found = None;
            for &k in &ks {
                match check_compatibility_with(&f, k, *n, &interval, &options) {
                    Ok(cert) => {
                        found = Some(cert);
                        break;
                    }
                    Err(e @ CompatibilityError::NotCompatible { .. }) => attempts.push((k, e.to_string())),
                    Err(e) => return Err(malformed(e)),
                }
            }
            if json {
                out = to_json(&json!({
                    "certificate": found,
                    "rejected": attempts.iter().map(|(k, r)| json!({ "k": k, "reason": r })).collect::<Vec<_>>(),
                }));
            } else {
                for (k, reason) in &attempts {
                    writeln!(out, "k = {k}: {reason}").unwrap();
                }
                if let Some(c) = &found {
                    writeln!(out, "F = {} is {}-compatible with degree {} on {}", c.f, c.k, c.n, c.interval).unwrap();
                    writeln!(out, "F~ = {}, l = {}", c.tilde_f, c.l).unwrap();
                    if let Some(l) = c.sign_restricted_l {
                        writeln!(out, "l for same-sign q: {l}").unwrap();
                    }
                    for p in &c.probe_results {
                        let q: Vec<String> = p.quotient.iter().map(format_rational).collect();
                        writeln!(out, "  q = x^{}: q~ = [{}]", p.t, q.join(", ")).unwrap();
                    }
                }
            }
            found.is_some()
        }
        Command::Verify { lemma, kmax, nmin, nmax, samples, seed } => {
            let ids: Vec<LemmaId> =
                if lemma == "all" { LemmaId::ALL.to_vec() } else { vec![lemma.parse::<LemmaId>()?] };
            let mut params = LemmaParams::default();
            if let Some(h) = env_horizon()? {
                params.oracle.horizon = h;
            }
            params.kmax = kmax.unwrap_or(params.kmax);
            params.nmax = nmax.unwrap_or(params.nmax);
            params.samples = samples.unwrap_or(params.samples);
            params.seed = seed.unwrap_or(params.seed);
            let mut reports = Vec::new();
            for id in ids {
                let mut p = params.clone();
                p.nmin = nmin.unwrap_or(if id == LemmaId::DerivativeRoots { 1 } else { 2 });
                if id == LemmaId::DerivativeRoots && nmax.is_none() {
                    p.nmax = 4;
                }
                reports.push(verify_lemma(id, &p)?);
            }
            out = render_reports(&reports, json);
            reports.iter().all(|r| r.pass)
        }
        Command::Campaign { config, mode, out: path } => {
            let mut cfg: CampaignConfig = serde_json::from_str(&read_json_arg(config)?)
                .map_err(|e| malformed(format!("bad campaign config: {e}")))?;
            if let Some(h) = env_horizon()? {
                cfg.oracle.horizon = h;
            }
            let report = match mode {
                CampaignMode::RootBound => run_root_bound_campaign(&cfg)?,
                CampaignMode::Invertibility => run_invertibility_campaign(&cfg)?,
            };
            if let Some(path) = path {
                std::fs::write(path, to_json(&report)).map_err(|e| failed(format!("cannot write {path}: {e}")))?;
            }
            out = render_reports(std::slice::from_ref(&report), json);
            report.pass
        }
    };
    Ok((out, ok))
}

fn render_reports(reports: &[CampaignReport], json: bool) -> String {
    if json {
        return match reports {
            [one] => to_json(one),
            many => to_json(&many),
        };
    }
    let mut out = String::new();
    for r in reports {
        writeln!(out, "{}", r.summary()).unwrap();
        for v in r.violations.iter().take(10) {
            writeln!(out, "  trial {}: {}", v.trial, v.detail).unwrap();
        }
        if r.violations.len() > 10 {
            writeln!(out, "  ... {} more", r.violations.len() - 10).unwrap();
        }
        if let Some(tables) = r.tables.as_object() {
            for (name, table) in tables {
                writeln!(out, "  {name}: {table}").unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> Dispatch {
        dispatch(std::iter::once("altkit").chain(args.iter().copied()))
    }

    #[test]
    fn bound_for_log_poly() {
        let d = call(&["bound", "--spec", r#"{"kind":"logpoly","n":3}"#]);
        assert_eq!(d.code, 0);
        assert_eq!(d.stdout.lines().next(), Some("5"));
    }

    #[test]
    fn invert_vandermonde() {
        let d = call(&["--json", "invert", "--spec", r#"{"kind":"power","r":"0","n":2}"#, "--nodes", "1,2"]);
        assert_eq!(d.code, 0, "{}", d.stderr);
        let v: serde_json::Value = serde_json::from_str(&d.stdout).unwrap();
        assert_eq!(v["invertible"], true);
        assert_eq!(v["determinant"], "1");
    }

    #[test]
    fn malformed_input_exits_2_without_stdout() {
        let d = call(&["bound", "--spec", r#"{"kind":"nope"}"#]);
        assert_eq!(d.code, 2);
        assert!(d.stdout.is_empty());
        let d = call(&["invert", "--spec", r#"{"kind":"power","r":"0","n":2}"#, "--nodes", "2,2"]);
        assert_eq!(d.code, 2);
        assert!(d.stdout.is_empty());
        assert_eq!(call(&["frobnicate"]).code, 2);
    }

    #[test]
    fn verify_lemma_exit_code() {
        assert_eq!(call(&["verify", "--lemma", "log_derivative_1", "--kmax", "10"]).code, 0);
        assert_eq!(call(&["verify", "--lemma", "bogus"]).code, 2);
    }

    #[test]
    fn negative_lists() {
        assert_eq!(
            parse_list("-1/2, 3,1.25").unwrap(),
            vec![
                Rational::new((-1).into(), 2.into()),
                Rational::from_integer(3.into()),
                Rational::new(5.into(), 4.into())
            ]
        );
        assert!(parse_list("1,x").is_err());
    }
}
