use serde::{Deserialize, Serialize};

use super::signs::{all_same_sign, budan_fourier_coeffs, sign_variations};
use crate::symexpr::rational::rat;
use crate::symexpr::{Interval, LogPowExpr};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    /// Derivative order the step talks about.
    pub order: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainBound {
    #[serde(with = "super::bound_serde")]
    pub bound: Option<usize>,
    pub chain: Vec<ChainStep>,
}

fn derivative_name(k: usize) -> String {
    match k {
        0 => "f".into(),
        1 => "f'".into(),
        k => format!("D^{k} f"),
    }
}

/// Root bound for `g` on `interval` when one can be read off directly.
///
/// Recognised shapes, all on a positive interval:
/// - a single term `c x^a ln^m x`, which can only vanish at `x = 1`;
/// - terms of one sign that are all positive on the interval (no logarithms,
///   or an interval inside `(1, inf)` where `ln x > 0`);
/// - `x^b * P(x)` with `P` a polynomial, bounded by Descartes and Budan–Fourier.
pub(crate) fn direct_bound(g: &LogPowExpr, interval: &Interval) -> Option<(usize, String)> {
    if g.is_zero() || !interval.is_positive() {
        return None;
    }
    if let [t] = g.terms() {
        if t.logpow() > 0 && interval.contains(&rat(1)) {
            return Some((1, "single term vanishing only at x = 1".to_string()));
        }
        return Some((0, format!("single term {g}, nonvanishing on {interval}")));
    }
    let logs_positive = interval.is_beyond_one() || g.max_logpow() == 0;
    if logs_positive && all_same_sign(g.terms().iter().map(|t| t.coeff())) {
        return Some((0, format!("every term has the same sign on {interval}")));
    }
    let (beta, poly) = g.factor_power()?;
    let degree = poly.len() - 1;
    let descartes = sign_variations(&poly);
    let budan = budan_fourier_coeffs(&poly, interval);
    let bound = descartes.min(budan);
    let prefactor = if beta == rat(0) { String::new() } else { format!("x^({beta}) * ") };
    Some((
        bound,
        format!(
            "{prefactor}polynomial of degree {degree}; Descartes gives {descartes}, Budan-Fourier on {interval} gives {budan}"
        ),
    ))
}

/// Plain chain on `g`: the first `j <= max_depth` with a readable bound on
/// `D^j g`, giving `b + j`. Steps come highest order first, labelled by `name`.
fn plain_chain(
    g: &LogPowExpr,
    interval: &Interval,
    max_depth: usize,
    name: &dyn Fn(usize) -> String,
) -> Option<(usize, Vec<(usize, String)>)> {
    let mut d = g.clone();
    for j in 0..=max_depth {
        if let Some((b, reason)) = direct_bound(&d, interval) {
            let mut steps = vec![(j, format!("{} = {d}: at most {b} roots ({reason})", name(j)))];
            steps.extend((0..j).rev().map(|jj| {
                (
                    jj,
                    format!(
                        "{} has at most {} roots since its derivative has at most {}",
                        name(jj),
                        b + j - jj,
                        b + j - jj - 1
                    ),
                )
            }));
            return Some((b + j, steps));
        }
        if d.is_zero() {
            return None;
        }
        d = d.differentiate();
    }
    None
}

/// Bounds the roots of `f` by those of a derivative with a readable root
/// bound: if `D^k f` has at most `b` roots then `f` has at most `b + k`.
///
/// Also tries, at every order `k`, replacing `D^k f` by `x^s D^k f` (same
/// roots on a positive interval) with `s` lifting the smallest exponent to 0,
/// then differentiating that. The smallest bound found wins.
pub fn derivative_chain_bound(f: &LogPowExpr, interval: &Interval, max_depth: usize) -> ChainBound {
    let mut best: Option<(usize, Vec<ChainStep>)> = None;
    if interval.is_positive() {
        let mut g = f.clone();
        for k in 0..=max_depth {
            if best.as_ref().is_some_and(|(b, _)| *b <= k) || g.is_zero() {
                break;
            }
            let plain_tail = |from: usize, bound: usize| {
                (0..from).rev().map(move |kk| ChainStep {
                    order: kk,
                    reason: format!(
                        "{} has at most {} roots since its derivative has at most {}",
                        derivative_name(kk),
                        bound - kk,
                        bound - kk - 1
                    ),
                })
            };
            if let Some((b, reason)) = direct_bound(&g, interval) {
                // ties go to the plain chain
                if best.as_ref().is_none_or(|(old, _)| b + k <= *old) {
                    let mut chain = vec![ChainStep {
                        order: k,
                        reason: format!("{} = {g}: at most {b} roots ({reason})", derivative_name(k)),
                    }];
                    chain.extend(plain_tail(k, b + k));
                    best = Some((b + k, chain));
                }
                break;
            }
            let shift = g.min_alpha().filter(|a| **a != rat(0)).map(|a| -a.clone());
            if let Some(s) = shift {
                let h = g.shift_alpha(&s);
                let label = format!("x^({s}) * {}", derivative_name(k));
                let name = |j: usize| if j == 0 { label.clone() } else { format!("D^{j}[{label}]") };
                let depth = max_depth - k;
                if let Some((b, steps)) = plain_chain(&h, interval, depth, &name) {
                    if best.as_ref().is_none_or(|(old, _)| b + k < *old) {
                        let mut chain: Vec<ChainStep> =
                            steps.into_iter().map(|(j, reason)| ChainStep { order: k + j, reason }).collect();
                        chain.push(ChainStep {
                            order: k,
                            reason: format!(
                                "{} has the roots of {label} on {interval}: at most {b}",
                                derivative_name(k)
                            ),
                        });
                        chain.extend(plain_tail(k, b + k));
                        best = Some((b + k, chain));
                    }
                }
            }
            g = g.differentiate();
        }
    }
    if let Some((bound, chain)) = best {
        return ChainBound { bound: Some(bound), chain };
    }
    let reason = if f.is_zero() {
        "zero function".to_string()
    } else if !interval.is_positive() {
        format!("{interval} is not inside (0, inf)")
    } else {
        format!("no derivative up to order {max_depth} has a readable root bound")
    };
    ChainBound { bound: None, chain: vec![ChainStep { order: 0, reason }] }
}
