//! Oracles shared by the integration tests. Nothing here calls into the
//! crate's differentiation or root-counting code.

#![allow(dead_code)]

use std::io::Write;

use altkit::symexpr::{rat, Rational};
use num_traits::{One, Signed, Zero};

/// Written straight to the stderr handle so the line survives output capture.
pub fn report_line(text: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{text}");
}

pub fn criterion_line(id: u32, pass: bool, text: &str) {
    report_line(&format!("[{}] criterion {id:>2}: {text}", if pass { "PASS" } else { "FAIL" }));
}

fn fact(n: u64) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * rat(k as i64))
}

fn binom(n: u64, k: u64) -> Rational {
    fact(n) / (fact(k) * fact(n - k))
}

/// Constant term of `D^k(x^k ln x)` from the Leibniz rule:
/// `sum_{j<k} C(k,j) * k!/(k-j)! * (-1)^(k-j-1) (k-j-1)!`.
pub fn leibniz_log_constant(k: u64) -> Rational {
    (0..k)
        .map(|j| {
            let s = if (k - j - 1).is_multiple_of(2) { rat(1) } else { rat(-1) };
            binom(k, j) * fact(k) / fact(k - j) * s * fact(k - j - 1)
        })
        .fold(Rational::zero(), |a, b| a + b)
}

/// `c_j` in `D^N(x^j ln x) = (-1)^(N-1-j) c_j x^(j-N)` for `j < N`.
pub fn alternating_constant(n: u64, j: u64) -> Rational {
    fact(j) * fact(n - 1 - j)
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub fn derivative(p: &[Rational]) -> Vec<Rational> {
    trim(p.iter().enumerate().skip(1).map(|(k, c)| c * rat(k as i64)).collect())
}

/// Remainder of `a` divided by `b` (ascending coefficients, `b` nonzero).
pub fn poly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let lead = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let factor = r.last().unwrap() / &lead;
        for (k, c) in b.iter().enumerate() {
            let delta = &factor * c;
            r[shift + k] -= delta;
        }
        r = trim(r);
    }
    r
}

pub fn poly_gcd_degree(a: &[Rational], b: &[Rational]) -> usize {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    x.len().saturating_sub(1)
}

fn eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Sign of `p` at `x`, or at `-inf` / `+inf` when `x` is `None`.
fn sign_at(p: &[Rational], x: Option<&Rational>, plus_infinity: bool) -> i32 {
    let v = match x {
        Some(x) => eval(p, x),
        None => {
            let lead = p.last().cloned().unwrap_or_else(Rational::zero);
            let odd = (p.len() - 1) % 2 == 1;
            if !plus_infinity && odd {
                -lead
            } else {
                lead
            }
        }
    };
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Distinct real roots of `p` in `(lo, hi]` by Sturm's theorem; `None` ends are infinite.
pub fn sturm_count(p: &[Rational], lo: Option<&Rational>, hi: Option<&Rational>) -> usize {
    let p = trim(p.to_vec());
    let mut chain = vec![p.clone(), derivative(&p)];
    while !chain.last().unwrap().is_empty() {
        let n = chain.len();
        let r: Vec<Rational> = poly_rem(&chain[n - 2], &chain[n - 1]).into_iter().map(|c| -c).collect();
        chain.push(r);
    }
    chain.pop();
    let variations = |x: Option<&Rational>, plus: bool| {
        let signs: Vec<i32> = chain.iter().map(|q| sign_at(q, x, plus)).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    variations(lo, false).saturating_sub(variations(hi, true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_on_known_polynomials() {
        // (x-1)(x-2)(x+3)
        let p = vec![rat(6), rat(-7), rat(0), rat(1)];
        assert_eq!(sturm_count(&p, None, None), 3);
        assert_eq!(sturm_count(&p, Some(&rat(0)), None), 2);
        // (x-1)^2 (x-2): distinct roots only
        let q = vec![rat(-2), rat(5), rat(-4), rat(1)];
        assert_eq!(sturm_count(&q, Some(&rat(0)), None), 2);
        assert_eq!(poly_gcd_degree(&q, &derivative(&q)), 1);
        assert_eq!(leibniz_log_constant(1), rat(1));
        assert_eq!(leibniz_log_constant(4), rat(50));
    }
}
