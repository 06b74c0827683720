mod common;

use altkit::compatibility::{
    check_compatibility, mixed_refinement, refined_mixed_bound, unisolvence_bound, CompatibilityCertificate,
    CompatibilityError,
};
use altkit::harness::sampling::{random_nonzero_vector, trial_rng};
use altkit::rootcount::{derivative_chain_bound, numeric_count_roots, OracleParams, DEFAULT_MAX_DEPTH};
use altkit::symexpr::{factorial, rat, Interval, LogPowExpr, Rational};
use altkit::systems::FunctionSystem;
use common::leibniz_log_constant;
use num_traits::Zero;

fn certificates() -> Vec<CompatibilityCertificate> {
    let beyond_one = Interval::beyond_one();
    let mut out = Vec::new();
    for n in 0..=4usize {
        out.push(check_compatibility(&LogPowExpr::ln(), n + 1, n, &beyond_one).unwrap());
        for i in 1..=3usize {
            out.push(check_compatibility(&LogPowExpr::monomial(rat(i as i64), 1), n + i + 1, n, &beyond_one).unwrap());
        }
    }
    out
}

#[test]
fn certificates_hold_for_random_quotients() {
    let oracle = OracleParams::default();
    for (c_idx, cert) in certificates().iter().enumerate() {
        for trial in 0..200 {
            let q = random_nonzero_vector(&mut trial_rng(c_idx as u64, trial), cert.n + 1, 1000);
            assert!(cert.holds_for(&q).unwrap(), "F = {}, k = {}, q = {q:?}", cert.f, cert.k);
            let q_tilde = cert.quotient_for(&q).unwrap();
            assert!(q_tilde.iter().any(|c| !c.is_zero()));
            let count = numeric_count_roots(&LogPowExpr::polynomial(&q_tilde), &cert.interval, &oracle).unwrap().count;
            assert!(count <= cert.l);
        }
    }
}

#[test]
fn certified_spans_respect_the_combined_bound() {
    // p of degree < k plus F q has at most k + l roots
    let oracle = OracleParams::default();
    for (c_idx, cert) in certificates().iter().enumerate() {
        let m = cert.k - 1;
        for trial in 0..40 {
            let mut rng = trial_rng(1000 + c_idx as u64, trial);
            let p = random_nonzero_vector(&mut rng, m + 1, 1000);
            let q = random_nonzero_vector(&mut rng, cert.n + 1, 1000);
            let f = LogPowExpr::polynomial(&p).add(&cert.f.mul(&LogPowExpr::polynomial(&q)));
            let bound = unisolvence_bound(m, cert.n, cert.k, cert.l).unwrap().bound;
            let seen = numeric_count_roots(&f, &cert.interval, &oracle).unwrap().count;
            assert!(seen <= bound, "{f}: {seen} > {bound}");
        }
    }
}

#[test]
fn proposition_arithmetic_exhaustive() {
    for m in 0..=8usize {
        for n in 0..=8usize {
            for k in 0..=8usize {
                for l in 0..=8usize {
                    match unisolvence_bound(m, n, k, l) {
                        Err(CompatibilityError::Inapplicable(_)) => assert!(k <= m),
                        Err(e) => panic!("unexpected {e}"),
                        Ok(b) => {
                            assert!(k > m);
                            assert_eq!(b.bound, k + l);
                            assert_eq!(b.unisolvent, k + l < m + n + 2);
                        }
                    }
                }
            }
            for i in 0..=8usize {
                let want = if m < n + i {
                    Some(2 * n + i)
                } else if i == 0 && m > n {
                    Some(m + n + 1)
                } else {
                    None
                };
                assert_eq!(refined_mixed_bound(i, m, n), want);
            }
        }
    }
}

#[test]
fn mixed_chain_stays_within_refined_bound() {
    for i in 0..=2usize {
        for n in 0..=3usize {
            for m in 0..(n + i) {
                let system = FunctionSystem::mixed(i, m, n).unwrap();
                for trial in 0..100 {
                    let c = random_nonzero_vector(&mut trial_rng(7, trial), system.dimension(), 1000);
                    let f = system.member(&c).unwrap();
                    if let Some(b) = derivative_chain_bound(&f, system.interval(), DEFAULT_MAX_DEPTH).bound {
                        assert!(b <= 2 * n + i, "i={i} m={m} n={n}: {f} got {b}");
                    }
                }
            }
        }
    }
}

#[test]
fn refinement_constants_are_positive() {
    for i in 0..=4usize {
        for n in 0..=4usize {
            if n + i == 0 {
                continue;
            }
            for trial in 0..50 {
                let mut q = random_nonzero_vector(&mut trial_rng(11, trial), n + 1, 1000);
                if q[n].is_zero() {
                    q[n] = rat(1);
                }
                let lead = q[n].clone();
                let lead_abs = if lead < Rational::zero() { -lead.clone() } else { lead.clone() };
                let sign = &lead / &lead_abs;
                let r = mixed_refinement(i, n, &q).unwrap();
                assert_eq!(r.ln_coeff, &lead * factorial((n + i) as u32) * factorial(n as u32));
                let b = leibniz_log_constant((n + i) as u64) * factorial(n as u32)
                    + factorial((n + i) as u32) * leibniz_log_constant(n as u64);
                assert_eq!(r.constant, &lead * &b);
                assert!(&sign * &r.constant > Rational::zero());
                assert!(r.is_definite());
            }
        }
    }
}
