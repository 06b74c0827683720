//! Deterministic random draws: one ChaCha stream per trial.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::symexpr::{Interval, Rational};

/// Nodes are drawn on a grid of this many points per unit length.
pub const NODE_GRID: i64 = 1000;

/// The generator for `trial`; independent of how trials are scheduled.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Numerator in `[-bound, bound]`, denominator in `[1, bound]`.
pub fn random_rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    let num = rng.random_range(-bound..=bound);
    let den = rng.random_range(1..=bound);
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A random coefficient vector that is not identically zero.
pub fn random_nonzero_vector<R: Rng>(rng: &mut R, len: usize, bound: i64) -> Vec<Rational> {
    loop {
        let v: Vec<Rational> = (0..len).map(|_| random_rational(rng, bound)).collect();
        if v.iter().any(|c| !c.is_zero()) {
            return v;
        }
    }
}

/// Finite node range and the grid spacing (in grid units) that realises `min_gap`.
#[derive(Debug, Clone)]
pub struct NodeSampler {
    lo: Rational,
    width_units: i64,
    gap_units: i64,
}

impl NodeSampler {
    /// `None` when the range is unbounded or too narrow for `count` nodes.
    pub fn new(range: &Interval, min_gap: f64, count: usize) -> Option<Self> {
        let (lo, hi) = (range.lo()?.clone(), range.hi()?.clone());
        let width = (hi - &lo) * Rational::from_integer(NODE_GRID.into());
        let width_units = i64::try_from(width.floor().to_integer()).ok()?;
        let gap_units = ((min_gap * NODE_GRID as f64).ceil() as i64).max(1);
        let spread = gap_units.checked_mul(count.saturating_sub(1) as i64)?;
        (width_units - 1 - spread >= 1).then_some(Self { lo, width_units, gap_units })
    }

    /// `count` strictly increasing nodes in the open range, consecutive gaps at least `min_gap`.
    ///
    /// Draws `u_1 <= ... <= u_n` uniformly from `[1, W - 1 - (n-1) g]` and
    /// spreads them as `u_i + (i-1) g`, which is uniform over admissible sets.
    pub fn sample<R: Rng>(&self, rng: &mut R, count: usize) -> Vec<Rational> {
        let top = self.width_units - 1 - self.gap_units * (count.saturating_sub(1) as i64);
        let mut u: Vec<i64> = (0..count).map(|_| rng.random_range(1..=top)).collect();
        u.sort_unstable();
        u.iter()
            .enumerate()
            .map(|(i, &k)| {
                let units = k + self.gap_units * i as i64;
                &self.lo + Rational::new(units.into(), NODE_GRID.into())
            })
            .collect()
    }
}
