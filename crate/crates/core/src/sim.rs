//! Monte-Carlo sampling of the optimal binary test.
//!
//! Each trial is a Bernoulli draw with success probability
//! `⟨ψ_h|Π₊(λ)|ψ_h⟩`. Randomness is counter based: trial `i` consumes the
//! 64-bit output at word position `2i` of a ChaCha8 stream keyed by
//! `ChaCha8Rng::seed_from_u64(seed)`, and the top 53 bits give a uniform
//! `u ∈ [0, 1)`; the trial is positive when `u < p`. Results are therefore
//! identical however the trials are split across threads.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::decision::eigen_oracle_point;
use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// No phase shift occurred.
    H0,
    /// The state was phase shifted.
    H1,
}

impl Hypothesis {
    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::H0 => "H0",
            Hypothesis::H1 => "H1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub hypothesis: Hypothesis,
    pub trials: u64,
    pub positives: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    /// Exact probability of a positive outcome that was sampled.
    pub probability: f64,
}

/// Wilson score interval for `positives` successes out of `trials`.
pub fn wilson_interval(positives: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let rate = positives as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (rate + z2 / (2.0 * n)) / denom;
    let half = z / denom * (rate * (1.0 - rate) / n + z2 / (4.0 * n * n)).sqrt();
    (
        (center - half).max(0.0).min(rate),
        (center + half).min(1.0).max(rate),
    )
}

/// Counts positives among trials `start..end` of the stream for `seed`.
fn count_positives(seed: u64, start: u64, end: u64, p: f64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(2 * start as u128);
    let mut hits = 0;
    for _ in start..end {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if u < p {
            hits += 1;
        }
    }
    hits
}

/// Simulates `trials` runs of the eigen-measurement of `ρ₁ − λρ₀` with the
/// input prepared under `hypothesis`.
pub fn simulate_strategy(
    c: f64,
    lambda: f64,
    hypothesis: Hypothesis,
    trials: u64,
    seed: u64,
) -> Result<SimResult> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let point = eigen_oracle_point(c, lambda)?;
    let probability = match hypothesis {
        Hypothesis::H0 => point.p01,
        Hypothesis::H1 => point.p11,
    };

    let chunks = trials.div_ceil(CHUNK);
    let positives: u64 = (0..chunks)
        .into_par_iter()
        .map(|i| count_positives(seed, i * CHUNK, ((i + 1) * CHUNK).min(trials), probability))
        .sum();

    let rate = positives as f64 / trials as f64;
    let (ci_low, ci_high) = wilson_interval(positives, trials, Z_95);
    Ok(SimResult {
        hypothesis,
        trials,
        positives,
        rate,
        ci_low,
        ci_high,
        seed,
        probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunking_matches_single_stream() {
        let whole = count_positives(7, 0, 50_000, 0.3);
        let split = count_positives(7, 0, 12_345, 0.3) + count_positives(7, 12_345, 50_000, 0.3);
        assert_eq!(whole, split);
    }

    #[test]
    fn orthogonal_states_always_detected() {
        let r = simulate_strategy(0.0, 0.5, Hypothesis::H1, 10_000, 3).unwrap();
        assert_eq!(r.positives, r.trials);
        assert_eq!(r.rate, 1.0);
        let r = simulate_strategy(0.0, 0.5, Hypothesis::H0, 10_000, 3).unwrap();
        assert_eq!(r.positives, 0);
    }

    #[test]
    fn identical_states_give_identical_rates() {
        let h0 = simulate_strategy(1.0, 0.5, Hypothesis::H0, 1000, 11).unwrap();
        let h1 = simulate_strategy(1.0, 0.5, Hypothesis::H1, 1000, 11).unwrap();
        assert_eq!(h0.probability, h1.probability);
        assert_eq!(h0.positives, h1.positives);
    }

    #[test]
    fn rate_and_interval_invariants() {
        let r = simulate_strategy(0.7, 0.9, Hypothesis::H1, 12_345, 99).unwrap();
        assert_eq!(r.rate, r.positives as f64 / r.trials as f64);
        assert!(r.ci_low <= r.rate && r.rate <= r.ci_high);
        assert_eq!(r, simulate_strategy(0.7, 0.9, Hypothesis::H1, 12_345, 99).unwrap());
        assert_ne!(
            r.positives,
            simulate_strategy(0.7, 0.9, Hypothesis::H1, 12_345, 100).unwrap().positives
        );
    }

    #[test]
    fn wilson_edges() {
        let (lo, hi) = wilson_interval(0, 10, Z_95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.35);
        let (lo, hi) = wilson_interval(10, 10, Z_95);
        assert!(lo > 0.65);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(simulate_strategy(0.5, 0.5, Hypothesis::H0, 0, 1).is_err());
        assert!(simulate_strategy(1.5, 0.5, Hypothesis::H0, 10, 1).is_err());
    }
}
