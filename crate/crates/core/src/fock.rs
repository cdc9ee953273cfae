//! Truncated photon-number distributions and the phase-shift overlap.
//!
//! A pure state `Σ c_k |k⟩` enters every quantity here only through
//! `p_k = |c_k|²`: the overlap between the state and its phase-shifted copy
//! is `⟨ψ|e^{i n φ}|ψ⟩ = Σ_k p_k e^{ikφ}`, whatever the phases of `c_k`.
//! [`FockDistribution`] therefore stores probabilities only.

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Default bound on the probability mass discarded by truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Hard cap on the truncation dimension.
pub const MAX_DIM: usize = 1 << 20;

/// Rounding slack allowed above unit total probability.
pub const NORMALIZATION_SLACK: f64 = 1e-12;

/// Photon-number moments of a distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// Mean photon number `N`.
    pub mean: f64,
    /// Photon-number variance `ΔN²`.
    pub variance: f64,
}

impl Moments {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// A normalized photon-number distribution on levels `0..dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDistribution {
    probs: Vec<f64>,
    tail_estimate: f64,
    tail_tol: f64,
    // Indices of the first and one-past-last nonzero entries.
    support: (usize, usize),
    // Integer shift applied to the phase sum to keep arguments small.
    center: usize,
}

impl FockDistribution {
    /// Normalizes a list of nonnegative weights into a distribution.
    ///
    /// Weights that already sum to at most one are read as a truncated
    /// probability list, and the missing mass is recorded as the tail
    /// estimate. Larger totals are treated as a complete, unnormalized
    /// distribution with no tail.
    pub fn from_weights(weights: &[f64], tail_tol: f64) -> Result<Self> {
        validate_tail_tol(tail_tol)?;
        let total = checked_total(weights)?;
        let tail_estimate = if total <= 1.0 + NORMALIZATION_SLACK {
            (1.0 - total).max(0.0)
        } else {
            0.0
        };
        Ok(Self::normalized(weights.to_vec(), total, tail_estimate, tail_tol))
    }

    /// Builds a distribution from analytic weights whose discarded tail mass
    /// is known by the caller.
    pub(crate) fn from_truncated(
        weights: Vec<f64>,
        tail_estimate: f64,
        tail_tol: f64,
    ) -> Result<Self> {
        validate_tail_tol(tail_tol)?;
        let total = checked_total(&weights)?;
        Ok(Self::normalized(weights, total, tail_estimate.max(0.0), tail_tol))
    }

    fn normalized(mut probs: Vec<f64>, total: f64, tail_estimate: f64, tail_tol: f64) -> Self {
        for p in probs.iter_mut() {
            *p /= total;
        }
        let first = probs.iter().position(|&p| p > 0.0).unwrap_or(0);
        let last = probs.iter().rposition(|&p| p > 0.0).map_or(1, |i| i + 1);
        let mut mean = CompensatedSum::new();
        for (k, &p) in probs.iter().enumerate().take(last).skip(first) {
            mean.add(k as f64 * p);
        }
        let center = (mean.value().round().max(0.0) as usize).min(probs.len() - 1);
        Self {
            probs,
            tail_estimate,
            tail_tol,
            support: (first, last),
            center,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    /// Estimated probability mass beyond the truncation.
    pub fn tail_estimate(&self) -> f64 {
        self.tail_estimate
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn total(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for &p in self.support_slice() {
            acc.add(p);
        }
        acc.value()
    }

    fn support_slice(&self) -> &[f64] {
        &self.probs[self.support.0..self.support.1]
    }

    pub fn moments(&self) -> Moments {
        let (first, last) = self.support;
        let mut mean = CompensatedSum::new();
        for (k, &p) in self.probs[first..last].iter().enumerate() {
            mean.add((first + k) as f64 * p);
        }
        let mean = mean.value();
        let mut var = CompensatedSum::new();
        for (k, &p) in self.probs[first..last].iter().enumerate() {
            let d = (first + k) as f64 - mean;
            var.add(d * d * p);
        }
        Moments {
            mean: mean.max(0.0),
            variance: var.value().max(0.0),
        }
    }

    /// Squared modulus of `Σ_k p_k e^{ikφ}`, clamped to `[0, 1]`.
    pub fn overlap_kappa(&self, phi: f64) -> f64 {
        let (first, last) = self.support;
        let center = self.center as f64;
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (k, &p) in self.probs[first..last].iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let (s, c) = (((first + k) as f64 - center) * phi).sin_cos();
            re.add(p * c);
            im.add(p * s);
        }
        let (re, im) = (re.value(), im.value());
        (re * re + im * im).clamp(0.0, 1.0)
    }

    /// Second-order expansion `1 − φ²ΔN²`, clamped below at zero.
    pub fn quadratic_overlap(&self, phi: f64) -> f64 {
        (1.0 - phi * phi * self.moments().variance).max(0.0)
    }
}

fn validate_tail_tol(tail_tol: f64) -> Result<()> {
    if !(tail_tol.is_finite() && tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tail tolerance must lie in (0, 1), got {tail_tol}"
        )));
    }
    Ok(())
}

fn checked_total(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::InvalidWeights("empty weight list".into()));
    }
    if weights.len() > MAX_DIM {
        return Err(Error::InvalidWeights(format!(
            "{} levels exceeds the cap of {MAX_DIM}",
            weights.len()
        )));
    }
    if let Some((k, w)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !w.is_finite() || **w < 0.0)
    {
        return Err(Error::InvalidWeights(format!(
            "weight {k} is {w}; weights must be finite and nonnegative"
        )));
    }
    let mut acc = CompensatedSum::new();
    for &w in weights {
        acc.add(w);
    }
    let total = acc.value();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::InvalidWeights(
            "weights must contain at least one positive entry".into(),
        ));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn poisson(mean: f64, dim: usize) -> Vec<f64> {
        let mut w = Vec::with_capacity(dim);
        let mut p = (-mean).exp();
        for k in 0..dim {
            w.push(p);
            p *= mean / (k + 1) as f64;
        }
        w
    }

    #[test]
    fn vacuum() {
        let d = FockDistribution::from_weights(&[1.0], DEFAULT_TAIL_TOL).unwrap();
        assert_eq!(d.probs(), &[1.0]);
        assert_eq!(d.moments(), Moments { mean: 0.0, variance: 0.0 });
        assert_eq!(d.overlap_kappa(1.234), 1.0);
    }

    #[test]
    fn uniform_normalization() {
        let d = FockDistribution::from_weights(&[1.0; 4], DEFAULT_TAIL_TOL).unwrap();
        assert_eq!(d.probs(), &[0.25; 4]);
        assert_eq!(d.tail_estimate(), 0.0);
    }

    #[test]
    fn poisson_tail_is_tiny() {
        // Σ_{k≥40} e^{-1}/k! ≈ 1.3e-49, far below double resolution.
        let d = FockDistribution::from_weights(&poisson(1.0, 40), DEFAULT_TAIL_TOL).unwrap();
        assert!(d.tail_estimate() < 1e-15);
        assert_eq!(d.dim(), 40);
    }

    #[test]
    fn rejects_bad_weights() {
        let tol = DEFAULT_TAIL_TOL;
        assert!(matches!(FockDistribution::from_weights(&[], tol), Err(Error::InvalidWeights(_))));
        assert!(matches!(
            FockDistribution::from_weights(&[0.0, 0.0], tol),
            Err(Error::InvalidWeights(_))
        ));
        assert!(matches!(
            FockDistribution::from_weights(&[1.0, -0.1], tol),
            Err(Error::InvalidWeights(_))
        ));
        assert!(matches!(
            FockDistribution::from_weights(&[1.0, f64::NAN], tol),
            Err(Error::InvalidWeights(_))
        ));
        assert!(matches!(
            FockDistribution::from_weights(&[1.0, f64::INFINITY], tol),
            Err(Error::InvalidWeights(_))
        ));
        assert!(FockDistribution::from_weights(&[1.0], 0.0).is_err());
    }

    #[test]
    fn two_level_half_turn_is_orthogonal() {
        let d = FockDistribution::from_weights(&[0.5, 0.5], DEFAULT_TAIL_TOL).unwrap();
        assert!(d.overlap_kappa(PI) < 1e-30);
        assert!((d.overlap_kappa(PI / 2.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coherent_overlap_matches_gaussian_closed_form() {
        let d = FockDistribution::from_weights(&poisson(1.0, 60), DEFAULT_TAIL_TOL).unwrap();
        let expected = (-4.0f64).exp();
        assert!((d.overlap_kappa(PI) - expected).abs() < 1e-14);
        assert!((expected - 0.018_315_6).abs() < 1e-7);
    }

    #[test]
    fn moments_of_poisson_and_uniform() {
        let d = FockDistribution::from_weights(&poisson(4.0, 80), DEFAULT_TAIL_TOL).unwrap();
        let m = d.moments();
        assert!((m.mean - 4.0).abs() < 1e-12);
        assert!((m.variance - 4.0).abs() < 1e-12);

        let dim = 37usize;
        let u = FockDistribution::from_weights(&vec![1.0; dim], DEFAULT_TAIL_TOL).unwrap();
        let m = u.moments();
        let d = dim as f64;
        assert!((m.mean - (d - 1.0) / 2.0).abs() < 1e-12);
        assert!((m.variance - (d * d - 1.0) / 12.0).abs() < 1e-10);
    }

    #[test]
    fn quadratic_overlap_cases() {
        let vac = FockDistribution::from_weights(&[1.0], DEFAULT_TAIL_TOL).unwrap();
        assert_eq!(vac.quadratic_overlap(2.0), 1.0);

        let d = FockDistribution::from_weights(&poisson(1.0, 60), DEFAULT_TAIL_TOL).unwrap();
        assert!((d.quadratic_overlap(0.01) - 0.9999).abs() < 1e-14);
        assert!((d.quadratic_overlap(0.01) - d.overlap_kappa(0.01)).abs() <= 1e-7);
        assert_eq!(d.quadratic_overlap(100.0), 0.0);
    }
}
