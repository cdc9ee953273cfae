//! Neyman-Pearson discrimination between a pure state and its
//! phase-shifted copy.
//!
//! For pure states the whole problem reduces to the overlap modulus
//! `c = |⟨ψ₀|ψ₁⟩|`. The optimal test at Lagrange multiplier `λ` projects onto
//! the positive eigenspace of `ρ₁ − λρ₀`; eliminating `λ` gives the ROC
//!
//! ```text
//! P11 = [√(P01 κ) + √((1−P01)(1−κ))]²   for P01 ≤ κ,   1 otherwise,
//! ```
//!
//! with `κ = c²`. [`eigen_oracle_point`] solves the 2×2 eigenproblem directly
//! and serves as an independent check of [`detection_probability`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::families::{params_from_budget, squeezed_distribution, Family, StateSpec};
use crate::fock::FockDistribution;
use crate::numeric::{bisect_boundary, golden_section_minimize};

/// Eigenvalues with magnitude at or below this are not counted as positive.
pub const ZERO_EIGENVALUE: f64 = 1e-14;

/// Default resolution of the coarse φ scan in [`min_detectable_phase`].
pub const DEFAULT_PHI_GRID: usize = 4096;

/// Relative bisection tolerance on `φ_M`.
pub const PHI_REL_TOL: f64 = 1e-10;

/// Number of points in the default λ grid.
pub const DEFAULT_LAMBDA_POINTS: usize = 400;

/// Overlap modulus and false-alarm budget of one discrimination problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionProblem {
    overlap_mod: f64,
    false_alarm: f64,
}

impl DecisionProblem {
    pub fn new(overlap_mod: f64, false_alarm: f64) -> Result<Self> {
        check_unit("overlap modulus", overlap_mod)?;
        check_unit("false alarm probability", false_alarm)?;
        Ok(Self {
            overlap_mod,
            false_alarm,
        })
    }

    pub fn overlap_mod(&self) -> f64 {
        self.overlap_mod
    }

    pub fn false_alarm(&self) -> f64 {
        self.false_alarm
    }

    pub fn kappa(&self) -> f64 {
        self.overlap_mod * self.overlap_mod
    }

    /// Best achievable detection probability at this false-alarm budget.
    pub fn detection_probability(&self) -> f64 {
        detection_probability(self.kappa(), self.false_alarm)
            .expect("fields validated on construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub p01: f64,
    pub p11: f64,
    /// Lagrange multiplier that produced the point, if it came from the
    /// eigen-measurement.
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiMethod {
    ExactNumeric,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiMinResult {
    pub phi_min: f64,
    pub kappa_star: f64,
    pub method: PhiMethod,
    /// Final bisection bracket `(lo, hi)` with `κ(lo) > κ* ≥ κ(hi)`.
    pub bracket: (f64, f64),
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidParameter(format!(
            "{name} must lie in [0, 1], got {v}"
        )));
    }
    Ok(())
}

/// Optimal detection probability `P11` at overlap `κ` and false-alarm
/// probability `P01`.
pub fn detection_probability(kappa: f64, p01: f64) -> Result<f64> {
    check_unit("kappa", kappa)?;
    check_unit("false alarm probability", p01)?;
    if kappa == 1.0 {
        return Ok(p01);
    }
    if p01 >= kappa {
        return Ok(1.0);
    }
    let amp = (p01 * kappa).sqrt() + ((1.0 - p01) * (1.0 - kappa)).sqrt();
    Ok((amp * amp).min(1.0))
}

/// Overlap `κ*` at which the optimal detection probability falls to 1/2.
///
/// Uses the upper root of `u² − u + (1 − 4P01(1−P01))/4 = 0`,
/// `κ* = ½ + √(P01(1−P01))`, and confirms it by bisection on
/// [`detection_probability`].
pub fn kappa_threshold(p01: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p01) {
        return Err(Error::InvalidParameter(format!(
            "false alarm probability must lie in [0, 1], got {p01}"
        )));
    }
    if p01 >= 0.5 {
        return Err(Error::DegenerateRegime { p01 });
    }
    let exact = 0.5 + (p01 * (1.0 - p01)).sqrt();

    // P11 decreases in κ on [max(P01, ½), 1] from ≥ ½ down to P01 < ½.
    let (lo, hi) = bisect_boundary(p01.max(0.5), 1.0, 0.0, |k| {
        detection_probability(k, p01).unwrap_or(0.0) <= 0.5
    });
    let bisected = 0.5 * (lo + hi);
    if (bisected - exact).abs() > 1e-12 {
        return Err(Error::Internal(format!(
            "threshold root {exact} disagrees with bisection {bisected} at P01 = {p01}"
        )));
    }
    Ok(exact)
}

/// Symmetric 2×2 matrix `[[a, b], [b, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym2 {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

impl Sym2 {
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.b * v[0] + self.d * v[1]]
    }

    pub fn quad(&self, v: [f64; 2]) -> f64 {
        let w = self.apply(v);
        v[0] * w[0] + v[1] * w[1]
    }

    /// Eigenvalues `(low, high)` and the unit eigenvector of `high`.
    pub fn eigen(&self) -> (f64, f64, [f64; 2]) {
        let half_trace = 0.5 * (self.a + self.d);
        let half_gap = 0.5 * (self.a - self.d);
        let radius = half_gap.hypot(self.b);
        let det = self.a * self.d - self.b * self.b;
        // Take the larger-magnitude root directly and the other from det.
        let (low, high) = if half_trace >= 0.0 {
            let high = half_trace + radius;
            (if high != 0.0 { det / high } else { 0.0 }, high)
        } else {
            let low = half_trace - radius;
            (low, if low != 0.0 { det / low } else { 0.0 })
        };
        if self.b == 0.0 {
            let v = if self.a >= self.d { [1.0, 0.0] } else { [0.0, 1.0] };
            return (low, high, v);
        }
        let theta = 0.5 * (2.0 * self.b).atan2(self.a - self.d);
        (low, high, [theta.cos(), theta.sin()])
    }
}

/// The measurement operator `ρ₁ − λρ₀` in the basis `{|ψ₀⟩, |⊥⟩}` with
/// `|ψ₁⟩ = c|ψ₀⟩ + √(1−c²)|⊥⟩`.
pub fn measurement_operator(c: f64, lambda: f64) -> Sym2 {
    let s = (1.0 - c * c).max(0.0).sqrt();
    Sym2 {
        a: c * c - lambda,
        b: c * s,
        d: s * s,
    }
}

/// Projector onto the strictly positive eigenspace of `ρ₁ − λρ₀`.
pub fn positive_projector(c: f64, lambda: f64) -> Sym2 {
    let (low, high, v) = measurement_operator(c, lambda).eigen();
    let low_pos = low > ZERO_EIGENVALUE;
    let high_pos = high > ZERO_EIGENVALUE;
    match (low_pos, high_pos) {
        (true, true) => Sym2 { a: 1.0, b: 0.0, d: 1.0 },
        (false, true) => Sym2 {
            a: v[0] * v[0],
            b: v[0] * v[1],
            d: v[1] * v[1],
        },
        _ => Sym2 { a: 0.0, b: 0.0, d: 0.0 },
    }
}

/// `(P01, P11)` of the eigen-measurement of `ρ₁ − λρ₀`, inferring the
/// perturbed hypothesis on a positive outcome.
pub fn eigen_oracle_point(c: f64, lambda: f64) -> Result<RocPoint> {
    check_unit("overlap modulus", c)?;
    if !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda must be finite, got {lambda}"
        )));
    }
    let proj = positive_projector(c, lambda);
    let s = (1.0 - c * c).max(0.0).sqrt();
    Ok(RocPoint {
        p01: proj.quad([1.0, 0.0]).clamp(0.0, 1.0),
        p11: proj.quad([c, s]).clamp(0.0, 1.0),
        lambda: Some(lambda),
    })
}

/// Analytic ROC over a grid of false-alarm probabilities, in input order.
pub fn roc_analytic(kappa: f64, p01_grid: &[f64]) -> Result<Vec<RocPoint>> {
    p01_grid
        .iter()
        .map(|&p01| {
            Ok(RocPoint {
                p01,
                p11: detection_probability(kappa, p01)?,
                lambda: None,
            })
        })
        .collect()
}

/// Default multiplier grid: 16% of the points linear on `[−2, 0]`, the rest
/// geometric on `[10⁻⁴, 50]`. With 400 points that is 64 + 336.
pub fn default_lambda_grid(points: usize) -> Vec<f64> {
    let points = points.max(2);
    let n_lin = ((points * 64) as f64 / 400.0).round().clamp(1.0, (points - 1) as f64) as usize;
    let n_geo = points - n_lin;
    let mut grid = Vec::with_capacity(points);
    if n_lin == 1 {
        grid.push(0.0);
    } else {
        grid.extend((0..n_lin).map(|i| -2.0 + 2.0 * i as f64 / (n_lin - 1) as f64));
    }
    let (lo, hi) = (1e-4f64.ln(), 50f64.ln());
    if n_geo == 1 {
        grid.push(50.0);
    } else {
        grid.extend((0..n_geo).map(|i| (lo + (hi - lo) * i as f64 / (n_geo - 1) as f64).exp()));
    }
    grid
}

/// ROC traced by sweeping the multiplier, in input order.
pub fn roc_from_oracle(c: f64, lambda_grid: &[f64]) -> Result<Vec<RocPoint>> {
    lambda_grid
        .iter()
        .map(|&l| eigen_oracle_point(c, l))
        .collect()
}

/// Multiplier `λ > 0` whose eigen-measurement has false-alarm probability
/// `p01`, for `0 < p01 < c²`.
pub fn lambda_for_false_alarm(c: f64, p01: f64) -> Result<f64> {
    check_unit("overlap modulus", c)?;
    if !(p01 > 0.0 && p01 < c * c) {
        return Err(Error::InvalidParameter(format!(
            "false alarm {p01} is not reachable with a positive multiplier at c = {c}"
        )));
    }
    let p01_at = |l: f64| eigen_oracle_point(c, l).map(|p| p.p01).unwrap_or(0.0);
    // P01(λ) falls monotonically from c² at 0⁺ to 0 as λ → ∞.
    let mut hi = 1.0;
    while p01_at(hi) > p01 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Internal("no multiplier bracket found".into()));
        }
    }
    let (lo, hi) = bisect_boundary(0.0, hi, 1e-15, |l| l > 0.0 && p01_at(l) <= p01);
    Ok(0.5 * (lo + hi))
}

/// Smallest phase shift in `(0, phi_max]` at which the optimal test reaches
/// detection probability 1/2.
///
/// The overlap need not be monotone, so the first crossing is located on a
/// uniform scan of `grid` points and refined by bisection. Crossings
/// narrower than the scan step can be missed.
pub fn min_detectable_phase(
    dist: &FockDistribution,
    p01: f64,
    phi_max: f64,
    grid: usize,
) -> Result<PhiMinResult> {
    if !(phi_max > 0.0 && phi_max <= std::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!(
            "phi_max must lie in (0, π], got {phi_max}"
        )));
    }
    if grid == 0 {
        return Err(Error::InvalidParameter("scan grid must be positive".into()));
    }
    let kappa_star = kappa_threshold(p01)?;
    let below = |phi: f64| dist.overlap_kappa(phi) <= kappa_star;

    let step = phi_max / grid as f64;
    let first = (1..=grid).find(|&j| below(j as f64 * step)).ok_or(Error::NotDetectable {
        kappa_star,
        phi_max,
    })?;
    let lo = (first - 1) as f64 * step;
    let hi = if first == grid { phi_max } else { first as f64 * step };
    let (lo, hi) = bisect_boundary(lo, hi, PHI_REL_TOL, below);
    Ok(PhiMinResult {
        phi_min: hi,
        kappa_star,
        method: PhiMethod::ExactNumeric,
        bracket: (lo, hi),
    })
}

/// Exact `φ_M` for a squeezed state spending the fraction `beta` of a
/// photon budget `n` on squeezing.
pub fn squeezed_phi_min(
    n: f64,
    beta: f64,
    p01: f64,
    tail_tol: f64,
    grid: usize,
) -> Result<f64> {
    let dist = match params_from_budget(Family::Squeezed, n, Some(beta))? {
        StateSpec::SqueezedCoherent { x, r } => squeezed_distribution(x, r, tail_tol)?,
        _ => unreachable!("squeezed budget yields a squeezed spec"),
    };
    Ok(min_detectable_phase(&dist, p01, std::f64::consts::PI, grid)?.phi_min)
}

/// Result of the squeezing-fraction scan.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaScan {
    pub beta_star: f64,
    pub phi_at_beta_star: f64,
    /// `(β, φ_M)` at 33 evenly spaced β in `[0, 1]`.
    pub samples: Vec<(f64, f64)>,
}

pub const BETA_SAMPLES: usize = 33;
pub const BETA_TOL: f64 = 1e-4;

/// Minimizes the exact `φ_M` over the squeezing fraction at fixed budget.
///
/// The best of the 33 samples seeds a golden-section search on its
/// neighbouring interval.
pub fn optimal_squeezing_fraction(
    n: f64,
    p01: f64,
    tail_tol: f64,
    grid: usize,
) -> Result<BetaScan> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "photon budget must be positive, got {n}"
        )));
    }
    kappa_threshold(p01)?;

    let samples: Vec<(f64, f64)> = (0..BETA_SAMPLES)
        .into_par_iter()
        .map(|i| {
            let beta = i as f64 / (BETA_SAMPLES - 1) as f64;
            squeezed_phi_min(n, beta, p01, tail_tol, grid).map(|phi| (beta, phi))
        })
        .collect::<Result<_>>()?;

    let best = samples
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .expect("sample list is nonempty");
    let lo = samples[best.saturating_sub(1)].0;
    let hi = samples[(best + 1).min(BETA_SAMPLES - 1)].0;

    let mut failure = None;
    let (beta, phi) = golden_section_minimize(
        |b| match squeezed_phi_min(n, b, p01, tail_tol, grid) {
            Ok(phi) => phi,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        lo,
        hi,
        BETA_TOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let (beta_star, phi_at_beta_star) = if phi <= samples[best].1 {
        (beta, phi)
    } else {
        samples[best]
    };
    Ok(BetaScan {
        beta_star,
        phi_at_beta_star,
        samples,
    })
}
