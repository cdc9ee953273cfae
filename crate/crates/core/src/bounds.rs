//! Closed-form minimum-detectable-phase bounds and power-law fits.
//!
//! The published closed forms (`shot_noise_bound`, `fluctuation_bound`,
//! `phase_coherent_bound`, `squeezed_bound`) are evaluated exactly as
//! written, including their inconsistent constants. In particular their
//! threshold overlap `√((1 + √(P01(1−P01)))/2)` (see
//! [`published_kappa_threshold`]) equals `1/√2` at `P01 = 0`, whereas
//! solving `P11 = 1/2` gives `κ* = 1/2` (see
//! [`kappa_threshold`](crate::decision::kappa_threshold)).
//! [`BoundReport`] puts each published value beside the corrected
//! quadratic bound and the exact numerical solution.

use rayon::prelude::*;

use crate::decision::{kappa_threshold, min_detectable_phase};
use crate::error::{Error, Result};
use crate::families::{params_from_budget, Family, StateSpec};

fn check_budget(n: f64) -> Result<()> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "photon number must be positive, got {n}"
        )));
    }
    Ok(())
}

fn check_p01(p01: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&p01) {
        return Err(Error::InvalidParameter(format!(
            "false alarm probability must lie in [0, 0.5), got {p01}"
        )));
    }
    Ok((p01 * (1.0 - p01)).sqrt())
}

/// Threshold overlap in the form used by the published bounds. It does not
/// solve `P11 = 1/2`; kept for comparison output only.
pub fn published_kappa_threshold(p01: f64) -> Result<f64> {
    let g = check_p01(p01)?;
    Ok(((1.0 + g) / 2.0).sqrt())
}

/// Shot-noise bound `√(ln(2/(1+√(P01(1−P01))))) / √N` (natural log).
pub fn shot_noise_bound(n: f64, p01: f64) -> Result<f64> {
    check_budget(n)?;
    let g = check_p01(p01)?;
    Ok((2.0 / (1.0 + g)).ln().sqrt() / n.sqrt())
}

/// Generic bound `√((1 − √(P01(1−P01)))/2) / ΔN`.
pub fn fluctuation_bound(delta_n: f64, p01: f64) -> Result<f64> {
    let g = check_p01(p01)?;
    if !(delta_n > 0.0) {
        return Err(Error::NotDetectable {
            kappa_star: kappa_threshold(p01)?,
            phi_max: std::f64::consts::PI,
        });
    }
    Ok(((1.0 - g) / 2.0).sqrt() / delta_n)
}

/// `√(1 − κ*) / ΔN` with the exact threshold `κ* = ½ + √(P01(1−P01))`,
/// i.e. `√((1 − 2√(P01(1−P01)))/2) / ΔN`.
pub fn corrected_fluctuation_bound(delta_n: f64, p01: f64) -> Result<f64> {
    let g = check_p01(p01)?;
    if !(delta_n > 0.0) {
        return Err(Error::NotDetectable {
            kappa_star: kappa_threshold(p01)?,
            phi_max: std::f64::consts::PI,
        });
    }
    Ok(((1.0 - 2.0 * g) / 2.0).sqrt() / delta_n)
}

/// Phase-coherent bound `√((1−g)/(1+g)) / √(N(N+1))`, `g = √(P01(1−P01))`.
pub fn phase_coherent_bound(n: f64, p01: f64) -> Result<f64> {
    check_budget(n)?;
    let g = check_p01(p01)?;
    Ok(((1.0 - g) / (1.0 + g)).sqrt() / (n * (n + 1.0)).sqrt())
}

/// Squeezed bound `√((1−g)/(β(1−β))) / (2N)`.
pub fn squeezed_bound(n: f64, beta: f64, p01: f64) -> Result<f64> {
    check_budget(n)?;
    let g = check_p01(p01)?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "squeezing fraction must lie in (0, 1), got {beta}"
        )));
    }
    Ok(((1.0 - g) / (beta * (1.0 - beta))).sqrt() / (2.0 * n))
}

/// Least-squares line through `(ln N, ln φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(p) = points.iter().find(|(n, phi)| !(*n > 0.0 && *phi > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "power-law fit needs positive values, got {p:?}"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(n, phi)| (n.ln(), phi.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "power-law fit needs at least two distinct N".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(ScalingFit {
        slope,
        intercept,
        r_squared,
        n_points: points.len(),
    })
}

/// Published, corrected, and exact `φ_M` for one state.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub family: Family,
    pub n: f64,
    pub p01: f64,
    pub kappa_star: f64,
    /// Published closed form for the family; `None` where it is undefined
    /// (squeezed vacuum, `β = 1`).
    pub phi_paper: Option<f64>,
    /// `None` when the state has no photon-number spread.
    pub phi_corrected: Option<f64>,
    /// `None` when the exact solver reports the state as not detectable.
    pub phi_exact: Option<f64>,
    pub ratio_exact_to_corrected: Option<f64>,
}

impl BoundReport {
    pub fn compute(
        spec: &StateSpec,
        p01: f64,
        tail_tol: f64,
        phi_max: f64,
        grid: usize,
    ) -> Result<Self> {
        let kappa_star = kappa_threshold(p01)?;
        let dist = spec.distribution(tail_tol)?;
        let moments = spec.analytic_moments().unwrap_or_else(|| dist.moments());
        let n = moments.mean;
        let delta_n = moments.std_dev();

        let phi_paper = match *spec {
            _ if n <= 0.0 => None,
            StateSpec::Coherent { .. } => Some(shot_noise_bound(n, p01)?),
            StateSpec::PhaseCoherent { .. } => Some(phase_coherent_bound(n, p01)?),
            StateSpec::SqueezedCoherent { x, r } => {
                let squeezing = r.sinh().powi(2);
                if r == 0.0 {
                    Some(shot_noise_bound(n, p01)?)
                } else if x > 0.0 {
                    Some(squeezed_bound(n, squeezing / (x * x + squeezing), p01)?)
                } else {
                    None
                }
            }
            StateSpec::TruncatedLondon { .. } | StateSpec::Custom { .. } => {
                fluctuation_bound(delta_n, p01).ok()
            }
        };
        let phi_corrected = corrected_fluctuation_bound(delta_n, p01).ok();
        let phi_exact = match min_detectable_phase(&dist, p01, phi_max, grid) {
            Ok(r) => Some(r.phi_min),
            Err(Error::NotDetectable { .. }) => None,
            Err(e) => return Err(e),
        };
        let ratio_exact_to_corrected = match (phi_exact, phi_corrected) {
            (Some(e), Some(c)) => Some(e / c),
            _ => None,
        };
        Ok(Self {
            family: spec.family(),
            n,
            p01,
            kappa_star,
            phi_paper,
            phi_corrected,
            phi_exact,
            ratio_exact_to_corrected,
        })
    }
}

/// `n` values for a sweep: `count` points from `lo` to `hi`, spaced
/// geometrically when `log` is set.
pub fn budget_grid(lo: f64, hi: f64, count: usize, log: bool) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || count == 0 || (count == 1 && hi != lo) {
        return Err(Error::InvalidParameter(format!(
            "invalid sweep range {lo}:{hi}:{count}"
        )));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let step = |i: usize| i as f64 / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i == count - 1 {
                hi
            } else if log {
                lo * (hi / lo).powf(step(i))
            } else {
                lo + (hi - lo) * step(i)
            }
        })
        .collect())
}

/// Bound reports across photon budgets, evaluated in parallel and returned
/// in input order.
pub fn sweep_budget(
    family: Family,
    budgets: &[f64],
    beta: Option<f64>,
    p01: f64,
    tail_tol: f64,
    grid: usize,
) -> Result<Vec<BoundReport>> {
    budgets
        .par_iter()
        .map(|&n| {
            let spec = params_from_budget(family, n, beta)?;
            BoundReport::compute(&spec, p01, tail_tol, std::f64::consts::PI, grid)
        })
        .collect()
}
