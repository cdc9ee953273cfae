//! State families as photon-number distributions.
//!
//! Every family is parametrized with zero initial phase: coherent states
//! `|α⟩` with real `α`, phase-coherent states `√(1−x²) Σ x^k |k⟩`, in-phase
//! displaced squeezed states `D(x) S(r) |0⟩`, and uniform truncations of a
//! London phase state.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::{FockDistribution, Moments, MAX_DIM};
use crate::numeric::CompensatedSum;

/// State family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Coherent,
    PhaseCoherent,
    Squeezed,
    TruncatedLondon,
    Custom,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Coherent => "coherent",
            Family::PhaseCoherent => "phase-coherent",
            Family::Squeezed => "squeezed",
            Family::TruncatedLondon => "london",
            Family::Custom => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "coherent" => Ok(Family::Coherent),
            "phase-coherent" => Ok(Family::PhaseCoherent),
            "squeezed" => Ok(Family::Squeezed),
            "london" | "truncated-london" => Ok(Family::TruncatedLondon),
            "custom" => Ok(Family::Custom),
            other => Err(Error::Parse(format!("unknown family `{other}`"))),
        }
    }
}

/// A state family together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Coherent { alpha: f64 },
    PhaseCoherent { x: f64 },
    SqueezedCoherent { x: f64, r: f64 },
    TruncatedLondon { dim: usize },
    /// Arbitrary weights; `source` is the file they were read from, if any.
    Custom { weights: Vec<f64>, source: Option<String> },
}

impl StateSpec {
    pub fn family(&self) -> Family {
        match self {
            StateSpec::Coherent { .. } => Family::Coherent,
            StateSpec::PhaseCoherent { .. } => Family::PhaseCoherent,
            StateSpec::SqueezedCoherent { .. } => Family::Squeezed,
            StateSpec::TruncatedLondon { .. } => Family::TruncatedLondon,
            StateSpec::Custom { .. } => Family::Custom,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StateSpec::Coherent { alpha } => check_nonneg("alpha", alpha),
            StateSpec::PhaseCoherent { x } => {
                check_nonneg("x", x)?;
                if x >= 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "phase-coherent x must be < 1 for a normalizable state, got {x}"
                    )));
                }
                Ok(())
            }
            StateSpec::SqueezedCoherent { x, r } => {
                check_nonneg("x", x)?;
                check_nonneg("r", r)
            }
            StateSpec::TruncatedLondon { dim } => {
                if dim == 0 || dim > MAX_DIM {
                    return Err(Error::InvalidParameter(format!(
                        "london dim must lie in [1, {MAX_DIM}], got {dim}"
                    )));
                }
                Ok(())
            }
            StateSpec::Custom { ref weights, .. } => {
                // Full weight validation happens in FockDistribution.
                if weights.is_empty() {
                    return Err(Error::InvalidWeights("empty weight list".into()));
                }
                Ok(())
            }
        }
    }

    /// Closed-form `(N, ΔN²)`; `None` for custom weights.
    pub fn analytic_moments(&self) -> Option<Moments> {
        let (mean, variance) = match *self {
            StateSpec::Coherent { alpha } => (alpha * alpha, alpha * alpha),
            StateSpec::PhaseCoherent { x } => {
                let n = x * x / (1.0 - x * x);
                (n, n * (n + 1.0))
            }
            StateSpec::SqueezedCoherent { x, r } => squeezed_moments(x, r),
            StateSpec::TruncatedLondon { dim } => {
                let d = dim as f64;
                ((d - 1.0) / 2.0, (d * d - 1.0) / 12.0)
            }
            StateSpec::Custom { .. } => return None,
        };
        Some(Moments { mean, variance })
    }

    pub fn distribution(&self, tail_tol: f64) -> Result<FockDistribution> {
        match self {
            StateSpec::Coherent { alpha } => coherent_distribution(*alpha, tail_tol),
            StateSpec::PhaseCoherent { x } => phase_coherent_distribution(*x, tail_tol),
            StateSpec::SqueezedCoherent { x, r } => squeezed_distribution(*x, *r, tail_tol),
            StateSpec::TruncatedLondon { dim } => truncated_london_distribution(*dim, tail_tol),
            StateSpec::Custom { weights, .. } => FockDistribution::from_weights(weights, tail_tol),
        }
    }

    /// Parses the canonical text form, reading `custom:@path` weight files
    /// from disk.
    pub fn parse(text: &str) -> Result<Self> {
        let (head, rest) = text
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected `family:params`, got `{text}`")))?;
        let family: Family = head.parse()?;

        if family == Family::Custom {
            let path = rest.strip_prefix('@').ok_or_else(|| {
                Error::Parse("custom states take a weight file: `custom:@file.csv`".into())
            })?;
            let weights = read_weights(Path::new(path))?;
            let spec = StateSpec::Custom {
                weights,
                source: Some(path.to_string()),
            };
            spec.validate()?;
            return Ok(spec);
        }

        let params = parse_params(rest)?;
        let spec = match family {
            Family::Coherent => {
                expect_keys(&params, &["alpha"])?;
                StateSpec::Coherent {
                    alpha: float_param(&params, "alpha")?,
                }
            }
            Family::PhaseCoherent => {
                expect_keys(&params, &["x"])?;
                StateSpec::PhaseCoherent {
                    x: float_param(&params, "x")?,
                }
            }
            Family::Squeezed => {
                expect_keys(&params, &["x", "r"])?;
                StateSpec::SqueezedCoherent {
                    x: float_param(&params, "x")?,
                    r: float_param(&params, "r")?,
                }
            }
            Family::TruncatedLondon => {
                expect_keys(&params, &["dim"])?;
                let raw = lookup(&params, "dim")?;
                let dim = raw
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("dim must be a positive integer, got `{raw}`")))?;
                StateSpec::TruncatedLondon { dim }
            }
            Family::Custom => unreachable!(),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Coherent { alpha } => write!(f, "coherent:alpha={alpha:?}"),
            StateSpec::PhaseCoherent { x } => write!(f, "phase-coherent:x={x:?}"),
            StateSpec::SqueezedCoherent { x, r } => write!(f, "squeezed:x={x:?},r={r:?}"),
            StateSpec::TruncatedLondon { dim } => write!(f, "london:dim={dim}"),
            StateSpec::Custom { source: Some(path), .. } => write!(f, "custom:@{path}"),
            StateSpec::Custom { weights, source: None } => {
                write!(f, "custom:<{} weights>", weights.len())
            }
        }
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be finite and nonnegative, got {v}"
        )));
    }
    Ok(())
}

fn parse_params(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for item in text.split(',') {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected `key=value`, got `{item}`")))?;
        let k = k.trim().to_string();
        if out.iter().any(|(seen, _)| *seen == k) {
            return Err(Error::Parse(format!("duplicate parameter `{k}`")));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

fn expect_keys(params: &[(String, String)], keys: &[&str]) -> Result<()> {
    if let Some((k, _)) = params.iter().find(|(k, _)| !keys.contains(&k.as_str())) {
        return Err(Error::Parse(format!("unexpected parameter `{k}`")));
    }
    Ok(())
}

fn lookup<'a>(params: &'a [(String, String)], key: &str) -> Result<&'a str> {
    params
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::Parse(format!("missing parameter `{key}`")))
}

fn float_param(params: &[(String, String)], key: &str) -> Result<f64> {
    let raw = lookup(params, key)?;
    raw.parse::<f64>()
        .map_err(|_| Error::Parse(format!("{key} must be a number, got `{raw}`")))
}

/// Reads one weight per line; blank lines and `#` comments are skipped.
pub fn read_weights(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut weights = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let w = line.parse::<f64>().map_err(|_| {
            Error::Parse(format!(
                "{}:{}: expected a weight, got `{line}`",
                path.display(),
                line_no + 1
            ))
        })?;
        weights.push(w);
    }
    Ok(weights)
}

/// Stop rule shared by the streaming constructors: both the discarded mass
/// and its contribution to `E[n²]` must fall below `tail_tol`.
struct TailCheck {
    tail_tol: f64,
    second_moment: f64,
}

impl TailCheck {
    fn new(tail_tol: f64, mean: f64, variance: f64) -> Self {
        Self {
            tail_tol,
            second_moment: (variance + mean * mean).max(1.0),
        }
    }

    fn satisfied(&self, mass: f64, second_moment_tail: f64) -> bool {
        mass <= self.tail_tol && second_moment_tail <= self.tail_tol * self.second_moment
    }
}

/// Poisson distribution with mean `alpha²`.
pub fn coherent_distribution(alpha: f64, tail_tol: f64) -> Result<FockDistribution> {
    check_nonneg("alpha", alpha)?;
    if alpha == 0.0 {
        return FockDistribution::from_truncated(vec![1.0], 0.0, tail_tol);
    }
    let mean = alpha * alpha;
    let check = TailCheck::new(tail_tol, mean, mean);

    // Walk outward from the mode with unnormalized ratios p_{k+1}/p_k = μ/(k+1).
    let mode = mean.floor() as usize;
    if mode >= MAX_DIM {
        return Err(Error::TruncationCap { cap: MAX_DIM, tail_tol });
    }
    let mut weights = vec![0.0; mode + 1];
    weights[mode] = 1.0;
    let mut total = CompensatedSum::new();
    total.add(1.0);
    let mut p = 1.0;
    for k in (1..=mode).rev() {
        p *= k as f64 / mean;
        if p < 1e-300 {
            break;
        }
        weights[k - 1] = p;
        total.add(p);
    }

    let mut p = 1.0;
    let mut k = mode;
    loop {
        let next = p * mean / (k + 1) as f64;
        let rho = mean / (k + 2) as f64;
        let growth = rho * ((k + 2) as f64 / (k + 1) as f64).powi(2);
        if k as f64 > mean && growth < 1.0 {
            let norm = total.value();
            let mass = next / (1.0 - rho) / norm;
            let m2 = ((k + 1) as f64).powi(2) * next / (1.0 - growth) / norm;
            if check.satisfied(mass, m2) {
                return FockDistribution::from_truncated(weights, mass, tail_tol);
            }
        }
        if weights.len() >= MAX_DIM {
            return Err(Error::TruncationCap { cap: MAX_DIM, tail_tol });
        }
        weights.push(next);
        total.add(next);
        p = next;
        k += 1;
    }
}

/// Geometric distribution `(1−x²) x^{2k}` with mean `x²/(1−x²)`.
pub fn phase_coherent_distribution(x: f64, tail_tol: f64) -> Result<FockDistribution> {
    StateSpec::PhaseCoherent { x }.validate()?;
    if x == 0.0 {
        return FockDistribution::from_truncated(vec![1.0], 0.0, tail_tol);
    }
    let q = x * x;
    let ln_q = 2.0 * x.ln();
    let mean = q / (1.0 - q);
    let check = TailCheck::new(tail_tol, mean, mean * (mean + 1.0));

    // Memorylessness: the discarded part beyond D is q^D times a shifted copy.
    let tail_at = |d: f64| {
        let mass = (d * ln_q).exp();
        let m2 = mass * (d * d + 2.0 * d * mean + 2.0 * mean * mean + mean);
        (mass, m2)
    };
    let mut dim = ((tail_tol.ln() / ln_q).ceil().max(1.0)) as usize;
    loop {
        if dim > MAX_DIM {
            return Err(Error::TruncationCap { cap: MAX_DIM, tail_tol });
        }
        let (mass, m2) = tail_at(dim as f64);
        if check.satisfied(mass, m2) {
            let weights = (0..dim)
                .map(|k| (1.0 - q) * (k as f64 * ln_q).exp())
                .collect();
            return FockDistribution::from_truncated(weights, mass, tail_tol);
        }
        dim += (dim / 64).max(1);
    }
}

/// Displaced squeezed state `D(x) S(r) |0⟩` on the number-fluctuation
/// enhanced branch, where `ΔN² = x² e^{2r} + 2 sinh²r cosh²r`.
///
/// Amplitudes follow the three-term recurrence
/// `c_{n+1} = [(μ−ν) x c_n + ν √n c_{n−1}] / (μ √(n+1))` with `μ = cosh r`,
/// `ν = sinh r`, all terms positive.
pub fn squeezed_distribution(x: f64, r: f64, tail_tol: f64) -> Result<FockDistribution> {
    StateSpec::SqueezedCoherent { x, r }.validate()?;
    if r == 0.0 {
        return coherent_distribution(x, tail_tol);
    }
    let (mean, variance) = squeezed_moments(x, r);
    let check = TailCheck::new(tail_tol, mean, variance);
    let t = r.tanh();
    // (μ − ν)/μ without cancellation.
    let drive = x * (-r).exp() / r.cosh();
    let past_peak = mean + 10.0 * variance.sqrt() + 10.0;

    const RESCALE_AT: f64 = 1e100;
    let mut weights: Vec<f64> = vec![1.0];
    let mut total = CompensatedSum::new();
    total.add(1.0);
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut n = 0usize;
    loop {
        let next = (drive * cur + t * (n as f64).sqrt() * prev) / ((n + 1) as f64).sqrt();
        prev = cur;
        cur = next;
        n += 1;
        if weights.len() >= MAX_DIM {
            return Err(Error::TruncationCap { cap: MAX_DIM, tail_tol });
        }
        weights.push(cur * cur);
        total.add(cur * cur);

        if cur.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            prev *= s;
            cur *= s;
            let mut rescaled = CompensatedSum::new();
            for w in weights.iter_mut() {
                *w *= s * s;
                rescaled.add(*w);
            }
            total = rescaled;
        }

        if n >= 4 && n as f64 > past_peak {
            let pair = weights[n] + weights[n - 1];
            let before = weights[n - 2] + weights[n - 3];
            // Per-pair decay: observed, but never assumed faster than tanh²r.
            let rho = if before > 0.0 { (pair / before).max(t * t) } else { t * t };
            if rho < 1.0 {
                let norm = total.value();
                let s0 = rho / (1.0 - rho);
                let s1 = rho / (1.0 - rho).powi(2);
                let s2 = rho * (1.0 + rho) / (1.0 - rho).powi(3);
                let nf = n as f64;
                let mass = 2.0 * pair * s0 / norm;
                let m2 = 2.0 * pair * (nf * nf * s0 + 4.0 * nf * s1 + 4.0 * s2) / norm;
                if check.satisfied(mass, m2) {
                    return FockDistribution::from_truncated(weights, mass, tail_tol);
                }
            }
        }
    }
}

/// Analytic `(N, ΔN²)` of the in-phase squeezed state.
pub fn squeezed_moments(x: f64, r: f64) -> (f64, f64) {
    let s2 = r.sinh().powi(2);
    let c2 = r.cosh().powi(2);
    (x * x + s2, x * x * (2.0 * r).exp() + 2.0 * s2 * c2)
}

/// Uniform weights on `0..dim`.
pub fn truncated_london_distribution(dim: usize, tail_tol: f64) -> Result<FockDistribution> {
    StateSpec::TruncatedLondon { dim }.validate()?;
    FockDistribution::from_truncated(vec![1.0 / dim as f64; dim], 0.0, tail_tol)
}

/// Chooses family parameters that spend a mean photon budget `n`.
///
/// For squeezed states `beta` is the fraction of photons in squeezing,
/// `sinh²r = βN`, with the remaining `(1−β)N` in the coherent signal.
pub fn params_from_budget(family: Family, n: f64, beta: Option<f64>) -> Result<StateSpec> {
    check_nonneg("photon budget N", n)?;
    match (family, beta) {
        (Family::Squeezed, None) => {
            return Err(Error::InvalidParameter(
                "squeezed states need a squeezing fraction beta".into(),
            ))
        }
        (Family::Squeezed, Some(b)) if !(0.0..=1.0).contains(&b) => {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in [0, 1], got {b}"
            )))
        }
        (f, Some(_)) if f != Family::Squeezed => {
            return Err(Error::InvalidParameter(format!(
                "beta applies to squeezed states only, not {f}"
            )))
        }
        _ => {}
    }
    let spec = match family {
        Family::Coherent => StateSpec::Coherent { alpha: n.sqrt() },
        Family::PhaseCoherent => StateSpec::PhaseCoherent {
            x: (n / (n + 1.0)).sqrt(),
        },
        Family::Squeezed => {
            let b = beta.unwrap_or(0.0);
            StateSpec::SqueezedCoherent {
                x: ((1.0 - b) * n).sqrt(),
                r: (b * n).sqrt().asinh(),
            }
        }
        Family::TruncatedLondon => {
            let dim = (2.0 * n + 1.0).round();
            if dim > MAX_DIM as f64 {
                return Err(Error::TruncationCap {
                    cap: MAX_DIM,
                    tail_tol: 0.0,
                });
            }
            StateSpec::TruncatedLondon { dim: dim as usize }
        }
        Family::Custom => {
            return Err(Error::Unsupported(
                "custom states have no photon-budget parametrization".into(),
            ))
        }
    };
    spec.validate()?;
    Ok(spec)
}

/// Value of a closed-form overlap expression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormOverlap {
    pub value: f64,
    /// Set when the expression is kept for comparison only and is known not
    /// to equal the exact overlap.
    pub reference_only: bool,
}

/// Closed-form `κ(φ)` for the families that have one.
///
/// The squeezed expression is the double-Gaussian form with the
/// `σ₁, σ₂` variances evaluated as written; it is not normalized
/// (it returns 2 at `φ = 0`) and is flagged `reference_only`.
pub fn closed_form_overlap(spec: &StateSpec, phi: f64) -> Result<ClosedFormOverlap> {
    spec.validate()?;
    // 1 − cos φ without cancellation.
    let one_minus_cos = 2.0 * (0.5 * phi).sin().powi(2);
    match *spec {
        StateSpec::Coherent { alpha } => Ok(ClosedFormOverlap {
            value: (-2.0 * alpha * alpha * one_minus_cos).exp(),
            reference_only: false,
        }),
        StateSpec::PhaseCoherent { x } => {
            let q = x * x;
            let gap = (1.0 - q) * (1.0 - q);
            let value = if gap == 0.0 && one_minus_cos == 0.0 {
                1.0
            } else {
                gap / (gap + 2.0 * q * one_minus_cos)
            };
            Ok(ClosedFormOverlap {
                value,
                reference_only: false,
            })
        }
        StateSpec::SqueezedCoherent { x, r } => {
            let c2 = (2.0 * phi).cos();
            let up = (2.0 * r).exp();
            let down = (-2.0 * r).exp();
            let sigma1 = (up * (3.0 + c2) + down * (1.0 - c2)) / 8.0;
            let sigma2 = (up * (1.0 - c2) + down * (3.0 + c2)) / 8.0;
            let exponent = one_minus_cos.powi(2) / (2.0 * sigma1 * sigma1)
                + phi.sin().powi(2) / (2.0 * sigma2 * sigma2);
            Ok(ClosedFormOverlap {
                value: (-x * x * exponent).exp() / (2.0 * sigma1 * sigma2),
                reference_only: true,
            })
        }
        StateSpec::TruncatedLondon { .. } | StateSpec::Custom { .. } => Err(Error::Unsupported(
            format!("no closed-form overlap for {} states", spec.family()),
        )),
    }
}
