//! Neyman-Pearson limits on interferometric phase detection.
//!
//! Deciding whether a pure state of light `|ψ₀⟩` picked up a phase shift
//! `φ` is a binary hypothesis test between `|ψ₀⟩` and `e^{i n φ}|ψ₀⟩`.
//! Its optimal performance depends only on the overlap
//! `κ(φ) = |Σ_k p_k e^{ikφ}|²` of the photon-number distribution `p_k`.
//! The crate computes `κ` for several state families, the optimal ROC,
//! the minimum detectable phase `φ_M` at which detection probability
//! reaches 1/2 for a fixed false-alarm budget, and the closed-form bounds
//! that approximate it.

pub mod bounds;
pub mod decision;
pub mod error;
pub mod families;
pub mod fock;
pub mod numeric;
pub mod sim;

pub use bounds::{
    budget_grid, sweep_budget, corrected_fluctuation_bound, fit_power_law, fluctuation_bound, phase_coherent_bound,
    published_kappa_threshold, shot_noise_bound, squeezed_bound, BoundReport, ScalingFit,
};
pub use decision::{
    default_lambda_grid, detection_probability, eigen_oracle_point, kappa_threshold,
    lambda_for_false_alarm, min_detectable_phase, optimal_squeezing_fraction, roc_analytic,
    roc_from_oracle, BetaScan, DecisionProblem, PhiMethod, PhiMinResult, RocPoint,
};
pub use error::{Error, Result};
pub use families::{
    closed_form_overlap, coherent_distribution, params_from_budget, phase_coherent_distribution,
    squeezed_distribution, truncated_london_distribution, ClosedFormOverlap, Family, StateSpec,
};
pub use fock::{FockDistribution, Moments, DEFAULT_TAIL_TOL, MAX_DIM};
pub use sim::{simulate_strategy, Hypothesis, SimResult};
