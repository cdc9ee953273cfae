use phasebound::decision::{positive_projector, DEFAULT_LAMBDA_POINTS, DEFAULT_PHI_GRID};
use phasebound::{
    coherent_distribution, default_lambda_grid, detection_probability, kappa_threshold,
    min_detectable_phase, phase_coherent_distribution, roc_analytic, roc_from_oracle,
    squeezed_distribution, truncated_london_distribution, DEFAULT_TAIL_TOL,
};
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn oracle_matches_analytic_roc() {
    let grid = default_lambda_grid(DEFAULT_LAMBDA_POINTS);
    for kappa in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let worst = roc_from_oracle(f64::sqrt(kappa), &grid)
            .unwrap()
            .iter()
            .map(|p| (p.p11 - detection_probability(kappa, p.p01).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-10, "κ = {kappa}: {worst:e}");
    }
}

#[test]
fn threshold_gives_even_odds() {
    for p in [0.0, 1e-6, 1e-3, 0.1, 0.3, 0.49] {
        let k = kappa_threshold(p).unwrap();
        let p11 = detection_probability(k, p).unwrap();
        assert!((p11 - 0.5).abs() <= 1e-12, "p01 = {p}: {p11}");
    }
}

#[test]
fn roc_monotone_and_above_diagonal() {
    let p01: Vec<f64> = (0..=2000).map(|i| i as f64 / 2000.0).collect();
    for kappa in [0.0, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0] {
        let roc = roc_analytic(kappa, &p01).unwrap();
        for w in roc.windows(2) {
            assert!(w[1].p11 >= w[0].p11, "κ = {kappa} at p01 = {}", w[1].p01);
        }
        for p in &roc {
            assert!(p.p11 >= p.p01, "κ = {kappa} at p01 = {}", p.p01);
        }
    }
}

#[test]
fn coherent_phi_min_falls_with_budget() {
    let budgets: Vec<f64> = (0..=24).map(|i| 10f64.powf(i as f64 / 4.0)).collect();
    let phis: Vec<f64> = budgets
        .iter()
        .map(|&n| {
            let d = coherent_distribution(n.sqrt(), DEFAULT_TAIL_TOL).unwrap();
            min_detectable_phase(&d, 1e-3, PI, DEFAULT_PHI_GRID).unwrap().phi_min
        })
        .collect();
    for (w, n) in phis.windows(2).zip(&budgets[1..]) {
        assert!(w[1] < w[0], "φ_M not decreasing at N = {n}");
    }
}

#[test]
fn solver_lands_on_threshold() {
    let dists = [
        coherent_distribution(3.0, DEFAULT_TAIL_TOL).unwrap(),
        coherent_distribution(300.0, DEFAULT_TAIL_TOL).unwrap(),
        phase_coherent_distribution(0.95, DEFAULT_TAIL_TOL).unwrap(),
        squeezed_distribution(5.0, 1.2, DEFAULT_TAIL_TOL).unwrap(),
        truncated_london_distribution(64, DEFAULT_TAIL_TOL).unwrap(),
    ];
    for d in &dists {
        for p01 in [0.0, 1e-3, 0.1, 0.3] {
            let r = min_detectable_phase(d, p01, PI, DEFAULT_PHI_GRID).unwrap();
            let gap = (d.overlap_kappa(r.phi_min) - r.kappa_star).abs();
            assert!(gap <= 1e-9, "p01 = {p01}: |κ(φ_M) − κ*| = {gap:e}");
        }
    }
}

proptest! {
    #[test]
    fn projector_is_orthogonal_projector(c in 0.0f64..=1.0, lambda in -5.0f64..60.0) {
        let p = positive_projector(c, lambda);
        let sq = [
            p.a * p.a + p.b * p.b,
            p.a * p.b + p.b * p.d,
            p.b * p.b + p.d * p.d,
        ];
        prop_assert!((sq[0] - p.a).abs() <= 1e-14);
        prop_assert!((sq[1] - p.b).abs() <= 1e-14);
        prop_assert!((sq[2] - p.d).abs() <= 1e-14);
    }

    #[test]
    fn detection_probability_monotone(kappa in 0.0f64..=1.0, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let p_lo = detection_probability(kappa, lo).unwrap();
        let p_hi = detection_probability(kappa, hi).unwrap();
        prop_assert!(p_hi >= p_lo);
        prop_assert!(p_lo >= lo);
    }
}

#[test]
fn branches_meet_at_p01_equal_kappa() {
    for kappa in [0.05, 0.3, 0.5, 0.77, 0.99] {
        assert_eq!(detection_probability(kappa, kappa).unwrap(), 1.0);
        let below = detection_probability(kappa, kappa * (1.0 - 1e-12)).unwrap();
        assert!((below - 1.0).abs() <= 1e-5, "κ = {kappa}: {below}");
    }
}
