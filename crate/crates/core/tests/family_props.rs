use phasebound::{
    closed_form_overlap, coherent_distribution, params_from_budget, phase_coherent_distribution,
    squeezed_distribution, truncated_london_distribution, Family, StateSpec, DEFAULT_TAIL_TOL,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn coherent_closed_form(alpha in 0.0f64..12.0, phi in -PI..PI) {
        let spec = StateSpec::Coherent { alpha };
        let exact = spec.distribution(DEFAULT_TAIL_TOL).unwrap().overlap_kappa(phi);
        let closed = closed_form_overlap(&spec, phi).unwrap();
        prop_assert!(!closed.reference_only);
        prop_assert!((closed.value - exact).abs() <= 1e-9, "{} vs {}", closed.value, exact);
    }

    #[test]
    fn phase_coherent_closed_form(x in 0.0f64..0.99, phi in -PI..PI) {
        let spec = StateSpec::PhaseCoherent { x };
        let exact = spec.distribution(DEFAULT_TAIL_TOL).unwrap().overlap_kappa(phi);
        let closed = closed_form_overlap(&spec, phi).unwrap();
        prop_assert!((closed.value - exact).abs() <= 1e-9, "{} vs {}", closed.value, exact);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructed_moments_match(x in 0.0f64..8.0, r in 0.0f64..2.0, alpha in 0.0f64..20.0, q in 0.0f64..0.97) {
        let specs = [
            StateSpec::Coherent { alpha },
            StateSpec::PhaseCoherent { x: q },
            StateSpec::SqueezedCoherent { x, r },
        ];
        for spec in specs {
            let d = spec.distribution(DEFAULT_TAIL_TOL).unwrap();
            let m = d.moments();
            let want = spec.analytic_moments().unwrap();
            prop_assert!((d.total() - 1.0).abs() <= DEFAULT_TAIL_TOL);
            prop_assert!(d.tail_estimate() <= DEFAULT_TAIL_TOL);
            if want.mean > 0.0 {
                prop_assert!(rel(m.mean, want.mean) <= 1e-9, "{spec}: mean {} vs {}", m.mean, want.mean);
                prop_assert!(rel(m.variance, want.variance) <= 1e-9, "{spec}: var {} vs {}", m.variance, want.variance);
            }
        }
    }

    #[test]
    fn budget_round_trip(n in 0.01f64..500.0, beta in 0.0f64..=1.0) {
        for (family, b) in [
            (Family::Coherent, None),
            (Family::PhaseCoherent, None),
            (Family::Squeezed, Some(beta)),
        ] {
            let spec = params_from_budget(family, n, b).unwrap();
            let mean = spec.distribution(DEFAULT_TAIL_TOL).unwrap().moments().mean;
            prop_assert!(rel(mean, n) <= 1e-9, "{spec}: {mean} vs {n}");
        }
        let london = params_from_budget(Family::TruncatedLondon, n, None).unwrap();
        let mean = london.distribution(DEFAULT_TAIL_TOL).unwrap().moments().mean;
        prop_assert!((mean - n).abs() <= 0.5);
    }

    #[test]
    fn squeezed_vacuum_is_even(r in 0.05f64..2.5) {
        let d = squeezed_distribution(0.0, r, DEFAULT_TAIL_TOL).unwrap();
        for p in d.probs().iter().skip(1).step_by(2) {
            prop_assert!(*p <= 1e-20);
        }
    }
}

#[test]
fn second_order_law_every_family() {
    let dists = [
        ("coherent", coherent_distribution(5.0, DEFAULT_TAIL_TOL).unwrap()),
        ("phase-coherent", phase_coherent_distribution(0.9, DEFAULT_TAIL_TOL).unwrap()),
        ("squeezed", squeezed_distribution(4.0, 0.8, DEFAULT_TAIL_TOL).unwrap()),
        ("london", truncated_london_distribution(41, DEFAULT_TAIL_TOL).unwrap()),
    ];
    for (name, d) in dists {
        let dn = d.moments().std_dev();
        for scale in [1e-2, 5e-3, 1e-3] {
            let phi = scale / dn;
            let exact = d.overlap_kappa(phi);
            let err = rel(d.quadratic_overlap(phi), exact);
            assert!(err <= 1e-3, "{name} at φΔN = {scale}: {err}");
        }
    }
}

#[test]
fn budget_rejects_misplaced_beta() {
    assert!(params_from_budget(Family::Squeezed, 10.0, None).is_err());
    assert!(params_from_budget(Family::Coherent, 10.0, Some(0.5)).is_err());
    assert!(params_from_budget(Family::Squeezed, 10.0, Some(1.5)).is_err());
    assert!(params_from_budget(Family::Custom, 10.0, None).is_err());
}
