use approx::assert_relative_eq;
use proptest::prelude::*;
use quasiprox::resistance::{
    curvature_bound, curvature_rate, gamma, gamma_prime, gamma_second, validate_hypotheses, PowerResistance,
    ResistanceCurve, DEFAULT_CURVATURE_GRID,
};

proptest! {
    #[test]
    fn convex_increasing(alpha in 1.01f64..5.0, a in 0.0f64..10.0, b in 0.0f64..10.0, t in 0.0f64..1.0) {
        let g = PowerResistance::new(alpha).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(g.value(lo) <= g.value(hi));
        let mid = t * a + (1.0 - t) * b;
        prop_assert!(g.value(mid) <= t * g.value(a) + (1.0 - t) * g.value(b) + 1e-12 * (1.0 + g.value(a) + g.value(b)));
    }

    #[test]
    fn derivatives_match_central_differences(alpha in 1.1f64..4.0, q in 0.1f64..5.0) {
        let g = PowerResistance::new(alpha).unwrap();
        let h = 1e-5 * q;
        let d1 = (g.value(q + h) - g.value(q - h)) / (2.0 * h);
        let d2 = (g.first(q + h) - g.first(q - h)) / (2.0 * h);
        prop_assert!((d1 - g.first(q)).abs() <= 1e-6 * (1.0 + g.first(q).abs()));
        prop_assert!((d2 - g.second(q)).abs() <= 1e-5 * (1.0 + g.second(q).abs()));
    }

    #[test]
    fn curvature_rate_is_constant_in_q(alpha in 1.1f64..4.0, r in 0.05f64..0.95, q in 1e-4f64..1e3) {
        let g = PowerResistance::new(alpha).unwrap();
        let expected = alpha * r.powf(1.0 - alpha);
        prop_assert!((curvature_rate(&g, q, r).unwrap() - expected).abs() <= 1e-12 * expected);
    }
}

#[test]
fn power_examples() {
    let g = PowerResistance::new(2.0).unwrap();
    assert_eq!(gamma(&g, 0.5).unwrap(), 0.25);
    assert_eq!(gamma_prime(&g, 0.5).unwrap(), 1.0);
    assert_eq!(gamma_prime(&g, 0.0).unwrap(), 0.0);
    assert_eq!(gamma_second(&g, 3.0).unwrap(), 2.0);
    assert!(gamma(&g, -1.0).is_err());
    let err = PowerResistance::new(1.0).unwrap_err().to_string();
    assert!(err.contains("alpha must exceed 1"), "{err}");
}

#[test]
fn curvature_bound_over_a_grid() {
    for alpha in [1.5, 2.0, 3.0] {
        let g = PowerResistance::new(alpha).unwrap();
        for r in [0.25, 0.5, 0.9] {
            let b = curvature_bound(&g, r, 10.0, DEFAULT_CURVATURE_GRID).unwrap();
            assert_relative_eq!(b.rho_bar, alpha * r.powf(1.0 - alpha), max_relative = 1e-12);
        }
    }
    assert!(curvature_rate(&PowerResistance::new(2.0).unwrap(), 1.0, 1.0).is_err());
    assert!(curvature_rate(&PowerResistance::new(2.0).unwrap(), 0.0, 0.5).is_err());
}

#[test]
fn hypotheses_hold_for_power_curves() {
    let report = validate_hypotheses(&PowerResistance::new(2.5).unwrap(), 4.0, 0.5);
    assert!(report.passes(), "{:?}", report.violations);
    assert_eq!(report.value_at_zero, 0.0);
    assert_eq!(report.slope_at_zero, 0.0);
}
