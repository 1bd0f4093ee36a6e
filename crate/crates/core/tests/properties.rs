use graftlab_core::geometry::{GraftedCollar, OuterBc};
use graftlab_core::hypersolve::dtn;
use graftlab_core::identities::boundary_term_pair;
use graftlab_core::sample::{random_solution, random_solution_any_mean, rng};
use graftlab_core::spectral::Side;
use graftlab_core::variation::{solve_both, solve_flat_variation};
use graftlab_core::Error;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flat_variation_rejects_exactly_nonzero_c0(seed in any::<u64>(), ell in 1.0..8.0_f64, s in 0.1..4.0_f64, tilt in any::<bool>()) {
        let sol = if tilt {
            random_solution_any_mean(&mut rng(seed), ell, s, 4)
        } else {
            random_solution(&mut rng(seed), ell, s, 4)
        };
        for side in Side::both() {
            let rejected = matches!(
                solve_flat_variation(&sol.neumann_trace_flat(side), 0.0),
                Err(Error::NoPeriodicSolution { .. })
            );
            prop_assert_eq!(rejected, sol.c0 != 0.0);
        }
    }

    #[test]
    fn boundary_term_matches_quadrature(seed in any::<u64>(), ell in 1.0..8.0_f64, s in 0.1..4.0_f64, l0 in -1.0..1.0_f64, r0 in -1.0..1.0_f64) {
        let sol = random_solution(&mut rng(seed), ell, s, 12);
        let (vl, vr) = solve_both(&sol, l0, r0).unwrap();
        let (closed, quad) = boundary_term_pair(&sol, &vl, &vr).unwrap();
        prop_assert!((closed - quad).abs() <= 1e-10 * closed.abs().max(quad.abs()).max(1.0));
    }

    #[test]
    fn variation_rotates_with_its_input(seed in any::<u64>(), y0 in 0.0..6.0_f64) {
        let sol = random_solution(&mut rng(seed), 3.0, 1.0, 6);
        let trace = sol.neumann_trace_flat(Side::Right);
        let v = solve_flat_variation(&trace, 0.25).unwrap();
        let w = solve_flat_variation(&trace.rotated(y0), 0.25).unwrap();
        for y in [0.0, 0.7, 1.9, 2.6] {
            prop_assert!((w.eval(y) - v.eval(y - y0)).abs() < 1e-12);
        }
    }

    #[test]
    fn dirichlet_dtn_is_negative_and_decreasing(ell in 0.5..8.0_f64, a in 0.2..3.0_f64, n in 0usize..12) {
        let here = dtn(n, ell, a, OuterBc::Dirichlet).unwrap();
        let next = dtn(n + 1, ell, a, OuterBc::Dirichlet).unwrap();
        prop_assert!(here < 0.0);
        prop_assert!(next < here);
    }

    #[test]
    fn modulus_orders_charts(ell in 0.2..10.0_f64, s in 0.0..4.0_f64, a in 0.1..3.0_f64, d in 0.01..1.0_f64) {
        let base = GraftedCollar::new(ell, s, a).unwrap();
        prop_assert!(GraftedCollar::new(ell + d, s, a).unwrap().conformal_modulus() < base.conformal_modulus());
        prop_assert!(GraftedCollar::new(ell, s + d, a).unwrap().conformal_modulus() > base.conformal_modulus());
        prop_assert!(GraftedCollar::new(ell, s, a + d).unwrap().conformal_modulus() > base.conformal_modulus());
    }

    #[test]
    fn single_precision_chart_tracks_double(ell in 0.5..8.0_f64, s in 0.0..4.0_f64, a in 0.1..3.0_f64) {
        let wide = GraftedCollar::new(ell, s, a).unwrap();
        let narrow = GraftedCollar::new(ell as f32, s as f32, a as f32).unwrap();
        let rel = |x: f32, y: f64| ((x as f64 - y) / y).abs();
        prop_assert!(rel(narrow.total_area(), wide.total_area()) < 1e-5);
        prop_assert!(rel(narrow.conformal_modulus(), wide.conformal_modulus()) < 1e-5);
    }
}
