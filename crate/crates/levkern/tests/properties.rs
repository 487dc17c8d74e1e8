//! Property tests: structural invariants that must hold across randomly
//! drawn parameters, not just at hand-picked oracle points.

use levkern::decay::fit_exponential_rate;
use levkern::expmom;
use levkern::model::LevyModel;
use levkern::profile_analysis::comparability_constant;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The fit recovers an exactly log-linear model to near machine
    /// precision, for any rate, power and scale in a broad range.
    #[test]
    fn fit_recovers_exact_model(
        rate in 0.05f64..3.0,
        power in -4.0f64..1.0,
        ln_c in -5.0f64..5.0,
    ) {
        let xs: Vec<f64> = (0..40).map(|i| 1.0 + 0.5 * i as f64).collect();
        let vs: Vec<f64> = xs
            .iter()
            .map(|&x| (ln_c - rate * x + power * x.ln()).exp())
            .collect();
        let fit = fit_exponential_rate(&xs, &vs, true).unwrap();
        prop_assert!((fit.rate - rate).abs() < 1e-7 * rate.max(1.0));
        prop_assert!((fit.power - power).abs() < 1e-6);
        prop_assert!(!fit.poor_fit);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The characteristic exponent is nonnegative, zero only at the
    /// origin, and radially increasing.
    #[test]
    fn symbol_is_monotone_radial(
        beta in 0.3f64..1.9,
        m in 0.2f64..4.0,
        s in 0.01f64..50.0,
    ) {
        let model = LevyModel::relativistic(1, beta, m).unwrap();
        let lo = model.psi_radial(s).unwrap().value;
        let hi = model.psi_radial(s * 1.5).unwrap().value;
        prop_assert!(lo > 0.0);
        prop_assert!(hi > lo);
    }

    /// The decay-rate curve never exceeds the profile's own rate and is
    /// non-decreasing in alpha.
    #[test]
    fn gamma_bounded_and_monotone(
        beta in 0.5f64..1.8,
        m in 0.4f64..3.0,
        alpha in 0.05f64..5.0,
    ) {
        let model = LevyModel::relativistic(1, beta, m).unwrap();
        let kappa = m.powf(1.0 / beta);
        let g1 = expmom::gamma_alpha(&model, alpha, &[1.0]).unwrap();
        let g2 = expmom::gamma_alpha(&model, alpha * 1.5, &[1.0]).unwrap();
        prop_assert!(g1 > 0.0 && g1 <= kappa * (1.0 + 1e-9));
        prop_assert!(g2 >= g1 - 1e-9 * kappa);
    }

    /// Comparability constants are at least one and non-decreasing in the
    /// shift radius.
    #[test]
    fn comparability_at_least_one_and_monotone(
        beta in 0.4f64..1.8,
        r in 0.2f64..3.0,
    ) {
        let model = LevyModel::pure_stable(1, beta).unwrap();
        let c1 = comparability_constant(&model, r).unwrap();
        let c2 = comparability_constant(&model, 2.0 * r).unwrap();
        prop_assert!(c1 >= 1.0);
        prop_assert!(c2 >= c1 * (1.0 - 1e-12));
    }
}
