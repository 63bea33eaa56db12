//! Invariants over random parameters.

use heavytail::constants::{chernoff_gamma, chernoff_rho, lsi_rho_cauchy, optimize_alpha_chernoff, ChernoffFamily};
use heavytail::evolution::{relative_entropy, FvGrid};
use heavytail::DensityModel;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_pair_is_complementary(beta in 0.55f64..6.0, x in -1e4f64..1e4) {
        let m = DensityModel::cauchy(beta).unwrap();
        let (f, s) = m.cdf_pair(x).unwrap();
        prop_assert!((f + s - 1.0).abs() < 1e-13);
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn quantile_inverts_cdf(beta in 0.6f64..5.0, m in 0.2f64..5.0, p in 1e-6f64..0.999999) {
        let d = DensityModel::inverse_gamma(beta, m).unwrap();
        let x = d.quantile(p).unwrap();
        let (f, s) = d.cdf_pair(x).unwrap();
        let err = if p < 0.5 { (f - p).abs() / p } else { (s - (1.0 - p)).abs() / (1.0 - p) };
        prop_assert!(err < 1e-9, "p {p} x {x} F {f}");
    }

    #[test]
    fn sympoly_cdf_is_monotone(beta in 0.55f64..4.0, a in -50.0f64..50.0, d in 1e-3f64..10.0) {
        let m = DensityModel::symmetric_polynomial(beta).unwrap();
        prop_assert!(m.cdf(a).unwrap() <= m.cdf(a + d).unwrap());
    }

    #[test]
    fn chernoff_rho_is_continuous_and_increasing(beta in 0.55f64..5.0, h in 1e-6f64..0.1) {
        let lo = chernoff_rho(beta).unwrap().value;
        let hi = chernoff_rho(beta + h).unwrap().value;
        prop_assert!(hi > lo);
        prop_assert!(hi - lo <= 2.0 * h + 1e-12);
    }

    #[test]
    fn chernoff_gamma_matches_rho_in_kappa(kappa in 0.1f64..8.0) {
        // kappa = 2 beta - 1
        let beta = 0.5 * (kappa + 1.0);
        let g = chernoff_gamma(kappa).unwrap().value;
        let r = chernoff_rho(beta).unwrap().value;
        prop_assert!((g - r).abs() <= 1e-12 * r.max(1.0));
    }

    #[test]
    fn closed_form_alpha_is_optimal(beta in 0.6f64..4.0) {
        let opt = optimize_alpha_chernoff(beta, ChernoffFamily::Cauchy).unwrap();
        prop_assert!((opt.rho - opt.numeric_rho).abs() <= 1e-9 * opt.rho);
    }

    #[test]
    fn lsi_rho_cauchy_is_positive_and_below_high_alpha_branch(beta in 1.6f64..6.0, alpha in 1.01f64..1.5) {
        let r = lsi_rho_cauchy(beta, alpha).unwrap().value;
        prop_assert!(r > 0.0 && r <= 2.0 * beta - alpha + 1e-12);
    }

    #[test]
    fn relative_entropy_is_nonnegative(raw in prop::collection::vec(0.0f64..1.0, 8)) {
        let grid = FvGrid::new((0..=8).map(|i| i as f64).collect()).unwrap();
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-6);
        let f: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let g = vec![0.125; 8];
        prop_assert!(relative_entropy(&grid, &f, &g).unwrap() >= 0.0);
    }
}
