//! Cross-checks against independent closed forms and brute-force computations.

use approx::assert_relative_eq;
use heavytail::constants::{chernoff_rho, lsi_rho_invgamma, wirtinger_d};
use heavytail::evolution::{relative_entropy, FvGrid};
use heavytail::fp_models::WeightFunction;
use heavytail::spectral::{lsi_ratio_probe, poincare_best_constant, SpectralProblem};
use heavytail::verifiers::{build_spec, default_corpus, real_line_corpus, verify, SpecParams, TestFunction};
use heavytail::{DensityModel, Interval, Moment, QuadratureConfig};
use nalgebra::DMatrix;
use std::f64::consts::{LN_2, PI};

#[test]
fn cauchy_one_is_the_standard_cauchy() {
    let m = DensityModel::cauchy(1.0).unwrap();
    for x in [-40.0, -1.0, 0.0, 0.3, 7.0, 1e6] {
        assert_relative_eq!(m.pdf(x).unwrap(), 1.0 / (PI * (1.0 + x * x)), max_relative = 1e-12);
        assert_relative_eq!(m.cdf(x).unwrap(), 0.5 + x.atan() / PI, max_relative = 1e-12);
    }
    assert_relative_eq!(m.quantile(0.75).unwrap(), 1.0, max_relative = 1e-12);
}

#[test]
fn inverse_gamma_exponential_shape() {
    // kappa = 1: F(x) = exp(-m/x)
    let m = DensityModel::inverse_gamma(1.0, 2.0).unwrap();
    for x in [0.05, 0.5, 2.0, 30.0] {
        assert_relative_eq!(m.cdf(x).unwrap(), (-2.0 / x).exp(), max_relative = 1e-12);
    }
    assert_relative_eq!(m.median().unwrap(), 2.0 / LN_2, max_relative = 1e-12);
    assert_relative_eq!(wirtinger_d(1.0, 1.0).unwrap().value, 2.0 / LN_2, max_relative = 1e-12);
}

#[test]
fn moments_and_tails() {
    let cfg = QuadratureConfig::default();
    let c = DensityModel::cauchy(2.5).unwrap();
    match c.moment(2, &cfg).unwrap() {
        Moment::Finite(v) => assert_relative_eq!(v, 0.5, max_relative = 1e-9),
        Moment::Infinite => panic!("second moment is finite"),
    }
    assert_eq!(c.moment(4, &cfg).unwrap(), Moment::Infinite);
    // E[X] = m / (kappa - 1) for the standard inverse gamma
    let ig = DensityModel::inverse_gamma_std(3.0, 2.0).unwrap();
    match ig.moment(1, &cfg).unwrap() {
        Moment::Finite(v) => assert_relative_eq!(v, 1.0, max_relative = 1e-9),
        Moment::Infinite => panic!("first moment is finite"),
    }
}

#[test]
fn chernoff_equality_for_linear_functions() {
    let x = &real_line_corpus()[0];
    for beta in [1.6, 2.0, 3.0, 5.0] {
        let spec = build_spec("CHERNOFF_CAUCHY", &SpecParams::new().with("beta", beta)).unwrap();
        let r = verify(&spec, x, &QuadratureConfig::default()).unwrap();
        // Var = 1/(2 beta - 3) and the right-hand side reduces to the same value
        assert_relative_eq!(r.lhs, 1.0 / (2.0 * beta - 3.0), max_relative = 1e-9);
        assert!(r.slack.abs() < 1e-8, "beta {beta}: {}", r.slack);
    }
}

/// Smallest nonzero generalized eigenvalue over span{x, ..., x^5} under N(0, 1), w = 1.
fn hermite_rayleigh_oracle() -> f64 {
    // E[X^k] for the standard normal
    let moment = |k: usize| -> f64 {
        if k % 2 == 1 {
            0.0
        } else {
            (1..k).step_by(2).map(|j| j as f64).product()
        }
    };
    let n = 5;
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    for i in 1..=n {
        for j in 1..=n {
            a[(i - 1, j - 1)] = (i * j) as f64 * moment(i + j - 2);
            b[(i - 1, j - 1)] = moment(i + j) - moment(i) * moment(j);
        }
    }
    let l = b.cholesky().unwrap().l();
    let li = l.try_inverse().unwrap();
    let c = &li * a * li.transpose();
    c.symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn gaussian_gap_matches_hermite_oracle() {
    let oracle = hermite_rayleigh_oracle();
    assert_relative_eq!(oracle, 1.0, max_relative = 1e-10);
    let g = DensityModel::gaussian(0.0, 1.0).unwrap();
    let r = poincare_best_constant(&SpectralProblem::new(g, WeightFunction::unit(), 512).unwrap()).unwrap();
    assert_relative_eq!(r.lambda1, oracle, max_relative = 1e-4);
}

#[test]
fn spectral_gap_sits_above_the_chernoff_constant() {
    let w = WeightFunction::new("1+x^2", 2.0, |x| 1.0 + x * x);
    let r = poincare_best_constant(&SpectralProblem::new(DensityModel::cauchy(1.0).unwrap(), w, 512).unwrap()).unwrap();
    assert!(r.lambda1 >= chernoff_rho(1.0).unwrap().value);
}

#[test]
fn lsi_probe_respects_the_proven_constant() {
    let model = DensityModel::cauchy(3.0).unwrap();
    let w = WeightFunction::new("(1+x^2)^2", 4.0, |x| (1.0 + x * x).powi(2));
    let probe = lsi_ratio_probe(&model, &w, &default_corpus()).unwrap();
    assert!(probe.ratio > 0.0);
    assert!(probe.ratio <= 0.5, "{probe:?}");

    let gauss = DensityModel::gaussian(0.0, 1.0).unwrap();
    let tanh = vec![TestFunction::new(
        "tanh",
        Interval::REAL,
        0.0,
        f64::NEG_INFINITY,
        f64::tanh,
        |x| 1.0 / x.cosh().powi(2),
    )];
    let probe = lsi_ratio_probe(&gauss, &WeightFunction::unit(), &tanh).unwrap();
    assert!(probe.ratio > 0.0 && probe.ratio <= 2.0, "{probe:?}");
}

#[test]
fn entropy_against_uniform_density() {
    // H(U[0,1] | N(0,1)) = ln sqrt(2 pi) + 1/6
    let n = 6000;
    let edges: Vec<f64> = (0..=n).map(|i| -10.0 + 20.0 * i as f64 / n as f64).collect();
    let grid = FvGrid::new(edges).unwrap();
    let g = grid.project(|x| (-0.5 * x * x).exp() / (2.0 * PI).sqrt()).unwrap();
    let f = grid
        .project(|x| if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 })
        .unwrap();
    let h = relative_entropy(&grid, &f, &g).unwrap();
    assert_relative_eq!(h, (2.0 * PI).sqrt().ln() + 1.0 / 6.0, max_relative = 1e-5);
}

#[test]
fn invgamma_lsi_reference_value() {
    assert_relative_eq!(
        lsi_rho_invgamma(2.0, 1.25, 1.0).unwrap().value,
        1.4361406616345072,
        max_relative = 1e-13
    );
}
