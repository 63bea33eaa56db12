//! Closed-form optimal constants and the inner optimization over the drift exponent.

use crate::densities::DensityModel;
use crate::error::{out_of_range, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    LowBeta,
    HighBeta,
    Interior,
    Boundary,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::LowBeta => "low",
            Branch::HighBeta => "high",
            Branch::Interior => "interior",
            Branch::Boundary => "boundary",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantValue {
    pub value: f64,
    pub branch: Branch,
    pub valid_range: &'static str,
}

impl ConstantValue {
    fn new(value: f64, branch: Branch, valid_range: &'static str) -> Self {
        debug_assert!(value > 0.0, "constants are positive");
        ConstantValue {
            value,
            branch,
            valid_range,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChernoffFamily {
    Cauchy,
    InverseGamma,
}

/// Result of maximizing the Chernoff constant over the drift exponent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaOptimum {
    pub alpha_max: f64,
    pub rho: f64,
    /// Golden-section argmax and value, for cross-checking the closed forms.
    pub numeric_alpha: f64,
    pub numeric_rho: f64,
}

fn require_beta_above_half(beta: f64) -> Result<()> {
    if beta > 0.5 && beta.is_finite() {
        Ok(())
    } else {
        Err(out_of_range(format!("beta must exceed 1/2, got {beta}")))
    }
}

/// Optimal Chernoff constant for Cauchy-type (and inverse Gamma `h_{beta,m}`) densities.
pub fn chernoff_rho(beta: f64) -> Result<ConstantValue> {
    require_beta_above_half(beta)?;
    Ok(if beta <= 1.5 {
        ConstantValue::new((beta - 0.5).powi(2), Branch::LowBeta, "1/2 < beta <= 3/2")
    } else {
        ConstantValue::new(2.0 * (beta - 1.0), Branch::HighBeta, "beta > 3/2")
    })
}

/// Optimal Chernoff constant for the inverse Gamma density with shape `kappa`.
pub fn chernoff_gamma(kappa: f64) -> Result<ConstantValue> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(out_of_range(format!("kappa must be positive, got {kappa}")));
    }
    Ok(if kappa <= 2.0 {
        ConstantValue::new(kappa * kappa / 4.0, Branch::LowBeta, "0 < kappa <= 2")
    } else {
        ConstantValue::new(kappa - 1.0, Branch::HighBeta, "kappa > 2")
    })
}

/// Chernoff constant produced by a given drift exponent `alpha` in `(1/2, 1]`.
pub fn chernoff_rho_at_alpha(beta: f64, alpha: f64, family: ChernoffFamily) -> f64 {
    match family {
        ChernoffFamily::Cauchy => 2.0 * (beta - alpha) * (2.0 * alpha - 1.0),
        ChernoffFamily::InverseGamma => (2.0 * beta - 2.0 * alpha) * (2.0 * alpha - 1.0),
    }
}

pub fn optimize_alpha_chernoff(beta: f64, family: ChernoffFamily) -> Result<AlphaOptimum> {
    require_beta_above_half(beta)?;
    let alpha_max = match family {
        ChernoffFamily::Cauchy => (beta / 2.0 + 0.25).min(1.0),
        ChernoffFamily::InverseGamma => ((2.0 * beta + 1.0) / 4.0).min(1.0),
    };
    let (numeric_alpha, numeric_rho) = golden_max(|a| chernoff_rho_at_alpha(beta, a, family), 0.5, 1.0, 1e-13);
    Ok(AlphaOptimum {
        alpha_max,
        rho: chernoff_rho(beta)?.value,
        numeric_alpha,
        numeric_rho,
    })
}

/// Golden-section maximization of a unimodal function on `[a, b]`, finished
/// with one parabolic step so that smooth maxima are located beyond `sqrt(eps)`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (a0, b0) = (a, b);
    let (mut a, mut b) = (a, b);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol * (1.0 + a.abs().max(b.abs())) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // the endpoints are candidates too when the maximum sits on the boundary
    let mid = 0.5 * (a + b);
    let mut best =
        [(mid, f(mid)), (a0, f(a0)), (b0, f(b0))]
            .into_iter()
            .fold(
                (mid, f64::NEG_INFINITY),
                |best, cand| if cand.1 > best.1 { cand } else { best },
            );
    let h = 1e-4 * (b0 - a0);
    let x0 = best.0;
    if x0 - h > a0 && x0 + h < b0 {
        let (fm, f0, fp) = (f(x0 - h), best.1, f(x0 + h));
        let curvature = fp - 2.0 * f0 + fm;
        if curvature < 0.0 {
            let x = x0 - 0.5 * h * (fp - fm) / curvature;
            let fx = f(x);
            if x > a0 && x < b0 && fx >= best.1 {
                best = (x, fx);
            }
        }
    }
    best
}

/// Log-Sobolev constant for Cauchy-type densities with weight `(1+x^2)^alpha`.
pub fn lsi_rho_cauchy(beta: f64, alpha: f64) -> Result<ConstantValue> {
    if !(alpha > 1.0 && alpha < beta && beta.is_finite()) {
        return Err(out_of_range(format!(
            "need 1 < alpha < beta, got alpha = {alpha}, beta = {beta}"
        )));
    }
    Ok(if alpha < 1.5 {
        let v = (2.0 * beta - alpha) * ((alpha - 1.0) / (2.0 - alpha)).powf(3.0 - 2.0 * alpha);
        ConstantValue::new(v, Branch::Interior, "1 < alpha < 3/2, alpha < beta")
    } else {
        ConstantValue::new(2.0 * beta - alpha, Branch::Boundary, "3/2 <= alpha < beta")
    })
}

fn lsi_rho_invgamma_core(shape: f64, alpha: f64, m: f64) -> f64 {
    // shape = 2 beta - alpha = kappa + 1 - alpha
    0.5 * (shape / (1.5 - alpha)).powf(3.0 - 2.0 * alpha)
        * (m * (2.0 - alpha)).powf(2.0 * alpha - 2.0)
        * (alpha - 1.0).powf(5.0 - 4.0 * alpha)
}

/// Log-Sobolev constant for `h_{beta,m}` with weight `x^{2 alpha}`.
pub fn lsi_rho_invgamma(beta: f64, alpha: f64, m: f64) -> Result<ConstantValue> {
    if !(alpha > 1.0 && alpha <= 1.5 && alpha < beta && beta.is_finite()) {
        return Err(out_of_range(format!(
            "need 1 < alpha <= 3/2 and alpha < beta, got alpha = {alpha}, beta = {beta}"
        )));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(out_of_range(format!("m must be positive, got {m}")));
    }
    Ok(if alpha == 1.5 {
        ConstantValue::new(m / 2.0, Branch::Boundary, "alpha = 3/2, beta > 3/2")
    } else {
        ConstantValue::new(
            lsi_rho_invgamma_core(2.0 * beta - alpha, alpha, m),
            Branch::Interior,
            "1 < alpha < 3/2, alpha < beta",
        )
    })
}

/// Same constant in the standard inverse Gamma parametrization (`kappa = 2 beta - 1`).
pub fn lsi_rho_invgamma_std(kappa: f64, alpha: f64, m: f64) -> Result<ConstantValue> {
    if !(alpha > 1.0 && alpha <= 1.5 && kappa.is_finite()) {
        return Err(out_of_range(format!("need 1 < alpha <= 3/2, got alpha = {alpha}")));
    }
    if alpha == 1.5 && !(kappa > 2.0) {
        return Err(out_of_range(format!(
            "alpha = 3/2 needs kappa > 2, got kappa = {kappa}"
        )));
    }
    if !(kappa + 1.0 - alpha > alpha) {
        return Err(out_of_range(format!(
            "need alpha < (kappa + 1)/2, got alpha = {alpha}, kappa = {kappa}"
        )));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(out_of_range(format!("m must be positive, got {m}")));
    }
    Ok(if alpha == 1.5 {
        ConstantValue::new(m / 2.0, Branch::Boundary, "alpha = 3/2, kappa > 2")
    } else {
        ConstantValue::new(
            lsi_rho_invgamma_core(kappa + 1.0 - alpha, alpha, m),
            Branch::Interior,
            "1 < alpha < 3/2, alpha < (kappa + 1)/2",
        )
    })
}

/// Prefactor of the Bobkov–Ledoux inequality in the `sqrt(f/f_beta)` form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BobkovLedoux {
    pub constant: ConstantValue,
    /// Prefactor of the equivalent form written with `|d/dx log(f/f_beta)|^2 f`.
    pub log_gradient_form: f64,
}

pub fn bobkov_ledoux_prefactor(beta: f64) -> Result<BobkovLedoux> {
    if !(beta > 1.0 && beta.is_finite()) {
        return Err(out_of_range(format!("beta must exceed 1, got {beta}")));
    }
    Ok(BobkovLedoux {
        constant: ConstantValue::new(1.0 / (beta - 1.0), Branch::Boundary, "beta > 1"),
        log_gradient_form: 1.0 / (4.0 * (beta - 1.0)),
    })
}

/// `D(beta, m) = 1 / (xbar h(xbar))` with `xbar` the median of `h_{beta,m}`.
pub fn wirtinger_d(beta: f64, m: f64) -> Result<ConstantValue> {
    let model = DensityModel::inverse_gamma(beta, m)?;
    let median = model.median()?;
    let h = model.pdf(median)?;
    Ok(ConstantValue::new(
        1.0 / (median * h),
        Branch::Interior,
        "beta > 1/2, m > 0",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn chernoff_branches() {
        assert_eq!(chernoff_rho(1.0).unwrap().value, 0.25);
        assert_eq!(chernoff_rho(2.0).unwrap().value, 2.0);
        assert_eq!(chernoff_rho(1.5).unwrap().value, 1.0);
        assert_eq!(chernoff_rho(1.5).unwrap().branch, Branch::LowBeta);
        assert!(chernoff_rho(0.5).is_err());
        assert_eq!(chernoff_gamma(1.0).unwrap().value, 0.25);
        assert_eq!(chernoff_gamma(2.0).unwrap().value, 1.0);
        assert_eq!(chernoff_gamma(3.0).unwrap().value, 2.0);
        assert!(chernoff_gamma(0.0).is_err());
    }

    #[test]
    fn alpha_optimum() {
        let o = optimize_alpha_chernoff(1.0, ChernoffFamily::Cauchy).unwrap();
        assert_eq!(o.alpha_max, 0.75);
        assert_eq!(o.rho, 0.25);
        assert_relative_eq!(o.numeric_alpha, 0.75, epsilon = 1e-9);
        let o = optimize_alpha_chernoff(3.0, ChernoffFamily::Cauchy).unwrap();
        assert_eq!((o.alpha_max, o.rho), (1.0, 4.0));
        assert_relative_eq!(o.numeric_rho, 4.0, epsilon = 1e-12);
        let o = optimize_alpha_chernoff(1.2, ChernoffFamily::InverseGamma).unwrap();
        assert_relative_eq!(o.alpha_max, 0.85, epsilon = 1e-15);
        assert_relative_eq!(o.numeric_rho, o.rho, epsilon = 1e-12);
    }

    #[test]
    fn lsi_cauchy_values() {
        assert_eq!(lsi_rho_cauchy(3.0, 2.0).unwrap().value, 4.0);
        assert_eq!(lsi_rho_cauchy(3.0, 1.5).unwrap().value, 4.5);
        assert!(lsi_rho_cauchy(3.0, 1.001).unwrap().value < 0.02);
        assert!(lsi_rho_cauchy(2.0, 2.0).is_err());
        assert!(lsi_rho_cauchy(2.0, 1.0).is_err());
    }

    #[test]
    fn lsi_invgamma_values() {
        assert_eq!(lsi_rho_invgamma(2.0, 1.5, 4.0).unwrap().value, 2.0);
        assert!(lsi_rho_invgamma(2.0, 1.6, 1.0).is_err());
        let b = lsi_rho_invgamma(2.0, 1.25, 1.0).unwrap().value;
        let k = lsi_rho_invgamma_std(3.0, 1.25, 1.0).unwrap().value;
        assert_relative_eq!(b, k, max_relative = 1e-15);
        assert!(lsi_rho_invgamma_std(2.0, 1.5, 1.0).is_err());
    }

    #[test]
    fn bobkov_ledoux() {
        let bl = bobkov_ledoux_prefactor(3.0).unwrap();
        assert_eq!(bl.constant.value, 0.5);
        assert_eq!(bl.log_gradient_form, 0.125);
        assert!(bobkov_ledoux_prefactor(1.0).is_err());
    }
}
