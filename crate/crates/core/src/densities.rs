//! Parametric density families on an interval of the real line.

use crate::error::{out_of_range, Error, Result};
use crate::quadrature::{expectation, integrate, Interval, QuadratureConfig};
use crate::special::{ln_gamma, regularized_beta, regularized_gamma};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `C (1 + x^2)^{-beta}` on the line.
    CauchyType { beta: f64 },
    /// `c (1 + |x|)^{-2 beta}` on the line.
    SymmetricPolynomial { beta: f64 },
    /// `C x^{-2 beta} e^{-m/x}` on the half-line.
    InverseGammaBM { beta: f64, m: f64 },
    /// `m^kappa / Gamma(kappa) x^{-1-kappa} e^{-m/x}` on the half-line.
    InverseGammaStd { kappa: f64, m: f64 },
    /// `C y^{(2 beta - alpha)/(alpha - 1)} exp(-m (alpha-1)^{1/(alpha-1)} y^{1/(alpha-1)})` on the half-line.
    GeneralizedGamma { beta: f64, alpha: f64, m: f64 },
    /// `C exp(-V(x))` with `V` a polynomial given by ascending coefficients.
    GibbsPotential { coeffs: Vec<f64> },
}

/// A moment that may diverge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn value(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Moment::Finite(_))
    }
}

/// Immutable, validated density with its normalization constant cached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityModel {
    family: Family,
    interval: Interval,
    log_norm: f64,
    /// Additive shift applied to the log-kernel (used to keep Gibbs kernels in range).
    log_shift: f64,
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect()
}

// ln(1 + x^2) without overflow for huge |x|.
fn ln_1p_sq(x: f64) -> f64 {
    let ax = x.abs();
    if ax > 1e150 {
        2.0 * ax.ln()
    } else {
        (x * x).ln_1p()
    }
}

impl Family {
    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(out_of_range(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match self {
            Family::CauchyType { beta } | Family::SymmetricPolynomial { beta } => {
                if !(*beta > 0.5 && beta.is_finite()) {
                    return Err(out_of_range(format!("beta must exceed 1/2, got {beta}")));
                }
                Ok(())
            }
            Family::InverseGammaBM { beta, m } => {
                if !(*beta > 0.5 && beta.is_finite()) {
                    return Err(out_of_range(format!("beta must exceed 1/2, got {beta}")));
                }
                positive("m", *m)
            }
            Family::InverseGammaStd { kappa, m } => {
                positive("kappa", *kappa)?;
                positive("m", *m)
            }
            Family::GeneralizedGamma { beta, alpha, m } => {
                if !(*alpha > 1.0 && beta > alpha && beta.is_finite()) {
                    return Err(out_of_range(format!(
                        "generalized gamma needs beta > alpha > 1, got beta = {beta}, alpha = {alpha}"
                    )));
                }
                positive("m", *m)
            }
            Family::GibbsPotential { coeffs } => {
                let n = coeffs.len();
                if n < 3 || (n - 1) % 2 != 0 {
                    return Err(out_of_range("potential must be a polynomial of even degree >= 2"));
                }
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(out_of_range("potential coefficients must be finite"));
                }
                if !(coeffs[n - 1] > 0.0) {
                    return Err(out_of_range("potential needs a positive leading coefficient"));
                }
                Ok(())
            }
        }
    }

    fn interval(&self) -> Interval {
        match self {
            Family::CauchyType { .. } | Family::SymmetricPolynomial { .. } | Family::GibbsPotential { .. } => {
                Interval::REAL
            }
            _ => Interval::POSITIVE,
        }
    }
}

/// Shape and rate of the generalized gamma kernel `y^a exp(-c y^s)`.
fn gen_gamma_shape(beta: f64, alpha: f64, m: f64) -> (f64, f64, f64) {
    let s = 1.0 / (alpha - 1.0);
    let a = (2.0 * beta - alpha) / (alpha - 1.0);
    let c = m * (alpha - 1.0).powf(s);
    (a, s, c)
}

impl DensityModel {
    pub fn new(family: Family) -> Result<Self> {
        family.validate()?;
        let interval = family.interval();
        let mut model = DensityModel {
            family,
            interval,
            log_norm: 0.0,
            log_shift: 0.0,
        };
        match &model.family {
            Family::InverseGammaBM { beta, m } => {
                let k = 2.0 * beta - 1.0;
                model.log_norm = k * m.ln() - ln_gamma(k);
            }
            Family::InverseGammaStd { kappa, m } => {
                model.log_norm = kappa * m.ln() - ln_gamma(*kappa);
            }
            Family::GeneralizedGamma { beta, alpha, m } => {
                let (_, s, c) = gen_gamma_shape(*beta, *alpha, *m);
                let k = 2.0 * beta - 1.0;
                model.log_norm = s.ln() + k * c.ln() - ln_gamma(k);
            }
            Family::GibbsPotential { coeffs } => {
                model.log_shift = potential_minimum(coeffs);
                model.log_norm = -model.numeric_log_mass()?;
            }
            Family::CauchyType { .. } | Family::SymmetricPolynomial { .. } => {
                model.log_norm = -model.numeric_log_mass()?;
            }
        }
        Ok(model)
    }

    pub fn cauchy(beta: f64) -> Result<Self> {
        Self::new(Family::CauchyType { beta })
    }

    pub fn symmetric_polynomial(beta: f64) -> Result<Self> {
        Self::new(Family::SymmetricPolynomial { beta })
    }

    pub fn inverse_gamma(beta: f64, m: f64) -> Result<Self> {
        Self::new(Family::InverseGammaBM { beta, m })
    }

    pub fn inverse_gamma_std(kappa: f64, m: f64) -> Result<Self> {
        Self::new(Family::InverseGammaStd { kappa, m })
    }

    pub fn generalized_gamma(beta: f64, alpha: f64, m: f64) -> Result<Self> {
        Self::new(Family::GeneralizedGamma { beta, alpha, m })
    }

    pub fn gibbs(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(Family::GibbsPotential { coeffs })
    }

    /// Normal density with mean `mu` and standard deviation `sigma`, as a Gibbs model.
    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(out_of_range("sigma must be positive"));
        }
        let s2 = sigma * sigma;
        Self::gibbs(vec![mu * mu / (2.0 * s2), -mu / s2, 0.5 / s2])
    }

    fn numeric_log_mass(&self) -> Result<f64> {
        let cfg = QuadratureConfig {
            rel_tol: 1e-13,
            abs_tol: 1e-300,
            ..QuadratureConfig::default()
        };
        let r = integrate(|x| self.log_kernel(x).exp(), self.interval, &cfg)?;
        Ok(r.value.ln())
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn normalization_constant(&self) -> f64 {
        (self.log_norm - self.log_shift).exp()
    }

    pub fn is_symmetric(&self) -> bool {
        match &self.family {
            Family::CauchyType { .. } | Family::SymmetricPolynomial { .. } => true,
            Family::GibbsPotential { coeffs } => coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0),
            _ => false,
        }
    }

    /// Exponent `d` with `pdf(x) ~ |x|^{-d}` at the infinite end(s); `None` for faster decay.
    pub fn tail_exponent(&self) -> Option<f64> {
        match self.family {
            Family::CauchyType { beta } | Family::SymmetricPolynomial { beta } => Some(2.0 * beta),
            Family::InverseGammaBM { beta, .. } => Some(2.0 * beta),
            Family::InverseGammaStd { kappa, .. } => Some(1.0 + kappa),
            Family::GeneralizedGamma { .. } | Family::GibbsPotential { .. } => None,
        }
    }

    /// Whether `E|g(X)|` is finite for `|g(x)| ~ |x|^growth` at infinity.
    pub fn integrable_growth(&self, growth: f64) -> bool {
        match self.tail_exponent() {
            None => true,
            Some(d) => growth < d - 1.0 - 1e-12,
        }
    }

    fn log_kernel(&self, x: f64) -> f64 {
        match &self.family {
            Family::CauchyType { beta } => -beta * ln_1p_sq(x),
            Family::SymmetricPolynomial { beta } => -2.0 * beta * x.abs().ln_1p(),
            Family::InverseGammaBM { beta, m } => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -2.0 * beta * x.ln() - m / x
                }
            }
            Family::InverseGammaStd { kappa, m } => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -(1.0 + kappa) * x.ln() - m / x
                }
            }
            Family::GeneralizedGamma { beta, alpha, m } => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    let (a, s, c) = gen_gamma_shape(*beta, *alpha, *m);
                    a * x.ln() - c * x.powf(s)
                }
            }
            Family::GibbsPotential { coeffs } => self.log_shift - horner(coeffs, x),
        }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if self.interval.contains_closure(x) {
            Ok(())
        } else {
            Err(Error::DomainError {
                x,
                lo: self.interval.lo,
                hi: self.interval.hi,
            })
        }
    }

    /// Density at `x`; zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        if !self.interval.contains(x) {
            return 0.0;
        }
        (self.log_norm + self.log_kernel(x)).exp()
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.density(x))
    }

    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.log_norm + self.log_kernel(x))
    }

    /// Derivative of `log pdf` at an interior point.
    pub fn dlog_pdf(&self, x: f64) -> f64 {
        match &self.family {
            Family::CauchyType { beta } => -2.0 * beta * x / (1.0 + x * x),
            Family::SymmetricPolynomial { beta } => -2.0 * beta * x.signum() / (1.0 + x.abs()),
            Family::InverseGammaBM { beta, m } => -2.0 * beta / x + m / (x * x),
            Family::InverseGammaStd { kappa, m } => -(1.0 + kappa) / x + m / (x * x),
            Family::GeneralizedGamma { beta, alpha, m } => {
                let (a, s, c) = gen_gamma_shape(*beta, *alpha, *m);
                a / x - c * s * x.powf(s - 1.0)
            }
            Family::GibbsPotential { coeffs } => -horner(&poly_derivative(coeffs), x),
        }
    }

    /// `(F(x), 1 - F(x))`, each computed directly where a closed form allows.
    pub fn cdf_pair(&self, x: f64) -> Result<(f64, f64)> {
        self.check_domain(x)?;
        if x <= self.interval.lo {
            return Ok((0.0, 1.0));
        }
        if x >= self.interval.hi {
            return Ok((1.0, 0.0));
        }
        match &self.family {
            Family::CauchyType { beta } => {
                let z = 1.0 / (1.0 + x * x);
                let tail = if z == 0.0 {
                    0.0
                } else {
                    0.5 * regularized_beta(beta - 0.5, 0.5, z)?
                };
                Ok(if x >= 0.0 {
                    (1.0 - tail, tail)
                } else {
                    (tail, 1.0 - tail)
                })
            }
            Family::SymmetricPolynomial { beta } => {
                let tail = 0.5 * (1.0 + x.abs()).powf(1.0 - 2.0 * beta);
                Ok(if x >= 0.0 {
                    (1.0 - tail, tail)
                } else {
                    (tail, 1.0 - tail)
                })
            }
            Family::InverseGammaBM { beta, m } => {
                let (p, q) = regularized_gamma(2.0 * beta - 1.0, m / x)?;
                Ok((q, p))
            }
            Family::InverseGammaStd { kappa, m } => {
                let (p, q) = regularized_gamma(*kappa, m / x)?;
                Ok((q, p))
            }
            Family::GeneralizedGamma { beta, alpha, m } => {
                let (_, s, c) = gen_gamma_shape(*beta, *alpha, *m);
                regularized_gamma(2.0 * beta - 1.0, c * x.powf(s))
            }
            Family::GibbsPotential { .. } => {
                let cfg = QuadratureConfig {
                    rel_tol: 1e-12,
                    abs_tol: 1e-15,
                    ..QuadratureConfig::default()
                };
                if x <= 0.0 {
                    let lower = integrate(|t| self.density(t), Interval::new(f64::NEG_INFINITY, x)?, &cfg)?.value;
                    Ok((lower, 1.0 - lower))
                } else {
                    let upper = integrate(|t| self.density(t), Interval::new(x, f64::INFINITY)?, &cfg)?.value;
                    Ok((1.0 - upper, upper))
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(self.cdf_pair(x)?.0)
    }

    pub fn sf(&self, x: f64) -> Result<f64> {
        Ok(self.cdf_pair(x)?.1)
    }

    /// Median by bracketed bisection.
    pub fn median(&self) -> Result<f64> {
        if self.is_symmetric() {
            return Ok(0.0);
        }
        self.quantile(0.5)
    }

    /// `x` with `F(x) = p`; the upper tail is solved through `1 - F` to keep precision.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(out_of_range(format!("quantile level must lie in (0, 1), got {p}")));
        }
        let below = |x: f64| -> Result<bool> {
            let (f, s) = self.cdf_pair(x)?;
            Ok(if p < 0.5 {
                f < p
            } else if p > 0.5 {
                s > 1.0 - p
            } else {
                f < s
            })
        };
        let (mut lo, mut hi) = if self.interval.lo == 0.0 {
            let guess = self.median_guess();
            (guess / 16.0, guess * 16.0)
        } else {
            (-1.0, 1.0)
        };
        let mut expansions = 0;
        while !below(lo)? {
            lo = if self.interval.lo == 0.0 { lo / 16.0 } else { lo * 16.0 };
            expansions += 1;
            if expansions > 120 {
                return Err(Error::ConvergenceFailure("quantile bracket (lower end)".into()));
            }
        }
        while below(hi)? {
            hi *= 16.0;
            expansions += 1;
            if expansions > 240 {
                return Err(Error::ConvergenceFailure("quantile bracket (upper end)".into()));
            }
        }
        for _ in 0..2000 {
            let mid = if self.interval.lo == 0.0 && hi > 4.0 * lo {
                (lo * hi).sqrt()
            } else {
                0.5 * (lo + hi)
            };
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if below(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::ConvergenceFailure("quantile bisection".into()))
    }

    // Tail-asymptotic starting point for the half-line families.
    fn median_guess(&self) -> f64 {
        // the gamma median is close to kappa - 1/3 for moderate shapes
        let gamma_median = |k: f64| (k - 1.0 / 3.0).max(0.1 * k).max(1e-3);
        match &self.family {
            Family::InverseGammaBM { beta, m } => m / gamma_median(2.0 * beta - 1.0),
            Family::InverseGammaStd { kappa, m } => m / gamma_median(*kappa),
            Family::GeneralizedGamma { beta, alpha, m } => {
                let (_, s, c) = gen_gamma_shape(*beta, *alpha, *m);
                (gamma_median(2.0 * beta - 1.0) / c).powf(1.0 / s)
            }
            _ => 1.0,
        }
    }

    /// `E[X^k]`, or [`Moment::Infinite`] when the tail makes it diverge.
    pub fn moment(&self, k: u32, config: &QuadratureConfig) -> Result<Moment> {
        if k == 0 {
            return Ok(Moment::Finite(1.0));
        }
        if !self.integrable_growth(k as f64) {
            return Ok(Moment::Infinite);
        }
        if k % 2 == 1 && self.is_symmetric() {
            return Ok(Moment::Finite(0.0));
        }
        let r = expectation(self, |x| x.powi(k as i32), config)?;
        Ok(Moment::Finite(r.value))
    }

    /// Plain-text `key=value` description, parseable by [`DensityModel::from_descriptor`].
    pub fn descriptor(&self) -> String {
        match &self.family {
            Family::CauchyType { beta } => format!("family=cauchy beta={beta}"),
            Family::SymmetricPolynomial { beta } => format!("family=sympoly beta={beta}"),
            Family::InverseGammaBM { beta, m } => format!("family=invgamma beta={beta} m={m}"),
            Family::InverseGammaStd { kappa, m } => format!("family=invgamma_std kappa={kappa} m={m}"),
            Family::GeneralizedGamma { beta, alpha, m } => {
                format!("family=gengamma beta={beta} alpha={alpha} m={m}")
            }
            Family::GibbsPotential { coeffs } => {
                let c: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                format!("family=gibbs coeffs={}", c.join(","))
            }
        }
    }

    /// Parses a whitespace-, `;`- or newline-separated `key=value` block.
    pub fn from_descriptor(text: &str) -> Result<Self> {
        let block = Descriptor::parse(text)?;
        let family = block.get_str("family")?;
        let model = match family {
            "cauchy" => Self::cauchy(block.get_f64("beta")?),
            "sympoly" => Self::symmetric_polynomial(block.get_f64("beta")?),
            "invgamma" => Self::inverse_gamma(block.get_f64("beta")?, block.get_f64("m")?),
            "invgamma_std" => Self::inverse_gamma_std(block.get_f64("kappa")?, block.get_f64("m")?),
            "gengamma" => Self::generalized_gamma(block.get_f64("beta")?, block.get_f64("alpha")?, block.get_f64("m")?),
            "gibbs" => {
                let coeffs = block
                    .get_str("coeffs")?
                    .split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::ConfigError(format!("bad coefficient `{c}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::gibbs(coeffs)
            }
            other => return Err(Error::ConfigError(format!("unknown family `{other}`"))),
        }?;
        block.reject_unused(match family {
            "cauchy" | "sympoly" => &["family", "beta"][..],
            "invgamma" => &["family", "beta", "m"][..],
            "invgamma_std" => &["family", "kappa", "m"][..],
            "gengamma" => &["family", "beta", "alpha", "m"][..],
            _ => &["family", "coeffs"][..],
        })?;
        Ok(model)
    }
}

impl fmt::Display for DensityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

fn potential_minimum(coeffs: &[f64]) -> f64 {
    // critical points lie inside the Cauchy root bound of V'
    let d = poly_derivative(coeffs);
    let lead = d[d.len() - 1].abs();
    let radius = 1.0 + d[..d.len() - 1].iter().map(|c| c.abs()).fold(0.0, f64::max) / lead;
    let n = 4000;
    let mut best = f64::INFINITY;
    for i in 0..=n {
        let x = -radius + 2.0 * radius * i as f64 / n as f64;
        best = best.min(horner(coeffs, x));
    }
    best
}

/// Parsed `key=value` block.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Descriptor {
    entries: Vec<(String, String)>,
}

impl Descriptor {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for token in text.split(|c: char| c.is_whitespace() || c == ';') {
            let token = token.trim();
            if token.is_empty() || token.starts_with('#') {
                continue;
            }
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| Error::ConfigError(format!("expected key=value, got `{token}`")))?;
            let k = k.trim().to_ascii_lowercase();
            if entries.iter().any(|(e, _)| *e == k) {
                return Err(Error::ConfigError(format!("duplicate key `{k}`")));
            }
            entries.push((k, v.trim().to_string()));
        }
        Ok(Descriptor { entries })
    }

    pub fn get_str(&self, key: &str) -> Result<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::ConfigError(format!("missing key `{key}`")))
    }

    pub fn get_f64(&self, key: &str) -> Result<f64> {
        let v = self.get_str(key)?;
        v.parse::<f64>()
            .map_err(|_| Error::ConfigError(format!("`{key}` is not a number: `{v}`")))
    }

    fn reject_unused(&self, allowed: &[&str]) -> Result<()> {
        match self.entries.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, _)) => Err(Error::ConfigError(format!("unexpected key `{k}`"))),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{LN_2, PI};

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn cauchy_unit_beta_normalization() {
        let m = DensityModel::cauchy(1.0).unwrap();
        assert_relative_eq!(m.normalization_constant(), 1.0 / PI, max_relative = 1e-12);
        assert_relative_eq!(m.pdf(0.0).unwrap(), 1.0 / PI, max_relative = 1e-12);
    }

    #[test]
    fn closed_form_constants() {
        let m = DensityModel::inverse_gamma_std(1.0, 3.0).unwrap();
        assert_relative_eq!(m.normalization_constant(), 3.0, max_relative = 1e-13);
        let g = DensityModel::symmetric_polynomial(1.5).unwrap();
        assert_relative_eq!(g.normalization_constant(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn inverse_gamma_values() {
        let m = DensityModel::inverse_gamma_std(1.0, 1.0).unwrap();
        assert_relative_eq!(m.pdf(1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-13);
        assert_relative_eq!(m.cdf(1.0 / LN_2).unwrap(), 0.5, epsilon = 1e-14);
        assert_relative_eq!(m.median().unwrap(), 1.0 / LN_2, max_relative = 1e-12);
    }

    #[test]
    fn cauchy_cdf_from_arctan() {
        let m = DensityModel::cauchy(1.0).unwrap();
        for &x in &[-30.0, -2.0, -0.1, 0.0, 1.0, 7.0] {
            assert_relative_eq!(m.cdf(x).unwrap(), 0.5 + x.atan() / PI, epsilon = 1e-12);
        }
        assert_relative_eq!(m.cdf(1.0).unwrap(), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_median_is_zero() {
        assert_eq!(DensityModel::cauchy(0.7).unwrap().median().unwrap(), 0.0);
        assert_eq!(DensityModel::gaussian(0.0, 2.0).unwrap().median().unwrap(), 0.0);
    }

    #[test]
    fn shifted_gaussian_median() {
        let m = DensityModel::gaussian(1.5, 0.5).unwrap();
        assert_relative_eq!(m.median().unwrap(), 1.5, epsilon = 1e-9);
    }

    #[test]
    fn moments() {
        let m = DensityModel::cauchy(2.5).unwrap();
        assert_relative_eq!(m.moment(2, &cfg()).unwrap().value().unwrap(), 0.5, max_relative = 1e-9);
        assert_eq!(m.moment(1, &cfg()).unwrap(), Moment::Finite(0.0));
        assert_eq!(
            DensityModel::cauchy(1.0).unwrap().moment(2, &cfg()).unwrap(),
            Moment::Infinite
        );
        assert_eq!(
            DensityModel::cauchy(1.4).unwrap().moment(2, &cfg()).unwrap(),
            Moment::Infinite
        );
        assert!(DensityModel::cauchy(1.6)
            .unwrap()
            .moment(2, &cfg())
            .unwrap()
            .is_finite());
    }

    #[test]
    fn out_of_range_parameters() {
        assert!(matches!(DensityModel::cauchy(0.5), Err(Error::ParameterOutOfRange(_))));
        assert!(DensityModel::inverse_gamma_std(0.0, 1.0).is_err());
        assert!(DensityModel::inverse_gamma(1.0, -1.0).is_err());
        assert!(DensityModel::generalized_gamma(1.2, 1.5, 1.0).is_err());
        assert!(DensityModel::gibbs(vec![0.0, 0.0, -1.0]).is_err());
        assert!(DensityModel::gibbs(vec![0.0, 1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn pdf_outside_support_is_a_domain_error() {
        let m = DensityModel::inverse_gamma(2.0, 1.0).unwrap();
        assert!(matches!(m.pdf(-1.0), Err(Error::DomainError { .. })));
        assert_eq!(m.pdf(0.0).unwrap(), 0.0);
    }

    #[test]
    fn descriptor_round_trip() {
        for m in [
            DensityModel::cauchy(2.5).unwrap(),
            DensityModel::inverse_gamma(1.5, 2.0).unwrap(),
            DensityModel::inverse_gamma_std(3.0, 0.25).unwrap(),
            DensityModel::generalized_gamma(2.0, 1.25, 1.0).unwrap(),
            DensityModel::gibbs(vec![0.0, 0.0, 0.5, 0.0, 0.25]).unwrap(),
        ] {
            let back = DensityModel::from_descriptor(&m.descriptor()).unwrap();
            assert_eq!(back, m);
        }
        assert!(DensityModel::from_descriptor("family=cauchy beta=2 m=1").is_err());
        assert!(DensityModel::from_descriptor("family=weird").is_err());
        let m = DensityModel::from_descriptor("family = invgamma\nbeta=2; m=3").is_err();
        assert!(m, "spaces around = split the token");
        let m = DensityModel::from_descriptor("family=invgamma\nbeta=2; m=3").unwrap();
        assert_eq!(m, DensityModel::inverse_gamma(2.0, 3.0).unwrap());
    }
}
