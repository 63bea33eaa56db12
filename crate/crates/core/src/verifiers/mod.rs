//! Inequality instances and their verification by quadrature.

pub mod catalog;
pub mod corpus;

pub use catalog::{build_spec, CatalogId, SpecParams};
pub use corpus::{default_corpus, half_line_corpus, real_line_corpus, TestFunction};

use crate::densities::DensityModel;
use crate::error::{Error, Result};
use crate::fp_models::WeightFunction;
use crate::quadrature::{expectation_with_breaks, QuadratureConfig};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InequalityKind {
    Chernoff,
    Lsi,
    Wirtinger,
    WirtingerCenteredAtMedian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LhsKind {
    Variance,
    Entropy,
    CenteredPMoment,
    ZeroedPMoment,
}

/// One theorem instance: `LHS(phi) <= constant * RHS(phi)`.
#[derive(Clone, Debug)]
pub struct InequalitySpec {
    pub id: String,
    pub catalog: CatalogId,
    pub kind: InequalityKind,
    pub model: DensityModel,
    pub weight: WeightFunction,
    pub constant: f64,
    pub p: f64,
    pub lhs_kind: LhsKind,
    /// Median of the model (the anchor point of the zeroed Wirtinger form).
    pub median: f64,
}

impl InequalitySpec {
    /// Whether `f` may be fed to this inequality.
    pub fn admits(&self, f: &TestFunction) -> bool {
        f.domain == self.model.interval() && (self.lhs_kind != LhsKind::Entropy || f.bounded)
    }

    /// Growth exponent of the right-hand integrand at infinity.
    fn rhs_growth(&self, f: &TestFunction) -> f64 {
        match self.lhs_kind {
            LhsKind::Variance | LhsKind::Entropy => self.weight.growth + 2.0 * f.deriv_growth,
            LhsKind::CenteredPMoment | LhsKind::ZeroedPMoment => self.p * (self.weight.growth + f.deriv_growth),
        }
    }

    fn lhs_growth(&self, f: &TestFunction) -> f64 {
        match self.lhs_kind {
            LhsKind::Variance => 2.0 * f.growth,
            LhsKind::Entropy => 0.0,
            LhsKind::CenteredPMoment | LhsKind::ZeroedPMoment => self.p * f.growth,
        }
    }

    fn breaks(&self) -> Vec<f64> {
        let mut b = vec![self.median];
        if self.model.interval().contains(0.0) && self.median != 0.0 {
            b.push(0.0);
        }
        b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// The right-hand side is infinite, so the inequality asserts nothing.
    Vacuous,
    Error,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Vacuous => "VACUOUS",
            Verdict::Error => "ERROR",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub spec_id: String,
    pub fn_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub slack: f64,
    pub relative_slack: f64,
    pub quad_err: f64,
    pub passed: bool,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl InequalityReport {
    fn error(spec_id: &str, fn_id: &str, err: &Error) -> Self {
        InequalityReport {
            spec_id: spec_id.to_string(),
            fn_id: fn_id.to_string(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            constant: f64::NAN,
            slack: f64::NAN,
            relative_slack: f64::NAN,
            quad_err: f64::NAN,
            passed: false,
            verdict: Verdict::Error,
            note: Some(err.to_string()),
        }
    }

    /// Failures that count against soundness (vacuous rows do not).
    pub fn is_failure(&self) -> bool {
        matches!(self.verdict, Verdict::Fail | Verdict::Error)
    }
}

/// A quadrature value with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
    /// The subdivision budget ran out; `err` is the estimate reached at that point.
    pub exhausted: bool,
}

fn estimate<G: Fn(f64) -> f64>(
    model: &DensityModel,
    g: G,
    breaks: &[f64],
    config: &QuadratureConfig,
) -> Result<Estimate> {
    match expectation_with_breaks(model, g, breaks, config) {
        Ok(r) => Ok(Estimate {
            value: r.value,
            err: r.err_estimate,
            exhausted: false,
        }),
        Err(Error::QuadratureFailure { value, err, .. }) => Ok(Estimate {
            value,
            err,
            exhausted: true,
        }),
        Err(e) => Err(e),
    }
}

/// Product with zero absorbing, so an overflowing weight times a vanishing derivative is 0.
fn tail_safe_product(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

fn median_breaks(model: &DensityModel) -> Result<Vec<f64>> {
    let m = model.median()?;
    Ok(vec![m, 0.0])
}

/// `Var[phi(X)]`, computed in two passes.
pub fn variance_functional(model: &DensityModel, f: &TestFunction, config: &QuadratureConfig) -> Result<Estimate> {
    let breaks = median_breaks(model)?;
    let mean = estimate(model, |x| f.phi(x), &breaks, config)?;
    let mu = mean.value;
    let var = estimate(
        model,
        |x| {
            let d = f.phi(x) - mu;
            d * d
        },
        &breaks,
        config,
    )?;
    Ok(Estimate {
        value: var.value.max(0.0),
        err: var.err + mean.err * mean.err,
        exhausted: mean.exhausted || var.exhausted,
    })
}

/// `Ent[phi^2] = E[phi^2 log(phi^2 / E phi^2)]`.
pub fn entropy_functional(model: &DensityModel, f: &TestFunction, config: &QuadratureConfig) -> Result<Estimate> {
    let breaks = median_breaks(model)?;
    let second = estimate(model, |x| f.phi(x).powi(2), &breaks, config)?;
    let e = second.value;
    if !(e > 0.0) {
        return Err(Error::ConfigError(format!(
            "E[phi^2] = {e} is not positive for `{}`",
            f.id
        )));
    }
    let ent = estimate(
        model,
        |x| {
            let s = f.phi(x).powi(2);
            s * (s.max(1e-300) / e).ln()
        },
        &breaks,
        config,
    )?;
    Ok(Estimate {
        value: ent.value.max(0.0),
        err: ent.err + second.err,
        exhausted: second.exhausted || ent.exhausted,
    })
}

/// `E[w (phi')^2]`.
pub fn dirichlet_form(
    model: &DensityModel,
    weight: &WeightFunction,
    f: &TestFunction,
    config: &QuadratureConfig,
) -> Result<Estimate> {
    let breaks = median_breaks(model)?;
    estimate(
        model,
        |x| {
            let d = f.dphi(x);
            tail_safe_product(weight.eval(x), d * d)
        },
        &breaks,
        config,
    )
}

/// `E[(K |phi'|)^p]`.
pub fn wirtinger_form(
    model: &DensityModel,
    weight: &WeightFunction,
    f: &TestFunction,
    p: f64,
    config: &QuadratureConfig,
) -> Result<Estimate> {
    let breaks = median_breaks(model)?;
    estimate(
        model,
        |x| {
            let k = weight.eval(x);
            let d = f.dphi(x).abs();
            if k == 0.0 || d == 0.0 {
                0.0
            } else {
                ((k.ln() + d.ln()) * p).exp()
            }
        },
        &breaks,
        config,
    )
}

/// `E|phi - c|^p`.
fn p_moment_about(
    model: &DensityModel,
    f: &TestFunction,
    c: f64,
    p: f64,
    breaks: &[f64],
    config: &QuadratureConfig,
) -> Result<Estimate> {
    estimate(model, |x| (f.phi(x) - c).abs().powf(p), breaks, config)
}

fn lhs(spec: &InequalitySpec, f: &TestFunction, config: &QuadratureConfig) -> Result<Estimate> {
    match spec.lhs_kind {
        LhsKind::Variance => variance_functional(&spec.model, f, config),
        LhsKind::Entropy => entropy_functional(&spec.model, f, config),
        LhsKind::CenteredPMoment => {
            let breaks = spec.breaks();
            let mean = estimate(&spec.model, |x| f.phi(x), &breaks, config)?;
            let m = p_moment_about(&spec.model, f, mean.value, spec.p, &breaks, config)?;
            let sensitivity = spec.p * m.value.powf((spec.p - 1.0) / spec.p);
            Ok(Estimate {
                value: m.value,
                err: m.err + sensitivity * mean.err,
                exhausted: m.exhausted || mean.exhausted,
            })
        }
        LhsKind::ZeroedPMoment => {
            let anchor = f.phi(spec.median);
            p_moment_about(&spec.model, f, anchor, spec.p, &spec.breaks(), config)
        }
    }
}

fn rhs(spec: &InequalitySpec, f: &TestFunction, config: &QuadratureConfig) -> Result<Estimate> {
    match spec.lhs_kind {
        LhsKind::Variance | LhsKind::Entropy => dirichlet_form(&spec.model, &spec.weight, f, config),
        LhsKind::CenteredPMoment | LhsKind::ZeroedPMoment => {
            wirtinger_form(&spec.model, &spec.weight, f, spec.p, config)
        }
    }
}

/// Evaluates both sides for one test function.
pub fn verify(spec: &InequalitySpec, f: &TestFunction, config: &QuadratureConfig) -> Result<InequalityReport> {
    config.validate()?;
    if f.domain != spec.model.interval() {
        return Err(Error::ConfigError(format!(
            "test function `{}` lives on a different interval than `{}`",
            f.id, spec.id
        )));
    }
    if spec.lhs_kind == LhsKind::Entropy && !f.bounded {
        return Err(Error::ConfigError(format!(
            "log-Sobolev inequalities need a bounded test function, `{}` is not",
            f.id
        )));
    }
    if !spec.model.integrable_growth(spec.rhs_growth(f)) {
        let lhs_value = if spec.model.integrable_growth(spec.lhs_growth(f)) {
            lhs(spec, f, config)?.value
        } else {
            f64::INFINITY
        };
        return Ok(InequalityReport {
            spec_id: spec.id.clone(),
            fn_id: f.id.clone(),
            lhs: lhs_value,
            rhs: f64::INFINITY,
            constant: spec.constant,
            slack: f64::INFINITY,
            relative_slack: f64::NAN,
            quad_err: 0.0,
            passed: true,
            verdict: Verdict::Vacuous,
            note: Some("right-hand side diverges".into()),
        });
    }
    let l = lhs(spec, f, config)?;
    let r = rhs(spec, f, config)?;
    let rhs_value = spec.constant * r.value;
    let slack = rhs_value - l.value;
    let quad_err = l.err + spec.constant * r.err;
    let passed = slack >= -(10.0 * quad_err + 1e-12);
    let relative_slack = if rhs_value.abs() > 0.0 {
        slack / rhs_value.abs()
    } else {
        0.0
    };
    Ok(InequalityReport {
        spec_id: spec.id.clone(),
        fn_id: f.id.clone(),
        lhs: l.value,
        rhs: rhs_value,
        constant: spec.constant,
        slack,
        relative_slack,
        quad_err,
        passed,
        verdict: if passed { Verdict::Pass } else { Verdict::Fail },
        note: (l.exhausted || r.exhausted).then(|| "quadrature budget exhausted; err is the final estimate".into()),
    })
}

/// Verifies every admissible `(spec, function)` pair; errors become per-row reports.
///
/// Pairs run in parallel; the output is sorted by `(spec_id, fn_id)`.
pub fn run_corpus(
    specs: &[InequalitySpec],
    corpus: &[TestFunction],
    config: &QuadratureConfig,
) -> Vec<InequalityReport> {
    let pairs: Vec<(&InequalitySpec, &TestFunction)> = specs
        .iter()
        .flat_map(|s| corpus.iter().filter(|f| s.admits(f)).map(move |f| (s, f)))
        .collect();
    let mut reports: Vec<InequalityReport> = pairs
        .par_iter()
        .map(|(s, f)| verify(s, f, config).unwrap_or_else(|e| InequalityReport::error(&s.id, &f.id, &e)))
        .collect();
    reports.sort_by(|a, b| a.spec_id.cmp(&b.spec_id).then_with(|| a.fn_id.cmp(&b.fn_id)));
    reports
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn variance_of_linear_under_cauchy() {
        let m = DensityModel::cauchy(2.5).unwrap();
        let x = &real_line_corpus()[0];
        let v = variance_functional(&m, x, &cfg()).unwrap();
        assert_relative_eq!(v.value, 0.5, max_relative = 1e-9);
    }

    #[test]
    fn constants_have_no_spread() {
        let m = DensityModel::cauchy(1.0).unwrap();
        let c = TestFunction::constant(3.0, m.interval());
        assert_eq!(variance_functional(&m, &c, &cfg()).unwrap().value, 0.0);
        assert!(entropy_functional(&m, &c, &cfg()).unwrap().value.abs() < 1e-12);
        let w = WeightFunction::new("1+x^2", 2.0, |x| 1.0 + x * x);
        assert_eq!(dirichlet_form(&m, &w, &c, &cfg()).unwrap().value, 0.0);
    }

    #[test]
    fn dirichlet_examples() {
        let m = DensityModel::cauchy(2.5).unwrap();
        let x = &real_line_corpus()[0];
        let w = WeightFunction::new("1+x^2", 2.0, |x| 1.0 + x * x);
        assert_relative_eq!(
            dirichlet_form(&m, &w, x, &cfg()).unwrap().value,
            1.5,
            max_relative = 1e-9
        );
        let g = DensityModel::symmetric_polynomial(1.5).unwrap();
        let k = WeightFunction::new("K", 1.0, |x: f64| 0.5 * (1.0 + x.abs()));
        assert_relative_eq!(
            wirtinger_form(&g, &k, x, 1.0, &cfg()).unwrap().value,
            1.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn overflow_safe_product() {
        assert_eq!(tail_safe_product(f64::INFINITY, 0.0), 0.0);
        assert_relative_eq!(tail_safe_product(1e200, 1e-250), 1e-50, max_relative = 1e-12);
    }
}
