//! Named inequality instances and their default parameter points.

use super::{InequalityKind, InequalitySpec, LhsKind};
use crate::constants::{
    bobkov_ledoux_prefactor, chernoff_gamma, chernoff_rho, lsi_rho_cauchy, lsi_rho_invgamma, lsi_rho_invgamma_std,
    wirtinger_d,
};
use crate::densities::DensityModel;
use crate::error::{out_of_range, Error, Result};
use crate::fp_models::{
    cauchy_chernoff_model, chernoff_weight, gibbs_model, invgamma_chernoff_model, median_weight, WeightFunction,
};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CatalogId {
    ChernoffGeneral,
    BrascampLieb,
    ChernoffCauchy,
    ChernoffInvgamma,
    ChernoffInvgammaStd,
    LsiCauchy,
    LsiBobkovLedoux,
    LsiInvgamma,
    LsiInvgammaStd,
    LsiGeneralizedGamma,
    WirtingerGeneral,
    WirtingerZeroed,
    WirtingerCauchy,
    WirtingerGbeta,
    WirtingerInvgamma,
}

impl CatalogId {
    pub const ALL: [CatalogId; 15] = [
        CatalogId::ChernoffGeneral,
        CatalogId::BrascampLieb,
        CatalogId::ChernoffCauchy,
        CatalogId::ChernoffInvgamma,
        CatalogId::ChernoffInvgammaStd,
        CatalogId::LsiCauchy,
        CatalogId::LsiBobkovLedoux,
        CatalogId::LsiInvgamma,
        CatalogId::LsiInvgammaStd,
        CatalogId::LsiGeneralizedGamma,
        CatalogId::WirtingerGeneral,
        CatalogId::WirtingerZeroed,
        CatalogId::WirtingerCauchy,
        CatalogId::WirtingerGbeta,
        CatalogId::WirtingerInvgamma,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogId::ChernoffGeneral => "CHERNOFF_GENERAL",
            CatalogId::BrascampLieb => "BRASCAMP_LIEB",
            CatalogId::ChernoffCauchy => "CHERNOFF_CAUCHY",
            CatalogId::ChernoffInvgamma => "CHERNOFF_INVGAMMA",
            CatalogId::ChernoffInvgammaStd => "CHERNOFF_INVGAMMA_STD",
            CatalogId::LsiCauchy => "LSI_CAUCHY",
            CatalogId::LsiBobkovLedoux => "LSI_BOBKOV_LEDOUX",
            CatalogId::LsiInvgamma => "LSI_INVGAMMA",
            CatalogId::LsiInvgammaStd => "LSI_INVGAMMA_STD",
            CatalogId::LsiGeneralizedGamma => "LSI_GENERALIZED_GAMMA",
            CatalogId::WirtingerGeneral => "WIRTINGER_GENERAL",
            CatalogId::WirtingerZeroed => "WIRTINGER_ZEROED",
            CatalogId::WirtingerCauchy => "WIRTINGER_CAUCHY",
            CatalogId::WirtingerGbeta => "WIRTINGER_GBETA",
            CatalogId::WirtingerInvgamma => "WIRTINGER_INVGAMMA",
        }
    }

    /// Required numeric parameters, then optional ones.
    pub fn parameters(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            CatalogId::ChernoffGeneral => (&["alpha", "lambda"], &["m"]),
            CatalogId::BrascampLieb => (&[], &[]),
            CatalogId::ChernoffCauchy | CatalogId::LsiBobkovLedoux => (&["beta"], &[]),
            CatalogId::ChernoffInvgamma => (&["beta", "m"], &[]),
            CatalogId::ChernoffInvgammaStd => (&["kappa", "m"], &[]),
            CatalogId::LsiCauchy => (&["beta", "alpha"], &[]),
            CatalogId::LsiInvgamma | CatalogId::LsiGeneralizedGamma => (&["beta", "alpha", "m"], &[]),
            CatalogId::LsiInvgammaStd => (&["kappa", "alpha", "m"], &[]),
            CatalogId::WirtingerGeneral | CatalogId::WirtingerZeroed => (&["p"], &[]),
            CatalogId::WirtingerCauchy => (&["beta", "p"], &[]),
            CatalogId::WirtingerGbeta => (&["beta", "p"], &["zeroed"]),
            CatalogId::WirtingerInvgamma => (&["beta", "m", "p"], &[]),
        }
    }

    /// Three admissible parameter points used by the default sweep.
    pub fn default_points(self) -> Vec<SpecParams> {
        let pts = |rows: &[&[(&str, f64)]]| -> Vec<SpecParams> {
            rows.iter()
                .map(|r| {
                    let mut p = SpecParams::new();
                    for (k, v) in r.iter() {
                        p = p.with(k, *v);
                    }
                    p
                })
                .collect()
        };
        match self {
            CatalogId::ChernoffGeneral => pts(&[
                &[("alpha", 0.75), ("lambda", 1.0)],
                &[("alpha", 1.0), ("lambda", 1.5)],
                &[("alpha", 0.9), ("lambda", 1.0), ("m", 2.0)],
            ]),
            CatalogId::BrascampLieb => vec![
                SpecParams::new().with_potential(vec![0.0, 0.0, 0.5]),
                SpecParams::new().with_potential(vec![0.0, 0.0, 0.5, 0.0, 0.25]),
                SpecParams::new().with_potential(vec![0.0, 0.0, 0.1, 0.0, 0.25]),
            ],
            CatalogId::ChernoffCauchy => pts(&[&[("beta", 0.8)], &[("beta", 1.5)], &[("beta", 2.5)]]),
            CatalogId::ChernoffInvgamma => pts(&[
                &[("beta", 0.8), ("m", 1.0)],
                &[("beta", 1.5), ("m", 2.0)],
                &[("beta", 2.5), ("m", 1.0)],
            ]),
            CatalogId::ChernoffInvgammaStd => pts(&[
                &[("kappa", 1.0), ("m", 1.0)],
                &[("kappa", 2.0), ("m", 3.0)],
                &[("kappa", 3.0), ("m", 1.0)],
            ]),
            CatalogId::LsiCauchy => pts(&[
                &[("beta", 1.5), ("alpha", 1.2)],
                &[("beta", 2.0), ("alpha", 1.5)],
                &[("beta", 3.0), ("alpha", 2.0)],
            ]),
            CatalogId::LsiBobkovLedoux => pts(&[&[("beta", 1.5)], &[("beta", 2.5)], &[("beta", 4.0)]]),
            CatalogId::LsiInvgamma => pts(&[
                &[("beta", 1.5), ("alpha", 1.25), ("m", 1.0)],
                &[("beta", 2.0), ("alpha", 1.5), ("m", 1.0)],
                &[("beta", 3.0), ("alpha", 1.25), ("m", 4.0)],
            ]),
            CatalogId::LsiInvgammaStd => pts(&[
                &[("kappa", 2.0), ("alpha", 1.25), ("m", 1.0)],
                &[("kappa", 3.0), ("alpha", 1.5), ("m", 1.0)],
                &[("kappa", 4.0), ("alpha", 1.1), ("m", 2.0)],
            ]),
            CatalogId::LsiGeneralizedGamma => pts(&[
                &[("beta", 2.0), ("alpha", 1.25), ("m", 1.0)],
                &[("beta", 2.0), ("alpha", 1.5), ("m", 1.0)],
                &[("beta", 3.0), ("alpha", 1.4), ("m", 2.0)],
            ]),
            CatalogId::WirtingerGeneral | CatalogId::WirtingerZeroed => vec![
                SpecParams::new()
                    .with("p", 1.0)
                    .with_model(DensityModel::symmetric_polynomial(1.5).expect("valid")),
                SpecParams::new()
                    .with("p", 2.0)
                    .with_model(DensityModel::cauchy(1.0).expect("valid")),
                SpecParams::new()
                    .with("p", 1.5)
                    .with_model(DensityModel::inverse_gamma_std(2.0, 1.0).expect("valid")),
            ],
            CatalogId::WirtingerCauchy => pts(&[
                &[("beta", 1.0), ("p", 1.0)],
                &[("beta", 2.0), ("p", 2.0)],
                &[("beta", 3.0), ("p", 1.5)],
            ]),
            CatalogId::WirtingerGbeta => pts(&[
                &[("beta", 1.5), ("p", 1.0), ("zeroed", 1.0)],
                &[("beta", 2.0), ("p", 2.0)],
                &[("beta", 3.0), ("p", 1.0)],
            ]),
            CatalogId::WirtingerInvgamma => pts(&[
                &[("beta", 1.0), ("m", 1.0), ("p", 1.0)],
                &[("beta", 2.0), ("m", 3.0), ("p", 2.0)],
                &[("beta", 1.5), ("m", 0.5), ("p", 1.5)],
            ]),
        }
    }
}

impl fmt::Display for CatalogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CatalogId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        CatalogId::ALL
            .into_iter()
            .find(|c| c.as_str() == upper)
            .ok_or_else(|| Error::CatalogUnknown(s.to_string()))
    }
}

/// Parameters of one catalog instance.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpecParams {
    pub values: BTreeMap<String, f64>,
    /// Ascending polynomial coefficients of the potential (Brascamp–Lieb entry).
    pub potential: Option<Vec<f64>>,
    /// Density for the general Wirtinger entries.
    pub model: Option<DensityModel>,
}

impl SpecParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }

    pub fn with_potential(mut self, coeffs: Vec<f64>) -> Self {
        self.potential = Some(coeffs);
        self
    }

    pub fn with_model(mut self, model: DensityModel) -> Self {
        self.model = Some(model);
        self
    }

    fn get(&self, key: &str) -> Result<f64> {
        self.values
            .get(key)
            .copied()
            .ok_or_else(|| Error::ConfigError(format!("missing parameter `{key}`")))
    }

    fn label(&self) -> String {
        let mut parts: Vec<String> = self.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
        if let Some(c) = &self.potential {
            let c: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            parts.push(format!("V={}", c.join(":")));
        }
        if let Some(m) = &self.model {
            parts.push(m.descriptor().replace(' ', ","));
        }
        parts.join(",")
    }
}

fn power_weight(id: &str, exponent: f64) -> WeightFunction {
    WeightFunction::new(id, exponent, move |x: f64| x.powf(exponent))
}

fn abs_weight() -> WeightFunction {
    WeightFunction::new("1+|x|", 1.0, |x: f64| 1.0 + x.abs())
}

/// Builds the inequality instance `catalog_id` at `params`.
pub fn build_spec(catalog_id: &str, params: &SpecParams) -> Result<InequalitySpec> {
    build(catalog_id.parse()?, params)
}

pub fn build(id: CatalogId, params: &SpecParams) -> Result<InequalitySpec> {
    let (required, optional) = id.parameters();
    for key in params.values.keys() {
        if !required.contains(&key.as_str()) && !optional.contains(&key.as_str()) {
            return Err(Error::ConfigError(format!("{id} does not take parameter `{key}`")));
        }
    }
    for key in required {
        params.get(key)?;
    }
    let needs_model = matches!(id, CatalogId::WirtingerGeneral | CatalogId::WirtingerZeroed);
    if needs_model != params.model.is_some() {
        return Err(Error::ConfigError(format!(
            "{id} {} a density model",
            if needs_model { "needs" } else { "does not take" }
        )));
    }
    if (id == CatalogId::BrascampLieb) != params.potential.is_some() {
        return Err(Error::ConfigError(format!(
            "{id} {} a potential",
            if id == CatalogId::BrascampLieb {
                "needs"
            } else {
                "does not take"
            }
        )));
    }
    let p = if required.contains(&"p") { params.get("p")? } else { 2.0 };
    if !(p >= 1.0 && p.is_finite()) {
        return Err(out_of_range(format!("p must satisfy 1 <= p < inf, got {p}")));
    }
    let spec_id = format!("{id}[{}]", params.label());

    let (kind, model, weight, constant, lhs_kind) = match id {
        CatalogId::ChernoffGeneral => {
            let fp = match params.values.get("m") {
                Some(&m) => invgamma_chernoff_model(params.get("alpha")?, params.get("lambda")?, m)?,
                None => cauchy_chernoff_model(params.get("alpha")?, params.get("lambda")?)?,
            };
            let w = chernoff_weight(&fp)?;
            (InequalityKind::Chernoff, fp.steady_state, w, 1.0, LhsKind::Variance)
        }
        CatalogId::BrascampLieb => {
            let fp = gibbs_model(params.potential.clone().expect("checked above"))?;
            let w = chernoff_weight(&fp).map_err(|e| match e {
                Error::AdmissibilityError(msg) => {
                    Error::AdmissibilityError(format!("potential is not strictly convex: {msg}"))
                }
                other => other,
            })?;
            (InequalityKind::Chernoff, fp.steady_state, w, 1.0, LhsKind::Variance)
        }
        CatalogId::ChernoffCauchy => {
            let beta = params.get("beta")?;
            let model = DensityModel::cauchy(beta)?;
            let rho = chernoff_rho(beta)?.value;
            let w = WeightFunction::new("1+x^2", 2.0, |x| 1.0 + x * x);
            (InequalityKind::Chernoff, model, w, 1.0 / rho, LhsKind::Variance)
        }
        CatalogId::ChernoffInvgamma => {
            let beta = params.get("beta")?;
            let model = DensityModel::inverse_gamma(beta, params.get("m")?)?;
            let rho = chernoff_rho(beta)?.value;
            (
                InequalityKind::Chernoff,
                model,
                power_weight("x^2", 2.0),
                1.0 / rho,
                LhsKind::Variance,
            )
        }
        CatalogId::ChernoffInvgammaStd => {
            let kappa = params.get("kappa")?;
            let model = DensityModel::inverse_gamma_std(kappa, params.get("m")?)?;
            let gamma = chernoff_gamma(kappa)?.value;
            (
                InequalityKind::Chernoff,
                model,
                power_weight("x^2", 2.0),
                1.0 / gamma,
                LhsKind::Variance,
            )
        }
        CatalogId::LsiCauchy => {
            let (beta, alpha) = (params.get("beta")?, params.get("alpha")?);
            let rho = lsi_rho_cauchy(beta, alpha)?.value;
            let model = DensityModel::cauchy(beta)?;
            let w = WeightFunction::new(format!("(1+x^2)^{alpha}"), 2.0 * alpha, move |x| {
                (1.0 + x * x).powf(alpha)
            });
            (InequalityKind::Lsi, model, w, 2.0 / rho, LhsKind::Entropy)
        }
        CatalogId::LsiBobkovLedoux => {
            let beta = params.get("beta")?;
            let c = bobkov_ledoux_prefactor(beta)?.constant.value;
            let model = DensityModel::cauchy(beta)?;
            let w = WeightFunction::new("(1+x^2)^2", 4.0, |x| (1.0 + x * x).powi(2));
            (InequalityKind::Lsi, model, w, c, LhsKind::Entropy)
        }
        CatalogId::LsiInvgamma => {
            let (beta, alpha, m) = (params.get("beta")?, params.get("alpha")?, params.get("m")?);
            let rho = lsi_rho_invgamma(beta, alpha, m)?.value;
            let model = DensityModel::inverse_gamma(beta, m)?;
            let w = power_weight(&format!("x^{}", 2.0 * alpha), 2.0 * alpha);
            (InequalityKind::Lsi, model, w, 2.0 / rho, LhsKind::Entropy)
        }
        CatalogId::LsiInvgammaStd => {
            let (kappa, alpha, m) = (params.get("kappa")?, params.get("alpha")?, params.get("m")?);
            let rho = lsi_rho_invgamma_std(kappa, alpha, m)?.value;
            let model = DensityModel::inverse_gamma_std(kappa, m)?;
            let w = power_weight(&format!("x^{}", 2.0 * alpha), 2.0 * alpha);
            (InequalityKind::Lsi, model, w, 2.0 / rho, LhsKind::Entropy)
        }
        CatalogId::LsiGeneralizedGamma => {
            let (beta, alpha, m) = (params.get("beta")?, params.get("alpha")?, params.get("m")?);
            let rho = lsi_rho_invgamma(beta, alpha, m)?.value;
            let model = DensityModel::generalized_gamma(beta, alpha, m)?;
            (
                InequalityKind::Lsi,
                model,
                WeightFunction::unit(),
                2.0 / rho,
                LhsKind::Entropy,
            )
        }
        CatalogId::WirtingerGeneral | CatalogId::WirtingerZeroed => {
            let model = params.model.clone().expect("checked above");
            let k = median_weight(&model)?;
            if id == CatalogId::WirtingerGeneral {
                (
                    InequalityKind::Wirtinger,
                    model,
                    k,
                    (2.0 * p).powf(p),
                    LhsKind::CenteredPMoment,
                )
            } else {
                (
                    InequalityKind::WirtingerCenteredAtMedian,
                    model,
                    k,
                    p.powf(p),
                    LhsKind::ZeroedPMoment,
                )
            }
        }
        CatalogId::WirtingerCauchy => {
            let beta = params.get("beta")?;
            let model = DensityModel::cauchy(beta)?;
            let c = 2f64.powf(beta) * (2.0 * p / (2.0 * beta - 1.0)).powf(p);
            (
                InequalityKind::Wirtinger,
                model,
                abs_weight(),
                c,
                LhsKind::CenteredPMoment,
            )
        }
        CatalogId::WirtingerGbeta => {
            let beta = params.get("beta")?;
            let zeroed = match params.values.get("zeroed").copied().unwrap_or(0.0) {
                0.0 => false,
                1.0 => true,
                z => return Err(Error::ConfigError(format!("zeroed must be 0 or 1, got {z}"))),
            };
            let model = DensityModel::symmetric_polynomial(beta)?;
            if zeroed {
                let c = (p / (2.0 * beta - 1.0)).powf(p);
                (
                    InequalityKind::WirtingerCenteredAtMedian,
                    model,
                    abs_weight(),
                    c,
                    LhsKind::ZeroedPMoment,
                )
            } else {
                let c = (2.0 * p / (2.0 * beta - 1.0)).powf(p);
                (
                    InequalityKind::Wirtinger,
                    model,
                    abs_weight(),
                    c,
                    LhsKind::CenteredPMoment,
                )
            }
        }
        CatalogId::WirtingerInvgamma => {
            let (beta, m) = (params.get("beta")?, params.get("m")?);
            let d = wirtinger_d(beta, m)?.value;
            let model = DensityModel::inverse_gamma(beta, m)?;
            (
                InequalityKind::Wirtinger,
                model,
                power_weight("x", 1.0),
                (p * d).powf(p),
                LhsKind::CenteredPMoment,
            )
        }
    };
    let median = model.median()?;
    Ok(InequalitySpec {
        id: spec_id,
        catalog: id,
        kind,
        model,
        weight,
        constant,
        p,
        lhs_kind,
        median,
    })
}

/// Every catalog entry at its three default points.
pub fn default_specs() -> Result<Vec<InequalitySpec>> {
    let mut out = Vec::new();
    for id in CatalogId::ALL {
        for params in id.default_points() {
            out.push(build(id, &params)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for id in CatalogId::ALL {
            assert_eq!(id.as_str().parse::<CatalogId>().unwrap(), id);
        }
        assert!(matches!("NOPE".parse::<CatalogId>(), Err(Error::CatalogUnknown(_))));
    }

    #[test]
    fn closed_form_constants() {
        let s = build_spec("CHERNOFF_CAUCHY", &SpecParams::new().with("beta", 2.5)).unwrap();
        assert!((s.constant - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.weight.eval(2.0), 5.0);
        let s = build_spec("LSI_CAUCHY", &SpecParams::new().with("beta", 3.0).with("alpha", 2.0)).unwrap();
        assert_eq!(s.constant, 0.5);
        let s = build_spec(
            "WIRTINGER_GBETA",
            &SpecParams::new().with("beta", 1.5).with("p", 1.0).with("zeroed", 1.0),
        )
        .unwrap();
        assert_eq!(s.constant, 0.5);
        assert_eq!(s.lhs_kind, LhsKind::ZeroedPMoment);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_spec("CHERNOFF_CAUCHY", &SpecParams::new()).is_err());
        assert!(build_spec("CHERNOFF_CAUCHY", &SpecParams::new().with("beta", 2.0).with("m", 1.0)).is_err());
        assert!(build_spec("LSI_CAUCHY", &SpecParams::new().with("beta", 2.0).with("alpha", 2.5)).is_err());
        assert!(build_spec("WIRTINGER_CAUCHY", &SpecParams::new().with("beta", 2.0).with("p", 0.5)).is_err());
        assert!(build_spec(
            "BRASCAMP_LIEB",
            &SpecParams::new().with_potential(vec![0.0, 0.0, -1.0, 0.0, 0.25])
        )
        .is_err());
    }

    #[test]
    fn default_sweep_builds() {
        let specs = default_specs().unwrap();
        assert_eq!(specs.len(), 45);
        let mut ids: Vec<&str> = specs.iter().map(|s| s.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 45, "spec ids are unique");
    }
}
