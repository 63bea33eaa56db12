//! Subcommand implementations. Every command validates its inputs and finishes
//! all computation before anything is written.

use crate::range::Sweep;
use crate::{
    ChernoffKind, Cli, Command, ConstantsArgs, CorpusKind, EvolveArgs, EvolveModel, Format, Preset, ReportArgs,
    SchemeArg, SpectralArgs, SpectralFamily, SpectralWeight, VerifyArgs,
};
use heavytail::constants::{
    bobkov_ledoux_prefactor, chernoff_gamma, chernoff_rho, lsi_rho_cauchy, lsi_rho_invgamma, lsi_rho_invgamma_std,
    optimize_alpha_chernoff, wirtinger_d, ChernoffFamily, ConstantValue,
};
use heavytail::evolution::{evolve, lsi_rate_bound, InitialDatum, PdeConfig, Scheme};
use heavytail::fp_models::{cauchy_fp_model, invgamma_fp_model, ou_model, FokkerPlanckModel, WeightFunction};
use heavytail::io::{report_table, Cell, Table};
use heavytail::spectral::{poincare_best_constant, SpectralProblem};
use heavytail::verifiers::catalog::default_specs;
use heavytail::verifiers::{
    default_corpus, half_line_corpus, real_line_corpus, run_corpus, CatalogId, InequalityReport, InequalitySpec,
    SpecParams, TestFunction, Verdict,
};
use heavytail::{DensityModel, QuadratureConfig};
use rayon::prelude::*;
use serde_json::json;
use std::path::Path;
use thiserror::Error;

/// Environment variable overriding the relative quadrature tolerance.
pub const RTOL_ENV: &str = "HEAVYTAIL_QUAD_RTOL";

/// Entropy must not increase by more than this between steps.
const ENTROPY_TOL: f64 = 1e-10;
/// Largest accepted `|mass - 1|` along a run.
const MASS_TOL: f64 = 1e-10;
/// Fitted decay rates must reach this fraction of the proven bound.
const RATE_FRACTION: f64 = 0.95;
/// Discrete spectral gaps must reach this fraction of the closed-form constant.
const SPECTRAL_FRACTION: f64 = 0.98;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Compute(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) => 2,
            CliError::Compute(_) => 3,
        }
    }
}

impl From<heavytail::Error> for CliError {
    fn from(e: heavytail::Error) -> Self {
        use heavytail::Error as E;
        match e {
            E::ConfigError(_)
            | E::ParameterOutOfRange(_)
            | E::CatalogUnknown(_)
            | E::AdmissibilityError(_)
            | E::DomainError { .. } => CliError::Config(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> CliResult<()> {
    let quad = quadrature_config()?;
    match &cli.command {
        Command::Constants(a) => {
            let table = constants(a)?;
            emit(cli, &table)
        }
        Command::Verify(a) => verify(cli, a, &quad),
        Command::Spectral(a) => spectral(cli, a),
        Command::Evolve(a) => evolve_cmd(cli, a),
        Command::Report(a) => report(cli, a, &quad),
    }
}

fn quadrature_config() -> CliResult<QuadratureConfig> {
    let cfg = QuadratureConfig::default();
    match std::env::var(RTOL_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(cfg),
        Err(e) => Err(CliError::Config(format!("{RTOL_ENV}: {e}"))),
        Ok(s) => {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{RTOL_ENV} must be a number, got `{s}`")))?;
            if !(v > 0.0 && v < 1.0) {
                return Err(CliError::Config(format!("{RTOL_ENV} must lie in (0, 1), got {v}")));
            }
            let cfg = cfg.with_rel_tol(v);
            cfg.validate()?;
            Ok(cfg)
        }
    }
}

fn render(format: Format, table: &Table) -> CliResult<String> {
    Ok(match format {
        Format::Csv => table.to_csv_string()?,
        Format::Json => table.to_json_string()?,
    })
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Compute(format!("cannot write {}: {e}", path.display())))
}

fn emit(cli: &Cli, table: &Table) -> CliResult<()> {
    emit_text(cli, &render(cli.format, table)?)
}

fn emit_text(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(path) => write_file(path, text),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Compute(format!("cannot write output: {e}")))
        }
    }
}

/// Cartesian product of named sweeps, first name varying slowest.
fn product(named: &[(&'static str, &Sweep)]) -> Vec<Vec<(&'static str, f64)>> {
    let mut rows: Vec<Vec<(&'static str, f64)>> = vec![Vec::new()];
    for (name, sweep) in named {
        rows = rows
            .into_iter()
            .flat_map(|row| {
                sweep.0.iter().map(move |&v| {
                    let mut r = row.clone();
                    r.push((*name, v));
                    r
                })
            })
            .collect();
    }
    rows
}

// ---------------------------------------------------------------- constants

fn constants(a: &ConstantsArgs) -> CliResult<Table> {
    let (table, needed): (&str, &[&str]) = if a.chernoff_rho {
        ("chernoff_rho", &["beta"])
    } else if a.chernoff_gamma {
        ("chernoff_gamma", &["kappa"])
    } else if a.lsi_cauchy {
        ("lsi_cauchy", &["beta", "alpha"])
    } else if a.lsi_invgamma {
        ("lsi_invgamma", &["beta", "alpha", "m"])
    } else if a.lsi_invgamma_std {
        ("lsi_invgamma_std", &["kappa", "alpha", "m"])
    } else if a.bobkov_ledoux {
        ("bobkov_ledoux", &["beta"])
    } else if a.wirtinger_d {
        ("wirtinger_d", &["beta", "m"])
    } else {
        ("alpha_opt", &["beta"])
    };
    let given = [("beta", &a.beta), ("kappa", &a.kappa), ("alpha", &a.alpha), ("m", &a.m)];
    let mut named = Vec::new();
    for name in needed {
        let sweep = given.iter().find(|(n, _)| n == name).and_then(|(_, s)| s.as_ref());
        match sweep {
            Some(s) => named.push((*name, s)),
            None => return Err(CliError::Config(format!("--{table} needs --{name}"))),
        }
    }
    for (name, sweep) in given {
        if sweep.is_some() && !needed.contains(&name) {
            return Err(CliError::Config(format!("--{table} does not take --{name}")));
        }
    }

    let points = product(&named);
    if table == "alpha_opt" {
        let family = match a.family {
            ChernoffKind::Cauchy => ChernoffFamily::Cauchy,
            ChernoffKind::Invgamma => ChernoffFamily::InverseGamma,
        };
        let mut t = Table::new(&[
            "table",
            "family",
            "beta",
            "alpha_max",
            "rho",
            "numeric_alpha",
            "numeric_rho",
        ]);
        for p in &points {
            let beta = p[0].1;
            let o = optimize_alpha_chernoff(beta, family)?;
            t.push(vec![
                table.into(),
                a.family_id().into(),
                beta.into(),
                o.alpha_max.into(),
                o.rho.into(),
                o.numeric_alpha.into(),
                o.numeric_rho.into(),
            ])?;
        }
        return Ok(t);
    }

    let mut columns = vec!["table"];
    columns.extend(needed.iter().copied());
    columns.extend(["value", "branch", "valid_range"]);
    let mut t = Table::new(&columns);
    for p in &points {
        let get = |k: &str| p.iter().find(|(n, _)| *n == k).map(|(_, v)| *v).unwrap_or(f64::NAN);
        let c: ConstantValue = match table {
            "chernoff_rho" => chernoff_rho(get("beta"))?,
            "chernoff_gamma" => chernoff_gamma(get("kappa"))?,
            "lsi_cauchy" => lsi_rho_cauchy(get("beta"), get("alpha"))?,
            "lsi_invgamma" => lsi_rho_invgamma(get("beta"), get("alpha"), get("m"))?,
            "lsi_invgamma_std" => lsi_rho_invgamma_std(get("kappa"), get("alpha"), get("m"))?,
            "bobkov_ledoux" => bobkov_ledoux_prefactor(get("beta"))?.constant,
            _ => wirtinger_d(get("beta"), get("m"))?,
        };
        let mut row: Vec<Cell> = vec![table.into()];
        row.extend(p.iter().map(|(_, v)| Cell::from(*v)));
        row.extend([c.value.into(), c.branch.to_string().into(), c.valid_range.into()]);
        t.push(row)?;
    }
    Ok(t)
}

impl ConstantsArgs {
    fn family_id(&self) -> &'static str {
        match self.family {
            ChernoffKind::Cauchy => "cauchy",
            ChernoffKind::Invgamma => "invgamma",
        }
    }
}

// ---------------------------------------------------------------- verify

fn corpus(kind: CorpusKind) -> Vec<TestFunction> {
    match kind {
        CorpusKind::Default => default_corpus(),
        CorpusKind::Real => real_line_corpus(),
        CorpusKind::Half => half_line_corpus(),
    }
}

fn parse_potential(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("bad potential coefficient `{c}`")))
        })
        .collect()
}

fn verify_specs(a: &VerifyArgs) -> CliResult<Vec<InequalitySpec>> {
    let sweeps: Vec<(&'static str, &Sweep)> = [
        ("beta", &a.beta),
        ("alpha", &a.alpha),
        ("m", &a.m),
        ("kappa", &a.kappa),
        ("lambda", &a.lambda),
        ("p", &a.p),
    ]
    .into_iter()
    .filter_map(|(n, s)| s.as_ref().map(|s| (n, s)))
    .collect();
    let customized = !sweeps.is_empty() || a.zeroed || a.density.is_some() || a.potential.is_some();

    if a.catalog.trim().eq_ignore_ascii_case("all") {
        if customized {
            return Err(CliError::Config(
                "--catalog ALL runs the default points and takes no parameters".into(),
            ));
        }
        return Ok(default_specs()?);
    }
    let id: CatalogId = a.catalog.parse()?;
    let points = if customized {
        let mut base = SpecParams::new();
        if a.zeroed {
            base = base.with("zeroed", 1.0);
        }
        if let Some(d) = &a.density {
            base = base.with_model(DensityModel::from_descriptor(d)?);
        }
        if let Some(p) = &a.potential {
            base = base.with_potential(parse_potential(p)?);
        }
        product(&sweeps)
            .into_iter()
            .map(|row| row.into_iter().fold(base.clone(), |acc, (k, v)| acc.with(k, v)))
            .collect()
    } else {
        id.default_points()
    };
    points
        .iter()
        .map(|p| heavytail::verifiers::catalog::build(id, p).map_err(CliError::from))
        .collect()
}

fn failure_summary(reports: &[InequalityReport]) -> Option<CliError> {
    let failed: Vec<&InequalityReport> = reports.iter().filter(|r| r.is_failure()).collect();
    if failed.is_empty() {
        return None;
    }
    let first = failed[0];
    Some(CliError::Verification(format!(
        "{} of {} rows failed (first: {} / {} {})",
        failed.len(),
        reports.len(),
        first.spec_id,
        first.fn_id,
        first.verdict
    )))
}

fn verify(cli: &Cli, a: &VerifyArgs, quad: &QuadratureConfig) -> CliResult<()> {
    let specs = verify_specs(a)?;
    let reports = run_corpus(&specs, &corpus(a.corpus), quad);
    emit(cli, &report_table(&reports))?;
    match failure_summary(&reports) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------- spectral

fn spectral(cli: &Cli, a: &SpectralArgs) -> CliResult<()> {
    if let Some(&n) = a.n.iter().find(|&&n| n < 65) {
        return Err(CliError::Config(format!("--n must be at least 65, got {n}")));
    }
    let ms: Vec<f64> = match a.family {
        SpectralFamily::Cauchy => {
            if a.m.0 != [1.0] {
                return Err(CliError::Config("--m applies to --family invgamma only".into()));
            }
            vec![f64::NAN]
        }
        SpectralFamily::Invgamma => a.m.0.clone(),
    };
    let mut jobs = Vec::new();
    for &beta in &a.beta.0 {
        let rho = chernoff_rho(beta)?.value;
        for &m in &ms {
            let model = match a.family {
                SpectralFamily::Cauchy => DensityModel::cauchy(beta)?,
                SpectralFamily::Invgamma => DensityModel::inverse_gamma(beta, m)?,
            };
            for &n in &a.n {
                jobs.push((beta, m, rho, model.clone(), n));
            }
        }
    }
    let weight = || match (a.weight, a.family) {
        (SpectralWeight::One, _) => WeightFunction::unit(),
        (SpectralWeight::Chernoff, SpectralFamily::Cauchy) => WeightFunction::new("1+x^2", 2.0, |x| 1.0 + x * x),
        (SpectralWeight::Chernoff, SpectralFamily::Invgamma) => WeightFunction::new("x^2", 2.0, |x| x * x),
    };
    let results: Vec<CliResult<f64>> = jobs
        .par_iter()
        .map(|(_, _, _, model, n)| {
            let problem = SpectralProblem::new(model.clone(), weight(), *n)?;
            Ok(poincare_best_constant(&problem)?.lambda1)
        })
        .collect();

    let family = match a.family {
        SpectralFamily::Cauchy => "cauchy",
        SpectralFamily::Invgamma => "invgamma",
    };
    let chernoff = a.weight == SpectralWeight::Chernoff;
    let mut t = Table::new(&["family", "beta", "m", "weight_id", "n", "lambda1", "rho", "gap"]);
    let mut violations = Vec::new();
    for ((beta, m, rho, _, n), lambda1) in jobs.iter().zip(results) {
        let lambda1 = lambda1?;
        // the closed-form constant only bounds the Chernoff-weighted problem
        let rho = if chernoff { *rho } else { f64::NAN };
        if chernoff && lambda1 < SPECTRAL_FRACTION * rho {
            violations.push(format!("beta={beta} n={n}: lambda1 {lambda1:.6e} < rho {rho:.6e}"));
        }
        let m_cell: Cell = if m.is_nan() { "".into() } else { (*m).into() };
        t.push(vec![
            family.into(),
            (*beta).into(),
            m_cell,
            weight().id.into(),
            (*n).into(),
            lambda1.into(),
            rho.into(),
            (lambda1 - rho).into(),
        ])?;
    }
    emit(cli, &t)?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "spectral gap below the closed-form constant: {}",
            violations.join("; ")
        )))
    }
}

// ---------------------------------------------------------------- evolve

fn require(name: &str, v: Option<f64>) -> CliResult<f64> {
    v.ok_or_else(|| CliError::Config(format!("--{name} is required for this model")))
}

fn evolve_model(a: &EvolveArgs) -> CliResult<FokkerPlanckModel> {
    Ok(match a.model {
        EvolveModel::Invgamma => {
            let (alpha, beta) = (require("alpha", a.alpha)?, require("beta", a.beta)?);
            let m = a.m.unwrap_or(1.0);
            let lambda = 2.0 * (beta - alpha);
            if !(lambda > 0.0) {
                return Err(CliError::Config(format!(
                    "need beta > alpha, got beta={beta}, alpha={alpha}"
                )));
            }
            invgamma_fp_model(alpha, lambda, m)?
        }
        EvolveModel::Cauchy => {
            if a.m.is_some() {
                return Err(CliError::Config("--m applies to --model invgamma only".into()));
            }
            let (alpha, beta) = (require("alpha", a.alpha)?, require("beta", a.beta)?);
            if !(alpha > 0.0) {
                return Err(CliError::Config(format!("alpha must be positive, got {alpha}")));
            }
            let lambda = beta / alpha - 1.0;
            if !(lambda > 0.0) {
                return Err(CliError::Config(format!(
                    "need beta > alpha, got beta={beta}, alpha={alpha}"
                )));
            }
            cauchy_fp_model(alpha, lambda)?
        }
        EvolveModel::Ou => {
            if a.alpha.is_some() || a.beta.is_some() || a.m.is_some() {
                return Err(CliError::Config("--model ou takes no parameters".into()));
            }
            ou_model()?
        }
    })
}

fn initial_datum(a: &EvolveArgs, model: &FokkerPlanckModel) -> CliResult<InitialDatum> {
    Ok(match a.preset {
        Preset::Steady => InitialDatum::Steady,
        Preset::Bump => InitialDatum::bump_for(model)?,
        Preset::Mixture => InitialDatum::Mixture {
            weight: 0.5,
            bump: Box::new(InitialDatum::bump_for(model)?),
        },
        Preset::Shifted => match a.model {
            EvolveModel::Invgamma => {
                let beta = require("beta", a.beta)?;
                InitialDatum::SteadyOf(DensityModel::inverse_gamma(beta, 2.0 * a.m.unwrap_or(1.0))?)
            }
            EvolveModel::Cauchy => InitialDatum::SteadyOf(DensityModel::cauchy(require("beta", a.beta)? + 1.0)?),
            EvolveModel::Ou => InitialDatum::SteadyOf(DensityModel::gaussian(2.0, 1.0)?),
        },
    })
}

fn evolve_cmd(cli: &Cli, a: &EvolveArgs) -> CliResult<()> {
    let model = evolve_model(a)?;
    let f0 = initial_datum(a, &model)?;
    let config = PdeConfig {
        n_cells: a.n_cells,
        dt: a.dt,
        t_end: a.t_end,
        scheme: match a.scheme {
            SchemeArg::ChangCooper => Scheme::ChangCooper,
            SchemeArg::Centered => Scheme::CenteredImplicit,
        },
        snapshot_stride: a.snapshot_stride,
        domain: None,
    };
    config.validate()?;
    let run = evolve(&model, &f0, &config)?;
    let trace = &run.trace;

    let bound = lsi_rate_bound(&model);
    let monotone = trace.is_monotone(ENTROPY_TOL);
    let mass_ok = trace.mass_drift < MASS_TOL;
    let rate_check = match (bound, trace.fitted_rate()) {
        (Some(b), Some(r)) => Some(r >= RATE_FRACTION * b),
        _ => None,
    };

    let mut t = Table::new(&["t", "H"]);
    for (time, h) in trace.times.iter().zip(&trace.h) {
        t.push(vec![(*time).into(), (*h).into()])?;
    }
    let trace_text = render(cli.format, &t)?;

    let snapshots_text = match &a.snapshots {
        Some(_) => {
            let mut s = Table::new(&["t", "x", "f"]);
            for snap in &run.snapshots {
                for (x, f) in run.grid.centers.iter().zip(&snap.f) {
                    s.push(vec![snap.t.into(), (*x).into(), (*f).into()])?;
                }
            }
            Some(s.to_csv_string()?)
        }
        None => None,
    };

    let manifest_text = match &a.manifest {
        Some(_) => {
            let params: serde_json::Map<String, serde_json::Value> = model
                .params()
                .into_iter()
                .map(|(k, v)| (k.to_string(), json!(v)))
                .collect();
            let fit = trace
                .fit
                .as_ref()
                .map(|f| json!({"rate": f.rate, "r_squared": f.r_squared, "window": [f.window.0, f.window.1]}));
            let manifest = json!({
                "schema": 1,
                "model": format!("{:?}", a.model).to_lowercase(),
                "steady_state": model.steady_state.descriptor(),
                "parameters": params,
                "preset": format!("{:?}", a.preset).to_lowercase(),
                "scheme": format!("{:?}", config.scheme),
                "n_cells": config.n_cells,
                "dt": run.dt,
                "t_end": run.t_end,
                "steps": trace.times.len().saturating_sub(1),
                "domain": [run.grid.edges[0], run.grid.edges[run.grid.edges.len() - 1]],
                "fit": fit,
                "rate_bound": bound,
                "mass_drift": trace.mass_drift,
                "max_increase": trace.max_increase,
                "clipped_mass": trace.clipped_mass,
                "final_sup_distance": run.final_sup_distance,
                "checks": {
                    "entropy_monotone": monotone,
                    "mass_conserved": mass_ok,
                    "rate_at_least_bound": rate_check,
                },
            });
            let mut s = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Compute(e.to_string()))?;
            s.push('\n');
            Some(s)
        }
        None => None,
    };

    emit_text(cli, &trace_text)?;
    if let (Some(path), Some(text)) = (&a.snapshots, &snapshots_text) {
        write_file(path, text)?;
    }
    if let (Some(path), Some(text)) = (&a.manifest, &manifest_text) {
        write_file(path, text)?;
    }

    let mut problems = Vec::new();
    if !monotone {
        problems.push(format!("entropy increased by {:.3e}", trace.max_increase));
    }
    if !mass_ok {
        problems.push(format!("mass drift {:.3e}", trace.mass_drift));
    }
    if rate_check == Some(false) {
        problems.push(format!(
            "fitted rate {:.6} below {RATE_FRACTION} x bound {:.6}",
            trace.fitted_rate().unwrap_or(f64::NAN),
            bound.unwrap_or(f64::NAN)
        ));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(problems.join("; ")))
    }
}

// ---------------------------------------------------------------- report

fn report(cli: &Cli, a: &ReportArgs, quad: &QuadratureConfig) -> CliResult<()> {
    let ids: Vec<CatalogId> = if a.catalog.is_empty() {
        CatalogId::ALL.to_vec()
    } else {
        a.catalog
            .iter()
            .map(|s| s.parse().map_err(CliError::from))
            .collect::<CliResult<_>>()?
    };
    let mut specs = Vec::new();
    let mut points = Vec::new();
    for id in &ids {
        let pts = id.default_points();
        points.push(pts.len());
        for p in &pts {
            specs.push(heavytail::verifiers::catalog::build(*id, p)?);
        }
    }
    let reports = run_corpus(&specs, &corpus(a.corpus), quad);

    let mut t = Table::new(&[
        "catalog_id",
        "points",
        "rows",
        "pass",
        "fail",
        "vacuous",
        "error",
        "min_rel_slack",
    ]);
    for (id, n_points) in ids.iter().zip(points) {
        let rows: Vec<&InequalityReport> = reports
            .iter()
            .filter(|r| r.spec_id.split('[').next() == Some(id.as_str()))
            .collect();
        let count = |v: Verdict| rows.iter().filter(|r| r.verdict == v).count();
        let min_rel = rows
            .iter()
            .filter(|r| matches!(r.verdict, Verdict::Pass | Verdict::Fail))
            .map(|r| r.relative_slack)
            .fold(f64::INFINITY, f64::min);
        t.push(vec![
            id.as_str().into(),
            n_points.into(),
            rows.len().into(),
            count(Verdict::Pass).into(),
            count(Verdict::Fail).into(),
            count(Verdict::Vacuous).into(),
            count(Verdict::Error).into(),
            min_rel.into(),
        ])?;
    }
    let rows_text = match &a.rows {
        Some(_) => Some(render(cli.format, &report_table(&reports))?),
        None => None,
    };
    emit(cli, &t)?;
    if let (Some(path), Some(text)) = (&a.rows, &rows_text) {
        write_file(path, text)?;
    }
    match failure_summary(&reports) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
