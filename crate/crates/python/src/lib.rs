//! Python bindings for the `heavytail` crate.

use heavytail::constants::{self, ChernoffFamily, ConstantValue};
use heavytail::evolution::{self, InitialDatum, PdeConfig, Scheme};
use heavytail::fp_models::{self, FokkerPlanckModel, WeightFunction};
use heavytail::spectral::{self, SpectralProblem};
use heavytail::verifiers::{self, catalog, CatalogId, InequalityReport, SpecParams, TestFunction};
use heavytail::{DensityModel, Error, QuadratureConfig};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::collections::BTreeMap;

fn err(e: Error) -> PyErr {
    match e {
        Error::ConfigError(_)
        | Error::ParameterOutOfRange(_)
        | Error::CatalogUnknown(_)
        | Error::AdmissibilityError(_)
        | Error::DomainError { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// A probability density from one of the supported families.
#[pyclass(name = "Density", module = "heavytail_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyDensity {
    inner: DensityModel,
}

#[pymethods]
impl PyDensity {
    /// Parses a `key=value` descriptor such as `"family=cauchy beta=1.5"`.
    #[new]
    fn new(descriptor: &str) -> PyResult<Self> {
        DensityModel::from_descriptor(descriptor)
            .map(|inner| PyDensity { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn cauchy(beta: f64) -> PyResult<Self> {
        DensityModel::cauchy(beta).map(|inner| PyDensity { inner }).map_err(err)
    }

    #[staticmethod]
    fn symmetric_polynomial(beta: f64) -> PyResult<Self> {
        DensityModel::symmetric_polynomial(beta)
            .map(|inner| PyDensity { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn inverse_gamma(beta: f64, m: f64) -> PyResult<Self> {
        DensityModel::inverse_gamma(beta, m)
            .map(|inner| PyDensity { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn inverse_gamma_std(kappa: f64, m: f64) -> PyResult<Self> {
        DensityModel::inverse_gamma_std(kappa, m)
            .map(|inner| PyDensity { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn generalized_gamma(beta: f64, alpha: f64, m: f64) -> PyResult<Self> {
        DensityModel::generalized_gamma(beta, alpha, m)
            .map(|inner| PyDensity { inner })
            .map_err(err)
    }

    /// Density proportional to `exp(-V)` with `V` given by ascending coefficients.
    #[staticmethod]
    fn gibbs(coeffs: Vec<f64>) -> PyResult<Self> {
        DensityModel::gibbs(coeffs)
            .map(|inner| PyDensity { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn gaussian(mu: f64, sigma: f64) -> PyResult<Self> {
        DensityModel::gaussian(mu, sigma)
            .map(|inner| PyDensity { inner })
            .map_err(err)
    }

    fn pdf(&self, x: f64) -> PyResult<f64> {
        self.inner.pdf(x).map_err(err)
    }

    fn cdf(&self, x: f64) -> PyResult<f64> {
        self.inner.cdf(x).map_err(err)
    }

    fn sf(&self, x: f64) -> PyResult<f64> {
        self.inner.sf(x).map_err(err)
    }

    fn quantile(&self, p: f64) -> PyResult<f64> {
        self.inner.quantile(p).map_err(err)
    }

    fn median(&self) -> PyResult<f64> {
        self.inner.median().map_err(err)
    }

    #[getter]
    fn support(&self) -> (f64, f64) {
        let i = self.inner.interval();
        (i.lo, i.hi)
    }

    fn descriptor(&self) -> String {
        self.inner.descriptor()
    }

    fn __repr__(&self) -> String {
        format!("Density('{}')", self.inner.descriptor())
    }
}

/// A closed-form constant with its formula branch and validity range.
#[pyclass(name = "Constant", module = "heavytail_py", frozen, get_all)]
struct PyConstant {
    value: f64,
    branch: String,
    valid_range: String,
}

#[pymethods]
impl PyConstant {
    fn __float__(&self) -> f64 {
        self.value
    }

    fn __repr__(&self) -> String {
        format!(
            "Constant(value={}, branch='{}', valid_range='{}')",
            self.value, self.branch, self.valid_range
        )
    }
}

fn constant(c: heavytail::Result<ConstantValue>) -> PyResult<PyConstant> {
    let c = c.map_err(err)?;
    Ok(PyConstant {
        value: c.value,
        branch: c.branch.to_string(),
        valid_range: c.valid_range.to_string(),
    })
}

#[pyfunction]
fn chernoff_rho(beta: f64) -> PyResult<PyConstant> {
    constant(constants::chernoff_rho(beta))
}

#[pyfunction]
fn chernoff_gamma(kappa: f64) -> PyResult<PyConstant> {
    constant(constants::chernoff_gamma(kappa))
}

#[pyfunction]
fn lsi_rho_cauchy(beta: f64, alpha: f64) -> PyResult<PyConstant> {
    constant(constants::lsi_rho_cauchy(beta, alpha))
}

#[pyfunction]
fn lsi_rho_invgamma(beta: f64, alpha: f64, m: f64) -> PyResult<PyConstant> {
    constant(constants::lsi_rho_invgamma(beta, alpha, m))
}

#[pyfunction]
fn lsi_rho_invgamma_std(kappa: f64, alpha: f64, m: f64) -> PyResult<PyConstant> {
    constant(constants::lsi_rho_invgamma_std(kappa, alpha, m))
}

#[pyfunction]
fn bobkov_ledoux_prefactor(beta: f64) -> PyResult<PyConstant> {
    constant(constants::bobkov_ledoux_prefactor(beta).map(|b| b.constant))
}

#[pyfunction]
fn wirtinger_d(beta: f64, m: f64) -> PyResult<PyConstant> {
    constant(constants::wirtinger_d(beta, m))
}

/// Optimal drift exponent; returns `(alpha_max, rho, numeric_alpha, numeric_rho)`.
#[pyfunction]
#[pyo3(signature = (beta, family = "cauchy"))]
fn optimize_alpha(beta: f64, family: &str) -> PyResult<(f64, f64, f64, f64)> {
    let family = match family {
        "cauchy" => ChernoffFamily::Cauchy,
        "invgamma" => ChernoffFamily::InverseGamma,
        other => return Err(PyValueError::new_err(format!("unknown family `{other}`"))),
    };
    let o = constants::optimize_alpha_chernoff(beta, family).map_err(err)?;
    Ok((o.alpha_max, o.rho, o.numeric_alpha, o.numeric_rho))
}

#[pyfunction]
fn catalog_ids() -> Vec<&'static str> {
    CatalogId::ALL.iter().map(|c| c.as_str()).collect()
}

fn corpus(name: &str) -> PyResult<Vec<TestFunction>> {
    match name {
        "default" => Ok(verifiers::default_corpus()),
        "real" => Ok(verifiers::real_line_corpus()),
        "half" => Ok(verifiers::half_line_corpus()),
        other => Err(PyValueError::new_err(format!("unknown corpus `{other}`"))),
    }
}

fn report_dict<'py>(py: Python<'py>, r: &InequalityReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("spec_id", &r.spec_id)?;
    d.set_item("fn_id", &r.fn_id)?;
    d.set_item("lhs", r.lhs)?;
    d.set_item("rhs", r.rhs)?;
    d.set_item("constant", r.constant)?;
    d.set_item("slack", r.slack)?;
    d.set_item("rel_slack", r.relative_slack)?;
    d.set_item("quad_err", r.quad_err)?;
    d.set_item("passed", r.passed)?;
    d.set_item("verdict", r.verdict.to_string())?;
    d.set_item("note", r.note.clone())?;
    Ok(d)
}

/// Verifies one catalog entry (default points when `params` is omitted) over a test-function corpus.
#[pyfunction]
#[pyo3(signature = (catalog_id, params = None, potential = None, density = None, corpus = "default", rel_tol = None))]
fn verify<'py>(
    py: Python<'py>,
    catalog_id: &str,
    params: Option<BTreeMap<String, f64>>,
    potential: Option<Vec<f64>>,
    density: Option<PyDensity>,
    corpus: &str,
    rel_tol: Option<f64>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let id: CatalogId = catalog_id.parse().map_err(err)?;
    let points = if params.is_none() && potential.is_none() && density.is_none() {
        id.default_points()
    } else {
        let mut p = SpecParams::new();
        for (k, v) in params.unwrap_or_default() {
            p = p.with(&k, v);
        }
        if let Some(c) = potential {
            p = p.with_potential(c);
        }
        if let Some(d) = density {
            p = p.with_model(d.inner);
        }
        vec![p]
    };
    let specs = points
        .iter()
        .map(|p| catalog::build(id, p))
        .collect::<heavytail::Result<Vec<_>>>()
        .map_err(err)?;
    let mut config = QuadratureConfig::default();
    if let Some(t) = rel_tol {
        config = config.with_rel_tol(t);
        config.validate().map_err(err)?;
    }
    let functions = self::corpus(corpus)?;
    let reports = py.detach(|| verifiers::run_corpus(&specs, &functions, &config));
    reports.iter().map(|r| report_dict(py, r)).collect()
}

fn weight(name: &str) -> PyResult<WeightFunction> {
    match name {
        "1" => Ok(WeightFunction::unit()),
        "1+x^2" => Ok(WeightFunction::new("1+x^2", 2.0, |x| 1.0 + x * x)),
        "x^2" => Ok(WeightFunction::new("x^2", 2.0, |x| x * x)),
        "(1+x^2)^2" => Ok(WeightFunction::new("(1+x^2)^2", 4.0, |x| (1.0 + x * x).powi(2))),
        other => Err(PyValueError::new_err(format!(
            "unknown weight `{other}` (expected 1, 1+x^2, x^2 or (1+x^2)^2)"
        ))),
    }
}

/// Smallest nonzero eigenvalue of the weighted Poincaré problem, i.e. the best constant.
#[pyfunction]
#[pyo3(signature = (density, weight = "1", n_cells = 2048))]
fn spectral_gap(py: Python<'_>, density: PyDensity, weight: &str, n_cells: usize) -> PyResult<f64> {
    let w = self::weight(weight)?;
    py.detach(|| {
        let problem = SpectralProblem::new(density.inner, w, n_cells)?;
        spectral::poincare_best_constant(&problem).map(|r| r.lambda1)
    })
    .map_err(err)
}

fn fp_model(model: &str, alpha: Option<f64>, beta: Option<f64>, m: f64) -> PyResult<FokkerPlanckModel> {
    let need = |name: &str, v: Option<f64>| v.ok_or_else(|| PyValueError::new_err(format!("{model} needs {name}")));
    match model {
        "invgamma" => {
            let (a, b) = (need("alpha", alpha)?, need("beta", beta)?);
            fp_models::invgamma_fp_model(a, 2.0 * (b - a), m).map_err(err)
        }
        "cauchy" => {
            let (a, b) = (need("alpha", alpha)?, need("beta", beta)?);
            fp_models::cauchy_fp_model(a, b / a - 1.0).map_err(err)
        }
        "ou" => fp_models::ou_model().map_err(err),
        other => Err(PyValueError::new_err(format!("unknown model `{other}`"))),
    }
}

/// Runs the Fokker–Planck equation from a perturbed start and returns the entropy trace and fit.
#[pyfunction]
#[pyo3(signature = (model, alpha = None, beta = None, m = 1.0, preset = "bump", n_cells = 512, dt = None, t_end = None, scheme = "chang-cooper"))]
#[allow(clippy::too_many_arguments)]
fn evolve<'py>(
    py: Python<'py>,
    model: &str,
    alpha: Option<f64>,
    beta: Option<f64>,
    m: f64,
    preset: &str,
    n_cells: usize,
    dt: Option<f64>,
    t_end: Option<f64>,
    scheme: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let fp = fp_model(model, alpha, beta, m)?;
    let f0 = match preset {
        "steady" => InitialDatum::Steady,
        "bump" => InitialDatum::bump_for(&fp).map_err(err)?,
        "mixture" => InitialDatum::Mixture {
            weight: 0.5,
            bump: Box::new(InitialDatum::bump_for(&fp).map_err(err)?),
        },
        other => return Err(PyValueError::new_err(format!("unknown preset `{other}`"))),
    };
    let scheme = match scheme {
        "chang-cooper" => Scheme::ChangCooper,
        "centered" => Scheme::CenteredImplicit,
        other => return Err(PyValueError::new_err(format!("unknown scheme `{other}`"))),
    };
    let config = PdeConfig {
        n_cells,
        dt,
        t_end,
        scheme,
        ..PdeConfig::default()
    };
    config.validate().map_err(err)?;
    let run = py.detach(|| evolution::evolve(&fp, &f0, &config)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("times", run.trace.times.clone())?;
    d.set_item("entropy", run.trace.h.clone())?;
    d.set_item("rate", run.trace.fitted_rate())?;
    d.set_item("r_squared", run.trace.fit.as_ref().map(|f| f.r_squared))?;
    d.set_item("rate_bound", evolution::lsi_rate_bound(&fp))?;
    d.set_item("mass_drift", run.trace.mass_drift)?;
    d.set_item("max_increase", run.trace.max_increase)?;
    d.set_item("dt", run.dt)?;
    d.set_item("t_end", run.t_end)?;
    d.set_item("centers", run.grid.centers.clone())?;
    d.set_item("steady", run.steady.clone())?;
    Ok(d)
}

#[pymodule]
fn heavytail_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensity>()?;
    m.add_class::<PyConstant>()?;
    m.add_function(wrap_pyfunction!(chernoff_rho, m)?)?;
    m.add_function(wrap_pyfunction!(chernoff_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(lsi_rho_cauchy, m)?)?;
    m.add_function(wrap_pyfunction!(lsi_rho_invgamma, m)?)?;
    m.add_function(wrap_pyfunction!(lsi_rho_invgamma_std, m)?)?;
    m.add_function(wrap_pyfunction!(bobkov_ledoux_prefactor, m)?)?;
    m.add_function(wrap_pyfunction!(wirtinger_d, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_ids, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_gap, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    Ok(())
}
