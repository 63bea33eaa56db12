//! Finite-volume Fokker–Planck solver `f_t = (P f)_xx + (Q f)_x` with no-flux
//! boundaries, and relative-entropy decay measurements.

use crate::constants::{lsi_rho_cauchy, lsi_rho_invgamma};
use crate::densities::{DensityModel, Family};
use crate::error::{Error, Result};
use crate::fp_models::{FokkerPlanckModel, ModelKind};
use crate::quadrature::{integrate, Interval, QuadratureConfig};
use crate::spectral::graded_nodes;
use serde::Serialize;

/// Steady-state mass left out in each tail of the truncated domain.
pub const TAIL_MASS: f64 = 1e-9;
pub const MIN_CELLS: usize = 128;
/// Entropy band used by [`fit_decay_rate`].
pub const FIT_WINDOW: (f64, f64) = (1e-6, 1e-2);
/// Cell averages below this are a stability failure; above it they are clipped to zero.
pub const NEGATIVITY_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scheme {
    /// Flux written as `P f_inf (f / f_inf)_x`, so the projected steady state is exactly stationary.
    ChangCooper,
    /// Centered differences of `P f` with the drift averaged onto faces.
    CenteredImplicit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PdeConfig {
    pub n_cells: usize,
    /// Time step; defaults to `t_relax / 200`.
    pub dt: Option<f64>,
    /// Final time; defaults to `15 t_relax`.
    pub t_end: Option<f64>,
    pub scheme: Scheme,
    /// Keep every `snapshot_stride`-th state (0 keeps only the initial and final states).
    pub snapshot_stride: usize,
    /// Truncated domain; defaults to the steady-state quantiles at [`TAIL_MASS`].
    pub domain: Option<(f64, f64)>,
}

impl Default for PdeConfig {
    fn default() -> Self {
        PdeConfig {
            n_cells: 512,
            dt: None,
            t_end: None,
            scheme: Scheme::ChangCooper,
            snapshot_stride: 0,
            domain: None,
        }
    }
}

impl PdeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_cells < MIN_CELLS {
            return Err(Error::ConfigError(format!(
                "n_cells must be at least {MIN_CELLS}, got {}",
                self.n_cells
            )));
        }
        for (name, v) in [("dt", self.dt), ("t_end", self.t_end)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::ConfigError(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if let Some((a, b)) = self.domain {
            if !(a < b && a.is_finite() && b.is_finite()) {
                return Err(Error::ConfigError(format!("invalid domain [{a}, {b}]")));
            }
        }
        Ok(())
    }
}

/// Cell edges and the derived widths and centers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FvGrid {
    pub edges: Vec<f64>,
    pub widths: Vec<f64>,
    pub centers: Vec<f64>,
}

impl FvGrid {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 3 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::ConfigError("cell edges must be strictly increasing".into()));
        }
        let widths = edges.windows(2).map(|w| w[1] - w[0]).collect();
        let centers = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Ok(FvGrid { edges, widths, centers })
    }

    pub fn len(&self) -> usize {
        self.widths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.widths.is_empty()
    }

    /// Cell averages of `density`, rescaled to unit mass on the grid.
    pub fn project<F: Fn(f64) -> f64>(&self, density: F) -> Result<Vec<f64>> {
        let cfg = QuadratureConfig {
            rel_tol: 1e-12,
            abs_tol: f64::MIN_POSITIVE,
            max_subdivisions: 200,
            ..QuadratureConfig::default()
        };
        let mut masses = Vec::with_capacity(self.len());
        for w in self.edges.windows(2) {
            let m = match integrate(&density, Interval::new(w[0], w[1])?, &cfg) {
                Ok(r) => r.value,
                Err(Error::QuadratureFailure { value, .. }) => value,
                Err(e) => return Err(e),
            };
            masses.push(m.max(0.0));
        }
        let total: f64 = masses.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::ConfigError(format!("density has mass {total} on the grid")));
        }
        Ok(masses.iter().zip(&self.widths).map(|(m, h)| m / (total * h)).collect())
    }

    pub fn mass(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.widths).map(|(v, h)| v * h).sum()
    }
}

/// `sum_i h_i f_i log(f_i / g_i)` with `0 log 0 = 0`, for unit-mass `f` and `g`.
pub fn relative_entropy(grid: &FvGrid, f: &[f64], steady: &[f64]) -> Result<f64> {
    if f.len() != grid.len() || steady.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} cells, {} values, {} steady values",
            grid.len(),
            f.len(),
            steady.len()
        )));
    }
    // each term f log(f/g) - f + g is nonnegative; the linear part sums to
    // zero for equal masses and removes rounding-level negative totals
    let mut h = 0.0;
    for ((&fi, &gi), &w) in f.iter().zip(steady).zip(&grid.widths) {
        if fi > 0.0 {
            if !(gi > 0.0) {
                return Ok(f64::INFINITY);
            }
            h += w * (fi * (fi / gi).ln() - fi + gi);
        } else {
            h += w * gi;
        }
    }
    Ok(h.max(0.0))
}

/// Initial data for [`evolve`].
#[derive(Clone, Debug, PartialEq)]
pub enum InitialDatum {
    /// The steady state itself.
    Steady,
    /// Steady state of another model (for instance with `m` doubled).
    SteadyOf(DensityModel),
    /// Log-normal density with parameters `mu`, `sigma` (half-line models).
    LogNormalBump {
        mu: f64,
        sigma: f64,
    },
    Gaussian {
        mu: f64,
        sigma: f64,
    },
    /// `(1 - weight) f_inf + weight * bump`.
    Mixture {
        weight: f64,
        bump: Box<InitialDatum>,
    },
}

impl InitialDatum {
    fn density(&self, steady: &DensityModel, x: f64) -> f64 {
        match self {
            InitialDatum::Steady => steady.density(x),
            InitialDatum::SteadyOf(m) => m.density(x),
            InitialDatum::LogNormalBump { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let z = (x.ln() - mu) / sigma;
                    (-0.5 * z * z).exp() / (x * sigma * (2.0 * std::f64::consts::PI).sqrt())
                }
            }
            InitialDatum::Gaussian { mu, sigma } => {
                let z = (x - mu) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            InitialDatum::Mixture { weight, bump } => {
                (1.0 - weight) * steady.density(x) + weight * bump.density(steady, x)
            }
        }
    }

    /// Default perturbation: a log-normal bump at twice the median on the
    /// half-line, a unit-width Gaussian shifted by one on the line.
    pub fn bump_for(model: &FokkerPlanckModel) -> Result<Self> {
        let median = model.steady_state.median()?;
        Ok(if model.interval.lo == 0.0 {
            InitialDatum::LogNormalBump {
                mu: (2.0 * median).ln(),
                sigma: 0.5,
            }
        } else {
            InitialDatum::Gaussian {
                mu: median + 1.0,
                sigma: 1.0,
            }
        })
    }
}

/// Entropy decay rate `2 rho` implied by a proven log-Sobolev inequality for `model`, when one applies.
pub fn lsi_rate_bound(model: &FokkerPlanckModel) -> Option<f64> {
    match model.kind {
        ModelKind::Cauchy { alpha, lambda } if alpha > 1.0 => lsi_rho_cauchy(alpha * (1.0 + lambda), alpha)
            .ok()
            .map(|c| 2.0 * c.value),
        ModelKind::InverseGamma { alpha, lambda, m } if alpha > 1.0 && alpha <= 1.5 => {
            lsi_rho_invgamma(alpha + 0.5 * lambda, alpha, m)
                .ok()
                .map(|c| 2.0 * c.value)
        }
        ModelKind::Gibbs => match model.steady_state.family() {
            // constant curvature: Bakry–Emery with rho = V''
            Family::GibbsPotential { coeffs } if coeffs.len() == 3 && coeffs[2] > 0.0 => Some(4.0 * coeffs[2]),
            _ => None,
        },
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    pub r_squared: f64,
    /// Index range `[start, end)` of the samples used.
    pub window: (usize, usize),
}

/// Least-squares slope of `log H` against `t` over the samples with `H` in [`FIT_WINDOW`].
pub fn fit_decay_rate(times: &[f64], h: &[f64]) -> Result<DecayFit> {
    if times.len() != h.len() {
        return Err(Error::GridMismatch(format!(
            "{} times, {} entropies",
            times.len(),
            h.len()
        )));
    }
    let (lo, hi) = FIT_WINDOW;
    let inside: Vec<usize> = (0..h.len()).filter(|&i| h[i] >= lo && h[i] <= hi).collect();
    if inside.len() < 3 {
        return Err(Error::InsufficientDecay { lo, hi });
    }
    let (start, end) = (inside[0], inside[inside.len() - 1] + 1);
    let pts: Vec<(f64, f64)> = inside.iter().map(|&i| (times[i], h[i].ln())).collect();
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, y) in &pts {
        stt += (t - mt) * (t - mt);
        sty += (t - mt) * (y - my);
        syy += (y - my) * (y - my);
    }
    if !(stt > 0.0) {
        return Err(Error::InsufficientDecay { lo, hi });
    }
    let slope = sty / stt;
    let r_squared = if syy > 0.0 { sty * sty / (stt * syy) } else { 1.0 };
    Ok(DecayFit {
        rate: -slope,
        r_squared,
        window: (start, end),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyTrace {
    pub times: Vec<f64>,
    pub h: Vec<f64>,
    /// `None` when the entropy never crossed the fitting window.
    pub fit: Option<DecayFit>,
    /// Largest `|mass - 1|` along the run.
    pub mass_drift: f64,
    /// Largest increase `H(t_{k+1}) - H(t_k)` (non-positive when the H-theorem holds).
    pub max_increase: f64,
    /// Total mass removed by clipping tiny negative cell averages.
    pub clipped_mass: f64,
}

impl EntropyTrace {
    pub fn fitted_rate(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| f.rate)
    }

    pub fn is_monotone(&self, tol: f64) -> bool {
        self.max_increase <= tol
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub f: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolutionRun {
    pub grid: FvGrid,
    pub steady: Vec<f64>,
    pub trace: EntropyTrace,
    pub snapshots: Vec<Snapshot>,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Largest `|f - f_inf|` over cells at the end of the run.
    pub final_sup_distance: f64,
}

/// Cell edges on the truncated steady-state support.
pub fn build_grid(model: &FokkerPlanckModel, config: &PdeConfig) -> Result<FvGrid> {
    let edges = match config.domain {
        Some((a, b)) => {
            if !(model.interval.contains(a) && model.interval.contains(b)) {
                return Err(Error::ConfigError(format!(
                    "domain [{a}, {b}] leaves the model support"
                )));
            }
            let (fa, sa) = model.steady_state.cdf_pair(a)?;
            let (fb, sb) = model.steady_state.cdf_pair(b)?;
            let covered = (fb - fa).max(sa - sb);
            if covered < 1.0 - 1e-8 {
                return Err(Error::MassDeficit {
                    covered,
                    required: 1.0 - 1e-8,
                });
            }
            let n = config.n_cells;
            if model.interval.lo == 0.0 {
                let (la, lb) = (a.ln(), b.ln());
                (0..=n).map(|i| (la + (lb - la) * i as f64 / n as f64).exp()).collect()
            } else {
                (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
            }
        }
        None => graded_nodes(&model.steady_state, config.n_cells, TAIL_MASS)?,
    };
    FvGrid::new(edges)
}

// Tridiagonal system `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 0..n {
        let (l, pc, pd) = if i == 0 {
            (0.0, 0.0, 0.0)
        } else {
            (lower[i], c[i - 1], d[i - 1])
        };
        let den = diag[i] - l * pc;
        if i + 1 < n {
            c[i] = upper[i] / den;
        }
        d[i] = (rhs[i] - l * pd) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Implicit Euler step matrices; the unknown is `u = f / f_inf` for
/// [`Scheme::ChangCooper`] and `f` itself otherwise.
struct Stepper {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    /// Diagonal of the mass term (`h f_inf` or `h`).
    mass: Vec<f64>,
}

impl Stepper {
    fn new(model: &FokkerPlanckModel, grid: &FvGrid, steady: &[f64], norm: f64, scheme: Scheme, dt: f64) -> Self {
        let n = grid.len();
        let (mut lower, mut diag, mut upper) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mass: Vec<f64> = match scheme {
            Scheme::ChangCooper => grid.widths.iter().zip(steady).map(|(h, g)| h * g).collect(),
            Scheme::CenteredImplicit => grid.widths.clone(),
        };
        diag.copy_from_slice(&mass);
        for i in 0..n - 1 {
            let face = grid.edges[i + 1];
            let dc = grid.centers[i + 1] - grid.centers[i];
            match scheme {
                Scheme::ChangCooper => {
                    // flux P f_inf (u_{i+1} - u_i) / dc, with f_inf at the face from the model
                    let a = dt * model.p(face) * model.steady_state.density(face) / norm / dc;
                    diag[i] += a;
                    diag[i + 1] += a;
                    upper[i] -= a;
                    lower[i + 1] -= a;
                }
                Scheme::CenteredImplicit => {
                    // flux ((P f)_{i+1} - (P f)_i) / dc + Q (f_i + f_{i+1}) / 2
                    let (pl, pr) = (model.p(grid.centers[i]), model.p(grid.centers[i + 1]));
                    let q = 0.5 * model.q(face);
                    // cell i gains the flux, cell i+1 loses it
                    diag[i] -= dt * (-pl / dc + q);
                    upper[i] -= dt * (pr / dc + q);
                    lower[i + 1] += dt * (-pl / dc + q);
                    diag[i + 1] += dt * (pr / dc + q);
                }
            }
        }
        Stepper {
            lower,
            diag,
            upper,
            mass,
        }
    }

    fn step(&self, state: &[f64]) -> Vec<f64> {
        let rhs: Vec<f64> = state.iter().zip(&self.mass).map(|(s, m)| s * m).collect();
        thomas(&self.lower, &self.diag, &self.upper, &rhs)
    }
}

/// Evolves `f0` under `model` and records the relative entropy to the steady state after every step.
pub fn evolve(model: &FokkerPlanckModel, f0: &InitialDatum, config: &PdeConfig) -> Result<EvolutionRun> {
    config.validate()?;
    let grid = build_grid(model, config)?;
    let steady_model = &model.steady_state;
    let steady = grid.project(|x| steady_model.density(x))?;
    // f_inf rescaled to unit mass on the truncated domain
    let norm = {
        let (fa, sa) = steady_model.cdf_pair(grid.edges[0])?;
        let (fb, sb) = steady_model.cdf_pair(grid.edges[grid.len()])?;
        (fb - fa).max(sa - sb)
    };
    let f_init = match f0 {
        InitialDatum::Steady => steady.clone(),
        other => grid.project(|x| other.density(steady_model, x))?,
    };
    let t_relax = lsi_rate_bound(model).map(|r| 2.0 / r).unwrap_or(1.0);
    let dt = config.dt.unwrap_or(t_relax / 200.0);
    let t_end = config.t_end.unwrap_or(15.0 * t_relax);
    let steps = (t_end / dt).ceil() as usize;
    let stepper = Stepper::new(model, &grid, &steady, norm, config.scheme, dt);

    let mut f = f_init;
    let mut times = vec![0.0];
    let mut h = vec![relative_entropy(&grid, &f, &steady)?];
    let mut snapshots = vec![Snapshot { t: 0.0, f: f.clone() }];
    let (mut mass_drift, mut max_increase, mut clipped) = (0.0f64, f64::NEG_INFINITY, 0.0);
    for k in 1..=steps {
        f = match config.scheme {
            Scheme::ChangCooper => {
                let u: Vec<f64> = f.iter().zip(&steady).map(|(a, g)| a / g).collect();
                let u = stepper.step(&u);
                u.iter().zip(&steady).map(|(a, g)| a * g).collect()
            }
            Scheme::CenteredImplicit => stepper.step(&f),
        };
        for (cell, v) in f.iter_mut().enumerate() {
            if *v < 0.0 {
                if *v < -NEGATIVITY_TOL {
                    return Err(Error::StabilityFailure { cell, value: *v });
                }
                clipped += -*v * grid.widths[cell];
                *v = 0.0;
            }
        }
        mass_drift = mass_drift.max((grid.mass(&f) - 1.0).abs());
        let hk = relative_entropy(&grid, &f, &steady)?;
        max_increase = max_increase.max(hk - h[h.len() - 1]);
        times.push(k as f64 * dt);
        h.push(hk);
        if (config.snapshot_stride > 0 && k % config.snapshot_stride == 0) || k == steps {
            snapshots.push(Snapshot {
                t: k as f64 * dt,
                f: f.clone(),
            });
        }
    }
    let fit = match fit_decay_rate(&times, &h) {
        Ok(fit) => Some(fit),
        Err(Error::InsufficientDecay { .. }) => None,
        Err(e) => return Err(e),
    };
    let final_sup_distance = f.iter().zip(&steady).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(EvolutionRun {
        grid,
        steady,
        trace: EntropyTrace {
            times,
            h,
            fit,
            mass_drift,
            max_increase,
            clipped_mass: clipped,
        },
        snapshots,
        dt,
        t_end,
        scheme: config.scheme,
        final_sup_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp_models::{invgamma_fp_model, ou_model};

    #[test]
    fn exact_exponential_fit() {
        let t: Vec<f64> = (0..400).map(|i| i as f64 * 0.01).collect();
        let h: Vec<f64> = t.iter().map(|t| (-3.0 * t).exp()).collect();
        let fit = fit_decay_rate(&t, &h).unwrap();
        assert!((fit.rate - 3.0).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perturbed_exponential_fit() {
        let t: Vec<f64> = (0..600).map(|i| i as f64 * 0.01).collect();
        let h: Vec<f64> = t.iter().map(|t| (-3.0 * t).exp() * (1.0 + 0.01 * t.sin())).collect();
        let fit = fit_decay_rate(&t, &h).unwrap();
        assert!((fit.rate - 3.0).abs() < 0.02, "{}", fit.rate);
    }

    #[test]
    fn empty_window() {
        let t = [0.0, 1.0, 2.0];
        let h = [0.5, 0.4, 0.3];
        assert!(matches!(fit_decay_rate(&t, &h), Err(Error::InsufficientDecay { .. })));
    }

    #[test]
    fn gaussian_relative_entropy() {
        let edges: Vec<f64> = (0..=4000).map(|i| -12.0 + 24.0 * i as f64 / 4000.0).collect();
        let grid = FvGrid::new(edges).unwrap();
        let g = |mu: f64| move |x: f64| (-0.5 * (x - mu) * (x - mu)).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let a = grid.project(g(0.0)).unwrap();
        let b = grid.project(g(0.5)).unwrap();
        let h = relative_entropy(&grid, &b, &a).unwrap();
        assert!((h - 0.125).abs() < 1e-5, "{h}");
        assert_eq!(relative_entropy(&grid, &a, &a).unwrap(), 0.0);
        assert!(matches!(
            relative_entropy(&grid, &a[1..], &a),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn stationary_start_stays_put() {
        let model = invgamma_fp_model(1.5, 1.0, 1.0).unwrap();
        let cfg = PdeConfig {
            n_cells: 256,
            t_end: Some(2.0),
            ..PdeConfig::default()
        };
        let run = evolve(&model, &InitialDatum::Steady, &cfg).unwrap();
        assert!(run.trace.h.iter().all(|&h| h <= 1e-10));
        assert!(run.final_sup_distance < 1e-8);
    }

    #[test]
    fn ou_rate_is_two() {
        let run = evolve(
            &ou_model().unwrap(),
            &InitialDatum::Gaussian { mu: 1.0, sigma: 1.0 },
            &PdeConfig::default(),
        )
        .unwrap();
        let rate = run.trace.fitted_rate().unwrap();
        assert!((rate - 2.0).abs() < 0.1, "{rate}");
        assert!(run.trace.is_monotone(1e-10));
        assert!(run.trace.mass_drift < 1e-10);
    }
}
