//! Best weighted-Poincaré constants as the spectral gap of the discretized
//! Sturm–Liouville pencil `-(w f u')' = lambda f u` with natural boundary
//! conditions at the truncation points.

use crate::densities::DensityModel;
use crate::error::{Error, Result};
use crate::fp_models::WeightFunction;
use crate::quadrature::{integrate, Interval, QuadratureConfig};
use crate::verifiers::{dirichlet_form, entropy_functional, TestFunction};
use serde::Serialize;

/// Probability mass left out in each tail by the default grid.
pub const TAIL_MASS: f64 = 1e-9;
/// Minimum probability mass the truncated grid must carry.
pub const REQUIRED_MASS: f64 = 1.0 - 1e-8;
pub const MIN_INTERIOR: usize = 64;

// Resolution of the table used to place nodes; fixed so that grids of size n
// and 2n are nested.
const PLACEMENT_TABLE: usize = 1 << 15;

fn cell_config() -> QuadratureConfig {
    QuadratureConfig {
        rel_tol: 1e-11,
        abs_tol: f64::MIN_POSITIVE,
        max_subdivisions: 200,
        ..QuadratureConfig::default()
    }
}

fn cell_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    match integrate(f, Interval::new(a, b)?, &cell_config()) {
        Ok(r) => Ok(r.value),
        Err(Error::QuadratureFailure { value, .. }) => Ok(value),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug)]
pub struct SpectralProblem {
    pub model: DensityModel,
    pub weight: WeightFunction,
    /// Strictly increasing nodes; `grid.len() - 1` cells.
    pub grid: Vec<f64>,
    /// Number of nodes strictly inside the truncated interval.
    pub n_interior: usize,
    /// Probability mass between the first and last node.
    pub covered_mass: f64,
}

impl SpectralProblem {
    /// Problem on a mass-graded grid with `n_cells` cells.
    pub fn new(model: DensityModel, weight: WeightFunction, n_cells: usize) -> Result<Self> {
        if n_cells < MIN_INTERIOR + 1 {
            return Err(Error::ConfigError(format!(
                "need at least {} cells, got {n_cells}",
                MIN_INTERIOR + 1
            )));
        }
        let grid = graded_nodes(&model, n_cells, TAIL_MASS)?;
        Self::with_grid(model, weight, grid)
    }

    pub fn with_grid(model: DensityModel, weight: WeightFunction, grid: Vec<f64>) -> Result<Self> {
        if grid.len() < MIN_INTERIOR + 2 {
            return Err(Error::ConfigError(format!(
                "grid has {} interior nodes, need at least {MIN_INTERIOR}",
                grid.len().saturating_sub(2)
            )));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::ConfigError("grid must be finite and strictly increasing".into()));
        }
        let iv = model.interval();
        if !(iv.contains(grid[0]) && iv.contains(grid[grid.len() - 1])) {
            return Err(Error::ConfigError("grid leaves the support of the model".into()));
        }
        let (fa, sa) = model.cdf_pair(grid[0])?;
        let (fb, sb) = model.cdf_pair(grid[grid.len() - 1])?;
        // whichever form loses less precision
        let covered = (fb - fa).max(sa - sb);
        if covered < REQUIRED_MASS {
            return Err(Error::MassDeficit {
                covered,
                required: REQUIRED_MASS,
            });
        }
        Ok(SpectralProblem {
            n_interior: grid.len() - 2,
            model,
            weight,
            grid,
            covered_mass: covered,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.grid.len() - 1
    }
}

/// Nodes equidistributing `(F(x) + G(x)) / 2`, where `G` is a normalized
/// `asinh` (line) or `log` (half-line) coordinate, between the `tail_mass`
/// quantiles. Mixing in `G` keeps the tail cells geometrically graded.
pub fn graded_nodes(model: &DensityModel, n_cells: usize, tail_mass: f64) -> Result<Vec<f64>> {
    let a = model.quantile(tail_mass)?;
    let b = model.quantile(1.0 - tail_mass)?;
    let half_line = model.interval().lo == 0.0;
    let (center, scale) = if half_line {
        (0.0, 1.0)
    } else {
        let med = model.median()?;
        let iqr = model.quantile(0.75)? - model.quantile(0.25)?;
        (med, (0.5 * iqr).max(f64::MIN_POSITIVE))
    };
    let to_g = |x: f64| {
        if half_line {
            x.ln()
        } else {
            ((x - center) / scale).asinh()
        }
    };
    let from_g = |g: f64| if half_line { g.exp() } else { center + scale * g.sinh() };
    let (g0, g1) = (to_g(a), to_g(b));
    let m = PLACEMENT_TABLE;
    let gs: Vec<f64> = (0..=m).map(|j| g0 + (g1 - g0) * j as f64 / m as f64).collect();
    let mut xs: Vec<f64> = gs.iter().map(|&g| from_g(g)).collect();
    xs[0] = a;
    xs[m] = b;
    let mut cum = vec![0.0; m + 1];
    for j in 0..m {
        cum[j + 1] = cum[j] + cell_integral(|x| model.density(x), xs[j], xs[j + 1])?;
    }
    let total = cum[m];
    if !(total > 0.0) {
        return Err(Error::ConfigError("density has no mass on the placement table".into()));
    }
    let s: Vec<f64> = (0..=m)
        .map(|j| 0.5 * cum[j] / total + 0.5 * j as f64 / m as f64)
        .collect();
    let mut nodes = Vec::with_capacity(n_cells + 1);
    nodes.push(a);
    let mut j = 0;
    for k in 1..n_cells {
        let target = k as f64 / n_cells as f64;
        while s[j + 1] < target {
            j += 1;
        }
        let t = (target - s[j]) / (s[j + 1] - s[j]);
        let x = from_g(gs[j] + t * (gs[j + 1] - gs[j]));
        nodes.push(x);
    }
    nodes.push(b);
    if nodes.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::ConfigError(format!(
            "{n_cells} cells are too many for floating-point resolution of this grid"
        )));
    }
    Ok(nodes)
}

/// Symmetric tridiagonal matrix: `diag[i]`, `off[i] = A[i][i+1]`.
#[derive(Clone, Debug, Default)]
struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    fn zeros(n: usize) -> Self {
        Tridiagonal {
            diag: vec![0.0; n],
            off: vec![0.0; n - 1],
        }
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }
}

struct Pencil {
    stiffness: Tridiagonal,
    mass: Tridiagonal,
}

fn assemble(problem: &SpectralProblem) -> Result<Pencil> {
    let n = problem.grid.len();
    let mut k = Tridiagonal::zeros(n);
    let mut m = Tridiagonal::zeros(n);
    let (model, weight) = (&problem.model, &problem.weight);
    for i in 0..n - 1 {
        let (a, b) = (problem.grid[i], problem.grid[i + 1]);
        let h = b - a;
        let wf = cell_integral(|x| weight.eval(x) * model.density(x), a, b)?;
        let kc = wf / (h * h);
        if !kc.is_finite() {
            return Err(Error::EigenSolveFailure(format!(
                "stiffness is not finite on [{a:e}, {b:e}]"
            )));
        }
        k.diag[i] += kc;
        k.diag[i + 1] += kc;
        k.off[i] -= kc;
        let m00 = cell_integral(
            |x| {
                let t = (b - x) / h;
                model.density(x) * t * t
            },
            a,
            b,
        )?;
        let m11 = cell_integral(
            |x| {
                let t = (x - a) / h;
                model.density(x) * t * t
            },
            a,
            b,
        )?;
        let m01 = cell_integral(|x| model.density(x) * (x - a) * (b - x) / (h * h), a, b)?;
        m.diag[i] += m00;
        m.diag[i + 1] += m11;
        m.off[i] += m01;
    }
    Ok(Pencil { stiffness: k, mass: m })
}

/// Number of eigenvalues of the pencil below `sigma` (Sylvester inertia of `K - sigma M`).
fn count_below(p: &Pencil, sigma: f64) -> usize {
    let n = p.stiffness.diag.len();
    let mut count = 0;
    let mut u = 0.0;
    for i in 0..n {
        let d = p.stiffness.diag[i] - sigma * p.mass.diag[i];
        u = if i == 0 {
            d
        } else {
            let e = p.stiffness.off[i - 1] - sigma * p.mass.off[i - 1];
            d - e * e / u
        };
        if u == 0.0 {
            u = -f64::EPSILON * d.abs().max(f64::MIN_POSITIVE);
        }
        if u < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solves `(K - sigma M) x = rhs` by the Thomas recurrence.
fn shifted_solve(p: &Pencil, sigma: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 0..n {
        let diag = p.stiffness.diag[i] - sigma * p.mass.diag[i];
        let (lower, prev_c, prev_d) = if i == 0 {
            (0.0, 0.0, 0.0)
        } else {
            (p.stiffness.off[i - 1] - sigma * p.mass.off[i - 1], c[i - 1], d[i - 1])
        };
        let mut den = diag - lower * prev_c;
        if den == 0.0 {
            den = f64::EPSILON * diag.abs().max(f64::MIN_POSITIVE);
        }
        if i + 1 < n {
            c[i] = (p.stiffness.off[i] - sigma * p.mass.off[i]) / den;
        }
        d[i] = (rhs[i] - lower * prev_d) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// Removes the constant mode in the M inner product and normalizes.
fn deflate_normalize(p: &Pencil, v: &mut [f64], mass_ones: &[f64], total: f64) -> f64 {
    let c = dot(mass_ones, v) / total;
    v.iter_mut().for_each(|x| *x -= c);
    let norm = dot(v, &p.mass.apply(v)).sqrt();
    if norm > 0.0 && norm.is_finite() {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralResult {
    pub lambda1: f64,
    /// Nodal values of the eigenfunction, mean zero and unit variance under the truncated density.
    pub eigenfunction: Vec<f64>,
    pub grid: Vec<f64>,
    /// `v'Kv / v'Mv` for the returned eigenvector.
    pub discrete_rayleigh: f64,
    pub covered_mass: f64,
}

/// Smallest nonzero eigenvalue of the discretized weighted Sturm–Liouville problem.
pub fn poincare_best_constant(problem: &SpectralProblem) -> Result<SpectralResult> {
    let pencil = assemble(problem)?;
    let n = problem.grid.len();
    // bracket: count_below(lo) <= 1 < 2 <= count_below(hi)
    let mut hi = 1.0;
    let mut steps = 0;
    while count_below(&pencil, hi) < 2 {
        hi *= 4.0;
        steps += 1;
        if steps > 200 {
            return Err(Error::EigenSolveFailure("no second eigenvalue found".into()));
        }
    }
    let mut lo = hi / 4.0;
    if steps == 0 {
        lo = 0.0;
        let mut probe = hi / 4.0;
        while count_below(&pencil, probe) >= 2 {
            hi = probe;
            probe /= 4.0;
            steps += 1;
            if steps > 200 {
                return Err(Error::EigenSolveFailure("spectral gap below resolution".into()));
            }
        }
        lo = lo.max(probe);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-14 * hi {
            break;
        }
        if count_below(&pencil, mid) >= 2 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lambda1 = 0.5 * (lo + hi);

    let ones = vec![1.0; n];
    let mass_ones = pencil.mass.apply(&ones);
    let total: f64 = mass_ones.iter().sum();
    let mut v: Vec<f64> = problem.grid.iter().map(|&x| x.asinh()).collect();
    deflate_normalize(&pencil, &mut v, &mass_ones, total);
    let shift = lambda1 * (1.0 - 1e-9);
    for _ in 0..6 {
        let rhs = pencil.mass.apply(&v);
        let mut next = shifted_solve(&pencil, shift, &rhs);
        let norm = deflate_normalize(&pencil, &mut next, &mass_ones, total);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::EigenSolveFailure("inverse iteration broke down".into()));
        }
        v = next;
    }
    let kv = pencil.stiffness.apply(&v);
    let rq = dot(&v, &kv) / dot(&v, &pencil.mass.apply(&v));
    if !((rq - lambda1).abs() <= 1e-6 * lambda1.max(1e-300)) {
        return Err(Error::EigenSolveFailure(format!(
            "Rayleigh quotient {rq:e} of the eigenvector disagrees with lambda1 = {lambda1:e}"
        )));
    }
    // fix the sign: increasing at the right end
    if v[n - 1] < v[0] {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(SpectralResult {
        lambda1,
        eigenfunction: v,
        grid: problem.grid.clone(),
        discrete_rayleigh: rq,
        covered_mass: problem.covered_mass,
    })
}

/// `E[w phi'^2] / Var[phi]` under the truncated density for the piecewise-linear
/// interpolant of `values` on `grid`, integrated cell by cell.
pub fn rayleigh_quotient(model: &DensityModel, weight: &WeightFunction, grid: &[f64], values: &[f64]) -> Result<f64> {
    if grid.len() != values.len() || grid.len() < 2 {
        return Err(Error::GridMismatch(format!(
            "{} nodes but {} values",
            grid.len(),
            values.len()
        )));
    }
    let (mut energy, mut mass, mut first, mut second) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..grid.len() - 1 {
        let (a, b) = (grid[i], grid[i + 1]);
        let (va, vb) = (values[i], values[i + 1]);
        let slope = (vb - va) / (b - a);
        let interp = |x: f64| va + slope * (x - a);
        energy += slope * slope * cell_integral(|x| weight.eval(x) * model.density(x), a, b)?;
        mass += cell_integral(|x| model.density(x), a, b)?;
        first += cell_integral(|x| model.density(x) * interp(x), a, b)?;
        second += cell_integral(|x| model.density(x) * interp(x).powi(2), a, b)?;
    }
    let var = second / mass - (first / mass).powi(2);
    Ok((energy / mass) / var)
}

/// Largest observed ratio `Ent[(1 + c phi)^2] / E[w ((1 + c phi)')^2]`.
#[derive(Clone, Debug, Serialize)]
pub struct LsiProbe {
    pub ratio: f64,
    pub fn_id: String,
    pub scale: f64,
    /// Functions left out: unbounded, on another interval, with a divergent or
    /// vanishing energy, or whose quadrature did not converge.
    pub skipped: Vec<String>,
}

pub const PROBE_SCALES: [f64; 3] = [0.25, 1.0, 4.0];

/// Lower bound on the best log-Sobolev constant for `weight` from a test-function corpus.
///
/// Each `phi` enters as `1 + c phi`, since `Ent[(c phi)^2]` and the energy scale
/// alike in `c`.
pub fn lsi_ratio_probe(model: &DensityModel, weight: &WeightFunction, corpus: &[TestFunction]) -> Result<LsiProbe> {
    let config = QuadratureConfig::default();
    let mut best = LsiProbe {
        ratio: 0.0,
        fn_id: String::new(),
        scale: f64::NAN,
        skipped: Vec::new(),
    };
    for f in corpus {
        let usable =
            f.bounded && f.domain == model.interval() && model.integrable_growth(weight.growth + 2.0 * f.deriv_growth);
        if !usable {
            best.skipped.push(f.id.clone());
            continue;
        }
        for c in PROBE_SCALES {
            let g = f.affine(1.0, c);
            let energy = dirichlet_form(model, weight, &g, &config)?;
            if energy.exhausted || !(energy.value > 0.0) {
                best.skipped.push(g.id.clone());
                continue;
            }
            let ent = entropy_functional(model, &g, &config)?;
            if ent.exhausted {
                best.skipped.push(g.id.clone());
                continue;
            }
            let r = ent.value / energy.value;
            if r > best.ratio {
                best.ratio = r;
                best.fn_id = f.id.clone();
                best.scale = c;
            }
        }
    }
    if best.fn_id.is_empty() {
        return Err(Error::ConfigError("no usable test function in the corpus".into()));
    }
    Ok(best)
}
