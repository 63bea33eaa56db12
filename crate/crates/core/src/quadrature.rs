//! Globally adaptive Gauss–Kronrod (7/15) integration on bounded, semi-infinite
//! and doubly infinite intervals.
//!
//! Infinite ends are mapped onto finite parameter ranges before the adaptive
//! loop starts. With [`Substitution::ReciprocalMap`] (the default) the real
//! line is split at `|x| = 1` and each tail is integrated in `u = 1/x`, which
//! turns a polynomial tail `x^{-p}` into the algebraic endpoint behaviour
//! `u^{p-2}` that bisection resolves in a bounded number of steps.
//!
//! The subinterval with the largest error estimate is bisected until the summed
//! estimate drops below `max(abs_tol, rel_tol * |value|)`.

use crate::densities::DensityModel;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    pub const POSITIVE: Interval = Interval {
        lo: 0.0,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::ConfigError(format!("empty interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn contains_closure(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Substitution {
    /// Only bounded intervals are accepted.
    None,
    /// `x = tan t` on the line, `x = a + u/(1-u)` on half-lines.
    TanMap,
    /// Split at `|x| = 1` and integrate tails in `u = 1/x`.
    ReciprocalMap,
    /// `x = a - ln u` on half-lines, for exponentially decaying integrands.
    ExpMap,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub substitution: Substitution,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_subdivisions: 4096,
            substitution: Substitution::ReciprocalMap,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_substitution(mut self, substitution: Substitution) -> Self {
        self.substitution = substitution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::ConfigError("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions < 8 {
            return Err(Error::ConfigError("max_subdivisions must be at least 8".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub err_estimate: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub(crate) struct RuleResult {
    pub kronrod: f64,
    pub gauss: f64,
    pub abs: f64,
}

impl RuleResult {
    fn error(&self) -> f64 {
        (self.kronrod - self.gauss).abs().max(50.0 * f64::EPSILON * self.abs)
    }
}

/// One 15-point Kronrod / 7-point Gauss evaluation on `[a, b]`.
pub(crate) fn gauss_kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<RuleResult> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand { x })
        }
    };
    let fc = eval(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(RuleResult {
        kronrod: kronrod * half,
        gauss: gauss * half,
        abs: abs * half.abs(),
    })
}

/// How one finite parameter range maps back onto a piece of the original interval.
#[derive(Clone, Copy, Debug)]
enum Piece {
    /// x = t
    Identity,
    /// x = c / u, u in (0, 1], |c| >= 1
    Reciprocal { c: f64 },
    /// x = tan t on (-pi/2, pi/2)
    Tan,
    /// x = a + s * u / (1 - u), u in [0, 1)
    Rational { a: f64, s: f64 },
    /// x = a - s * ln u, u in (0, 1]
    Exponential { a: f64, s: f64 },
}

impl Piece {
    #[inline]
    fn map(&self, t: f64) -> (f64, f64) {
        match *self {
            Piece::Identity => (t, 1.0),
            Piece::Reciprocal { c } => (c / t, c.abs() / (t * t)),
            Piece::Tan => {
                let c = t.cos();
                (t.tan(), 1.0 / (c * c))
            }
            Piece::Rational { a, s } => {
                let w = 1.0 - t;
                (a + s * t / w, 1.0 / (w * w))
            }
            Piece::Exponential { a, s } => (a - s * t.ln(), 1.0 / t),
        }
    }
}

/// Splits `[lo, hi]` (ends possibly infinite) into mapped pieces with finite parameter ranges.
fn decompose(lo: f64, hi: f64, substitution: Substitution, out: &mut Vec<(Piece, f64, f64)>) -> Result<()> {
    if lo.is_finite() && hi.is_finite() {
        out.push((Piece::Identity, lo, hi));
        return Ok(());
    }
    match substitution {
        Substitution::None => Err(Error::ConfigError("infinite interval needs a substitution".into())),
        Substitution::ReciprocalMap => {
            if lo.is_infinite() && hi.is_infinite() {
                decompose(lo, -1.0, substitution, out)?;
                out.push((Piece::Identity, -1.0, 1.0));
                decompose(1.0, hi, substitution, out)
            } else if hi.is_infinite() {
                if lo < 1.0 {
                    out.push((Piece::Identity, lo, 1.0));
                    out.push((Piece::Reciprocal { c: 1.0 }, 0.0, 1.0));
                } else {
                    out.push((Piece::Reciprocal { c: lo }, 0.0, 1.0));
                }
                Ok(())
            } else {
                if hi > -1.0 {
                    out.push((Piece::Identity, -1.0, hi));
                    out.push((Piece::Reciprocal { c: -1.0 }, 0.0, 1.0));
                } else {
                    out.push((Piece::Reciprocal { c: hi }, 0.0, 1.0));
                }
                Ok(())
            }
        }
        Substitution::TanMap => {
            if lo.is_infinite() && hi.is_infinite() {
                out.push((Piece::Tan, -std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2));
            } else if hi.is_infinite() {
                out.push((Piece::Rational { a: lo, s: 1.0 }, 0.0, 1.0));
            } else {
                out.push((Piece::Rational { a: hi, s: -1.0 }, 0.0, 1.0));
            }
            Ok(())
        }
        Substitution::ExpMap => {
            if lo.is_infinite() && hi.is_infinite() {
                out.push((Piece::Exponential { a: 0.0, s: -1.0 }, 0.0, 1.0));
                out.push((Piece::Exponential { a: 0.0, s: 1.0 }, 0.0, 1.0));
            } else if hi.is_infinite() {
                out.push((Piece::Exponential { a: lo, s: 1.0 }, 0.0, 1.0));
            } else {
                out.push((Piece::Exponential { a: hi, s: -1.0 }, 0.0, 1.0));
            }
            Ok(())
        }
    }
}

struct Segment {
    piece: usize,
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, interval: Interval, config: &QuadratureConfig) -> Result<Integral> {
    integrate_with_breaks(f, interval, &[], config)
}

/// Like [`integrate`], with the interval first split at interior `breaks` (kinks, medians).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    interval: Interval,
    breaks: &[f64],
    config: &QuadratureConfig,
) -> Result<Integral> {
    config.validate()?;
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&b| interval.contains(b)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(interval.lo);
    edges.extend(cuts);
    edges.push(interval.hi);

    let mut pieces = Vec::new();
    for w in edges.windows(2) {
        decompose(w[0], w[1], config.substitution, &mut pieces)?;
    }

    let mapped = |piece: &Piece| {
        let piece = *piece;
        let f = &f;
        move |t: f64| {
            let (x, jac) = piece.map(t);
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v * jac
            }
        }
    };

    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    let mut evaluations = 0usize;
    for (i, (piece, a, b)) in pieces.iter().enumerate() {
        let r = gauss_kronrod15(&mapped(piece), *a, *b)?;
        evaluations += 15;
        heap.push(Segment {
            piece: i,
            a: *a,
            b: *b,
            value: r.kronrod,
            err: r.error(),
        });
    }

    let mut value: f64 = heap.iter().map(|s| s.value).sum();
    let mut err: f64 = heap.iter().map(|s| s.err).sum();
    loop {
        let tol = config.abs_tol.max(config.rel_tol * value.abs());
        if err <= tol {
            break;
        }
        if heap.len() + frozen.len() >= config.max_subdivisions {
            return Err(Error::QuadratureFailure {
                value,
                err,
                intervals: heap.len() + frozen.len(),
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::QuadratureFailure {
                value,
                err,
                intervals: frozen.len(),
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) <= 4.0 * f64::EPSILON * mid.abs() {
            frozen.push(worst);
            continue;
        }
        let g = mapped(&pieces[worst.piece].0);
        let left = gauss_kronrod15(&g, worst.a, mid)?;
        let right = gauss_kronrod15(&g, mid, worst.b)?;
        evaluations += 30;
        value += left.kronrod + right.kronrod - worst.value;
        err += left.error() + right.error() - worst.err;
        heap.push(Segment {
            piece: worst.piece,
            a: worst.a,
            b: mid,
            value: left.kronrod,
            err: left.error(),
        });
        heap.push(Segment {
            piece: worst.piece,
            a: mid,
            b: worst.b,
            value: right.kronrod,
            err: right.error(),
        });
        // resynchronise the running sums now and then
        if evaluations.is_multiple_of(3000) {
            value = heap.iter().chain(frozen.iter()).map(|s| s.value).sum();
            err = heap.iter().chain(frozen.iter()).map(|s| s.err).sum();
        }
    }
    let mut segs: Vec<&Segment> = heap.iter().chain(frozen.iter()).collect();
    segs.sort_by(|a, b| a.piece.cmp(&b.piece).then(a.a.total_cmp(&b.a)));
    let value = segs.iter().map(|s| s.value).sum();
    let err_estimate = segs.iter().map(|s| s.err).sum();
    Ok(Integral {
        value,
        err_estimate,
        evaluations,
        intervals: segs.len(),
    })
}

/// `E[g(X)]` for `X` distributed as `model`.
///
/// The integrand is `g(x) pdf(x)`, with the product taken as zero wherever the
/// density underflows so that growing `g` cannot produce `inf * 0`.
pub fn expectation<G: Fn(f64) -> f64>(model: &DensityModel, g: G, config: &QuadratureConfig) -> Result<Integral> {
    expectation_with_breaks(model, g, &[], config)
}

pub fn expectation_with_breaks<G: Fn(f64) -> f64>(
    model: &DensityModel,
    g: G,
    breaks: &[f64],
    config: &QuadratureConfig,
) -> Result<Integral> {
    integrate_with_breaks(
        |x| {
            let p = model.density(x);
            if p == 0.0 {
                0.0
            } else {
                g(x) * p
            }
        },
        model.interval(),
        breaks,
        config,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_mass() {
        let r = integrate(
            |x| (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
            Interval::REAL,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn lorentzian_gives_pi() {
        let r = integrate(|x| 1.0 / (1.0 + x * x), Interval::REAL, &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(r.value, PI, max_relative = 1e-11);
        assert!(r.err_estimate <= 1e-10 * PI);
    }

    #[test]
    fn inverse_gamma_kernel_on_half_line() {
        // substitution u = 1/x turns it into the integral of e^{-u}
        let r = integrate(
            |x| if x > 0.0 { x.powi(-2) * (-1.0 / x).exp() } else { 0.0 },
            Interval::POSITIVE,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-11);
    }

    #[test]
    fn finite_interval_polynomial_is_exact() {
        let r = integrate(
            |x| 3.0 * x * x,
            Interval::new(0.0, 2.0).unwrap(),
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value, 8.0, max_relative = 1e-14);
        assert_eq!(r.intervals, 1);
    }

    #[test]
    fn all_substitutions_agree_on_half_line() {
        for sub in [Substitution::TanMap, Substitution::ReciprocalMap, Substitution::ExpMap] {
            let cfg = QuadratureConfig::default().with_substitution(sub);
            let r = integrate(|x| (-x).exp() * x, Interval::new(0.0, f64::INFINITY).unwrap(), &cfg).unwrap();
            assert_relative_eq!(r.value, 1.0, max_relative = 1e-10);
            let r = integrate(
                |x| (x).exp() * x * x,
                Interval::new(f64::NEG_INFINITY, 0.0).unwrap(),
                &cfg,
            )
            .unwrap();
            assert_relative_eq!(r.value, 2.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn breaks_handle_kinks() {
        let cfg = QuadratureConfig::default();
        let r = integrate_with_breaks(|x| (x - 0.3).abs(), Interval::new(0.0, 1.0).unwrap(), &[0.3], &cfg).unwrap();
        assert_relative_eq!(r.value, 0.5 * (0.09 + 0.49), max_relative = 1e-14);
    }

    #[test]
    fn nan_aborts_the_cell() {
        let err = integrate(
            |x| if x > 0.5 { f64::NAN } else { x },
            Interval::new(0.0, 1.0).unwrap(),
            &QuadratureConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadratureConfig {
            max_subdivisions: 8,
            ..QuadratureConfig::default()
        };
        let err = integrate(|x| (1.0 / x).sin(), Interval::new(1e-6, 1.0).unwrap(), &cfg).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
    }

    #[test]
    fn infinite_interval_without_substitution_is_a_config_error() {
        let cfg = QuadratureConfig::default().with_substitution(Substitution::None);
        assert!(matches!(
            integrate(|x| (-x * x).exp(), Interval::REAL, &cfg),
            Err(Error::ConfigError(_))
        ));
    }
}
