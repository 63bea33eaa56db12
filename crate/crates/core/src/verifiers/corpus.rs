//! Test functions with analytic derivatives and known growth at infinity.

use crate::quadrature::Interval;
use crate::RealFn;
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub struct TestFunction {
    pub id: String,
    pub domain: Interval,
    pub bounded: bool,
    pub linear: bool,
    pub vanishes_at: Option<f64>,
    /// `|phi(x)| ~ |x|^growth` at infinity.
    pub growth: f64,
    /// `|phi'(x)| ~ |x|^deriv_growth` at infinity (`-inf` for faster than polynomial decay).
    pub deriv_growth: f64,
    phi: RealFn,
    dphi: RealFn,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("id", &self.id)
            .field("bounded", &self.bounded)
            .field("growth", &self.growth)
            .field("deriv_growth", &self.deriv_growth)
            .finish()
    }
}

impl TestFunction {
    pub fn new(
        id: impl Into<String>,
        domain: Interval,
        growth: f64,
        deriv_growth: f64,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dphi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TestFunction {
            id: id.into(),
            domain,
            bounded: growth <= 0.0,
            linear: false,
            vanishes_at: None,
            growth,
            deriv_growth,
            phi: Arc::new(phi),
            dphi: Arc::new(dphi),
        }
    }

    pub fn linear(mut self) -> Self {
        self.linear = true;
        self
    }

    pub fn vanishing_at(mut self, x: f64) -> Self {
        self.vanishes_at = Some(x);
        self
    }

    /// Marks a slowly growing function (such as a logarithm) as unbounded.
    pub fn unbounded(mut self) -> Self {
        self.bounded = false;
        self
    }

    #[inline]
    pub fn phi(&self, x: f64) -> f64 {
        (self.phi)(x)
    }

    #[inline]
    pub fn dphi(&self, x: f64) -> f64 {
        (self.dphi)(x)
    }

    pub fn constant(c: f64, domain: Interval) -> Self {
        let mut f = Self::new(
            format!("const({c})"),
            domain,
            0.0,
            f64::NEG_INFINITY,
            move |_| c,
            |_| 0.0,
        );
        f.linear = true;
        f
    }

    /// `a + b phi`.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        let (phi, dphi) = (self.phi.clone(), self.dphi.clone());
        TestFunction {
            id: format!("{a}+{b}*{}", self.id),
            vanishes_at: None,
            phi: Arc::new(move |x| a + b * phi(x)),
            dphi: Arc::new(move |x| b * dphi(x)),
            ..self.clone()
        }
    }

    /// Largest relative mismatch between `dphi` and a central difference of `phi` at `xs`.
    pub fn derivative_mismatch(&self, xs: &[f64]) -> f64 {
        xs.iter()
            .map(|&x| {
                let h = 1e-5 * (1.0 + x.abs());
                let fd = (self.phi(x + h) - self.phi(x - h)) / (2.0 * h);
                let d = self.dphi(x);
                (fd - d).abs() / d.abs().max(1e-3)
            })
            .fold(0.0, f64::max)
    }
}

// x / (1 + x^2) and its derivative, safe for huge |x|.
fn ratio(x: f64) -> f64 {
    if x.abs() > 1.0 {
        1.0 / (x + 1.0 / x)
    } else {
        x / (1.0 + x * x)
    }
}

fn ratio_derivative(x: f64) -> f64 {
    if x.abs() > 1.0 {
        let r2 = 1.0 / (x * x);
        r2 * (r2 - 1.0) / ((1.0 + r2) * (1.0 + r2))
    } else {
        let s = 1.0 + x * x;
        (1.0 - x * x) / (s * s)
    }
}

/// Functions on the real line.
pub fn real_line_corpus() -> Vec<TestFunction> {
    let r = Interval::REAL;
    vec![
        TestFunction::new("x", r, 1.0, 0.0, |x| x, |_| 1.0)
            .linear()
            .vanishing_at(0.0),
        TestFunction::new("x/(1+x^2)", r, -1.0, -2.0, ratio, ratio_derivative).vanishing_at(0.0),
        TestFunction::new("arctan", r, 0.0, -2.0, f64::atan, |x| {
            if x.abs() > 1e150 {
                0.0
            } else {
                1.0 / (1.0 + x * x)
            }
        })
        .vanishing_at(0.0),
        TestFunction::new("tanh", r, 0.0, f64::NEG_INFINITY, f64::tanh, |x| {
            let c = x.cosh();
            1.0 / (c * c)
        })
        .vanishing_at(0.0),
        TestFunction::new("sin", r, 0.0, 0.0, f64::sin, f64::cos).vanishing_at(0.0),
        TestFunction::new(
            "x^3/(1+x^2)",
            r,
            1.0,
            0.0,
            |x| x - ratio(x),
            |x| 1.0 - ratio_derivative(x),
        )
        .vanishing_at(0.0),
    ]
}

/// Functions on the positive half-line.
pub fn half_line_corpus() -> Vec<TestFunction> {
    let p = Interval::POSITIVE;
    vec![
        TestFunction::new("x", p, 1.0, 0.0, |x| x, |_| 1.0)
            .linear()
            .vanishing_at(0.0),
        TestFunction::new("log(1+x)", p, 1e-9, -1.0, f64::ln_1p, |x| 1.0 / (1.0 + x))
            .unbounded()
            .vanishing_at(0.0),
        TestFunction::new(
            "x/(1+x)",
            p,
            0.0,
            -2.0,
            |x| x / (1.0 + x),
            |x| 1.0 / ((1.0 + x) * (1.0 + x)),
        )
        .vanishing_at(0.0),
        TestFunction::new(
            "sqrt(x)/(1+sqrt(x))",
            p,
            0.0,
            -1.5,
            |x| {
                let s = x.sqrt();
                s / (1.0 + s)
            },
            |x| {
                let s = x.sqrt();
                1.0 / (2.0 * s * (1.0 + s) * (1.0 + s))
            },
        )
        .vanishing_at(0.0),
        TestFunction::new(
            "1-exp(-x)",
            p,
            0.0,
            f64::NEG_INFINITY,
            |x| -(-x).exp_m1(),
            |x| (-x).exp(),
        )
        .vanishing_at(0.0),
    ]
}

/// Both default corpora.
pub fn default_corpus() -> Vec<TestFunction> {
    let mut all = real_line_corpus();
    all.extend(half_line_corpus());
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        let xs: Vec<f64> = (0..128).map(|i| -20.0 + 40.0 * (i as f64 + 0.5) / 128.0).collect();
        for f in real_line_corpus() {
            assert!(f.derivative_mismatch(&xs) < 1e-6, "{}", f.id);
        }
        let xs: Vec<f64> = (0..128).map(|i| 0.05 * 1.06f64.powi(i)).collect();
        for f in half_line_corpus() {
            assert!(f.derivative_mismatch(&xs) < 1e-6, "{}", f.id);
        }
    }

    #[test]
    fn huge_arguments_stay_finite() {
        for f in real_line_corpus() {
            for &x in &[-1e200, 1e200, 1e308] {
                assert!(f.phi(x).is_finite() && f.dphi(x).is_finite(), "{} at {x}", f.id);
            }
        }
    }

    #[test]
    fn tags() {
        let c = real_line_corpus();
        assert_eq!(c.len(), 6);
        assert!(c[0].linear && !c[0].bounded);
        assert!(c[2].bounded);
        assert!(!half_line_corpus()[1].bounded);
    }
}
