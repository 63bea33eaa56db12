//! Sweep ranges `a:b:step` (inclusive) or single values.

use std::fmt;
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep(pub Vec<f64>);

#[derive(Debug, PartialEq)]
pub struct SweepParseError(String);

impl fmt::Display for SweepParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SweepParseError {}

const MAX_POINTS: usize = 100_000;

// Drops the rounding noise of `a + i * step` so that 0.6 + 3 * 0.1 prints as 0.9.
fn tidy(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let digits = 12 - x.abs().log10().floor() as i32;
    if !(0..=300).contains(&digits) {
        return x;
    }
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

fn number(s: &str) -> Result<f64, SweepParseError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| SweepParseError(format!("`{s}` is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SweepParseError(format!("`{s}` is not finite")))
    }
}

impl FromStr for Sweep {
    type Err = SweepParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => Ok(Sweep(vec![number(v)?])),
            [a, b, step] => {
                let (a, b, step) = (number(a)?, number(b)?, number(step)?);
                if !(step > 0.0) {
                    return Err(SweepParseError(format!("step must be positive in `{s}`")));
                }
                if b < a {
                    return Err(SweepParseError(format!("empty range `{s}`")));
                }
                let count = ((b - a) / step + 1e-9).floor() as usize + 1;
                if count > MAX_POINTS {
                    return Err(SweepParseError(format!("`{s}` has more than {MAX_POINTS} points")));
                }
                Ok(Sweep((0..count).map(|i| tidy(a + i as f64 * step)).collect()))
            }
            _ => Err(SweepParseError(format!(
                "expected `value` or `start:stop:step`, got `{s}`"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_ranges() {
        let s: Sweep = "0.6:4:0.1".parse().unwrap();
        assert_eq!(s.0.len(), 35);
        assert_eq!(s.0[3], 0.9);
        assert_eq!(*s.0.last().unwrap(), 4.0);
        assert_eq!("2.5".parse::<Sweep>().unwrap().0, vec![2.5]);
        assert_eq!("1:1:0.5".parse::<Sweep>().unwrap().0, vec![1.0]);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "a", "1:2", "1:2:0", "2:1:0.1", "1:2:-1", "nan", "0:1e9:1e-3"] {
            assert!(bad.parse::<Sweep>().is_err(), "{bad}");
        }
    }
}
