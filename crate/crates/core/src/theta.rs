//! Theta-method benchmark with θ ∈ {0, 2}.
//!
//! The θ=0 line is the least-squares trend on `(1, t−1)`. The θ=2 series
//! doubles the curvature around that trend and is smoothed by simple
//! exponential smoothing, whose forecast is flat in `h`. The forecast is the
//! average of the extrapolated line and the smoothed level.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ols::{fit, DesignMatrix};
use crate::store::Day;

pub const GAMMA: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaFit {
    pub a0: f64,
    pub b0: f64,
    pub a2: f64,
    pub b2: f64,
    pub theta2_series: Vec<f64>,
    pub ses_state: f64,
    pub gamma: f64,
    pub n: usize,
    /// The first observation; everything is fitted on `y − origin` so that a
    /// constant series reproduces itself exactly.
    origin: f64,
    a0_shifted: f64,
    ses_shifted: f64,
}

pub fn theta_fit(series: &[f64]) -> Result<ThetaFit> {
    theta_fit_with(series, GAMMA)
}

pub fn theta_fit_with(series: &[f64], gamma: f64) -> Result<ThetaFit> {
    let n = series.len();
    if n < 3 {
        return Err(Error::TooShort { needed: 3, have: n });
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidInput(format!("smoothing parameter must be in (0, 1], got {gamma}")));
    }
    let origin = series[0];
    let z: Vec<f64> = series.iter().map(|v| v - origin).collect();
    let t: Vec<f64> = (0..n).map(|k| k as f64).collect();
    let x = DesignMatrix::new(vec![("t-1".into(), t.clone())], true)?;
    let line = |theta: f64| -> Result<(f64, f64)> {
        let y: Vec<f64> = z.iter().map(|v| (1.0 - theta) * v).collect();
        let f = fit(&x, &y)?;
        Ok((f.coefficients[0], f.coefficients[1]))
    };
    let (a0, b0) = line(0.0)?;
    let (a2, b2) = line(2.0)?;
    let shifted: Vec<f64> = z.iter().zip(&t).map(|(y, tk)| a2 + b2 * tk + 2.0 * y).collect();
    let ses = shifted[1..].iter().fold(shifted[0], |s, x| gamma * x + (1.0 - gamma) * s);
    Ok(ThetaFit {
        a0: a0 + origin,
        b0,
        a2: a2 - origin,
        b2,
        theta2_series: shifted.iter().map(|v| v + origin).collect(),
        ses_state: ses + origin,
        gamma,
        n,
        origin,
        a0_shifted: a0,
        ses_shifted: ses,
    })
}

impl ThetaFit {
    /// The θ=0 series, i.e. the fitted trend line.
    pub fn line(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.a0 + self.b0 * k as f64).collect()
    }

    pub fn forecast(&self, h: usize) -> Result<f64> {
        if !(1..=2).contains(&h) {
            return Err(Error::InvalidInput(format!("theta horizon must be 1 or 2, got {h}")));
        }
        let trend = self.a0_shifted + self.b0 * (self.n + h - 1) as f64;
        Ok(self.origin + 0.5 * (trend + self.ses_shifted))
    }
}

/// Two steps ahead while the previous quarter is unreleased, one step after.
pub fn theta_horizon(day: Day) -> usize {
    if day.previous_quarter_released() {
        1
    } else {
        2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaInput {
    /// Apply the method to q-o-q growth directly.
    #[default]
    Growth,
    /// Apply it to a level index rebuilt from growth, then convert back.
    Level,
}

/// Growth nowcast `h` quarters past the end of `growth`.
pub fn theta_nowcast(growth: &[f64], h: usize, input: ThetaInput) -> Result<f64> {
    match input {
        ThetaInput::Growth => theta_fit(growth)?.forecast(h),
        ThetaInput::Level => {
            let mut level = Vec::with_capacity(growth.len() + 1);
            level.push(100.0);
            for g in growth {
                level.push(level[level.len() - 1] * (1.0 + g / 100.0));
            }
            let f = theta_fit(&level)?;
            let target = f.forecast(h)?;
            let previous = if h == 1 { level[level.len() - 1] } else { f.forecast(h - 1)? };
            Ok((target / previous - 1.0) * 100.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FIXTURE: [f64; 8] = [0.6, 0.2, -0.1, 0.8, 0.4, 0.5, -0.3, 0.7];

    /// Closed-form simple regression plus a literal SES loop.
    fn oracle(y: &[f64]) -> (f64, f64, f64) {
        let n = y.len() as f64;
        let t: Vec<f64> = (0..y.len()).map(|k| k as f64).collect();
        let tm = t.iter().sum::<f64>() / n;
        let ym = y.iter().sum::<f64>() / n;
        let sxy: f64 = t.iter().zip(y).map(|(a, b)| (a - tm) * (b - ym)).sum();
        let sxx: f64 = t.iter().map(|a| (a - tm) * (a - tm)).sum();
        let b0 = sxy / sxx;
        let a0 = ym - b0 * tm;
        let z: Vec<f64> = y.iter().zip(&t).map(|(v, tk)| 2.0 * v - (a0 + b0 * tk)).collect();
        let mut s = z[0];
        for x in &z[1..] {
            s = 0.3 * x + 0.7 * s;
        }
        (a0, b0, s)
    }

    #[test]
    fn constant_series() {
        let f = theta_fit(&[1.25; 10]).unwrap();
        assert!((f.a0 - 1.25).abs() < 1e-14 && f.b0.abs() < 1e-14);
        assert!(f.theta2_series.iter().all(|v| (v - 1.25).abs() < 1e-14));
        assert!((f.ses_state - 1.25).abs() < 1e-14);
        for c in [1.25, 0.1, -0.7, 3.3] {
            let g = theta_fit(&[c; 10]).unwrap();
            assert_eq!(g.forecast(1).unwrap(), c);
            assert_eq!(g.forecast(2).unwrap(), c);
        }
    }

    #[test]
    fn exact_line_is_reproduced_by_theta2() {
        let y: Vec<f64> = (0..12).map(|k| 0.3 + 0.05 * k as f64).collect();
        let f = theta_fit(&y).unwrap();
        assert!((f.a2 + 0.3).abs() < 1e-10 && (f.b2 + 0.05).abs() < 1e-10);
        for (a, b) in f.theta2_series.iter().zip(&y) {
            assert!((a - b).abs() < 1e-10);
        }
        for (a, b) in f.line().iter().zip(&y) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn fixture_matches_recursion() {
        let f = theta_fit(&FIXTURE).unwrap();
        let (a0, b0, s) = oracle(&FIXTURE);
        assert!((f.ses_state - s).abs() <= 1e-12);
        for h in 1..=2 {
            let want = 0.5 * ((a0 + b0 * (8 + h - 1) as f64) + s);
            assert!((f.forecast(h).unwrap() - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn rejects_short_series_and_bad_horizon() {
        assert!(theta_fit(&[1.0, 2.0]).is_err());
        assert!(theta_fit(&FIXTURE).unwrap().forecast(3).is_err());
    }

    #[test]
    fn horizon_by_day() {
        assert_eq!(theta_horizon(Day::D0), 2);
        assert_eq!(theta_horizon(Day::D30), 2);
        assert_eq!(theta_horizon(Day::D60), 1);
        assert_eq!(theta_horizon(Day::D100), 1);
    }

    #[test]
    fn level_mode_on_flat_level() {
        for h in 1..=2 {
            assert!(theta_nowcast(&[0.0; 20], h, ThetaInput::Level).unwrap().abs() < 1e-12);
        }
        assert_eq!(
            theta_nowcast(&[0.5; 20], 2, ThetaInput::Growth).unwrap(),
            theta_fit(&[0.5; 20]).unwrap().forecast(2).unwrap()
        );
    }

    proptest! {
        #[test]
        fn translation_and_step_identities(y in prop::collection::vec(-3f64..3.0, 3..40), c in -10f64..10.0) {
            let f = theta_fit(&y).unwrap();
            let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
            let g = theta_fit(&shifted).unwrap();
            for h in 1..=2 {
                prop_assert!((g.forecast(h).unwrap() - f.forecast(h).unwrap() - c).abs() <= 1e-9);
            }
            let step = f.forecast(2).unwrap() - f.forecast(1).unwrap();
            prop_assert!((step - 0.5 * f.b0).abs() <= 1e-12);
        }
    }
}
