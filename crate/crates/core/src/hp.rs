//! Hodrick–Prescott trend.
//!
//! The trend `x` minimizes `Σ (y_k − x_k)² + λ Σ (Δ²x_k)²`. Its first-order
//! conditions form the pentadiagonal SPD system
//!
//! ```text
//! (I + λ DᵀD) x = y
//! ```
//!
//! with `D` the `(n−2)×n` second-difference operator. The system is factored
//! as `L·diag(d)·Lᵀ` with `L` unit lower triangular of bandwidth 2, so the
//! solve is O(n).

use crate::error::{Error, Result};

/// Smoothing parameter for monthly data.
pub const MONTHLY_LAMBDA: f64 = 14_400.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TrendDecomposition {
    pub trend: Vec<f64>,
    pub residuals: Vec<f64>,
    pub lambda: f64,
}

impl TrendDecomposition {
    /// First differences of the trend, `g_k = X_k − X_{k−1}`.
    pub fn growth(&self) -> Result<Vec<f64>> {
        trend_growth(&self.trend)
    }
}

pub fn hp_trend(y: &[f64], lambda: f64) -> Result<TrendDecomposition> {
    let n = y.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, have: n });
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("lambda must be positive and finite, got {lambda}")));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite value in HP filter input".into()));
    }
    let band = PentaBand::hp(n, lambda);
    let trend = band.solve(y);
    let residuals = y.iter().zip(&trend).map(|(a, b)| a - b).collect();
    Ok(TrendDecomposition { trend, residuals, lambda })
}

pub fn trend_growth(trend: &[f64]) -> Result<Vec<f64>> {
    if trend.len() < 2 {
        return Err(Error::TooShort { needed: 2, have: trend.len() });
    }
    Ok(trend.windows(2).map(|w| w[1] - w[0]).collect())
}

/// Lower half of a symmetric matrix with bandwidth 2.
struct PentaBand {
    diag: Vec<f64>,
    sub1: Vec<f64>,
    sub2: Vec<f64>,
}

impl PentaBand {
    fn hp(n: usize, lambda: f64) -> Self {
        let mut diag = vec![1.0; n];
        let mut sub1 = vec![0.0; n - 1];
        let mut sub2 = vec![0.0; n - 2];
        // Each row of D is (1, −2, 1) at columns r, r+1, r+2.
        const STENCIL: [f64; 3] = [1.0, -2.0, 1.0];
        for r in 0..n - 2 {
            for a in 0..3 {
                diag[r + a] += lambda * STENCIL[a] * STENCIL[a];
            }
            sub1[r] += lambda * STENCIL[1] * STENCIL[0];
            sub1[r + 1] += lambda * STENCIL[2] * STENCIL[1];
            sub2[r] += lambda * STENCIL[2] * STENCIL[0];
        }
        PentaBand { diag, sub1, sub2 }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        // LDLᵀ: l1[i] = L[i+1][i], l2[i] = L[i+2][i]
        let mut d = vec![0.0; n];
        let mut l1 = vec![0.0; n.saturating_sub(1)];
        let mut l2 = vec![0.0; n.saturating_sub(2)];
        for i in 0..n {
            let mut di = self.diag[i];
            if i >= 1 {
                di -= l1[i - 1] * l1[i - 1] * d[i - 1];
            }
            if i >= 2 {
                di -= l2[i - 2] * l2[i - 2] * d[i - 2];
            }
            d[i] = di;
            if i + 1 < n {
                let mut v = self.sub1[i];
                if i >= 1 {
                    v -= l2[i - 1] * l1[i - 1] * d[i - 1];
                }
                l1[i] = v / di;
            }
            if i + 2 < n {
                l2[i] = self.sub2[i] / di;
            }
        }
        // L z = rhs
        let mut x = rhs.to_vec();
        for i in 0..n {
            if i >= 1 {
                x[i] -= l1[i - 1] * x[i - 1];
            }
            if i >= 2 {
                x[i] -= l2[i - 2] * x[i - 2];
            }
        }
        for i in 0..n {
            x[i] /= d[i];
        }
        // Lᵀ x = z
        for i in (0..n).rev() {
            if i + 1 < n {
                x[i] -= l1[i] * x[i + 1];
            }
            if i + 2 < n {
                x[i] -= l2[i] * x[i + 2];
            }
        }
        x
    }
}
