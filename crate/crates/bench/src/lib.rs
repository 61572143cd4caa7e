//! Inputs shared by the benchmarks.

use nowcast_core::synthetic::{generate, SyntheticConfig};
use nowcast_core::{Dataset, DesignMatrix};

/// The shipped synthetic dataset.
pub fn synthetic_dataset() -> Dataset {
    generate(&SyntheticConfig::default()).expect("default synthetic config is valid")
}

/// A trending series of length `n` with a deterministic wiggle.
pub fn wiggly_series(n: usize) -> Vec<f64> {
    (0..n).map(|k| 100.0 + 0.2 * k as f64 + (k as f64 * 0.7).sin() * 3.0).collect()
}

/// `n` rows with `k` regressors and an intercept, plus a response.
pub fn regression_problem(n: usize, k: usize) -> (DesignMatrix, Vec<f64>) {
    let cols: Vec<(String, Vec<f64>)> =
        (0..k).map(|j| (format!("x{j}"), (0..n).map(|i| ((i * (j + 3)) as f64 * 0.37).sin()).collect())).collect();
    let y = (0..n).map(|i| 0.5 + cols.iter().map(|c| c.1[i]).sum::<f64>() + (i as f64 * 1.3).cos() * 0.1).collect();
    (DesignMatrix::new(cols, true).expect("columns share a length"), y)
}
