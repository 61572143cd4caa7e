//! Ordinary least squares with classical inference statistics.
//!
//! Coefficients come from a Householder QR of the design matrix; the normal
//! equations are never formed. Standard errors use `s²(XᵀX)⁻¹ = s²R⁻¹R⁻ᵀ`
//! with `s² = RSS/(n−k)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use crate::error::{Error, Result};

pub const INTERCEPT: &str = "const";

/// Below this ratio of `|R_jj|` to the column norm, column `j` is treated as
/// a linear combination of the columns before it.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    intercept: bool,
    rows: usize,
}

impl DesignMatrix {
    pub fn new(columns: Vec<(String, Vec<f64>)>, intercept: bool) -> Result<Self> {
        let rows = columns.first().map(|c| c.1.len()).unwrap_or(0);
        let mut names = Vec::with_capacity(columns.len() + 1);
        let mut cols = Vec::with_capacity(columns.len() + 1);
        if intercept {
            names.push(INTERCEPT.to_string());
            cols.push(vec![1.0; rows]);
        }
        for (name, col) in columns {
            if col.len() != rows {
                return Err(Error::InvalidInput(format!("column {name} has {} rows, expected {rows}", col.len())));
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("column {name} has non-finite entries")));
            }
            if names.contains(&name) {
                return Err(Error::InvalidInput(format!("duplicate column name {name}")));
            }
            names.push(name);
            cols.push(col);
        }
        if names.is_empty() {
            return Err(Error::InvalidInput("design matrix has no columns".into()));
        }
        Ok(DesignMatrix { names, columns: cols, intercept, rows })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn has_intercept(&self) -> bool {
        self.intercept
    }

    fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols(), |i, j| self.columns[j][i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub residuals: Vec<f64>,
    fitted: Vec<f64>,
    pub r2: f64,
    pub adj_r2: f64,
    pub resid_std_error: f64,
    /// `None` when the model has no slope coefficients.
    pub f_stat: Option<f64>,
    pub n_obs: usize,
    pub n_params: usize,
    pub intercept: bool,
}

pub fn fit(x: &DesignMatrix, y: &[f64]) -> Result<RegressionFit> {
    let n = x.rows();
    let k = x.cols();
    if y.len() != n {
        return Err(Error::InvalidInput(format!("dependent variable has {} rows, design has {n}", y.len())));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("dependent variable has non-finite entries".into()));
    }
    if n <= k {
        return Err(Error::TooShort { needed: k + 1, have: n });
    }

    let qr = x.to_matrix().qr();
    let r = qr.r();
    for j in 0..k {
        let norm = x.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
        if r[(j, j)].abs() <= RANK_TOL * norm || norm == 0.0 {
            return Err(collinearity(x, &r, j));
        }
    }
    let q = qr.q();
    let yv = DVector::from_column_slice(y);
    let qty = q.transpose() * &yv;
    let beta = r.solve_upper_triangular(&qty).expect("full rank checked");
    let r_inv = r.solve_upper_triangular(&DMatrix::identity(k, k)).expect("full rank checked");

    let coefficients: Vec<f64> = beta.iter().copied().collect();
    let fitted: Vec<f64> = (0..n).map(|i| (0..k).map(|j| x.column(j)[i] * coefficients[j]).sum()).collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();

    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let dof = (n - k) as f64;
    let s2 = rss / dof;
    // diag(R⁻¹R⁻ᵀ)_j = Σ_c R⁻¹[j, c]²
    let std_errors: Vec<f64> =
        (0..k).map(|j| (s2 * (0..k).map(|c| r_inv[(j, c)].powi(2)).sum::<f64>()).sqrt()).collect();

    let tss = if x.has_intercept() {
        let mean = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    let r2 = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };
    let (adj_r2, f_stat) = if x.has_intercept() {
        let adj = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / dof;
        let f = (k > 1).then(|| (r2 / (k as f64 - 1.0)) / ((1.0 - r2) / dof));
        (adj, f)
    } else {
        let adj = 1.0 - (1.0 - r2) * n as f64 / dof;
        (adj, Some((r2 / k as f64) / ((1.0 - r2) / dof)))
    };

    Ok(RegressionFit {
        names: x.names().to_vec(),
        coefficients,
        std_errors,
        residuals,
        fitted,
        r2,
        adj_r2,
        resid_std_error: s2.sqrt(),
        f_stat,
        n_obs: n,
        n_params: k,
        intercept: x.has_intercept(),
    })
}

fn collinearity(x: &DesignMatrix, r: &DMatrix<f64>, j: usize) -> Error {
    let names = x.names();
    if j == 0 {
        return Error::RankDeficient { column: names[0].clone(), with: "zero".into() };
    }
    // Coefficients of column j on the earlier ones: R[..j,..j] c = R[..j, j].
    let head = r.view((0, 0), (j, j)).into_owned();
    let rhs = r.view((0, j), (j, 1)).into_owned();
    let involved: Vec<String> = match head.solve_upper_triangular(&rhs) {
        Some(c) => {
            let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (0..j).filter(|&i| c[i].abs() > 1e-8 * scale).map(|i| names[i].clone()).collect()
        }
        None => names[..j].to_vec(),
    };
    Error::RankDeficient { column: names[j].clone(), with: involved.join(", ") }
}

impl RegressionFit {
    pub fn fitted(&self) -> Vec<f64> {
        self.fitted.clone()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|i| self.coefficients[i])
    }

    pub fn std_error(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|i| self.std_errors[i])
    }

    pub fn intercept_value(&self) -> f64 {
        self.coefficient(INTERCEPT).unwrap_or(0.0)
    }

    /// `intercept + Σ β̂ᵢ·xᵢ`, with regressor values supplied by `lookup`.
    pub fn predict_with(&self, lookup: impl Fn(&str) -> Option<f64>) -> Result<f64> {
        let mut acc = 0.0;
        for (name, beta) in self.names.iter().zip(&self.coefficients) {
            if self.intercept && name == INTERCEPT {
                acc += beta;
                continue;
            }
            let v = lookup(name).ok_or_else(|| Error::MissingRegressor(name.clone()))?;
            acc += beta * v;
        }
        Ok(acc)
    }

    pub fn predict(&self, row: &BTreeMap<String, f64>) -> Result<f64> {
        self.predict_with(|name| row.get(name).copied())
    }

    /// Two-sided p-values of the t statistics with `n − k` degrees of freedom.
    pub fn p_values(&self) -> Vec<f64> {
        let dof = (self.n_obs - self.n_params) as f64;
        let t = StudentsT::new(0.0, 1.0, dof).expect("positive dof");
        self.coefficients
            .iter()
            .zip(&self.std_errors)
            .map(|(b, se)| if *se > 0.0 { 2.0 * (1.0 - t.cdf((b / se).abs())) } else { 0.0 })
            .collect()
    }

    pub fn f_p_value(&self) -> Option<f64> {
        let f = self.f_stat?;
        let k1 = if self.intercept { self.n_params - 1 } else { self.n_params } as f64;
        let dist = FisherSnedecor::new(k1, (self.n_obs - self.n_params) as f64).ok()?;
        Some(if f.is_finite() { 1.0 - dist.cdf(f) } else { 0.0 })
    }
}

pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

/// Renders fits side by side: one column per fit, each coefficient followed
/// by its standard error in parentheses, then the summary statistics.
/// `rows` pairs coefficient names with display labels.
pub fn render_table(fits: &[(String, &RegressionFit)], rows: &[(&str, &str)]) -> String {
    const W: usize = 14;
    let mut out = String::new();
    let _ = write!(out, "{:<20}", "");
    for (label, _) in fits {
        let _ = write!(out, "{label:>W$}");
    }
    out.push('\n');
    for (name, label) in rows {
        if !fits.iter().any(|(_, f)| f.index_of(name).is_some()) {
            continue;
        }
        let _ = write!(out, "{label:<20}");
        for (_, f) in fits {
            let cell = match f.index_of(name) {
                Some(i) => format!("{:.3}{:<3}", f.coefficients[i], significance_stars(f.p_values()[i])),
                None => String::new(),
            };
            let _ = write!(out, "{cell:>W$}");
        }
        out.push('\n');
        let _ = write!(out, "{:<20}", "");
        for (_, f) in fits {
            let cell = f.index_of(name).map(|i| format!("({:.3})   ", f.std_errors[i])).unwrap_or_default();
            let _ = write!(out, "{cell:>W$}");
        }
        out.push('\n');
    }
    let stat = |out: &mut String, label: &str, g: &dyn Fn(&RegressionFit) -> String| {
        let _ = write!(out, "{label:<20}");
        for (_, f) in fits {
            let _ = write!(out, "{:>W$}", g(f));
        }
        out.push('\n');
    };
    stat(&mut out, "Observations", &|f| format!("{}   ", f.n_obs));
    stat(&mut out, "R2", &|f| format!("{:.3}   ", f.r2));
    stat(&mut out, "Adjusted R2", &|f| format!("{:.3}   ", f.adj_r2));
    stat(&mut out, "Residual Std. Error", &|f| format!("{:.3}   ", f.resid_std_error));
    stat(&mut out, "F statistic", &|f| match (f.f_stat, f.f_p_value()) {
        (Some(v), Some(p)) => format!("{v:.1}{:<3}", significance_stars(p)),
        _ => "-   ".into(),
    });
    out.push_str("p-values: *p<0.1; **p<0.05; ***p<0.01\n");
    out
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn perfect_line() {
        let x = DesignMatrix::new(vec![("x".into(), vec![1.0, 2.0, 3.0])], true).unwrap();
        let f = fit(&x, &[1.0, 2.0, 3.0]).unwrap();
        assert!(f.coefficient(INTERCEPT).unwrap().abs() < 1e-12);
        assert!((f.coefficient("x").unwrap() - 1.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        assert!(f.residuals.iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn constant_regressor_duplicates_intercept() {
        let x = DesignMatrix::new(vec![("x".into(), vec![2.0; 5])], true).unwrap();
        match fit(&x, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap_err() {
            Error::RankDeficient { column, with } => {
                assert_eq!(column, "x");
                assert_eq!(with, INTERCEPT);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn collinear_columns_are_named() {
        let a = vec![1.0, 2.0, 4.0, 3.0, 7.0, 1.0];
        let b = vec![0.5, 1.0, -1.0, 2.0, 0.0, 3.0];
        let c: Vec<f64> = a.iter().zip(&b).map(|(p, q)| 2.0 * p - q).collect();
        let x = DesignMatrix::new(vec![("a".into(), a), ("b".into(), b), ("c".into(), c)], true).unwrap();
        match fit(&x, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap_err() {
            Error::RankDeficient { column, with } => {
                assert_eq!(column, "c");
                assert_eq!(with, "a, b");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn too_few_rows() {
        let x = DesignMatrix::new(vec![("x".into(), vec![1.0, 2.0])], true).unwrap();
        assert!(matches!(fit(&x, &[1.0, 2.0]), Err(Error::TooShort { .. })));
    }

    #[test]
    fn design_validation() {
        assert!(DesignMatrix::new(vec![("x".into(), vec![1.0, f64::NAN])], true).is_err());
        assert!(DesignMatrix::new(vec![("x".into(), vec![1.0]), ("x".into(), vec![2.0])], false).is_err());
        assert!(DesignMatrix::new(vec![("x".into(), vec![1.0]), ("y".into(), vec![2.0, 3.0])], false).is_err());
    }

    #[test]
    fn matches_normal_equation_oracle_50x4() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 50;
        let cols: Vec<Vec<f64>> = (0..3).map(|_| (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| 0.5 + cols[0][i] - 0.3 * cols[1][i] + 2.0 * cols[2][i] + rng.random_range(-1.0..1.0))
            .collect();
        let x = DesignMatrix::new(cols.iter().enumerate().map(|(j, c)| (format!("x{j}"), c.clone())).collect(), true)
            .unwrap();
        let f = fit(&x, &y).unwrap();
        let mut full = vec![vec![1.0; n]];
        full.extend(cols);
        let o = oracle::normal_equations(&full, &y);
        for j in 0..4 {
            assert!(rel(f.coefficients[j], o.beta[j]) < 1e-8);
            assert!(rel(f.std_errors[j], o.se[j]) < 1e-8);
        }
        assert!(rel(f.r2, o.r2) < 1e-8);
        assert!(rel(f.adj_r2, o.adj_r2) < 1e-8);
        assert!(rel(f.resid_std_error, o.sigma) < 1e-8);
        assert!(rel(f.f_stat.unwrap(), o.f) < 1e-8);
    }

    #[test]
    fn predict_examples() {
        // Model 1 coefficients from the reference estimation.
        let f = RegressionFit {
            names: vec![INTERCEPT.into(), "sum".into(), "esi_c".into()],
            coefficients: vec![0.736, 0.497, 0.055],
            std_errors: vec![0.0; 3],
            residuals: vec![],
            fitted: vec![],
            r2: 0.0,
            adj_r2: 0.0,
            resid_std_error: 0.0,
            f_stat: None,
            n_obs: 10,
            n_params: 3,
            intercept: true,
        };
        let row = |s: f64, e: f64| BTreeMap::from([("sum".to_string(), s), ("esi_c".to_string(), e)]);
        assert!((f.predict(&row(1.0, 0.0)).unwrap() - 1.233).abs() < 1e-12);
        assert_eq!(f.predict(&row(0.0, 0.0)).unwrap(), 0.736);
        let lhs = f.predict(&row(1.0, 2.0)).unwrap() + f.predict(&row(-3.0, 0.5)).unwrap() - 0.736;
        assert!((lhs - f.predict(&row(-2.0, 2.5)).unwrap()).abs() < 1e-12);
        let missing = BTreeMap::from([("sum".to_string(), 1.0)]);
        assert!(matches!(f.predict(&missing), Err(Error::MissingRegressor(n)) if n == "esi_c"));
    }

    #[test]
    fn stars_thresholds() {
        assert_eq!(significance_stars(0.005), "***");
        assert_eq!(significance_stars(0.03), "**");
        assert_eq!(significance_stars(0.07), "*");
        assert_eq!(significance_stars(0.5), "");
    }

    #[test]
    fn render_has_table_rows() {
        let x = DesignMatrix::new(vec![("x".into(), vec![1.0, 2.0, 3.0, 4.0, 6.0])], true).unwrap();
        let f = fit(&x, &[1.1, 1.9, 3.2, 3.9, 6.1]).unwrap();
        let s = render_table(&[("1".into(), &f)], &[("x", "x"), (INTERCEPT, "Constant")]);
        assert!(s.contains("Constant"));
        assert!(s.contains("Residual Std. Error"));
        assert!(s.contains("F statistic"));
    }

    proptest! {
        #[test]
        fn residuals_orthogonal_to_columns(seed in 0u64..1000, n in 8usize..60, k in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cols: Vec<(String, Vec<f64>)> = (0..k)
                .map(|j| (format!("x{j}"), (0..n).map(|_| rng.random_range(-3.0..3.0)).collect()))
                .collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let x = DesignMatrix::new(cols, true).unwrap();
            let f = fit(&x, &y).unwrap();
            let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            for j in 0..x.cols() {
                let dot: f64 = x.column(j).iter().zip(&f.residuals).map(|(a, b)| a * b).sum();
                prop_assert!(dot.abs() <= 1e-8 * ynorm);
            }
            prop_assert!(f.adj_r2 <= f.r2);
            let fitted = f.fitted();
            for i in 0..n {
                prop_assert!((fitted[i] + f.residuals[i] - y[i]).abs() <= 4.0 * f64::EPSILON * y[i].abs().max(fitted[i].abs()));
            }
        }
    }
}
