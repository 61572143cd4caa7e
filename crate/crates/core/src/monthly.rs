//! Completion of the jagged edge of monthly indicators.
//!
//! Smooth series are extended with the last HP-trend growth. Noisy series
//! use a three-month moving average plus three months of average trend
//! growth, projected from the center of the average. Goods-and-services
//! trade first borrows extra months from the goods-only series through a
//! year-on-year regression.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::hp_trend;
use crate::ols::{fit, DesignMatrix};
use crate::store::{MonthIndex, MonthlySeries, NoiseClass};

/// Longest gap a smooth series may be extended over. The default calendar
/// leaves four months missing for some smooth series at day 0.
pub const MAX_SMOOTH_GAP: i64 = 4;

/// Overlapping year-on-year months needed to estimate the trade proxy regression.
pub const MIN_PROXY_OVERLAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForecastMethod {
    TrendStep,
    MovingAverage,
    ProxyRegression,
}

impl ForecastMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ForecastMethod::TrendStep => "trend_step",
            ForecastMethod::MovingAverage => "moving_average",
            ForecastMethod::ProxyRegression => "proxy_regression",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonthForecast {
    pub value: f64,
    pub method: ForecastMethod,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletedMonthlySeries {
    pub observed: MonthlySeries,
    pub forecasts: BTreeMap<MonthIndex, MonthForecast>,
}

impl CompletedMonthlySeries {
    fn observed_only(observed: &MonthlySeries) -> Self {
        CompletedMonthlySeries { observed: observed.clone(), forecasts: BTreeMap::new() }
    }

    /// Observation if there is one, otherwise the forecast.
    pub fn value(&self, month: MonthIndex) -> Option<f64> {
        self.observed.get(month).or_else(|| self.forecasts.get(&month).map(|f| f.value))
    }

    pub fn method(&self, month: MonthIndex) -> Option<ForecastMethod> {
        self.forecasts.get(&month).map(|f| f.method)
    }

    pub fn last_month(&self) -> Option<MonthIndex> {
        self.forecasts.keys().next_back().copied().or_else(|| self.observed.last_month())
    }

    pub fn id(&self) -> &str {
        &self.observed.id
    }
}

/// Months between the last observation and `target`; zero or negative when
/// nothing is missing.
fn gap(series: &MonthlySeries, target: MonthIndex) -> Result<i64> {
    let last = series.last_month().ok_or_else(|| Error::series(&series.id, "no observations"))?;
    Ok(target.months_since(last))
}

/// `Y_last + h·g` for `h = 1..=missing`.
pub fn trend_step_extrapolate(last: f64, growth: f64, missing: usize) -> Vec<f64> {
    (1..=missing).map(|h| last + h as f64 * growth).collect()
}

/// Mean of `obs` plus `(j+1)` times the mean of `growths` for the `j`-th
/// missing month; the average is centered one month behind the last
/// observation.
pub fn ma_extrapolate(obs: [f64; 3], growths: [f64; 3], missing: usize) -> Vec<f64> {
    let base = (obs[0] + obs[1] + obs[2]) / 3.0;
    let drift = (growths[0] + growths[1] + growths[2]) / 3.0;
    (1..=missing).map(|j| base + (j + 1) as f64 * drift).collect()
}

pub fn complete_smooth(series: &MonthlySeries, target: MonthIndex, lambda: f64) -> Result<CompletedMonthlySeries> {
    if series.len() < 4 {
        return Err(Error::series(&series.id, format!("needs at least 4 observations, has {}", series.len())));
    }
    let h = gap(series, target)?;
    if h <= 0 {
        return Ok(CompletedMonthlySeries::observed_only(series));
    }
    if h > MAX_SMOOTH_GAP {
        return Err(Error::series(
            &series.id,
            format!("{h} months missing before {target}, at most {MAX_SMOOTH_GAP} allowed"),
        ));
    }
    let trend = hp_trend(series.values(), lambda)?.trend;
    let g = trend[trend.len() - 1] - trend[trend.len() - 2];
    let last = series.values()[series.len() - 1];
    Ok(with_forecasts(series, trend_step_extrapolate(last, g, h as usize), ForecastMethod::TrendStep))
}

pub fn complete_noisy(series: &MonthlySeries, target: MonthIndex, lambda: f64) -> Result<CompletedMonthlySeries> {
    if series.len() < 6 {
        return Err(Error::series(&series.id, format!("needs at least 6 observations, has {}", series.len())));
    }
    let h = gap(series, target)?;
    if h <= 0 {
        return Ok(CompletedMonthlySeries::observed_only(series));
    }
    let values = series.values();
    let growth = hp_trend(values, lambda)?.growth()?;
    let n = values.len();
    let m = growth.len();
    let path = ma_extrapolate(
        [values[n - 3], values[n - 2], values[n - 1]],
        [growth[m - 3], growth[m - 2], growth[m - 1]],
        h as usize,
    );
    Ok(with_forecasts(series, path, ForecastMethod::MovingAverage))
}

/// Dispatches on the series' noise class.
pub fn complete(series: &MonthlySeries, target: MonthIndex, lambda: f64) -> Result<CompletedMonthlySeries> {
    match series.noise_class {
        NoiseClass::Smooth => complete_smooth(series, target, lambda),
        NoiseClass::Noisy => complete_noisy(series, target, lambda),
    }
}

fn with_forecasts(series: &MonthlySeries, path: Vec<f64>, method: ForecastMethod) -> CompletedMonthlySeries {
    let last = series.last_month().expect("non-empty");
    let forecasts = path
        .into_iter()
        .enumerate()
        .map(|(j, value)| (last.offset(j as i64 + 1), MonthForecast { value, method }))
        .collect();
    CompletedMonthlySeries { observed: series.clone(), forecasts }
}

/// `(V_m / V_{m−12} − 1) × 100`.
pub fn monthly_yoy(series: &MonthlySeries, month: MonthIndex) -> Result<f64> {
    let now = series.get(month).ok_or_else(|| Error::series(&series.id, format!("no observation at {month}")))?;
    let base_month = month.offset(-12);
    let base =
        series.get(base_month).ok_or_else(|| Error::series(&series.id, format!("no observation at {base_month}")))?;
    if base == 0.0 {
        return Err(Error::ZeroBase(format!("{} at {base_month}", series.id)));
    }
    Ok((now / base - 1.0) * 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxyFit {
    pub alpha: f64,
    pub beta: f64,
    pub overlap: usize,
}

/// Regresses the target's year-on-year growth on the proxy's over every
/// month where both are defined.
pub fn proxy_regression(target: &MonthlySeries, proxy: &MonthlySeries) -> Result<ProxyFit> {
    let (mut gy, mut gx) = (Vec::new(), Vec::new());
    for (month, _) in target.iter() {
        let (Ok(y), Ok(x)) = (monthly_yoy(target, month), monthly_yoy(proxy, month)) else {
            continue;
        };
        gy.push(y);
        gx.push(x);
    }
    if gy.len() < MIN_PROXY_OVERLAP {
        return Err(Error::series(
            &target.id,
            format!("{} overlapping y-o-y months with {}, need {MIN_PROXY_OVERLAP}", gy.len(), proxy.id),
        ));
    }
    let overlap = gy.len();
    let x = DesignMatrix::new(vec![(proxy.id.clone(), gx)], true)?;
    let f = fit(&x, &gy)?;
    Ok(ProxyFit { alpha: f.coefficients[0], beta: f.coefficients[1], overlap })
}

impl ProxyFit {
    /// `T_{m−12} × (1 + (α + β·proxy_growth)/100)`.
    pub fn apply(&self, base: f64, proxy_growth: f64) -> f64 {
        base * (1.0 + (self.alpha + self.beta * proxy_growth) / 100.0)
    }
}

pub fn proxy_month_forecast(target: &MonthlySeries, proxy: &MonthlySeries, month: MonthIndex) -> Result<f64> {
    let fitted = proxy_regression(target, proxy)?;
    proxy_forecast_with(&fitted, target, proxy, month)
}

fn proxy_forecast_with(
    fitted: &ProxyFit,
    target: &MonthlySeries,
    proxy: &MonthlySeries,
    month: MonthIndex,
) -> Result<f64> {
    let base_month = month.offset(-12);
    let base =
        target.get(base_month).ok_or_else(|| Error::series(&target.id, format!("no observation at {base_month}")))?;
    if base == 0.0 {
        return Err(Error::ZeroBase(format!("{} at {base_month}", target.id)));
    }
    Ok(fitted.apply(base, monthly_yoy(proxy, month)?))
}

/// Months the proxy has beyond the target's last observation (up to
/// `target_month`) are filled by the proxy regression; the rest of the gap
/// by the noisy rule applied to the augmented series.
pub fn complete_trade(
    series: &MonthlySeries,
    proxy: &MonthlySeries,
    target_month: MonthIndex,
    lambda: f64,
) -> Result<CompletedMonthlySeries> {
    let last = series.last_month().ok_or_else(|| Error::series(&series.id, "no observations"))?;
    let lead_end = proxy.last_month().map_or(last, |p| p.min(target_month));
    if lead_end <= last {
        return complete_noisy(series, target_month, lambda);
    }
    let fitted = proxy_regression(series, proxy)?;
    let mut values = series.values().to_vec();
    let mut forecasts = BTreeMap::new();
    let mut month = last.succ();
    while month <= lead_end {
        let augmented = series.with_values(series.start(), values.clone());
        let v = proxy_forecast_with(&fitted, &augmented, proxy, month)?;
        values.push(v);
        forecasts.insert(month, MonthForecast { value: v, method: ForecastMethod::ProxyRegression });
        month = month.succ();
    }
    let augmented = series.with_values(series.start(), values);
    let tail = complete_noisy(&augmented, target_month, lambda)?;
    forecasts.extend(tail.forecasts);
    Ok(CompletedMonthlySeries { observed: series.clone(), forecasts })
}

/// Real series `nominal_m / deflator_m` over the nominal series' months.
pub fn deflate(nominal: &MonthlySeries, deflator: &MonthlySeries) -> Result<MonthlySeries> {
    let mut out = Vec::with_capacity(nominal.len());
    for (month, v) in nominal.iter() {
        let d = deflator.get(month).ok_or_else(|| {
            Error::series(&deflator.id, format!("no observation at {month} to deflate {}", nominal.id))
        })?;
        if d == 0.0 {
            return Err(Error::ZeroBase(format!("{} at {month}", deflator.id)));
        }
        out.push(v / d);
    }
    Ok(nominal.with_values(nominal.start(), out))
}
