//! Quarterly regressors for the bridge models.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monthly::{complete, complete_trade, deflate, CompletedMonthlySeries, ForecastMethod};
use crate::ols::{fit, DesignMatrix, RegressionFit};
use crate::store::{Day, MonthIndex, MonthlySeries, QuarterIndex, QuarterlySeries, Snapshot};

pub const GDP: &str = "GDP_QOQ";

/// Estimation quarters required by the trade-volume regression.
pub const MIN_TRADE_QUARTERS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regressor {
    Sum,
    EsiC,
    Ice,
    Ipi,
    Cem,
    Car,
    Atm,
    Exp,
    Imp,
    Cepr,
}

impl Regressor {
    pub const ALL: [Regressor; 10] = [
        Regressor::Sum,
        Regressor::EsiC,
        Regressor::Ice,
        Regressor::Ipi,
        Regressor::Cem,
        Regressor::Car,
        Regressor::Atm,
        Regressor::Exp,
        Regressor::Imp,
        Regressor::Cepr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Regressor::Sum => "sum",
            Regressor::EsiC => "esi_c",
            Regressor::Ice => "ice",
            Regressor::Ipi => "ipi",
            Regressor::Cem => "cem",
            Regressor::Car => "car",
            Regressor::Atm => "atm",
            Regressor::Exp => "exp",
            Regressor::Imp => "imp",
            Regressor::Cepr => "cepr",
        }
    }

    pub fn from_name(name: &str) -> Option<Regressor> {
        Regressor::ALL.into_iter().find(|r| r.name() == name)
    }
}

impl fmt::Display for Regressor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which past GDP growths enter `sum`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumLag {
    /// `gdp_{t−1} + gdp_{t−2} + gdp_{t−3}`
    Three,
    /// `gdp_{t−2} + gdp_{t−3}`, used while `gdp_{t−1}` is unreleased.
    Two,
}

impl SumLag {
    pub fn for_day(day: Day) -> SumLag {
        if day.previous_quarter_released() {
            SumLag::Three
        } else {
            SumLag::Two
        }
    }

    fn lags(self) -> &'static [i64] {
        match self {
            SumLag::Three => &[1, 2, 3],
            SumLag::Two => &[2, 3],
        }
    }
}

pub fn mean3(values: [f64; 3]) -> f64 {
    (values[0] + values[1] + values[2]) / 3.0
}

pub fn quarterly_mean(series: &CompletedMonthlySeries, t: QuarterIndex) -> Result<f64> {
    let mut v = [0.0; 3];
    for (i, slot) in v.iter_mut().enumerate() {
        let month = t.month(i as u8 + 1);
        *slot = series.value(month).ok_or_else(|| Error::series(series.id(), format!("no value at {month}")))?;
    }
    Ok(mean3(v))
}

/// `(now / base − 1) × 100`.
pub fn yoy_growth(now: f64, base: f64) -> Result<f64> {
    if base == 0.0 {
        return Err(Error::ZeroBase("year-on-year base".into()));
    }
    Ok((now / base - 1.0) * 100.0)
}

pub fn quarterly_yoy(series: &QuarterlySeries, t: QuarterIndex) -> Result<f64> {
    let now = series.get(t).ok_or_else(|| Error::series(&series.id, format!("no value at {t}")))?;
    let base_q = t.offset(-4);
    let base = series.get(base_q).ok_or_else(|| Error::series(&series.id, format!("no value at {base_q}")))?;
    yoy_growth(now, base).map_err(|_| Error::ZeroBase(format!("{} at {base_q}", series.id)))
}

pub fn sum_regressor(gdp: &QuarterlySeries, t: QuarterIndex, lag: SumLag) -> Result<f64> {
    lag.lags()
        .iter()
        .map(|&k| {
            let q = t.offset(-k);
            gdp.get(q).ok_or_else(|| Error::series(&gdp.id, format!("growth for {q} not released")))
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TradeKind {
    Exports,
    Imports,
}

impl TradeKind {
    /// (goods and services, goods only, NQA volume, deflator)
    pub fn ids(self) -> (&'static str, &'static str, &'static str, &'static str) {
        match self {
            TradeKind::Exports => ("EXGS", "EXG", "EXP", "DEF_exports"),
            TradeKind::Imports => ("IMGS", "IMG", "IMP", "DEF_imports"),
        }
    }

    pub fn regressor(self) -> Regressor {
        match self {
            TradeKind::Exports => Regressor::Exp,
            TradeKind::Imports => Regressor::Imp,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeNowcast {
    /// Year-on-year volume growth, percent.
    pub growth: f64,
    pub level: f64,
    pub fit: RegressionFit,
}

/// Quarterly means of a completed series, for every quarter it fully covers.
fn quarterly_means(series: &CompletedMonthlySeries) -> BTreeMap<QuarterIndex, f64> {
    let mut out = BTreeMap::new();
    let first = series.observed.start();
    let Some(last) = series.last_month() else {
        return out;
    };
    let first_q = if first.position() == 1 { first.quarter() } else { first.quarter().succ() };
    let last_q = if last.position() == 3 { last.quarter() } else { last.quarter().pred() };
    if first_q > last_q {
        return out;
    }
    for q in first_q.range_inclusive(last_q) {
        if let Ok(v) = quarterly_mean(series, q) {
            out.insert(q, v);
        }
    }
    out
}

fn yoy_map(means: &BTreeMap<QuarterIndex, f64>, q: QuarterIndex) -> Option<f64> {
    let now = means.get(&q)?;
    let base = means.get(&q.offset(-4))?;
    yoy_growth(*now, *base).ok()
}

/// Deflator lag in the trade regression: one quarter once the previous
/// quarter's national accounts are out, two before that.
pub fn deflator_lag(day: Day) -> i64 {
    if day.previous_quarter_released() {
        1
    } else {
        2
    }
}

/// Regresses NQA volume growth on nominal trade growth, lagged deflator
/// growth and oil growth over every visible quarter, then applies the fit to
/// quarter `t` using the completed nominal series.
pub fn trade_volume_nowcast(
    kind: TradeKind,
    snapshot: &Snapshot,
    nominal: &CompletedMonthlySeries,
    oil: &CompletedMonthlySeries,
) -> Result<TradeNowcast> {
    let (_, _, volume_id, def_id) = kind.ids();
    let t = snapshot.quarter;
    let volume = snapshot.quarterly(volume_id)?;
    let def = snapshot.quarterly(def_id)?;
    let lag = deflator_lag(snapshot.day);
    let nominal_q = quarterly_means(nominal);
    let oil_q = quarterly_means(oil);

    let row = |q: QuarterIndex| -> Option<[f64; 3]> {
        let d = quarterly_yoy(def, q.offset(-lag)).ok()?;
        Some([yoy_map(&nominal_q, q)?, d, yoy_map(&oil_q, q)?])
    };

    let (mut y, mut xs) = (Vec::new(), [Vec::new(), Vec::new(), Vec::new()]);
    for (q, _) in volume.iter() {
        if q >= t {
            break;
        }
        let (Ok(g), Some(r)) = (quarterly_yoy(volume, q), row(q)) else {
            continue;
        };
        y.push(g);
        for (col, v) in xs.iter_mut().zip(r) {
            col.push(v);
        }
    }
    if y.len() < MIN_TRADE_QUARTERS {
        return Err(Error::series(
            volume_id,
            format!("{} estimation quarters for the volume regression, need {MIN_TRADE_QUARTERS}", y.len()),
        ));
    }
    let [x1, x2, x3] = xs;
    let design = DesignMatrix::new(vec![("nominal".into(), x1), ("def".into(), x2), ("oil".into(), x3)], true)?;
    let fitted = fit(&design, &y)?;
    let r = row(t).ok_or_else(|| Error::series(volume_id, format!("regressors for {t} unavailable")))?;
    let growth = fitted.predict_with(|name| match name {
        "nominal" => Some(r[0]),
        "def" => Some(r[1]),
        "oil" => Some(r[2]),
        _ => None,
    })?;
    let anchor_q = t.offset(-4);
    let anchor = volume.get(anchor_q).ok_or_else(|| Error::series(volume_id, format!("no value at {anchor_q}")))?;
    Ok(TradeNowcast { growth, level: trade_level(anchor, growth), fit: fitted })
}

/// `V_{t−4} × (1 + g/100)`.
pub fn trade_level(anchor: f64, growth: f64) -> f64 {
    anchor * (1.0 + growth / 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressorRow {
    pub quarter: QuarterIndex,
    /// Realized growth, when released in the snapshot.
    pub gdp: Option<f64>,
    pub values: BTreeMap<Regressor, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressorSet {
    pub quarter: QuarterIndex,
    pub day: Day,
    pub sum_lag: SumLag,
    pub rows: Vec<RegressorRow>,
    /// Forecast months and their methods, per completed monthly series.
    pub forecast_months: BTreeMap<String, Vec<(MonthIndex, ForecastMethod)>>,
    pub trade: BTreeMap<Regressor, TradeNowcast>,
}

impl RegressorSet {
    pub fn row(&self, q: QuarterIndex) -> Option<&RegressorRow> {
        let first = self.rows.first()?.quarter;
        let i = q.quarters_since(first);
        if i < 0 {
            return None;
        }
        self.rows.get(i as usize)
    }

    pub fn target_row(&self) -> &RegressorRow {
        self.rows.last().expect("rows run through the nowcast quarter")
    }

    /// Rows with released GDP, oldest first.
    pub fn released_rows(&self) -> impl Iterator<Item = &RegressorRow> {
        self.rows.iter().filter(|r| r.gdp.is_some() && r.quarter < self.quarter)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeOptions {
    pub sample_start: QuarterIndex,
    pub lambda: f64,
}

const PLAIN_MEANS: [(&str, Regressor, f64); 3] =
    [("ESI", Regressor::EsiC, 100.0), ("ICE", Regressor::Ice, 0.0), ("CEPR", Regressor::Cepr, 0.0)];
const YOY_MEANS: [(&str, Regressor); 3] = [("IPI", Regressor::Ipi), ("CEM", Regressor::Cem), ("CAR", Regressor::Car)];

/// Completes every monthly input visible in the snapshot and assembles the
/// quarterly regressor rows from `sample_start` through the nowcast quarter.
/// Series absent from the snapshot simply leave their regressor out.
pub fn build_regressors(snapshot: &Snapshot, options: &BridgeOptions) -> Result<RegressorSet> {
    let t = snapshot.quarter;
    let day = snapshot.day;
    let target = t.last_month();
    if options.sample_start >= t {
        return Err(Error::InvalidInput(format!("sample start {} is not before {t}", options.sample_start)));
    }
    let mut completed: BTreeMap<String, CompletedMonthlySeries> = BTreeMap::new();
    let present = |id: &str| snapshot.monthly(id).ok().filter(|s| !s.is_empty());

    let mut complete_one = |id: &str, s: &MonthlySeries| -> Result<()> {
        let c = complete(s, target, options.lambda).map_err(|e| e.in_cell(t, day, format!("completing {id}")))?;
        completed.insert(id.to_string(), c);
        Ok(())
    };
    for id in ["ESI", "ICE", "CEPR", "IPI", "CEM", "CAR", "OIL"] {
        if let Some(s) = present(id) {
            complete_one(id, s)?;
        }
    }
    if let (Some(atm), Some(cpi)) = (present("ATM"), present("CPI")) {
        let real = deflate(atm, cpi).map_err(|e| e.in_cell(t, day, "deflating ATM"))?;
        complete_one("ATM", &real)?;
    }

    let mut trade = BTreeMap::new();
    for kind in [TradeKind::Exports, TradeKind::Imports] {
        let (nominal_id, proxy_id, volume_id, def_id) = kind.ids();
        let Some(nominal) = present(nominal_id) else { continue };
        let Some(oil) = completed.get("OIL") else { continue };
        if snapshot.quarterly(volume_id).is_err() || snapshot.quarterly(def_id).is_err() {
            continue;
        }
        let filled = match present(proxy_id) {
            Some(proxy) => complete_trade(nominal, proxy, target, options.lambda),
            None => complete(nominal, target, options.lambda),
        }
        .map_err(|e| e.in_cell(t, day, format!("completing {nominal_id}")))?;
        let nowcast = trade_volume_nowcast(kind, snapshot, &filled, oil)
            .map_err(|e| e.in_cell(t, day, format!("{volume_id} volume nowcast")))?;
        trade.insert(kind.regressor(), nowcast);
        completed.insert(nominal_id.to_string(), filled);
    }

    let means: BTreeMap<&str, BTreeMap<QuarterIndex, f64>> =
        completed.iter().map(|(id, c)| (id.as_str(), quarterly_means(c))).collect();
    let gdp = snapshot.quarterly(GDP)?;
    let sum_lag = SumLag::for_day(day);

    let mut rows = Vec::new();
    for q in options.sample_start.range_inclusive(t) {
        let mut values = BTreeMap::new();
        if let Ok(s) = sum_regressor(gdp, q, sum_lag) {
            values.insert(Regressor::Sum, s);
        }
        for (id, reg, shift) in PLAIN_MEANS {
            if let Some(v) = means.get(id).and_then(|m| m.get(&q)) {
                values.insert(reg, v - shift);
            }
        }
        for (id, reg) in YOY_MEANS.into_iter().chain([("ATM", Regressor::Atm)]) {
            if let Some(v) = means.get(id).and_then(|m| yoy_map(m, q)) {
                values.insert(reg, v);
            }
        }
        for kind in [TradeKind::Exports, TradeKind::Imports] {
            let reg = kind.regressor();
            let Some(nowcast) = trade.get(&reg) else { continue };
            if q == t {
                values.insert(reg, nowcast.growth);
            } else if let Ok(g) = snapshot.quarterly(kind.ids().2).and_then(|v| quarterly_yoy(v, q)) {
                values.insert(reg, g);
            }
        }
        rows.push(RegressorRow { quarter: q, gdp: gdp.get(q), values });
    }

    let forecast_months = completed
        .iter()
        .map(|(id, c)| (id.clone(), c.forecasts.iter().map(|(m, f)| (*m, f.method)).collect()))
        .collect();
    Ok(RegressorSet { quarter: t, day, sum_lag, rows, forecast_months, trade })
}
