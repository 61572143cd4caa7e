//! Pseudo-real-time backtest and forecast accuracy.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bridge::{build_regressors, BridgeOptions, RegressorSet, GDP};
use crate::error::{Error, Result};
use crate::hp::MONTHLY_LAMBDA;
use crate::models::{
    consensus_nowcasts, error_correct, CellNowcast, ForecastLedger, ModelSpec, NowcastRecord, Source, Variant,
    WindowMode,
};
use crate::store::{Dataset, Day, MonthIndex, QuarterIndex, ReleaseCalendar, Snapshot};
use crate::theta::{theta_horizon, theta_nowcast, ThetaInput};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// MSE, RMSE and MAE of the central bank's factor model over 2002Q1–2015Q4,
/// quoted as an external reference line.
pub const TDI_REFERENCE: Accuracy = Accuracy { n: 56, mse: 0.30, rmse: 0.55, mae: 0.41 };

fn q(year: i32, quarter: u8) -> QuarterIndex {
    QuarterIndex::new(year, quarter).expect("valid literal")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BacktestConfig {
    pub sample_start: QuarterIndex,
    pub eval_start: QuarterIndex,
    pub eval_end: QuarterIndex,
    pub subsample_end: Option<QuarterIndex>,
    pub days: Vec<Day>,
    pub window: WindowMode,
    pub lambda: f64,
    pub theta_input: ThetaInput,
    pub theta_error_correction: bool,
    pub audit: bool,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        BacktestConfig {
            sample_start: q(1996, 1),
            eval_start: q(2002, 1),
            eval_end: q(2019, 4),
            subsample_end: Some(q(2015, 4)),
            days: Day::ALL.to_vec(),
            window: WindowMode::Expanding,
            lambda: MONTHLY_LAMBDA,
            theta_input: ThetaInput::Growth,
            theta_error_correction: false,
            audit: false,
        }
    }
}

impl BacktestConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let c: BacktestConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.sample_start >= self.eval_start {
            return bad(format!("sample_start {} must precede eval_start {}", self.sample_start, self.eval_start));
        }
        if self.eval_start > self.eval_end {
            return bad(format!("eval_start {} is after eval_end {}", self.eval_start, self.eval_end));
        }
        if self.days.is_empty() {
            return bad("days must not be empty".into());
        }
        if self.days.windows(2).any(|w| w[0] >= w[1]) {
            return bad("days must be strictly increasing".into());
        }
        if let Some(end) = self.subsample_end {
            if end < self.eval_start || end > self.eval_end {
                return bad(format!("subsample_end {end} outside {}..{}", self.eval_start, self.eval_end));
            }
        }
        self.options().validate()
    }

    pub fn options(&self) -> NowcastOptions {
        NowcastOptions {
            sample_start: self.sample_start,
            lambda: self.lambda,
            window: self.window,
            theta_input: self.theta_input,
            theta_error_correction: self.theta_error_correction,
            audit: self.audit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NowcastOptions {
    pub sample_start: QuarterIndex,
    pub lambda: f64,
    pub window: WindowMode,
    pub theta_input: ThetaInput,
    pub theta_error_correction: bool,
    pub audit: bool,
}

impl NowcastOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be positive, got {}", self.lambda)));
        }
        if let WindowMode::Fixed(n) = self.window {
            if n < 12 {
                return Err(Error::Config(format!("fixed window of {n} quarters is too short")));
            }
        }
        Ok(())
    }
}

impl Default for NowcastOptions {
    fn default() -> Self {
        BacktestConfig::default().options()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaNowcast {
    pub horizon: usize,
    pub value: f64,
    pub corrected: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellOutput {
    pub cell: CellNowcast,
    pub theta: ThetaNowcast,
    pub regressors: RegressorSet,
}

impl CellOutput {
    pub fn records(&self) -> Vec<NowcastRecord> {
        let mut out = self.cell.records();
        let rec = |variant, value| NowcastRecord {
            quarter: self.cell.quarter,
            day: self.cell.day,
            source: Source::Theta,
            variant,
            value,
        };
        out.push(rec(Variant::Simple, self.theta.value));
        if let Some(c) = self.theta.corrected {
            out.push(rec(Variant::Corrected, c));
        }
        out
    }
}

/// Everything the engine computes for quarter `t` at day `day`, using only
/// the snapshot visible then and the ledger of earlier cells.
pub fn nowcast_cell(
    dataset: &Dataset,
    calendar: &ReleaseCalendar,
    t: QuarterIndex,
    day: Day,
    options: &NowcastOptions,
    ledger: &ForecastLedger,
) -> Result<CellOutput> {
    let snapshot = Snapshot::take(dataset, calendar, t, day).map_err(|e| e.in_cell(t, day, "snapshot"))?;
    if options.audit {
        snapshot.audit(dataset, calendar).map_err(|e| e.in_cell(t, day, "audit"))?;
    }
    let regressors =
        build_regressors(&snapshot, &BridgeOptions { sample_start: options.sample_start, lambda: options.lambda })?;
    let cell = consensus_nowcasts(&regressors, &ModelSpec::standard(), ledger, options.window)?;

    let gdp = snapshot.quarterly(GDP)?;
    let history: Vec<f64> = gdp.iter().filter(|(q, _)| *q >= options.sample_start).map(|(_, v)| v).collect();
    let last = gdp.last_quarter().ok_or_else(|| Error::series(GDP, "no released growth").in_cell(t, day, "theta"))?;
    let horizon = t.quarters_since(last);
    if !(1..=2).contains(&horizon) {
        return Err(Error::InvalidInput(format!("theta horizon {horizon} outside 1..=2")).in_cell(t, day, "theta"));
    }
    let value =
        theta_nowcast(&history, horizon as usize, options.theta_input).map_err(|e| e.in_cell(t, day, "theta"))?;
    let corrected = if options.theta_error_correction {
        cell.reference.and_then(|(r, realized)| {
            let prior = ledger.get(r, day, Source::Theta, Variant::Simple)?;
            Some(error_correct(value, prior, realized))
        })
    } else {
        None
    };
    let theta = ThetaNowcast { horizon: horizon as usize, value, corrected };
    Ok(CellOutput { cell, theta, regressors })
}

/// A single cell without a backtest ledger: the reference quarter's simple
/// forecasts at the same day are computed first so that corrected variants
/// are available.
pub fn nowcast_standalone(
    dataset: &Dataset,
    calendar: &ReleaseCalendar,
    t: QuarterIndex,
    day: Day,
    options: &NowcastOptions,
) -> Result<CellOutput> {
    let empty = ForecastLedger::new();
    let first = nowcast_cell(dataset, calendar, t, day, options, &empty)?;
    let Some((r, realized)) = first.cell.reference else { return Ok(first) };
    let prior = match nowcast_cell(dataset, calendar, r, day, options, &empty) {
        Ok(p) => p,
        Err(_) => return Ok(first),
    };
    let mut ledger = ForecastLedger::new();
    ledger.record_realized(r, realized)?;
    for rec in prior.records() {
        ledger.insert(rec)?;
    }
    nowcast_cell(dataset, calendar, t, day, options, &ledger)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub n: usize,
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
}

pub fn accuracy(errors: &[f64]) -> Result<Accuracy> {
    if errors.is_empty() {
        return Err(Error::InvalidInput("accuracy of an empty error list".into()));
    }
    let n = errors.len() as f64;
    let mse = errors.iter().map(|e| e * e).sum::<f64>() / n;
    let mae = errors.iter().map(|e| e.abs()).sum::<f64>() / n;
    Ok(Accuracy { n: errors.len(), mse, rmse: mse.sqrt(), mae })
}

pub fn cumulative_abs_error(errors: &[f64]) -> Vec<f64> {
    errors
        .iter()
        .scan(0.0, |acc, e| {
            *acc += e.abs();
            Some(*acc)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyCell {
    pub day: Day,
    pub estimator: String,
    #[serde(flatten)]
    pub accuracy: Accuracy,
    /// `(quarter, realized − forecast)`, oldest first.
    pub errors: Vec<(QuarterIndex, f64)>,
}

impl AccuracyCell {
    /// `(quarter, error, running sum of |error|)`.
    pub fn cumulative(&self) -> impl Iterator<Item = (QuarterIndex, f64, f64)> + '_ {
        self.errors.iter().scan(0.0, |acc, &(q, e)| {
            *acc += e.abs();
            Some((q, e, *acc))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub start: QuarterIndex,
    pub end: QuarterIndex,
    pub cells: Vec<AccuracyCell>,
}

impl AccuracyReport {
    pub fn cell(&self, day: Day, estimator: &str) -> Option<&AccuracyCell> {
        self.cells.iter().find(|c| c.day == day && c.estimator == estimator)
    }
}

/// Name under which a ledger source and variant is reported at `day`.
pub fn estimator_name(source: Source, variant: Variant, day: Day) -> String {
    match source {
        Source::Model(j) => format!("model{j}_{variant}"),
        Source::Median => format!("median_{variant}"),
        Source::Theta => {
            let h = theta_horizon(day);
            match variant {
                Variant::Simple => format!("theta_{h}p"),
                _ => format!("theta_{h}p_{variant}"),
            }
        }
    }
}

/// Errors `realized − forecast` per (day, source, variant) over
/// `[start, end]`, aggregated from the ledger alone.
pub fn accuracy_report(ledger: &ForecastLedger, start: QuarterIndex, end: QuarterIndex) -> Result<AccuracyReport> {
    let mut series: BTreeMap<(Day, Source, Variant), Vec<(QuarterIndex, f64)>> = BTreeMap::new();
    for r in ledger.records() {
        if r.quarter < start || r.quarter > end {
            continue;
        }
        let Some(truth) = ledger.realized(r.quarter) else { continue };
        series.entry((r.day, r.source, r.variant)).or_default().push((r.quarter, truth - r.value));
    }
    let mut cells = Vec::with_capacity(series.len());
    for ((day, source, variant), points) in series {
        let errors: Vec<f64> = points.iter().map(|p| p.1).collect();
        cells.push(AccuracyCell {
            day,
            estimator: estimator_name(source, variant, day),
            accuracy: accuracy(&errors)?,
            errors: points,
        });
    }
    Ok(AccuracyReport { start, end, cells })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub engine_version: String,
    pub config: BacktestConfig,
    pub full: AccuracyReport,
    pub subsample: Option<AccuracyReport>,
    pub tdi_reference: Accuracy,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestOutput {
    pub ledger: ForecastLedger,
    pub report: Report,
}

pub fn run_backtest(config: &BacktestConfig, dataset: &Dataset, calendar: &ReleaseCalendar) -> Result<BacktestOutput> {
    run_backtest_from(config, dataset, calendar, ForecastLedger::new())
}

/// Continues from an existing ledger; cells already recorded must reproduce
/// identically or the run fails.
pub fn run_backtest_from(
    config: &BacktestConfig,
    dataset: &Dataset,
    calendar: &ReleaseCalendar,
    mut ledger: ForecastLedger,
) -> Result<BacktestOutput> {
    config.validate()?;
    let options = config.options();
    for t in config.eval_start.range_inclusive(config.eval_end) {
        let mut visible: Vec<(Day, BTreeMap<String, Option<MonthIndex>>)> = Vec::new();
        for &day in &config.days {
            let out = nowcast_cell(dataset, calendar, t, day, &options, &ledger)?;
            if let Some((r, realized)) = out.cell.reference {
                ledger.record_realized(r, realized)?;
            }
            for rec in out.records() {
                ledger.insert(rec).map_err(|e| e.in_cell(t, day, "ledger"))?;
            }
            if config.audit {
                visible.push((day, first_forecast_months(&out.regressors)));
            }
        }
        if config.audit {
            audit_supersets(t, &visible)?;
        }
    }
    let gdp = dataset.quarterly(GDP)?;
    for t in config.eval_start.range_inclusive(config.eval_end) {
        if let Some(v) = gdp.get(t) {
            ledger.record_realized(t, v)?;
        }
    }
    let full = accuracy_report(&ledger, config.eval_start, config.eval_end)?;
    let subsample = config.subsample_end.map(|end| accuracy_report(&ledger, config.eval_start, end)).transpose()?;
    let report = Report {
        engine_version: ENGINE_VERSION.to_string(),
        config: config.clone(),
        full,
        subsample,
        tdi_reference: TDI_REFERENCE,
    };
    Ok(BacktestOutput { ledger, report })
}

fn first_forecast_months(set: &RegressorSet) -> BTreeMap<String, Option<MonthIndex>> {
    set.forecast_months.iter().map(|(id, months)| (id.clone(), months.first().map(|m| m.0))).collect()
}

/// A later day must not start forecasting a series earlier than a previous
/// day did, i.e. it never uses less observed data.
fn audit_supersets(t: QuarterIndex, visible: &[(Day, BTreeMap<String, Option<MonthIndex>>)]) -> Result<()> {
    for w in visible.windows(2) {
        let ((d0, early), (d1, late)) = (&w[0], &w[1]);
        for (id, first_late) in late {
            let Some(first_early) = early.get(id) else { continue };
            let regressed = match (first_early, first_late) {
                (None, Some(_)) => true,
                (Some(a), Some(b)) => b < a,
                _ => false,
            };
            if regressed {
                return Err(
                    Error::series(id, format!("day {d1} uses less data than day {d0}")).in_cell(t, *d1, "audit")
                );
            }
        }
    }
    Ok(())
}

/// One line per (section, day, estimator).
pub fn metrics_csv(report: &Report) -> String {
    let mut s = String::from("section,start,end,day,estimator,n,mse,rmse,mae\n");
    let sections = std::iter::once(("full", &report.full)).chain(report.subsample.as_ref().map(|r| ("subsample", r)));
    for (name, section) in sections {
        for c in &section.cells {
            let a = c.accuracy;
            let _ = writeln!(
                s,
                "{name},{},{},{},{},{},{},{},{}",
                section.start.csv_label(),
                section.end.csv_label(),
                c.day,
                c.estimator,
                a.n,
                a.mse,
                a.rmse,
                a.mae
            );
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableLayout {
    Table4,
    Table5,
    Table6,
}

impl std::str::FromStr for TableLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table4" => Ok(TableLayout::Table4),
            "table5" => Ok(TableLayout::Table5),
            "table6" => Ok(TableLayout::Table6),
            _ => Err(Error::InvalidInput(format!("unknown layout {s:?}; expected table4, table5 or table6"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    pub accuracy: Accuracy,
}

/// Rows of an accuracy table: one per day, with the Theta benchmark after
/// day 30 (two steps ahead) and after day 100 (one step ahead).
pub fn table_rows(report: &Report, layout: TableLayout) -> Result<Vec<TableRow>> {
    let (section, median) = match layout {
        TableLayout::Table4 => (&report.full, "median_simple"),
        TableLayout::Table5 => (&report.full, "median_corrected"),
        TableLayout::Table6 => (
            report.subsample.as_ref().ok_or_else(|| Error::InvalidInput("report has no subsample section".into()))?,
            "median_corrected",
        ),
    };
    let theta = |day: Day, h: usize| -> Option<&AccuracyCell> {
        let simple = format!("theta_{h}p");
        let cell = if layout == TableLayout::Table4 { None } else { section.cell(day, &format!("{simple}_corrected")) };
        cell.or_else(|| section.cell(day, &simple))
    };
    let mut rows = Vec::new();
    let mut push = |label: String, cell: Option<&AccuracyCell>| {
        if let Some(c) = cell {
            rows.push(TableRow { label, accuracy: c.accuracy });
        }
    };
    for day in [Day::D0, Day::D30] {
        push(format!("Day {day}"), section.cell(day, median));
    }
    push("Benchmark: Theta model 2p".into(), theta(Day::D0, 2).or_else(|| theta(Day::D30, 2)));
    for day in [Day::D60, Day::D90, Day::D100] {
        push(format!("Day {day}"), section.cell(day, median));
    }
    push(
        "Benchmark: Theta model 1p".into(),
        theta(Day::D60, 1).or_else(|| theta(Day::D90, 1)).or_else(|| theta(Day::D100, 1)),
    );
    if rows.is_empty() {
        return Err(Error::InvalidInput("report has no accuracy cells for this layout".into()));
    }
    if layout == TableLayout::Table6 {
        rows.push(TableRow { label: "Benchmark: TDI model".into(), accuracy: report.tdi_reference });
    }
    Ok(rows)
}

pub fn render_accuracy_table(report: &Report, layout: TableLayout) -> Result<String> {
    let rows = table_rows(report, layout)?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<28}{:>20}{:>10}{:>22}",
        "Data available at:", "Mean Squared Error", "Root MSE", "Mean Absolute Error"
    );
    for r in rows {
        let a = r.accuracy;
        let _ = writeln!(s, "{:<28}{:>20.2}{:>10.2}{:>22.2}", r.label, a.mse, a.rmse, a.mae);
    }
    Ok(s)
}

pub fn table_csv(report: &Report, layout: TableLayout) -> Result<String> {
    let mut s = String::from("row,mse,rmse,mae\n");
    for r in table_rows(report, layout)? {
        let a = r.accuracy;
        let _ = writeln!(s, "{},{},{},{}", r.label, a.mse, a.rmse, a.mae);
    }
    Ok(s)
}

/// Plot-ready series, one file per figure. Figures 1–3 hold per-model MAE by
/// day for the simple, corrected and midpoint variants (models 1–2, 3–4,
/// 5–6); figure 4 the cumulative absolute error of both medians at every
/// day; figures 5 and 6 the same against the two-step (days 0, 30) and
/// one-step (days 60, 90, 100) Theta benchmark.
pub fn figure_csvs(report: &AccuracyReport) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (fig, models) in [(1, [1, 2]), (2, [3, 4]), (3, [5, 6])] {
        let mut s = String::from("model,day,simple_mae,corrected_mae,midpoint_mae\n");
        for j in models {
            for c in report.cells.iter().filter(|c| c.estimator == format!("model{j}_simple")) {
                let mae = |v: &str| {
                    report.cell(c.day, &format!("model{j}_{v}")).map(|x| x.accuracy.mae.to_string()).unwrap_or_default()
                };
                let _ = writeln!(s, "{j},{},{},{},{}", c.day, mae("simple"), mae("corrected"), mae("midpoint"));
            }
        }
        out.push((format!("fig{fig}.csv"), s));
    }
    let cumulative = |days: &[Day], estimators: &[&str]| {
        let mut s = String::from("day,estimator,quarter,error,cumulative\n");
        for c in &report.cells {
            if !days.contains(&c.day) || !estimators.contains(&c.estimator.as_str()) {
                continue;
            }
            for (q, e, cum) in c.cumulative() {
                let _ = writeln!(s, "{},{},{},{},{}", c.day, c.estimator, q.csv_label(), e, cum);
            }
        }
        s
    };
    out.push(("fig4.csv".into(), cumulative(&Day::ALL, &["median_simple", "median_corrected"])));
    out.push((
        "fig5.csv".into(),
        cumulative(&[Day::D0, Day::D30], &["median_simple", "median_corrected", "theta_2p", "theta_2p_corrected"]),
    ));
    out.push((
        "fig6.csv".into(),
        cumulative(
            &[Day::D60, Day::D90, Day::D100],
            &["median_simple", "median_corrected", "theta_1p", "theta_1p_corrected"],
        ),
    ));
    out
}
