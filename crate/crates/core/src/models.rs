//! The six bridge models, error correction and median consensus.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bridge::{Regressor, RegressorSet};
use crate::error::{Error, Result};
use crate::ols::{fit, render_table, DesignMatrix, RegressionFit, INTERCEPT};
use crate::store::{Day, QuarterIndex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub id: u8,
    pub regressors: Vec<Regressor>,
}

impl ModelSpec {
    pub fn standard() -> Vec<ModelSpec> {
        use Regressor::*;
        let m1 = vec![Sum, EsiC, Ice, Ipi, Cem];
        let m4 = vec![Sum, EsiC, Atm, Ipi, Cem];
        let with = |base: &[Regressor], extra: &[Regressor]| [base, extra].concat();
        vec![
            ModelSpec { id: 1, regressors: m1.clone() },
            ModelSpec { id: 2, regressors: with(&m1, &[Exp, Imp]) },
            ModelSpec { id: 3, regressors: vec![Sum, EsiC, Car, Ipi, Cem] },
            ModelSpec { id: 4, regressors: m4.clone() },
            ModelSpec { id: 5, regressors: with(&m4, &[Exp, Imp]) },
            ModelSpec { id: 6, regressors: with(&m1, &[Cepr]) },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "quarters")]
pub enum WindowMode {
    Expanding,
    /// The most recent `n` released quarters.
    Fixed(usize),
}

/// OLS of released GDP growth on the model's regressors over the
/// estimation window.
pub fn estimate(spec: &ModelSpec, set: &RegressorSet, window: WindowMode) -> Result<RegressionFit> {
    let rows: Vec<_> = set.released_rows().collect();
    let rows = match window {
        WindowMode::Expanding => &rows[..],
        WindowMode::Fixed(n) => &rows[rows.len().saturating_sub(n)..],
    };
    let mut columns: Vec<(String, Vec<f64>)> =
        spec.regressors.iter().map(|r| (r.name().to_string(), Vec::with_capacity(rows.len()))).collect();
    let mut y = Vec::with_capacity(rows.len());
    for row in rows {
        for (reg, (_, col)) in spec.regressors.iter().zip(columns.iter_mut()) {
            let v = row.values.get(reg).ok_or_else(|| Error::MissingRegressor(format!("{reg} at {}", row.quarter)))?;
            col.push(*v);
        }
        y.push(row.gdp.expect("released row"));
    }
    fit(&DesignMatrix::new(columns, true)?, &y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelForecast {
    pub model: u8,
    pub value: f64,
    pub fit: RegressionFit,
}

pub fn estimate_and_forecast(spec: &ModelSpec, set: &RegressorSet, window: WindowMode) -> Result<ModelForecast> {
    let fitted = estimate(spec, set, window)?;
    let row = set.target_row();
    let value = fitted
        .predict_with(|name| Regressor::from_name(name).and_then(|r| row.values.get(&r).copied()))
        .map_err(|e| match e {
            Error::MissingRegressor(r) => Error::MissingRegressor(format!("{r} at {}", row.quarter)),
            other => other,
        })?;
    Ok(ModelForecast { model: spec.id, value, fit: fitted })
}

/// `simple + (realized − prior)`.
pub fn error_correct(simple: f64, prior: f64, realized: f64) -> f64 {
    simple + (realized - prior)
}

/// Middle order statistic, or the mean of the two middle ones.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidInput("median of an empty list".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Model(u8),
    Median,
    Theta,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Model(j) => write!(f, "model{j}"),
            Source::Median => f.write_str("median"),
            Source::Theta => f.write_str("theta"),
        }
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(Source::Median),
            "theta" => Ok(Source::Theta),
            _ => s
                .strip_prefix("model")
                .and_then(|j| j.parse().ok())
                .map(Source::Model)
                .ok_or_else(|| Error::Ledger(format!("unknown source {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Simple,
    Corrected,
    Midpoint,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Simple => "simple",
            Variant::Corrected => "corrected",
            Variant::Midpoint => "midpoint",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(Variant::Simple),
            "corrected" => Ok(Variant::Corrected),
            "midpoint" => Ok(Variant::Midpoint),
            _ => Err(Error::Ledger(format!("unknown variant {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NowcastRecord {
    pub quarter: QuarterIndex,
    pub day: Day,
    pub source: Source,
    pub variant: Variant,
    pub value: f64,
}

type Key = (QuarterIndex, Day, Source, Variant);

/// Append-only store of nowcasts and realized growths. Re-inserting an
/// identical entry is a no-op; a different value for an existing key is an
/// error.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ForecastLedger {
    records: BTreeMap<Key, f64>,
    realized: BTreeMap<QuarterIndex, f64>,
}

impl ForecastLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns whether the record was new.
    pub fn insert(&mut self, r: NowcastRecord) -> Result<bool> {
        let key = (r.quarter, r.day, r.source, r.variant);
        insert_once(&mut self.records, key, r.value, || {
            format!("{} day {} {} {}", r.quarter, r.day, r.source, r.variant)
        })
    }

    pub fn record_realized(&mut self, quarter: QuarterIndex, value: f64) -> Result<bool> {
        insert_once(&mut self.realized, quarter, value, || format!("realized growth for {quarter}"))
    }

    pub fn get(&self, quarter: QuarterIndex, day: Day, source: Source, variant: Variant) -> Option<f64> {
        self.records.get(&(quarter, day, source, variant)).copied()
    }

    pub fn realized(&self, quarter: QuarterIndex) -> Option<f64> {
        self.realized.get(&quarter).copied()
    }

    /// `realized − prior simple forecast` for `reference`, at the same day.
    pub fn last_error(&self, source: Source, day: Day, reference: QuarterIndex) -> Option<f64> {
        let prior = self.get(reference, day, source, Variant::Simple)?;
        Some(self.realized(reference)? - prior)
    }

    pub fn records(&self) -> impl Iterator<Item = NowcastRecord> + '_ {
        self.records.iter().map(|(&(quarter, day, source, variant), &value)| NowcastRecord {
            quarter,
            day,
            source,
            variant,
            value,
        })
    }

    pub fn realized_values(&self) -> impl Iterator<Item = (QuarterIndex, f64)> + '_ {
        self.realized.iter().map(|(q, v)| (*q, *v))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Columns `quarter,day,source,variant,value`; realized growths are rows
    /// with source `gdp`, variant `realized` and an empty day.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["quarter", "day", "source", "variant", "value"])?;
        for (q, v) in &self.realized {
            out.write_record([q.csv_label(), String::new(), "gdp".into(), "realized".into(), v.to_string()])?;
        }
        for r in self.records() {
            out.write_record([
                r.quarter.csv_label(),
                r.day.to_string(),
                r.source.to_string(),
                r.variant.to_string(),
                r.value.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut ledger = ForecastLedger::new();
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        for (i, rec) in reader.records().enumerate() {
            let row = i + 2;
            let rec = rec?;
            let field = |k: usize| rec.get(k).unwrap_or("");
            let bad = |message: String| Error::Parse { row, message };
            let quarter: QuarterIndex = field(0).parse().map_err(|e: Error| bad(e.to_string()))?;
            let value: f64 = field(4).parse().map_err(|_| bad(format!("bad value {:?}", field(4))))?;
            if field(2) == "gdp" {
                ledger.record_realized(quarter, value)?;
                continue;
            }
            let day: Day = field(1).parse().map_err(|e: Error| bad(e.to_string()))?;
            let source: Source = field(2).parse().map_err(|e: Error| bad(e.to_string()))?;
            let variant: Variant = field(3).parse().map_err(|e: Error| bad(e.to_string()))?;
            ledger.insert(NowcastRecord { quarter, day, source, variant, value })?;
        }
        Ok(ledger)
    }
}

fn insert_once<K: Ord>(map: &mut BTreeMap<K, f64>, key: K, value: f64, describe: impl Fn() -> String) -> Result<bool> {
    match map.get(&key) {
        Some(old) if old.to_bits() == value.to_bits() => Ok(false),
        Some(old) => Err(Error::Ledger(format!("{} already recorded as {old}, refusing {value}", describe()))),
        None => {
            map.insert(key, value);
            Ok(true)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelNowcast {
    pub model: u8,
    pub simple: f64,
    pub corrected: Option<f64>,
    pub fit: RegressionFit,
}

impl ModelNowcast {
    /// Mean of the simple and corrected forecasts; display only.
    pub fn midpoint(&self) -> Option<f64> {
        self.corrected.map(|c| (self.simple + c) / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellNowcast {
    pub quarter: QuarterIndex,
    pub day: Day,
    /// Latest released quarter and its growth, the reference for error correction.
    pub reference: Option<(QuarterIndex, f64)>,
    pub models: Vec<ModelNowcast>,
    pub median_simple: f64,
    pub median_corrected: f64,
}

impl CellNowcast {
    pub fn records(&self) -> Vec<NowcastRecord> {
        let rec =
            |source, variant, value| NowcastRecord { quarter: self.quarter, day: self.day, source, variant, value };
        let mut out = Vec::new();
        for m in &self.models {
            let source = Source::Model(m.model);
            out.push(rec(source, Variant::Simple, m.simple));
            if let Some(c) = m.corrected {
                out.push(rec(source, Variant::Corrected, c));
            }
            if let Some(mid) = m.midpoint() {
                out.push(rec(source, Variant::Midpoint, mid));
            }
        }
        out.push(rec(Source::Median, Variant::Simple, self.median_simple));
        out.push(rec(Source::Median, Variant::Corrected, self.median_corrected));
        out
    }
}

/// Medians of the simple forecasts and of the simple and corrected
/// forecasts pooled together.
pub fn consensus(simple: &[f64], corrected: &[f64]) -> Result<(f64, f64)> {
    let pooled: Vec<f64> = simple.iter().chain(corrected).copied().collect();
    Ok((median(simple)?, median(&pooled)?))
}

/// Fits every model, corrects each with its last verifiable error from the
/// ledger, and forms both medians. Any model failure aborts the cell.
pub fn consensus_nowcasts(
    set: &RegressorSet,
    specs: &[ModelSpec],
    ledger: &ForecastLedger,
    window: WindowMode,
) -> Result<CellNowcast> {
    let reference = set.released_rows().last().map(|r| (r.quarter, r.gdp.expect("released")));
    let mut models = Vec::with_capacity(specs.len());
    for spec in specs {
        let f = estimate_and_forecast(spec, set, window)
            .map_err(|e| e.in_cell(set.quarter, set.day, format!("model {}", spec.id)))?;
        let corrected = reference.and_then(|(q, realized)| {
            let prior = ledger.get(q, set.day, Source::Model(spec.id), Variant::Simple)?;
            Some(error_correct(f.value, prior, realized))
        });
        models.push(ModelNowcast { model: spec.id, simple: f.value, corrected, fit: f.fit });
    }
    let simple: Vec<f64> = models.iter().map(|m| m.simple).collect();
    let corrected: Vec<f64> = models.iter().filter_map(|m| m.corrected).collect();
    let (median_simple, median_corrected) = consensus(&simple, &corrected)?;
    Ok(CellNowcast { quarter: set.quarter, day: set.day, reference, models, median_simple, median_corrected })
}

const TABLE_ROWS: [(&str, &str); 11] = [
    ("sum", "sum"),
    ("esi_c", "ESI-100"),
    ("ice", "ICE"),
    ("car", "car"),
    ("atm", "atm"),
    ("ipi", "ipi"),
    ("cem", "cem"),
    ("exp", "exp"),
    ("imp", "imp"),
    ("cepr", "CEPR"),
    (INTERCEPT, "Constant"),
];

/// Coefficient table of several model fits side by side.
pub fn render_models(fits: &[(u8, &RegressionFit)]) -> String {
    let cols: Vec<(String, &RegressionFit)> = fits.iter().map(|(j, f)| (format!("({j})"), *f)).collect();
    render_table(&cols, &TABLE_ROWS)
}
