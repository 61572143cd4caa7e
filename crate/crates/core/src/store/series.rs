//! Contiguous monthly and quarterly series and the dataset that holds them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::period::{MonthIndex, QuarterIndex};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Index,
    Currency,
    Percent,
}

/// Decides how a series' jagged edge is filled: trend step for smooth
/// series, centered moving average plus drift for noisy ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseClass {
    Smooth,
    Noisy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Monthly,
    Quarterly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonthlySeries {
    pub id: String,
    pub unit: Unit,
    pub noise_class: NoiseClass,
    start: MonthIndex,
    values: Vec<f64>,
}

impl MonthlySeries {
    pub fn new(
        id: impl Into<String>,
        unit: Unit,
        noise_class: NoiseClass,
        start: MonthIndex,
        values: Vec<f64>,
    ) -> Result<Self> {
        let id = id.into();
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::series(&id, format!("non-finite value at {}", start.offset(i as i64))));
        }
        Ok(MonthlySeries { id, unit, noise_class, start, values })
    }

    pub fn start(&self) -> MonthIndex {
        self.start
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last_month(&self) -> Option<MonthIndex> {
        (!self.values.is_empty()).then(|| self.start.offset(self.values.len() as i64 - 1))
    }

    pub fn get(&self, month: MonthIndex) -> Option<f64> {
        let i = month.months_since(self.start);
        if i < 0 {
            return None;
        }
        self.values.get(i as usize).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (MonthIndex, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| (self.start.offset(i as i64), *v))
    }

    /// Observations dated at or before `last`.
    pub fn truncated(&self, last: MonthIndex) -> MonthlySeries {
        let keep = (last.months_since(self.start) + 1).clamp(0, self.values.len() as i64) as usize;
        MonthlySeries { values: self.values[..keep].to_vec(), ..self.clone() }
    }

    /// Same observations, different identity; used for derived series.
    pub fn renamed(&self, id: impl Into<String>) -> MonthlySeries {
        MonthlySeries { id: id.into(), ..self.clone() }
    }

    pub(crate) fn with_values(&self, start: MonthIndex, values: Vec<f64>) -> MonthlySeries {
        MonthlySeries { start, values, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuarterlySeries {
    pub id: String,
    start: QuarterIndex,
    values: Vec<f64>,
}

impl QuarterlySeries {
    pub fn new(id: impl Into<String>, start: QuarterIndex, values: Vec<f64>) -> Result<Self> {
        let id = id.into();
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::series(&id, format!("non-finite value at {}", start.offset(i as i64))));
        }
        Ok(QuarterlySeries { id, start, values })
    }

    pub fn start(&self) -> QuarterIndex {
        self.start
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last_quarter(&self) -> Option<QuarterIndex> {
        (!self.values.is_empty()).then(|| self.start.offset(self.values.len() as i64 - 1))
    }

    pub fn get(&self, quarter: QuarterIndex) -> Option<f64> {
        let i = quarter.quarters_since(self.start);
        if i < 0 {
            return None;
        }
        self.values.get(i as usize).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (QuarterIndex, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| (self.start.offset(i as i64), *v))
    }

    pub fn truncated(&self, last: QuarterIndex) -> QuarterlySeries {
        let keep = (last.quarters_since(self.start) + 1).clamp(0, self.values.len() as i64) as usize;
        QuarterlySeries { values: self.values[..keep].to_vec(), ..self.clone() }
    }
}

/// Metadata the CSV ingester needs for each series id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub frequency: Frequency,
    #[serde(default = "default_unit")]
    pub unit: Unit,
    #[serde(default = "default_noise")]
    pub noise: NoiseClass,
}

fn default_unit() -> Unit {
    Unit::Index
}

fn default_noise() -> NoiseClass {
    NoiseClass::Smooth
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SeriesSchema {
    pub series: BTreeMap<String, SeriesMeta>,
}

impl SeriesSchema {
    /// Series used by the six bridge models. IPI, CEM and ATM are noisy; the
    /// goods-and-services trade series are completed with the noisy rule too.
    pub fn standard() -> Self {
        use Frequency::*;
        use NoiseClass::*;
        use Unit::*;
        let monthly = [
            ("ESI", Index, Smooth),
            ("ICE", Index, Smooth),
            ("IPI", Index, Noisy),
            ("CEM", Index, Noisy),
            ("CAR", Index, Smooth),
            ("ATM", Currency, Noisy),
            ("EXGS", Currency, Noisy),
            ("IMGS", Currency, Noisy),
            ("EXG", Currency, Smooth),
            ("IMG", Currency, Smooth),
            ("CPI", Index, Smooth),
            ("OIL", Currency, Smooth),
            ("CEPR", Percent, Smooth),
        ];
        let quarterly = [
            ("GDP_QOQ", Percent),
            ("EXP", Currency),
            ("IMP", Currency),
            ("DEF_exports", Index),
            ("DEF_imports", Index),
        ];
        let mut series = BTreeMap::new();
        for (id, unit, noise) in monthly {
            series.insert(id.to_string(), SeriesMeta { frequency: Monthly, unit, noise });
        }
        for (id, unit) in quarterly {
            series.insert(id.to_string(), SeriesMeta { frequency: Quarterly, unit, noise: Smooth });
        }
        SeriesSchema { series }
    }

    /// Parses a TOML schema and layers it over [`SeriesSchema::standard`].
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let extra: SeriesSchema = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut schema = SeriesSchema::standard();
        schema.series.extend(extra.series);
        Ok(schema)
    }

    pub fn get(&self, id: &str) -> Option<&SeriesMeta> {
        self.series.get(id)
    }
}

/// Final-vintage data: every series as last published.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub monthly: BTreeMap<String, MonthlySeries>,
    pub quarterly: BTreeMap<String, QuarterlySeries>,
}

impl Dataset {
    pub fn monthly(&self, id: &str) -> Result<&MonthlySeries> {
        self.monthly.get(id).ok_or_else(|| Error::series(id, "not in dataset"))
    }

    pub fn quarterly(&self, id: &str) -> Result<&QuarterlySeries> {
        self.quarterly.get(id).ok_or_else(|| Error::series(id, "not in dataset"))
    }

    pub fn insert_monthly(&mut self, s: MonthlySeries) {
        self.monthly.insert(s.id.clone(), s);
    }

    pub fn insert_quarterly(&mut self, s: QuarterlySeries) {
        self.quarterly.insert(s.id.clone(), s);
    }
}
