//! CSV ingest and export. Rows are `period,series_id,value` where period is
//! `YYYY-MM` for monthly series and `YYYY-Qn` for quarterly ones. A header
//! row starting with `period` is optional.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use super::period::{MonthIndex, QuarterIndex};
use super::series::{Dataset, Frequency, MonthlySeries, QuarterlySeries, SeriesSchema};
use crate::error::{Error, Result};

pub fn ingest_csv(path: impl AsRef<Path>, schema: &SeriesSchema) -> Result<Dataset> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.as_ref().display()))))?;
    ingest_reader(file, schema)
}

pub fn ingest_reader<R: Read>(reader: R, schema: &SeriesSchema) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader);

    let mut monthly: BTreeMap<String, BTreeMap<MonthIndex, f64>> = BTreeMap::new();
    let mut quarterly: BTreeMap<String, BTreeMap<QuarterIndex, f64>> = BTreeMap::new();

    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(i + 1);
        if i == 0 && record.get(0).is_some_and(|f| f.eq_ignore_ascii_case("period")) {
            continue;
        }
        if record.len() != 3 {
            return Err(Error::Parse { row, message: format!("expected 3 fields, found {}", record.len()) });
        }
        let (period, id, raw) = (&record[0], &record[1], &record[2]);
        let meta = schema.get(id).ok_or_else(|| Error::UnknownSeries(id.to_string()))?;
        let value: f64 =
            raw.parse().map_err(|_| Error::Parse { row, message: format!("unparseable value {raw:?}") })?;
        if !value.is_finite() {
            return Err(Error::Parse { row, message: format!("non-finite value {raw:?}") });
        }
        let duplicate = || Error::Duplicate { series: id.to_string(), period: period.to_string() };
        match meta.frequency {
            Frequency::Monthly => {
                let m: MonthIndex = period.parse().map_err(|e: Error| Error::Parse { row, message: e.to_string() })?;
                match monthly.entry(id.to_string()).or_default().entry(m) {
                    Entry::Occupied(_) => return Err(duplicate()),
                    Entry::Vacant(v) => {
                        v.insert(value);
                    }
                }
            }
            Frequency::Quarterly => {
                if !period.contains('Q') && !period.contains('q') {
                    return Err(Error::Parse {
                        row,
                        message: format!("{id} is quarterly; expected YYYY-Qn, got {period:?}"),
                    });
                }
                let q: QuarterIndex =
                    period.parse().map_err(|e: Error| Error::Parse { row, message: e.to_string() })?;
                match quarterly.entry(id.to_string()).or_default().entry(q) {
                    Entry::Occupied(_) => return Err(duplicate()),
                    Entry::Vacant(v) => {
                        v.insert(value);
                    }
                }
            }
        }
    }

    let mut dataset = Dataset::default();
    for (id, obs) in monthly {
        let meta = schema.get(&id).expect("checked on ingest");
        let start = *obs.keys().next().expect("non-empty");
        let mut values = Vec::with_capacity(obs.len());
        for (k, (m, v)) in obs.iter().enumerate() {
            let expected = start.offset(k as i64);
            if *m != expected {
                return Err(Error::Gap { series: id, missing: expected.to_string() });
            }
            values.push(*v);
        }
        dataset.insert_monthly(MonthlySeries::new(id, meta.unit, meta.noise, start, values)?);
    }
    for (id, obs) in quarterly {
        let start = *obs.keys().next().expect("non-empty");
        let mut values = Vec::with_capacity(obs.len());
        for (k, (q, v)) in obs.iter().enumerate() {
            let expected = start.offset(k as i64);
            if *q != expected {
                return Err(Error::Gap { series: id, missing: expected.csv_label() });
            }
            values.push(*v);
        }
        dataset.insert_quarterly(QuarterlySeries::new(id, start, values)?);
    }
    Ok(dataset)
}

/// Writes the dataset in the ingest format. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(dataset: &Dataset, mut out: W) -> Result<()> {
    writeln!(out, "period,series_id,value")?;
    for s in dataset.monthly.values() {
        for (m, v) in s.iter() {
            writeln!(out, "{m},{},{v}", s.id)?;
        }
    }
    for s in dataset.quarterly.values() {
        for (q, v) in s.iter() {
            writeln!(out, "{},{},{v}", q.csv_label(), s.id)?;
        }
    }
    Ok(())
}
