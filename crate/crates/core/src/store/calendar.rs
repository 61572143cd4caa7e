//! Release calendar: which period of each series is visible at a given day
//! of the nowcast quarter.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use super::period::{Day, MonthIndex, QuarterIndex};
use crate::error::{Error, Result};

/// The calendar shipped with the engine.
pub const DEFAULT_CALENDAR_TOML: &str = include_str!("default_calendar.toml");

/// Last visible month expressed relative to quarter t: `t-k:i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonthLag {
    pub quarters_back: u8,
    pub position: u8,
}

impl MonthLag {
    /// Offset in months from month 1 of quarter t.
    pub fn months(self) -> i64 {
        -3 * self.quarters_back as i64 + (self.position as i64 - 1)
    }

    pub fn resolve(self, t: QuarterIndex) -> MonthIndex {
        t.first_month().offset(self.months())
    }
}

impl fmt::Display for MonthLag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.quarters_back == 0 {
            write!(f, "t:{}", self.position)
        } else {
            write!(f, "t-{}:{}", self.quarters_back, self.position)
        }
    }
}

impl std::str::FromStr for MonthLag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Calendar(format!("expected t-k:i, got {s:?}"));
        let (q, pos) = s.trim().split_once(':').ok_or_else(bad)?;
        let quarters_back = parse_quarter_lag(q).ok_or_else(bad)?;
        let position: u8 = pos.parse().map_err(|_| bad())?;
        if !(1..=3).contains(&position) {
            return Err(bad());
        }
        Ok(MonthLag { quarters_back, position })
    }
}

fn parse_quarter_lag(s: &str) -> Option<u8> {
    let s = s.trim();
    if s == "t" {
        return Some(0);
    }
    s.strip_prefix("t-")?.parse().ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuarterLag(pub u8);

impl QuarterLag {
    pub fn resolve(self, t: QuarterIndex) -> QuarterIndex {
        t.offset(-(self.0 as i64))
    }
}

impl fmt::Display for QuarterLag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            write!(f, "t")
        } else {
            write!(f, "t-{}", self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReleaseCalendar {
    monthly: BTreeMap<String, [MonthLag; 5]>,
    quarterly: BTreeMap<String, [QuarterLag; 5]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CalendarFile {
    days: Vec<u16>,
    #[serde(default)]
    monthly: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    quarterly: BTreeMap<String, Vec<String>>,
}

impl ReleaseCalendar {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: CalendarFile = toml::from_str(text).map_err(|e| Error::Calendar(e.to_string()))?;
        let expected: Vec<u16> = Day::ALL.iter().map(|d| d.value()).collect();
        if file.days != expected {
            return Err(Error::Calendar(format!("days must be {expected:?}, got {:?}", file.days)));
        }
        let mut monthly = BTreeMap::new();
        for (id, cells) in file.monthly {
            let lags = to_five(&id, &cells, |s| s.parse::<MonthLag>())?;
            validate_chain(&id, lags.map(|l| l.months()), 3)?;
            monthly.insert(id, lags);
        }
        let mut quarterly = BTreeMap::new();
        for (id, cells) in file.quarterly {
            let lags = to_five(&id, &cells, |s| {
                parse_quarter_lag(s).map(QuarterLag).ok_or_else(|| Error::Calendar(format!("expected t-k, got {s:?}")))
            })?;
            validate_chain(&id, lags.map(|l| -(l.0 as i64)), 1)?;
            quarterly.insert(id, lags);
        }
        Ok(ReleaseCalendar { monthly, quarterly })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.as_ref().display()))))?;
        Self::from_toml_str(&text)
    }

    /// The default calendar: publication lags of the Portuguese series set.
    pub fn standard() -> Self {
        Self::from_toml_str(DEFAULT_CALENDAR_TOML).expect("shipped calendar is valid")
    }

    pub fn monthly_rule(&self, id: &str) -> Option<&[MonthLag; 5]> {
        self.monthly.get(id)
    }

    pub fn quarterly_rule(&self, id: &str) -> Option<&[QuarterLag; 5]> {
        self.quarterly.get(id)
    }

    pub fn last_visible_month(&self, id: &str, t: QuarterIndex, day: Day) -> Result<MonthIndex> {
        let rule = self.monthly.get(id).ok_or_else(|| Error::NoCalendarRule(id.to_string()))?;
        Ok(rule[day.stage()].resolve(t))
    }

    pub fn last_visible_quarter(&self, id: &str, t: QuarterIndex, day: Day) -> Result<QuarterIndex> {
        let rule = self.quarterly.get(id).ok_or_else(|| Error::NoCalendarRule(id.to_string()))?;
        Ok(rule[day.stage()].resolve(t))
    }

    pub fn monthly_ids(&self) -> impl Iterator<Item = &str> {
        self.monthly.keys().map(String::as_str)
    }

    pub fn quarterly_ids(&self) -> impl Iterator<Item = &str> {
        self.quarterly.keys().map(String::as_str)
    }
}

fn to_five<T: Copy, F: Fn(&str) -> Result<T>>(id: &str, cells: &[String], parse: F) -> Result<[T; 5]> {
    if cells.len() != 5 {
        return Err(Error::Calendar(format!("{id}: expected 5 entries, found {}", cells.len())));
    }
    let parsed: Vec<T> = cells.iter().map(|c| parse(c)).collect::<Result<_>>()?;
    Ok([parsed[0], parsed[1], parsed[2], parsed[3], parsed[4]])
}

/// Chronology of the five stages, with `per_quarter` periods per quarter:
/// day 0 <= 30 <= 60 <= 90 <= day 0 of t+1 <= day 100 <= day 30 of t+1.
fn validate_chain(id: &str, off: [i64; 5], per_quarter: i64) -> Result<()> {
    let chain = [off[0], off[1], off[2], off[3], off[0] + per_quarter, off[4], off[1] + per_quarter];
    if chain.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Calendar(format!("{id}: availability is not monotone in time")));
    }
    Ok(())
}
