//! Calendar periods: months, quarters and the day stages of a quarter.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A calendar month. Ordered chronologically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthIndex {
    year: i32,
    month: u8,
}

impl MonthIndex {
    pub fn new(year: i32, month: u8) -> Result<Self, Error> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidInput(format!("month {month} out of range 1..12")));
        }
        Ok(MonthIndex { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u8 {
        self.month
    }

    /// Months since year 0, used for arithmetic.
    pub fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    pub fn from_ordinal(ordinal: i64) -> Self {
        let year = ordinal.div_euclid(12);
        let month = ordinal.rem_euclid(12) + 1;
        MonthIndex { year: year as i32, month: month as u8 }
    }

    pub fn offset(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    pub fn succ(self) -> Self {
        self.offset(1)
    }

    pub fn pred(self) -> Self {
        self.offset(-1)
    }

    /// Signed number of months from `other` to `self`.
    pub fn months_since(self, other: MonthIndex) -> i64 {
        self.ordinal() - other.ordinal()
    }

    pub fn quarter(self) -> QuarterIndex {
        QuarterIndex { year: self.year, quarter: (self.month - 1) / 3 + 1 }
    }

    /// Position of the month inside its quarter, 1..=3.
    pub fn position(self) -> u8 {
        (self.month - 1) % 3 + 1
    }
}

impl fmt::Display for MonthIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for MonthIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("expected YYYY-MM, got {s:?}"));
        let (y, m) = s.split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year = y.parse().map_err(|_| bad())?;
        let month = m.parse().map_err(|_| bad())?;
        MonthIndex::new(year, month)
    }
}

/// A calendar quarter. `t - 4` is the same quarter of the previous year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuarterIndex {
    year: i32,
    quarter: u8,
}

impl QuarterIndex {
    pub fn new(year: i32, quarter: u8) -> Result<Self, Error> {
        if !(1..=4).contains(&quarter) {
            return Err(Error::InvalidInput(format!("quarter {quarter} out of range 1..4")));
        }
        Ok(QuarterIndex { year, quarter })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn quarter(self) -> u8 {
        self.quarter
    }

    pub fn ordinal(self) -> i64 {
        self.year as i64 * 4 + (self.quarter as i64 - 1)
    }

    pub fn from_ordinal(ordinal: i64) -> Self {
        QuarterIndex { year: ordinal.div_euclid(4) as i32, quarter: (ordinal.rem_euclid(4) + 1) as u8 }
    }

    pub fn offset(self, quarters: i64) -> Self {
        Self::from_ordinal(self.ordinal() + quarters)
    }

    pub fn succ(self) -> Self {
        self.offset(1)
    }

    pub fn pred(self) -> Self {
        self.offset(-1)
    }

    pub fn quarters_since(self, other: QuarterIndex) -> i64 {
        self.ordinal() - other.ordinal()
    }

    /// Month `position` (1..=3) of this quarter.
    pub fn month(self, position: u8) -> MonthIndex {
        debug_assert!((1..=3).contains(&position));
        MonthIndex { year: self.year, month: (self.quarter - 1) * 3 + position }
    }

    pub fn first_month(self) -> MonthIndex {
        self.month(1)
    }

    pub fn last_month(self) -> MonthIndex {
        self.month(3)
    }

    /// Inclusive range iterator.
    pub fn range_inclusive(self, end: QuarterIndex) -> impl Iterator<Item = QuarterIndex> {
        (self.ordinal()..=end.ordinal()).map(QuarterIndex::from_ordinal)
    }

    /// Label used in CSV period columns, e.g. `1996-Q1`.
    pub fn csv_label(self) -> String {
        format!("{:04}-Q{}", self.year, self.quarter)
    }
}

impl fmt::Display for QuarterIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}Q{}", self.year, self.quarter)
    }
}

impl FromStr for QuarterIndex {
    type Err = Error;

    /// Accepts `1996Q1` and `1996-Q1`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("expected YYYYQn or YYYY-Qn, got {s:?}"));
        let (y, q) = s.split_once(['Q', 'q']).ok_or_else(bad)?;
        let y = y.strip_suffix('-').unwrap_or(y);
        if y.len() != 4 || q.len() != 1 {
            return Err(bad());
        }
        let year = y.parse().map_err(|_| bad())?;
        let quarter = q.parse().map_err(|_| bad())?;
        QuarterIndex::new(year, quarter)
    }
}

impl Serialize for QuarterIndex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuarterIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Stage of the current quarter at which data are read: days 0, 30, 60, 90,
/// and 100 (day 10 of the following quarter).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Day(u16);

impl Day {
    pub const D0: Day = Day(0);
    pub const D30: Day = Day(30);
    pub const D60: Day = Day(60);
    pub const D90: Day = Day(90);
    pub const D100: Day = Day(100);
    pub const ALL: [Day; 5] = [Day::D0, Day::D30, Day::D60, Day::D90, Day::D100];

    pub fn new(day: u16) -> Result<Self, Error> {
        match day {
            0 | 30 | 60 | 90 | 100 => Ok(Day(day)),
            _ => Err(Error::InvalidInput(format!("day {day} not allowed; allowed days are 0, 30, 60, 90, 100"))),
        }
    }

    pub fn value(self) -> u16 {
        self.0
    }

    /// Position in [`Day::ALL`].
    pub fn stage(self) -> usize {
        Day::ALL.iter().position(|d| *d == self).expect("validated day")
    }

    /// Before 2020 the previous quarter's national accounts were published
    /// between day 30 and day 60.
    pub fn previous_quarter_released(self) -> bool {
        self.0 >= 60
    }
}

impl fmt::Display for Day {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Day {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let v: u16 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("day {s:?} not allowed; allowed days are 0, 30, 60, 90, 100")))?;
        Day::new(v)
    }
}

impl Serialize for Day {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u16(self.0)
    }
}

impl<'de> Deserialize<'de> for Day {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = u16::deserialize(d)?;
        Day::new(v).map_err(serde::de::Error::custom)
    }
}
