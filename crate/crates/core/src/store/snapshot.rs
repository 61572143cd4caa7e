use std::collections::BTreeMap;

use super::calendar::ReleaseCalendar;
use super::period::{Day, MonthIndex, QuarterIndex};
use super::series::{Dataset, MonthlySeries, QuarterlySeries};
use crate::error::{Error, Result};

/// The dataset as it could be seen at day `day` of quarter `quarter`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub quarter: QuarterIndex,
    pub day: Day,
    monthly: BTreeMap<String, MonthlySeries>,
    quarterly: BTreeMap<String, QuarterlySeries>,
}

impl Snapshot {
    pub fn take(dataset: &Dataset, calendar: &ReleaseCalendar, quarter: QuarterIndex, day: Day) -> Result<Self> {
        let mut monthly = BTreeMap::new();
        for (id, s) in &dataset.monthly {
            let last = calendar.last_visible_month(id, quarter, day)?;
            monthly.insert(id.clone(), s.truncated(last));
        }
        let mut quarterly = BTreeMap::new();
        for (id, s) in &dataset.quarterly {
            let last = calendar.last_visible_quarter(id, quarter, day)?;
            quarterly.insert(id.clone(), s.truncated(last));
        }
        Ok(Snapshot { quarter, day, monthly, quarterly })
    }

    pub fn monthly(&self, id: &str) -> Result<&MonthlySeries> {
        self.monthly.get(id).ok_or_else(|| Error::series(id, "not in snapshot"))
    }

    pub fn quarterly(&self, id: &str) -> Result<&QuarterlySeries> {
        self.quarterly.get(id).ok_or_else(|| Error::series(id, "not in snapshot"))
    }

    pub fn last_visible_month(&self, id: &str) -> Option<MonthIndex> {
        self.monthly.get(id).and_then(MonthlySeries::last_month)
    }

    pub fn last_visible_quarter(&self, id: &str) -> Option<QuarterIndex> {
        self.quarterly.get(id).and_then(QuarterlySeries::last_quarter)
    }

    pub fn monthly_series(&self) -> impl Iterator<Item = &MonthlySeries> {
        self.monthly.values()
    }

    pub fn quarterly_series(&self) -> impl Iterator<Item = &QuarterlySeries> {
        self.quarterly.values()
    }

    /// Audit: every observation respects the calendar and the snapshot equals
    /// one rebuilt from scratch.
    pub fn audit(&self, dataset: &Dataset, calendar: &ReleaseCalendar) -> Result<()> {
        for s in self.monthly.values() {
            let cutoff = calendar.last_visible_month(&s.id, self.quarter, self.day)?;
            if s.last_month().is_some_and(|m| m > cutoff) {
                return Err(Error::series(&s.id, format!("observation after release cutoff {cutoff}")));
            }
        }
        for s in self.quarterly.values() {
            let cutoff = calendar.last_visible_quarter(&s.id, self.quarter, self.day)?;
            if s.last_quarter().is_some_and(|q| q > cutoff) {
                return Err(Error::series(&s.id, format!("observation after release cutoff {cutoff}")));
            }
        }
        let fresh = Snapshot::take(dataset, calendar, self.quarter, self.day)?;
        if &fresh != self {
            return Err(Error::InvalidInput(format!(
                "snapshot {} day {} differs from a fresh rebuild",
                self.quarter, self.day
            )));
        }
        Ok(())
    }
}
