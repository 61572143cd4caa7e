//! Time series storage, the release calendar and point-in-time snapshots.

mod calendar;
mod ingest;
mod period;
mod series;
mod snapshot;

pub use calendar::{MonthLag, QuarterLag, ReleaseCalendar, DEFAULT_CALENDAR_TOML};
pub use ingest::{ingest_csv, ingest_reader, write_csv};
pub use period::{Day, MonthIndex, QuarterIndex};
pub use series::{Dataset, Frequency, MonthlySeries, NoiseClass, QuarterlySeries, SeriesMeta, SeriesSchema, Unit};
pub use snapshot::Snapshot;
