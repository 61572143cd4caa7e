use thiserror::Error;

use crate::store::{Day, QuarterIndex};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("series {series}: gap at {missing}")]
    Gap { series: String, missing: String },

    #[error("duplicate observation for {series} at {period}")]
    Duplicate { series: String, period: String },

    #[error("unknown series {0}; add it to the series schema")]
    UnknownSeries(String),

    #[error("series {0} has no release calendar rule")]
    NoCalendarRule(String),

    #[error("invalid calendar: {0}")]
    Calendar(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("series {series}: {message}")]
    Series { series: String, message: String },

    #[error("not enough observations: need {needed}, have {have}")]
    TooShort { needed: usize, have: usize },

    #[error("rank-deficient design: column {column} is collinear with {with}")]
    RankDeficient { column: String, with: String },

    #[error("missing regressor {0}")]
    MissingRegressor(String),

    #[error("zero base value in growth rate for {0}")]
    ZeroBase(String),

    #[error("ledger conflict: {0}")]
    Ledger(String),

    #[error("{quarter} day {day}, {context}: {source}")]
    Cell {
        quarter: QuarterIndex,
        day: Day,
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn series(series: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Series { series: series.into(), message: message.into() }
    }

    pub(crate) fn in_cell(self, quarter: QuarterIndex, day: Day, context: impl Into<String>) -> Self {
        Error::Cell { quarter, day, context: context.into(), source: Box::new(self) }
    }
}
