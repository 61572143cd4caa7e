//! Bridge-equation GDP nowcasting.
//!
//! Monthly indicators are completed to the end of the current quarter with
//! HP-trend extrapolation, averaged to quarterly regressors under a simulated
//! release calendar, and fed to six OLS bridge models whose forecasts are
//! combined by medians. A Theta-method benchmark and a pseudo-real-time
//! backtest harness complete the toolkit.

pub mod bridge;
pub mod error;
pub mod evaluation;
pub mod hp;
pub mod models;
pub mod monthly;
pub mod ols;
pub mod store;
pub mod synthetic;
pub mod theta;

pub use bridge::{build_regressors, BridgeOptions, Regressor, RegressorSet};
pub use error::{Error, Result};
pub use evaluation::{
    nowcast_cell, nowcast_standalone, run_backtest, BacktestConfig, BacktestOutput, NowcastOptions, Report, TableLayout,
};
pub use models::{ForecastLedger, ModelSpec, NowcastRecord, Source, Variant, WindowMode};
pub use ols::{fit, DesignMatrix, RegressionFit};
pub use store::{Dataset, Day, MonthIndex, MonthlySeries, QuarterIndex, QuarterlySeries, ReleaseCalendar, Snapshot};
pub use synthetic::{generate, SyntheticConfig};
pub use theta::ThetaInput;
