use std::path::{Path, PathBuf};

use anyhow::Context;
use nowcast_core::evaluation::ENGINE_VERSION;
use nowcast_core::{BacktestConfig, Day, QuarterIndex, SyntheticConfig, ThetaInput, WindowMode};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NowcastRun {
    pub quarter: QuarterIndex,
    pub day: Day,
    pub sample_start: QuarterIndex,
    pub lambda: f64,
    pub window: WindowMode,
    pub theta_input: ThetaInput,
    pub theta_error_correction: bool,
    pub audit: bool,
}

/// Resolved options of a run, tagged by command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "options", rename_all = "lowercase")]
pub enum Run {
    Nowcast(NowcastRun),
    Backtest(BacktestConfig),
    Synth(SyntheticConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub engine_version: String,
    pub config: Option<PathBuf>,
    pub data: Option<PathBuf>,
    /// `None` means the built-in calendar.
    pub calendar: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub output: PathBuf,
    pub run: Run,
}

impl RunManifest {
    pub fn new(run: Run, output: PathBuf) -> Self {
        RunManifest {
            engine_version: ENGINE_VERSION.to_string(),
            config: None,
            data: None,
            calendar: None,
            schema: None,
            output,
            run,
        }
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("{}", path.display()))
    }
}
