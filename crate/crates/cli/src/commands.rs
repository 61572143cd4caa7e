use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use nowcast_core::evaluation::{figure_csvs, metrics_csv, render_accuracy_table, table_csv, CellOutput, ThetaNowcast};
use nowcast_core::models::render_models;
use nowcast_core::store::{ingest_reader, write_csv, SeriesSchema};
use nowcast_core::{
    generate, nowcast_standalone, run_backtest, BacktestConfig, Dataset, Day, NowcastOptions, QuarterIndex,
    ReleaseCalendar, Report, SyntheticConfig, TableLayout,
};
use serde::{Deserialize, Serialize};

use crate::manifest::{NowcastRun, Run, RunManifest};

/// Failures split by exit code: bad input (2) or a failed computation (1).
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Compute(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(_) => 1,
        }
    }

    pub fn message(&self) -> String {
        let (Failure::Usage(e) | Failure::Compute(e)) = self;
        format!("{e:#}").lines().map(str::trim).filter(|l| !l.is_empty()).collect::<Vec<_>>().join(" ")
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub trait Classify<T> {
    fn usage(self) -> CmdResult<T>;
    fn compute(self) -> CmdResult<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> CmdResult<T> {
        self.map_err(|e| Failure::Usage(e.into()))
    }

    fn compute(self) -> CmdResult<T> {
        self.map_err(|e| Failure::Compute(e.into()))
    }
}

pub struct Inputs {
    pub dataset: Dataset,
    pub calendar: ReleaseCalendar,
}

fn read_input(kind: &str, path: &Path) -> CmdResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(anyhow!("{kind} file {}: {e}", path.display())))
}

pub fn load_inputs(data: &Path, calendar: Option<&Path>, schema: Option<&Path>) -> CmdResult<Inputs> {
    let calendar = match calendar {
        Some(p) => ReleaseCalendar::from_toml_str(&read_input("calendar", p)?)
            .with_context(|| format!("calendar file {}", p.display()))
            .usage()?,
        None => ReleaseCalendar::standard(),
    };
    let schema = match schema {
        Some(p) => SeriesSchema::from_toml_str(&read_input("schema", p)?)
            .with_context(|| format!("schema file {}", p.display()))
            .usage()?,
        None => SeriesSchema::standard(),
    };
    let text = read_input("data", data)?;
    let dataset =
        ingest_reader(text.as_bytes(), &schema).with_context(|| format!("data file {}", data.display())).usage()?;
    Ok(Inputs { dataset, calendar })
}

fn write_file(path: &Path, contents: &str) -> CmdResult {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display())).compute()
}

fn create_dir(dir: &Path) -> CmdResult {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).compute()
}

#[derive(Serialize)]
struct ModelLine {
    model: u8,
    simple: f64,
    corrected: Option<f64>,
    midpoint: Option<f64>,
}

#[derive(Serialize)]
struct Reference {
    quarter: QuarterIndex,
    realized: f64,
}

#[derive(Serialize)]
struct NowcastSummary {
    quarter: QuarterIndex,
    day: Day,
    reference: Option<Reference>,
    models: Vec<ModelLine>,
    median_simple: f64,
    median_corrected: f64,
    theta: ThetaNowcast,
    forecast_months: BTreeMap<String, Vec<String>>,
}

impl NowcastSummary {
    fn new(out: &CellOutput) -> Self {
        let cell = &out.cell;
        NowcastSummary {
            quarter: cell.quarter,
            day: cell.day,
            reference: cell.reference.map(|(quarter, realized)| Reference { quarter, realized }),
            models: cell
                .models
                .iter()
                .map(|m| ModelLine { model: m.model, simple: m.simple, corrected: m.corrected, midpoint: m.midpoint() })
                .collect(),
            median_simple: cell.median_simple,
            median_corrected: cell.median_corrected,
            theta: out.theta,
            forecast_months: out
                .regressors
                .forecast_months
                .iter()
                .map(|(id, months)| {
                    (id.clone(), months.iter().map(|(m, how)| format!("{m} {}", how.as_str())).collect())
                })
                .collect(),
        }
    }

    fn render(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"));
        let mut s = format!("Nowcast {} at day {}", self.quarter, self.day);
        if let Some(r) = &self.reference {
            let _ = write!(s, " (last release {}: {:.4})", r.quarter, r.realized);
        }
        s.push('\n');
        let _ = writeln!(s, "{:<8}{:>10}{:>11}{:>10}", "model", "simple", "corrected", "midpoint");
        for m in &self.models {
            let _ = writeln!(s, "{:<8}{:>10.4}{:>11}{:>10}", m.model, m.simple, opt(m.corrected), opt(m.midpoint));
        }
        let _ = writeln!(s, "{:<8}{:>10.4}{:>11.4}", "median", self.median_simple, self.median_corrected);
        let _ = writeln!(
            s,
            "theta {}p {:.4} corrected {}",
            self.theta.horizon,
            self.theta.value,
            opt(self.theta.corrected)
        );
        s
    }
}

pub struct NowcastPaths<'a> {
    pub data: &'a Path,
    pub calendar: Option<&'a Path>,
    pub schema: Option<&'a Path>,
    pub out: &'a Path,
}

pub fn nowcast_options(run: &NowcastRun) -> NowcastOptions {
    NowcastOptions {
        sample_start: run.sample_start,
        lambda: run.lambda,
        window: run.window,
        theta_input: run.theta_input,
        theta_error_correction: run.theta_error_correction,
        audit: run.audit,
    }
}

pub fn nowcast(paths: &NowcastPaths, run: &NowcastRun) -> CmdResult<String> {
    let inputs = load_inputs(paths.data, paths.calendar, paths.schema)?;
    let out =
        nowcast_standalone(&inputs.dataset, &inputs.calendar, run.quarter, run.day, &nowcast_options(run)).compute()?;
    let summary = NowcastSummary::new(&out);
    create_dir(paths.out)?;
    let stem = format!("nowcast-{}-d{}", run.quarter, run.day);
    let mut json = serde_json::to_string_pretty(&summary).compute()?;
    json.push('\n');
    write_file(&paths.out.join(format!("{stem}.json")), &json)?;
    let mut manifest = RunManifest::new(Run::Nowcast(run.clone()), paths.out.to_path_buf());
    manifest.data = Some(paths.data.to_path_buf());
    manifest.calendar = paths.calendar.map(Path::to_path_buf);
    manifest.schema = paths.schema.map(Path::to_path_buf);
    manifest.write(&paths.out.join(format!("{stem}.manifest.json"))).compute()?;
    Ok(summary.render())
}

pub fn coefficients(paths: &NowcastPaths, run: &NowcastRun) -> CmdResult<String> {
    let inputs = load_inputs(paths.data, paths.calendar, paths.schema)?;
    let out =
        nowcast_standalone(&inputs.dataset, &inputs.calendar, run.quarter, run.day, &nowcast_options(run)).compute()?;
    let fits: Vec<_> = out.cell.models.iter().map(|m| (m.model, &m.fit)).collect();
    Ok(render_models(&fits))
}

/// Backtest config file. Paths are relative to the file itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: PathBuf,
    pub calendar: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub backtest: BacktestConfig,
}

pub fn read_run_config(path: &Path) -> CmdResult<RunConfig> {
    let text = read_input("config", path)?;
    let mut cfg: RunConfig =
        toml::from_str(&text).with_context(|| format!("config file {}", path.display())).usage()?;
    cfg.backtest.validate().with_context(|| format!("config file {}", path.display())).usage()?;
    let base = path.parent().unwrap_or(Path::new(""));
    cfg.data = base.join(&cfg.data);
    for p in [&mut cfg.calendar, &mut cfg.schema, &mut cfg.output].into_iter().flatten() {
        *p = base.join(&*p);
    }
    Ok(cfg)
}

pub fn backtest(cfg: &RunConfig, config_path: Option<&Path>, out: &Path) -> CmdResult<String> {
    cfg.backtest.validate().usage()?;
    let inputs = load_inputs(&cfg.data, cfg.calendar.as_deref(), cfg.schema.as_deref())?;
    let result = run_backtest(&cfg.backtest, &inputs.dataset, &inputs.calendar).compute()?;
    create_dir(out)?;

    let ledger_path = out.join("ledger.csv");
    let file = File::create(&ledger_path).with_context(|| format!("writing {}", ledger_path.display())).compute()?;
    result.ledger.write_csv(BufWriter::new(file)).compute()?;
    let report = &result.report;
    write_file(&out.join("report.json"), &report.to_json().compute()?)?;
    write_file(&out.join("report.csv"), &metrics_csv(report))?;
    let mut summary = String::new();
    for layout in [TableLayout::Table4, TableLayout::Table5, TableLayout::Table6] {
        if layout == TableLayout::Table6 && report.subsample.is_none() {
            continue;
        }
        let name = layout_name(layout);
        let text = render_accuracy_table(report, layout).compute()?;
        write_file(&out.join(format!("{name}.csv")), &table_csv(report, layout).compute()?)?;
        write_file(&out.join(format!("{name}.txt")), &text)?;
        if layout == TableLayout::Table5 {
            summary = text;
        }
    }
    for (name, contents) in figure_csvs(&report.full) {
        write_file(&out.join(name), &contents)?;
    }

    let mut manifest = RunManifest::new(Run::Backtest(cfg.backtest.clone()), out.to_path_buf());
    manifest.config = config_path.map(Path::to_path_buf);
    manifest.data = Some(cfg.data.clone());
    manifest.calendar = cfg.calendar.clone();
    manifest.schema = cfg.schema.clone();
    manifest.write(&out.join("manifest.json")).compute()?;
    Ok(format!(
        "{} quarters x {} days, {} ledger records written to {}\n{summary}",
        cfg.backtest.eval_end.quarters_since(cfg.backtest.eval_start) + 1,
        cfg.backtest.days.len(),
        result.ledger.len(),
        out.display()
    ))
}

pub fn layout_name(layout: TableLayout) -> &'static str {
    match layout {
        TableLayout::Table4 => "table4",
        TableLayout::Table5 => "table5",
        TableLayout::Table6 => "table6",
    }
}

pub fn table(report_path: &Path, layout: TableLayout, csv: bool) -> CmdResult<String> {
    let text = read_input("report", report_path)?;
    let report = Report::from_json(&text).with_context(|| format!("report file {}", report_path.display())).usage()?;
    let rendered = if csv { table_csv(&report, layout) } else { render_accuracy_table(&report, layout) };
    rendered.with_context(|| format!("report file {}", report_path.display())).usage()
}

pub fn synth(config: &SyntheticConfig, out: &Path) -> CmdResult<String> {
    let data = generate(config).usage()?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    let file = File::create(out).with_context(|| format!("writing {}", out.display())).compute()?;
    write_csv(&data, BufWriter::new(file)).compute()?;
    let manifest = RunManifest::new(Run::Synth(*config), out.to_path_buf());
    manifest.write(&out.with_extension("manifest.json")).compute()?;
    Ok(format!("wrote {} (seed {}, noise {})\n", out.display(), config.seed, config.noise))
}

pub fn replay(manifest_path: &Path, out: Option<&Path>) -> CmdResult<String> {
    let m = RunManifest::read(manifest_path).usage()?;
    let out = out.map(Path::to_path_buf).unwrap_or_else(|| m.output.clone());
    let data = || m.data.clone().ok_or_else(|| anyhow!("manifest {} names no data file", manifest_path.display()));
    match &m.run {
        Run::Nowcast(run) => {
            let data = data().usage()?;
            let paths =
                NowcastPaths { data: &data, calendar: m.calendar.as_deref(), schema: m.schema.as_deref(), out: &out };
            nowcast(&paths, run)
        }
        Run::Backtest(bt) => {
            let cfg = RunConfig {
                data: data().usage()?,
                calendar: m.calendar.clone(),
                schema: m.schema.clone(),
                output: Some(out.clone()),
                backtest: bt.clone(),
            };
            backtest(&cfg, m.config.as_deref(), &out)
        }
        Run::Synth(cfg) => synth(cfg, &out),
    }
}
