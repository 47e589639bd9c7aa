//! Implementations of the subcommands.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use epf_core::backtest::Manifest;
use epf_core::evaluate::dm::MIN_DM_OBS;
use epf_core::evaluate::report::{write_metrics, write_mpdfb, write_square, MetricRow, MpdfbRow};
use epf_core::evaluate::{dm_hourly, dm_multivariate, mae, mpdfb, occurrence, pairwise_dm, pairwise_hourly_counts, rmse, Season};
use epf_core::ingest::{load_csv, load_forecast_dir, write_series_wide, CsvSchema, DEFAULT_CALIB_LEN};
use epf_core::{Backtester, EpfError, ForecastMatrix, ModelSpec, PriceSeries, SupportLog, WindowPlan};

use crate::config::ConfigFile;
use crate::error::{CliError, Result};
use crate::{BacktestArgs, DmArgs, EvaluateArgs, Format, IngestArgs, InputArgs, SelectionArgs, SliceArgs};

/// Environment variable naming the default root of input files.
pub const DATA_DIR_VAR: &str = "EPF_DATA_DIR";

/// A forecast day given either as an index into the series or as a date.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DaySpec {
    Index(usize),
    Date(NaiveDate),
}

impl FromStr for DaySpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Ok(i) = s.parse::<usize>() {
            return Ok(DaySpec::Index(i));
        }
        NaiveDate::parse_from_str(s, "%Y-%m-%d")
            .map(DaySpec::Date)
            .map_err(|_| format!("'{s}' is neither a day index nor a YYYY-MM-DD date"))
    }
}

impl DaySpec {
    fn resolve(self, series: &PriceSeries) -> Result<usize> {
        match self {
            DaySpec::Index(i) => Ok(i),
            DaySpec::Date(d) => series
                .index_of(d)
                .ok_or_else(|| CliError::Usage(format!("{d} is outside the series ({} .. {})", series.start_date, series.date(series.n_days() - 1)))),
        }
    }
}

/// Relative paths that do not exist in the working directory are resolved
/// against `$EPF_DATA_DIR` when it is set.
pub fn resolve_input(path: &Path) -> PathBuf {
    if path.is_relative() && !path.exists() {
        if let Some(root) = std::env::var_os(DATA_DIR_VAR) {
            return Path::new(&root).join(path);
        }
    }
    path.to_path_buf()
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{flag} (flag or config key)")))
}

fn load_series(args: &InputArgs, cfg: &ConfigFile, default_format: Format) -> Result<PriceSeries> {
    let input: PathBuf = required(cfg.or(args.input.clone(), "input")?, "input")?;
    let path = resolve_input(&input);
    let format = cfg.or(args.format, "format")?.unwrap_or(default_format);
    let mut schema = match format {
        Format::Long => CsvSchema::long(),
        Format::Wide => CsvSchema::wide(),
    };
    schema.start_weekday = cfg.or(args.start_weekday, "start_weekday")?;
    schema.market_id = cfg.or(args.market.clone(), "market")?.unwrap_or_default();
    log::info!("loading {} ({format:?} layout)", path.display());
    Ok(load_csv(&path, &schema)?)
}

pub fn ingest(args: &IngestArgs, cfg: &ConfigFile) -> Result<()> {
    let out: PathBuf = required(cfg.or(args.out.clone(), "out")?, "out")?;
    let series = load_series(&args.input, cfg, Format::Long)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(EpfError::from)?;
    }
    write_series_wide(&out, &series)?;
    println!(
        "{} days {} .. {} written to {}",
        series.n_days(),
        series.start_date,
        series.date(series.n_days().saturating_sub(1)),
        out.display()
    );
    Ok(())
}

pub fn backtest(args: &BacktestArgs, cfg: &ConfigFile) -> Result<()> {
    let models: String = required(cfg.or(args.models.clone(), "models")?, "models")?;
    let specs = ModelSpec::parse_list(&models)?;
    let out: PathBuf = required(cfg.or(args.out.clone(), "out")?, "out")?;
    let calib = cfg.or(args.calib, "calib")?.unwrap_or(DEFAULT_CALIB_LEN);
    let stride = cfg.or(args.stride, "stride")?.unwrap_or(1);
    if stride == 0 {
        return Err(CliError::Usage("--stride must be at least 1".into()));
    }
    let first: Option<DaySpec> = cfg.or(args.first, "first")?;
    let last: Option<DaySpec> = cfg.or(args.last, "last")?;
    let var_fixed_order = cfg.switch(args.var_fixed_order, "var_fixed_order")?;

    let series = load_series(&args.input, cfg, Format::Wide)?;
    if series.n_days() == 0 {
        return Err(EpfError::InvalidPlan("empty series".into()).into());
    }
    let first = match first {
        Some(d) => d.resolve(&series)?,
        None => calib,
    };
    let last = match last {
        Some(d) => d.resolve(&series)?,
        None => series.n_days() - 1,
    };
    let plan = WindowPlan::new(calib, first, last)?;
    plan.check_series(&series)?;

    let mut bt = Backtester::new(plan, specs);
    bt.stride = stride;
    bt.options.var_fixed_order = var_fixed_order;
    log::info!(
        "backtest: {} model(s), days {first}..={last} ({} forecast days), window {calib}",
        bt.specs.len(),
        plan.days(stride).len()
    );
    let run = bt.run(&series)?;
    let manifest = Manifest::new(&series, bt.config(), &run)?;
    run.write(&out, &manifest)?;
    println!(
        "{} forecast file(s), {} day(s) each, written to {} in {:.1}s (run hash {})",
        run.matrices.len(),
        run.dates.len(),
        out.display(),
        run.elapsed.as_secs_f64(),
        manifest.run_hash
    );
    for (id, err) in &run.failures {
        log::error!("{id}: {err}");
    }
    if !run.failures.is_empty() {
        let ids: Vec<&str> = run.failures.iter().map(|(id, _)| id.as_str()).collect();
        return Err(CliError::ModelsFailed { count: ids.len(), ids: ids.join(",") });
    }
    Ok(())
}

/// Date filter assembled from `--season`, `--from` and `--to`.
#[derive(Debug, Clone, Copy, Default)]
struct Slice {
    season: Option<Season>,
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
}

impl Slice {
    fn new(args: &SliceArgs, cfg: &ConfigFile) -> Result<Self> {
        let season = match cfg.or(args.season.clone(), "season")? {
            Some(s) => Some(s.parse::<Season>()?),
            None => None,
        };
        Ok(Self { season, from: cfg.or(args.from, "from")?, to: cfg.or(args.to, "to")? })
    }

    fn keeps(&self, d: NaiveDate) -> bool {
        self.season.is_none_or(|s| s.contains(d)) && self.from.is_none_or(|f| d >= f) && self.to.is_none_or(|t| d <= t)
    }
}

/// One backtest output directory under a dataset label.
struct Dataset {
    name: String,
    dir: PathBuf,
    models: Vec<ForecastMatrix>,
}

fn parse_dataset(arg: &str) -> (String, PathBuf) {
    match arg.split_once('=') {
        Some((name, dir)) if !name.is_empty() && !name.contains(['/', '\\']) => (name.to_string(), PathBuf::from(dir)),
        _ => {
            let dir = PathBuf::from(arg);
            let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "forecasts".into());
            (name, dir)
        }
    }
}

fn model_filter(list: Option<String>) -> Result<Option<Vec<String>>> {
    Ok(match list {
        Some(l) => Some(ModelSpec::parse_list(&l)?.iter().map(ModelSpec::id).collect()),
        None => None,
    })
}

fn load_dataset(arg: &str, slice: &Slice, only: Option<&[String]>) -> Result<Dataset> {
    let (name, dir) = parse_dataset(arg);
    let mut models = load_forecast_dir(&dir)?;
    if let Some(only) = only {
        models.retain(|m| only.contains(&m.model_id));
        if let Some(missing) = only.iter().find(|id| !models.iter().any(|m| &m.model_id == *id)) {
            return Err(EpfError::MissingForecasts(format!("{missing} not in {}", dir.display())).into());
        }
    }
    let models: Vec<ForecastMatrix> = models.iter().map(|m| m.filter(|d| slice.keeps(d))).collect();
    if models.iter().any(|m| m.is_empty()) {
        return Err(EpfError::MissingForecasts(format!("no forecast days of {name} survive the date filter")).into());
    }
    Ok(Dataset { name, dir, models })
}

fn load_supports(dir: &Path, id: &str, slice: &Slice) -> Result<Option<SupportLog>> {
    let path = dir.join("supports").join(format!("{id}.csv"));
    if !path.is_file() {
        return Ok(None);
    }
    let mut log = SupportLog::read(&path, id)?;
    log.rows.retain(|(d, _, _)| slice.keeps(*d));
    Ok(Some(log))
}

fn is_lasso(id: &str) -> bool {
    id.parse::<ModelSpec>().is_ok_and(|s| s.is_lasso())
}

fn fmt_p(p: Option<f64>) -> String {
    p.map(|v| format!("{v:.6}")).unwrap_or_default()
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(EpfError::from)?;
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs, cfg: &ConfigFile) -> Result<()> {
    let sources = cfg.list(args.forecasts.clone(), "forecasts");
    if sources.is_empty() {
        return Err(CliError::Usage("missing --forecasts (flag or config key)".into()));
    }
    let out: PathBuf = required(cfg.or(args.out.clone(), "out")?, "out")?;
    let slice = Slice::new(&args.slice, cfg)?;
    let hac = cfg.or(args.dm_hac_lags, "dm_hac_lags")?.unwrap_or(0);
    let only = model_filter(cfg.or(args.models.clone(), "models")?)?;
    let datasets = sources.iter().map(|s| load_dataset(s, &slice, only.as_deref())).collect::<Result<Vec<_>>>()?;
    let names: BTreeSet<&str> = datasets.iter().map(|d| d.name.as_str()).collect();
    if names.len() != datasets.len() {
        return Err(CliError::Usage("dataset labels must be distinct; use NAME=DIR".into()));
    }
    create_dir(&out)?;

    let mut rows = Vec::new();
    for ds in &datasets {
        for m in &ds.models {
            rows.push(MetricRow { model: m.model_id.clone(), dataset: ds.name.clone(), days: m.len(), mae: mae(m)?, rmse: rmse(m)? });
        }
    }
    write_metrics(out.join("metrics.csv"), &rows)?;

    let common: Vec<String> = datasets[0]
        .models
        .iter()
        .map(|m| m.model_id.clone())
        .filter(|id| datasets.iter().all(|ds| ds.models.iter().any(|m| &m.model_id == id)))
        .collect();
    let table: Vec<Vec<f64>> = common
        .iter()
        .map(|id| datasets.iter().map(|ds| rows.iter().find(|r| &r.model == id && r.dataset == ds.name).expect("row written above").mae).collect())
        .collect();
    let scores = mpdfb(&common, &table)?;
    let mrows: Vec<MpdfbRow> = common.iter().zip(scores).map(|(m, v)| MpdfbRow { model: m.clone(), mpdfb: v }).collect();
    write_mpdfb(out.join("mpdfb.csv"), &mrows)?;

    for ds in &datasets {
        let ids: Vec<String> = ds.models.iter().map(|m| m.model_id.clone()).collect();
        let days = ds.models[0].len();
        if ds.models.len() > 1 && days >= MIN_DM_OBS {
            let p = pairwise_dm(&ds.models, hac)?;
            write_square(out.join(format!("dm_{}.csv", ds.name)), &ids, |i, j| fmt_p(p[i][j]))?;
            let counts = pairwise_hourly_counts(&ds.models, hac)?;
            write_square(out.join(format!("dm_hourly_{}.csv", ds.name)), &ids, |i, j| {
                if i == j {
                    String::new()
                } else {
                    counts[i][j].to_string()
                }
            })?;
        } else if ds.models.len() > 1 {
            log::warn!("{}: {days} forecast days, DM tests need at least {MIN_DM_OBS}; skipped", ds.name);
        }
        for id in ids.iter().filter(|id| is_lasso(id)) {
            if let Some(log) = load_supports(&ds.dir, id, &slice)? {
                let odir = out.join(format!("occurrence_{}", ds.name));
                create_dir(&odir)?;
                occurrence(&log).write(odir.join(format!("{id}.csv")))?;
            }
        }
    }

    println!("{:<28} {:>10} {:>10} {:>10}  dataset", "model", "MAE", "RMSE", "days");
    for r in &rows {
        println!("{:<28} {:>10.4} {:>10.4} {:>10}  {}", r.model, r.mae, r.rmse, r.days, r.dataset);
    }
    println!("report written to {}", out.display());
    Ok(())
}

pub fn dm(args: &DmArgs, cfg: &ConfigFile) -> Result<()> {
    let source: String = required(cfg.or(args.forecasts.clone(), "forecasts")?, "forecasts")?;
    let slice = Slice::new(&args.slice, cfg)?;
    let hac = cfg.or(args.dm_hac_lags, "dm_hac_lags")?.unwrap_or(0);
    let ds = load_dataset(&source, &slice, Some(&[args.x.clone(), args.y.clone()]))?;
    let find = |id: &str| ds.models.iter().find(|m| m.model_id == id).expect("presence checked on load");
    let (x, y) = (find(&args.x), find(&args.y));
    match dm_multivariate(x, y, hac) {
        Ok(r) => println!(
            "multivariate: stat {:.4}  p(X better) {:.6}  p(Y better) {:.6}  n {}",
            r.stat, r.p_forward, r.p_reverse, r.n
        ),
        Err(EpfError::DegenerateDifferential) => println!("multivariate: identical losses, not significant"),
        Err(e) => return Err(e.into()),
    }
    let hourly = dm_hourly(x, y, hac)?;
    println!("hour        stat  p(X better)  p(Y better)");
    for (h, r) in hourly.results.iter().enumerate() {
        match r {
            Some(r) => println!("{:>4} {:>11.4} {:>12.6} {:>12.6}", h + 1, r.stat, r.p_forward, r.p_reverse),
            None => println!("{:>4} {:>11} {:>12} {:>12}", h + 1, "-", "-", "-"),
        }
    }
    println!(
        "hours significant at 5%: {} favour {}, {} favour {}",
        hourly.forward_significant, args.x, hourly.reverse_significant, args.y
    );
    Ok(())
}

pub fn selection(args: &SelectionArgs, cfg: &ConfigFile) -> Result<()> {
    let source: String = required(cfg.or(args.forecasts.clone(), "forecasts")?, "forecasts")?;
    let slice = Slice::new(&args.slice, cfg)?;
    let (_, dir) = parse_dataset(&source);
    let ids: Vec<String> = match model_filter(cfg.or(args.models.clone(), "models")?)? {
        Some(ids) => {
            if let Some(bad) = ids.iter().find(|id| !is_lasso(id)) {
                return Err(EpfError::NotALassoModel(bad.clone()).into());
            }
            ids
        }
        None => ModelSpec::all().iter().map(ModelSpec::id).filter(|id| is_lasso(id)).collect(),
    };
    let out = cfg.or(args.out.clone(), "out")?;
    if let Some(o) = &out {
        create_dir(o)?;
    }
    let mut found = 0;
    for id in &ids {
        let Some(log) = load_supports(&dir, id, &slice)? else {
            if args.models.is_some() {
                return Err(EpfError::MissingForecasts(format!("no supports for {id} in {}", dir.display())).into());
            }
            continue;
        };
        found += 1;
        let table = occurrence(&log);
        let cells: Vec<f64> = table.pct.iter().flatten().flatten().copied().collect();
        let always = table.pct.iter().filter(|row| row.iter().flatten().all(|p| *p == 100.0)).count();
        let never = table.pct.iter().filter(|row| row.iter().flatten().all(|p| *p == 0.0)).count();
        println!(
            "{id:<24} {} parameters, mean occurrence {:.2}%, always selected {always}, never selected {never}",
            table.names.len(),
            cells.iter().sum::<f64>() / cells.len().max(1) as f64
        );
        if let Some(o) = &out {
            table.write(o.join(format!("{id}.csv")))?;
        }
    }
    if found == 0 {
        return Err(EpfError::MissingForecasts(format!("no lasso supports in {}", dir.display())).into());
    }
    Ok(())
}
