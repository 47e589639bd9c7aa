//! Rolling-window backtest: for every forecast day the transform, the
//! seasonal means and every requested model are refitted on the preceding
//! calibration window and the day is forecast.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{EpfError, Result};
use crate::ingest::{quantize, write_forecasts, write_realized, ForecastMatrix, PriceSeries, WindowPlan};
use crate::models::{FitOptions, FittedModel, ModelSpec, WindowData};
use crate::transform::TransformSpec;
use crate::DayRow;

/// Version tag folded into the run hash.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Per-window lasso supports of one model: for every (date, equation) which
/// parameters were selected. Parameters absent from an equation are `None`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SupportLog {
    pub model_id: String,
    pub names: Vec<String>,
    pub rows: Vec<(NaiveDate, usize, Vec<Option<bool>>)>,
}

impl SupportLog {
    pub fn new(model_id: impl Into<String>) -> Self {
        Self { model_id: model_id.into(), ..Default::default() }
    }

    /// Records one equation; new parameter names extend the union.
    pub fn record(&mut self, date: NaiveDate, equation: usize, names: &[String], support: &[bool]) {
        for n in names {
            if !self.names.contains(n) {
                self.names.push(n.clone());
                for row in &mut self.rows {
                    row.2.push(None);
                }
            }
        }
        let mut cells = vec![None; self.names.len()];
        for (n, s) in names.iter().zip(support) {
            let j = self.names.iter().position(|m| m == n).expect("name just inserted");
            cells[j] = Some(*s);
        }
        self.rows.push((date, equation, cells));
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::from("date,hour");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (date, eq, cells) in &self.rows {
            out.push_str(&format!("{},{eq}", date.format("%Y-%m-%d")));
            for c in cells {
                out.push_str(match c {
                    Some(true) => ",1",
                    Some(false) => ",0",
                    None => ",-",
                });
            }
            out.push('\n');
        }
        File::create(path.as_ref())?.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>, model_id: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path.as_ref())?;
        let headers = rdr.headers()?.clone();
        if headers.len() < 2 {
            return Err(EpfError::MalformedRow { line: 1, reason: "support file needs date,hour columns".into() });
        }
        let names: Vec<String> = headers.iter().skip(2).map(String::from).collect();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let bad = |reason: String| EpfError::MalformedRow { line, reason };
            let date = NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d").map_err(|e| bad(e.to_string()))?;
            let eq: usize = rec[1].parse().map_err(|_| bad(format!("bad hour '{}'", &rec[1])))?;
            let cells = rec
                .iter()
                .skip(2)
                .map(|c| match c {
                    "1" => Ok(Some(true)),
                    "0" => Ok(Some(false)),
                    "-" => Ok(None),
                    other => Err(bad(format!("bad support cell '{other}'"))),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push((date, eq, cells));
        }
        Ok(Self { model_id: model_id.to_string(), names, rows })
    }
}

/// Outcome of a backtest.
#[derive(Debug, Clone)]
pub struct BacktestRun {
    pub plan: WindowPlan,
    pub stride: usize,
    pub model_ids: Vec<String>,
    /// One matrix per model that succeeded on every day, in request order.
    pub matrices: Vec<ForecastMatrix>,
    /// Models that failed on at least one day, with the first error.
    pub failures: Vec<(String, String)>,
    pub supports: BTreeMap<String, SupportLog>,
    /// Transform used on each forecast day.
    pub transforms: Vec<(NaiveDate, TransformSpec)>,
    pub dates: Vec<NaiveDate>,
    pub realized: Vec<DayRow>,
    pub elapsed: Duration,
}

impl BacktestRun {
    pub fn matrix(&self, model_id: &str) -> Option<&ForecastMatrix> {
        self.matrices.iter().find(|m| m.model_id == model_id)
    }

    /// Writes one forecast CSV per successful model, the realized prices,
    /// lasso supports and `manifest.json`.
    pub fn write(&self, dir: impl AsRef<Path>, manifest: &Manifest) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        write_realized(dir, &self.dates, &self.realized)?;
        for m in &self.matrices {
            write_forecasts(dir, m)?;
        }
        if !self.supports.is_empty() {
            let sdir = dir.join("supports");
            std::fs::create_dir_all(&sdir)?;
            for (id, log) in &self.supports {
                log.write(sdir.join(format!("{id}.csv")))?;
            }
        }
        let json = serde_json::to_string_pretty(manifest)?;
        File::create(dir.join("manifest.json"))?.write_all(json.as_bytes())?;
        Ok(())
    }
}

/// Run configuration entering the determinism hash.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub models: Vec<String>,
    pub plan: WindowPlan,
    pub stride: usize,
    pub var_fixed_order: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub code_version: String,
    pub input_sha256: String,
    pub config: RunConfig,
    /// sha256 over code version, input hash and configuration.
    pub run_hash: String,
    pub market_id: String,
    pub start_date: String,
    pub forecast_days: usize,
    pub succeeded: Vec<String>,
    pub failed: Vec<(String, String)>,
    pub wall_clock_seconds: f64,
}

/// Content hash of a price series, independent of its file formatting.
pub fn series_hash(series: &PriceSeries) -> String {
    let mut h = Sha256::new();
    h.update(series.start_date.to_string().as_bytes());
    h.update([series.start_weekday]);
    h.update(series.market_id.as_bytes());
    for row in &series.prices {
        for v in row {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

pub fn run_hash(code_version: &str, input_sha256: &str, config: &RunConfig) -> Result<String> {
    let mut h = Sha256::new();
    h.update(code_version.as_bytes());
    h.update([0]);
    h.update(input_sha256.as_bytes());
    h.update([0]);
    h.update(serde_json::to_string(config)?.as_bytes());
    Ok(hex::encode(h.finalize()))
}

impl Manifest {
    pub fn new(series: &PriceSeries, config: RunConfig, run: &BacktestRun) -> Result<Self> {
        let input_sha256 = series_hash(series);
        let run_hash = run_hash(CODE_VERSION, &input_sha256, &config)?;
        Ok(Self {
            code_version: CODE_VERSION.into(),
            input_sha256,
            run_hash,
            market_id: series.market_id.clone(),
            start_date: series.start_date.to_string(),
            forecast_days: run.dates.len(),
            succeeded: run.matrices.iter().map(|m| m.model_id.clone()).collect(),
            failed: run.failures.clone(),
            wall_clock_seconds: run.elapsed.as_secs_f64(),
            config,
        })
    }
}

/// Rolling-window engine.
#[derive(Debug, Clone)]
pub struct Backtester {
    pub plan: WindowPlan,
    pub specs: Vec<ModelSpec>,
    pub options: FitOptions,
    /// Forecast every `stride`-th day (1 = every day).
    pub stride: usize,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

struct DayOutcome {
    transform: Option<TransformSpec>,
    forecasts: Vec<std::result::Result<DayRow, String>>,
    supports: Vec<Option<Vec<(usize, Vec<String>, Vec<bool>)>>>,
}

impl Backtester {
    pub fn new(plan: WindowPlan, specs: Vec<ModelSpec>) -> Self {
        Self { plan, specs, options: FitOptions::default(), stride: 1, jobs: None }
    }

    pub fn config(&self) -> RunConfig {
        RunConfig {
            models: self.specs.iter().map(ModelSpec::id).collect(),
            plan: self.plan,
            stride: self.stride.max(1),
            var_fixed_order: self.options.var_fixed_order,
        }
    }

    fn run_day(&self, series: &PriceSeries, t: usize) -> DayOutcome {
        let n = self.specs.len();
        let fail_all = |e: EpfError| DayOutcome {
            transform: None,
            forecasts: (0..n).map(|_| Err(e.to_string())).collect(),
            supports: vec![None; n],
        };
        let (block, _) = match self.plan.window(series, t) {
            Ok(w) => w,
            Err(e) => return fail_all(e),
        };
        let wd = match WindowData::new(block, series.weekday(t - self.plan.calib_len)) {
            Ok(w) => w,
            Err(e) => return fail_all(e),
        };
        let fitted = FittedModel::fit_many(&self.specs, &wd, &self.options);
        let mut forecasts = Vec::with_capacity(n);
        let mut supports = Vec::with_capacity(n);
        for f in fitted {
            match f.and_then(|m| m.forecast(&wd).map(|p| (p, m.supports()))) {
                Ok((p, s)) => {
                    forecasts.push(Ok(p.map(quantize)));
                    supports.push(s);
                }
                Err(e) => {
                    forecasts.push(Err(e.to_string()));
                    supports.push(None);
                }
            }
        }
        DayOutcome { transform: Some(wd.transform), forecasts, supports }
    }

    pub fn run(&self, series: &PriceSeries) -> Result<BacktestRun> {
        self.plan.check_series(series)?;
        let started = Instant::now();
        let days = self.plan.days(self.stride);
        let compute = || -> Vec<DayOutcome> { days.par_iter().map(|&t| self.run_day(series, t)).collect() };
        let outcomes = match self.jobs {
            Some(j) => rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| EpfError::InvalidArgument(format!("thread pool: {e}")))?
                .install(compute),
            None => compute(),
        };
        let dates: Vec<NaiveDate> = days.iter().map(|&t| series.date(t)).collect();
        let realized: Vec<DayRow> = days.iter().map(|&t| series.prices[t]).collect();
        let transforms = dates.iter().zip(&outcomes).filter_map(|(d, o)| o.transform.map(|t| (*d, t))).collect();
        let mut matrices = Vec::new();
        let mut failures = Vec::new();
        let mut supports = BTreeMap::new();
        for (i, spec) in self.specs.iter().enumerate() {
            let id = spec.id();
            let first_err = outcomes.iter().zip(&dates).find_map(|(o, d)| o.forecasts[i].as_ref().err().map(|e| (d, e)));
            if let Some((date, e)) = first_err {
                log::warn!("{id} failed on {date}: {e}");
                failures.push((id, format!("{date}: {e}")));
                continue;
            }
            let forecast: Vec<DayRow> = outcomes.iter().map(|o| *o.forecasts[i].as_ref().expect("checked")).collect();
            matrices.push(ForecastMatrix::new(id.clone(), dates.clone(), forecast, realized.clone())?);
            if spec.is_lasso() {
                let mut log = SupportLog::new(id.clone());
                for (o, date) in outcomes.iter().zip(&dates) {
                    for (eq, names, support) in o.supports[i].iter().flatten() {
                        log.record(*date, *eq, names, support);
                    }
                }
                supports.insert(id, log);
            }
        }
        Ok(BacktestRun {
            plan: self.plan,
            stride: self.stride.max(1),
            model_ids: self.specs.iter().map(ModelSpec::id).collect(),
            matrices,
            failures,
            supports,
            transforms,
            dates,
            realized,
            elapsed: started.elapsed(),
        })
    }
}

/// Cellwise weighted combination `w_a * a + w_b * b` of two aligned forecasts.
pub fn combine(a: &ForecastMatrix, b: &ForecastMatrix, weights: (f64, f64)) -> Result<ForecastMatrix> {
    if !a.same_alignment(b) {
        return Err(EpfError::ShapeMismatch(format!("{} and {} are not aligned", a.model_id, b.model_id)));
    }
    let (wa, wb) = weights;
    let forecast = a
        .forecast
        .iter()
        .zip(&b.forecast)
        .map(|(x, y)| std::array::from_fn(|h| wa * x[h] + wb * y[h]))
        .collect();
    ForecastMatrix::new(format!("{}+{}", a.model_id, b.model_id), a.dates.clone(), forecast, a.realized.clone())
}
