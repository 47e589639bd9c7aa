use std::collections::HashMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use super::ForecastMatrix;
use crate::error::{EpfError, Result};
use crate::models::ModelSpec;
use crate::{DayRow, HOURS};

/// Decimal digits of persisted forecasts.
pub const FORECAST_DECIMALS: usize = 6;
/// File holding the realized prices of a forecast directory.
pub const REALIZED_FILE: &str = "realized.csv";

/// Rounds to [`FORECAST_DECIMALS`] digits, so that writing with that many
/// digits and reading back reproduces the value exactly.
pub fn quantize(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// Writes `date,h1..h24` rows. With `decimals = None` values are written in
/// shortest round-trip form.
pub fn write_day_rows(path: impl AsRef<Path>, dates: &[NaiveDate], rows: &[DayRow], decimals: Option<usize>) -> Result<()> {
    let mut out = String::with_capacity(rows.len() * 24 * 12);
    out.push_str("date");
    for h in 1..=HOURS {
        out.push_str(&format!(",h{h}"));
    }
    out.push('\n');
    for (date, row) in dates.iter().zip(rows) {
        out.push_str(&date.format("%Y-%m-%d").to_string());
        for v in row {
            match decimals {
                Some(p) => out.push_str(&format!(",{v:.p$}")),
                None => out.push_str(&format!(",{v}")),
            }
        }
        out.push('\n');
    }
    File::create(path.as_ref())?.write_all(out.as_bytes())?;
    Ok(())
}

pub fn read_day_rows(path: impl AsRef<Path>) -> Result<(Vec<NaiveDate>, Vec<DayRow>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path.as_ref())?;
    let mut dates = Vec::new();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() != HOURS + 1 {
            return Err(EpfError::MalformedRow { line, reason: format!("expected 25 fields, found {}", rec.len()) });
        }
        let date = NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d")
            .map_err(|e| EpfError::MalformedRow { line, reason: format!("bad date '{}': {e}", &rec[0]) })?;
        let mut row: DayRow = [0.0; HOURS];
        for h in 0..HOURS {
            row[h] = rec[h + 1]
                .parse()
                .map_err(|_| EpfError::MalformedRow { line, reason: format!("bad value '{}'", &rec[h + 1]) })?;
            if !row[h].is_finite() {
                return Err(EpfError::NonFiniteValue { line });
            }
        }
        dates.push(date);
        rows.push(row);
    }
    Ok((dates, rows))
}

/// Writes `<dir>/<model_id>.csv`.
pub fn write_forecasts(dir: impl AsRef<Path>, fm: &ForecastMatrix) -> Result<PathBuf> {
    let path = dir.as_ref().join(format!("{}.csv", fm.model_id));
    write_day_rows(&path, &fm.dates, &fm.forecast, Some(FORECAST_DECIMALS))?;
    Ok(path)
}

/// Writes `<dir>/realized.csv`.
pub fn write_realized(dir: impl AsRef<Path>, dates: &[NaiveDate], realized: &[DayRow]) -> Result<PathBuf> {
    let path = dir.as_ref().join(REALIZED_FILE);
    write_day_rows(&path, dates, realized, None)?;
    Ok(path)
}

/// Reads one forecast file and aligns it with the realized prices.
pub fn read_forecasts(path: impl AsRef<Path>, model_id: &str, realized: &HashMap<NaiveDate, DayRow>) -> Result<ForecastMatrix> {
    let (dates, forecast) = read_day_rows(path)?;
    let realized_rows = dates
        .iter()
        .map(|d| realized.get(d).copied().ok_or_else(|| EpfError::MissingForecasts(format!("no realized prices for {d}"))))
        .collect::<Result<Vec<_>>>()?;
    ForecastMatrix::new(model_id, dates, forecast, realized_rows)
}

/// Loads every forecast file of a backtest output directory, ordered as in
/// the model registry (unknown ids last, alphabetically).
pub fn load_forecast_dir(dir: impl AsRef<Path>) -> Result<Vec<ForecastMatrix>> {
    let dir = dir.as_ref();
    let realized_path = dir.join(REALIZED_FILE);
    if !realized_path.is_file() {
        return Err(EpfError::MissingForecasts(format!("{} not found", realized_path.display())));
    }
    let (dates, rows) = read_day_rows(&realized_path)?;
    let realized: HashMap<NaiveDate, DayRow> = dates.into_iter().zip(rows).collect();
    let mut ids: Vec<String> = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "csv") && path.file_name() != Some(REALIZED_FILE.as_ref()) {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                ids.push(stem.to_string());
            }
        }
    }
    if ids.is_empty() {
        return Err(EpfError::MissingForecasts(format!("no forecast files in {}", dir.display())));
    }
    let registry: Vec<String> = ModelSpec::all().iter().map(ModelSpec::id).collect();
    ids.sort_by_key(|id| (registry.iter().position(|r| r == id).unwrap_or(usize::MAX), id.clone()));
    ids.iter().map(|id| read_forecasts(dir.join(format!("{id}.csv")), id, &realized)).collect()
}
