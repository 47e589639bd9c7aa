use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Days, NaiveDate};

use super::PriceSeries;
use crate::error::{EpfError, Result};
use crate::{DayRow, HOURS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// One record per hour: date, hour (1..=24), price.
    Long,
    /// One record per day: date, H1..H24.
    Wide,
}

/// Column mapping of an input CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    pub layout: Layout,
    pub date_column: String,
    pub hour_column: String,
    pub price_column: String,
    /// chrono format string of the date column.
    pub date_format: String,
    /// Accept a second observation of one hour per day (clock change in
    /// autumn); without it any repeated (date, hour) is an error.
    pub allow_dst_duplicates: bool,
    pub market_id: String,
    /// Weekday of the first day; derived from the calendar when absent.
    pub start_weekday: Option<u8>,
}

impl CsvSchema {
    pub fn long() -> Self {
        Self {
            layout: Layout::Long,
            date_column: "date".into(),
            hour_column: "hour".into(),
            price_column: "price".into(),
            date_format: "%Y-%m-%d".into(),
            allow_dst_duplicates: true,
            market_id: String::new(),
            start_weekday: None,
        }
    }

    pub fn wide() -> Self {
        Self { layout: Layout::Wide, ..Self::long() }
    }
}

/// Observations per calendar day and hour before repair; an hour may hold
/// zero (spring clock change), one, or two (autumn clock change) values.
pub type RawDays = BTreeMap<NaiveDate, [Vec<f64>; HOURS]>;

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim().eq_ignore_ascii_case(name))
        .ok_or_else(|| EpfError::MalformedRow { line: 1, reason: format!("missing column '{name}'") })
}

fn parse_price(s: &str, line: usize) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| EpfError::MalformedRow { line, reason: format!("'{s}' is not a number") })?;
    if !v.is_finite() {
        return Err(EpfError::NonFiniteValue { line });
    }
    Ok(v)
}

fn push_obs(raw: &mut RawDays, date: NaiveDate, hour: usize, v: f64, schema: &CsvSchema, line: usize) -> Result<()> {
    let slot = &mut raw.entry(date).or_insert_with(|| std::array::from_fn(|_| Vec::new()))[hour - 1];
    if !slot.is_empty() && !schema.allow_dst_duplicates {
        return Err(EpfError::DuplicateHour { date: date.to_string(), hour });
    }
    if slot.len() >= 2 {
        return Err(EpfError::MalformedRow { line, reason: format!("{date} hour {hour} observed more than twice") });
    }
    slot.push(v);
    Ok(())
}

/// Reads a CSV into per-day observation lists without repairing it.
pub fn read_raw(reader: impl Read, schema: &CsvSchema) -> Result<RawDays> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(false).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let date_col = column(&headers, &schema.date_column)?;
    let mut raw = RawDays::new();
    let parse_date = |s: &str, line: usize| {
        NaiveDate::parse_from_str(s.trim(), &schema.date_format)
            .map_err(|e| EpfError::MalformedRow { line, reason: format!("bad date '{s}': {e}") })
    };
    match schema.layout {
        Layout::Long => {
            let hour_col = column(&headers, &schema.hour_column)?;
            let price_col = column(&headers, &schema.price_column)?;
            for (i, rec) in rdr.records().enumerate() {
                let rec = rec?;
                let line = i + 2;
                let date = parse_date(&rec[date_col], line)?;
                let hour: usize = rec[hour_col]
                    .parse()
                    .ok()
                    .filter(|h| (1..=HOURS).contains(h))
                    .ok_or_else(|| EpfError::MalformedRow { line, reason: format!("hour '{}' not in 1..=24", &rec[hour_col]) })?;
                let v = parse_price(&rec[price_col], line)?;
                push_obs(&mut raw, date, hour, v, schema, line)?;
            }
        }
        Layout::Wide => {
            let hour_cols = (1..=HOURS).map(|h| column(&headers, &format!("H{h}"))).collect::<Result<Vec<_>>>()?;
            for (i, rec) in rdr.records().enumerate() {
                let rec = rec?;
                let line = i + 2;
                let date = parse_date(&rec[date_col], line)?;
                if raw.contains_key(&date) {
                    return Err(EpfError::MalformedRow { line, reason: format!("date {date} repeated") });
                }
                let mut day: [Vec<f64>; HOURS] = std::array::from_fn(|_| Vec::new());
                for (h, &c) in hour_cols.iter().enumerate() {
                    let cell = rec[c].trim();
                    // an empty cell is a missing hour, repaired later
                    if !cell.is_empty() {
                        day[h].push(parse_price(cell, line)?);
                    }
                }
                raw.insert(date, day);
            }
        }
    }
    Ok(raw)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Turns per-day observation lists into a dense matrix: a doubled hour is
/// replaced by the mean of its two observations and a single missing hour by
/// the mean of its two temporal neighbours (across midnight if needed; at the
/// very edge of the series the one available neighbour is used).
pub fn repair_clock_change(raw: &RawDays) -> Result<(NaiveDate, Vec<DayRow>)> {
    let Some((&start, _)) = raw.iter().next() else {
        return Err(EpfError::MissingDay { date: "(empty input)".into() });
    };
    for (i, date) in raw.keys().enumerate() {
        let expected = start + Days::new(i as u64);
        if *date != expected {
            return Err(EpfError::MissingDay { date: expected.to_string() });
        }
    }
    let days: Vec<&[Vec<f64>; HOURS]> = raw.values().collect();
    let mut out: Vec<[Option<f64>; HOURS]> = Vec::with_capacity(days.len());
    for (d, obs) in days.iter().enumerate() {
        let date = start + Days::new(d as u64);
        let missing = obs.iter().filter(|o| o.is_empty()).count();
        let doubled = obs.iter().filter(|o| o.len() > 1).count();
        if missing >= 2 {
            return Err(EpfError::UnrepairableDay { date: date.to_string(), reason: format!("{missing} hours missing") });
        }
        if doubled >= 2 {
            return Err(EpfError::UnrepairableDay { date: date.to_string(), reason: format!("{doubled} hours repeated") });
        }
        out.push(std::array::from_fn(|h| (!obs[h].is_empty()).then(|| mean(&obs[h]))));
    }
    let flat: Vec<Option<f64>> = out.iter().flat_map(|r| r.iter().copied()).collect();
    let mut dense = Vec::with_capacity(out.len());
    for (d, row) in out.iter().enumerate() {
        let mut day = [0.0; HOURS];
        for h in 0..HOURS {
            day[h] = match row[h] {
                Some(v) => v,
                None => {
                    let t = d * HOURS + h;
                    let prev = t.checked_sub(1).and_then(|i| flat[i]);
                    let next = flat.get(t + 1).copied().flatten();
                    match (prev, next) {
                        (Some(a), Some(b)) => 0.5 * (a + b),
                        (Some(a), None) | (None, Some(a)) if t == 0 || t + 1 == flat.len() => a,
                        _ => {
                            return Err(EpfError::UnrepairableDay {
                                date: (start + Days::new(d as u64)).to_string(),
                                reason: format!("hour {} has no observed neighbours", h + 1),
                            })
                        }
                    }
                }
            };
        }
        dense.push(day);
    }
    Ok((start, dense))
}

/// Loads, validates and repairs a price CSV.
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<PriceSeries> {
    let raw = read_raw(File::open(path.as_ref())?, schema)?;
    let (start, prices) = repair_clock_change(&raw)?;
    PriceSeries::new(start, prices, schema.market_id.clone(), schema.start_weekday)
}

/// Writes the canonical wide layout (`date,H1..H24`), exactly re-readable.
pub fn write_series_wide(path: impl AsRef<Path>, series: &PriceSeries) -> Result<()> {
    let mut out = String::from("date");
    for h in 1..=HOURS {
        out.push_str(&format!(",H{h}"));
    }
    out.push('\n');
    for (d, row) in series.prices.iter().enumerate() {
        out.push_str(&series.date(d).format("%Y-%m-%d").to_string());
        for v in row {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    File::create(path.as_ref())?.write_all(out.as_bytes())?;
    Ok(())
}
