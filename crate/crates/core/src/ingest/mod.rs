//! Price series ingestion, rolling calibration windows and forecast matrices.

mod csv_load;
mod forecast_io;

pub use csv_load::{load_csv, read_raw, repair_clock_change, write_series_wide, CsvSchema, Layout, RawDays};
pub use forecast_io::{
    load_forecast_dir, quantize, read_day_rows, read_forecasts, write_day_rows, write_forecasts, write_realized,
    FORECAST_DECIMALS, REALIZED_FILE,
};

use chrono::{Datelike, Days, NaiveDate};

use crate::calendar::weekday;
use crate::error::{EpfError, Result};
use crate::DayRow;

/// Hourly prices as a day x 24 matrix with calendar metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub start_date: NaiveDate,
    pub prices: Vec<DayRow>,
    pub market_id: String,
    /// Weekday (1 = Monday .. 7 = Sunday) of `start_date`.
    pub start_weekday: u8,
}

/// Weekday number (1 = Monday) of a calendar date.
pub fn iso_weekday(date: NaiveDate) -> u8 {
    date.weekday().number_from_monday() as u8
}

impl PriceSeries {
    pub fn new(start_date: NaiveDate, prices: Vec<DayRow>, market_id: impl Into<String>, start_weekday: Option<u8>) -> Result<Self> {
        let start_weekday = start_weekday.unwrap_or_else(|| iso_weekday(start_date));
        if !(1..=7).contains(&start_weekday) {
            return Err(EpfError::InvalidArgument(format!("start weekday {start_weekday} not in 1..=7")));
        }
        if let Some(d) = prices.iter().position(|r| r.iter().any(|v| !v.is_finite())) {
            return Err(EpfError::NonFiniteValue { line: d });
        }
        Ok(Self { start_date, prices, market_id: market_id.into(), start_weekday })
    }

    pub fn n_days(&self) -> usize {
        self.prices.len()
    }

    pub fn date(&self, d: usize) -> NaiveDate {
        self.start_date + Days::new(d as u64)
    }

    pub fn weekday(&self, d: usize) -> u8 {
        weekday(self.start_weekday, d)
    }

    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        let off = (date - self.start_date).num_days();
        (off >= 0 && (off as usize) < self.n_days()).then_some(off as usize)
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.n_days().checked_sub(1).map(|d| self.date(d))
    }
}

/// Rolling-window plan: calibrate on the `calib_len` days before each
/// forecast day in `first_forecast_day..=last_forecast_day`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct WindowPlan {
    pub calib_len: usize,
    pub first_forecast_day: usize,
    pub last_forecast_day: usize,
}

pub const DEFAULT_CALIB_LEN: usize = 730;

impl WindowPlan {
    pub fn new(calib_len: usize, first_forecast_day: usize, last_forecast_day: usize) -> Result<Self> {
        if calib_len < 2 {
            return Err(EpfError::InvalidPlan(format!("calibration length {calib_len} < 2")));
        }
        if first_forecast_day < calib_len {
            return Err(EpfError::InvalidPlan(format!(
                "first forecast day {first_forecast_day} precedes the end of the first window ({calib_len})"
            )));
        }
        if last_forecast_day < first_forecast_day {
            return Err(EpfError::InvalidPlan(format!("last forecast day {last_forecast_day} < first {first_forecast_day}")));
        }
        Ok(Self { calib_len, first_forecast_day, last_forecast_day })
    }

    /// Forecast every day after the first full window.
    pub fn for_series(series: &PriceSeries, calib_len: usize) -> Result<Self> {
        if series.n_days() <= calib_len {
            return Err(EpfError::InvalidPlan(format!(
                "series of {} days leaves nothing to forecast after a {calib_len}-day window",
                series.n_days()
            )));
        }
        Self::new(calib_len, calib_len, series.n_days() - 1)
    }

    pub fn check_series(&self, series: &PriceSeries) -> Result<()> {
        if self.last_forecast_day >= series.n_days() {
            return Err(EpfError::InvalidPlan(format!(
                "last forecast day {} beyond series of {} days",
                self.last_forecast_day,
                series.n_days()
            )));
        }
        Ok(())
    }

    pub fn n_forecast_days(&self) -> usize {
        self.last_forecast_day - self.first_forecast_day + 1
    }

    /// Forecast days visited with the given stride (1 = every day).
    pub fn days(&self, stride: usize) -> Vec<usize> {
        (self.first_forecast_day..=self.last_forecast_day).step_by(stride.max(1)).collect()
    }

    pub fn window<'a>(&self, series: &'a PriceSeries, t: usize) -> Result<(&'a [DayRow], NaiveDate)> {
        window(series, self, t)
    }
}

/// The calibration block for forecast day `t` and the target date.
pub fn window<'a>(series: &'a PriceSeries, plan: &WindowPlan, t: usize) -> Result<(&'a [DayRow], NaiveDate)> {
    if t < plan.first_forecast_day || t > plan.last_forecast_day || t >= series.n_days() {
        return Err(EpfError::OutOfRange { day: t, first: plan.first_forecast_day, last: plan.last_forecast_day });
    }
    Ok((&series.prices[t - plan.calib_len..t], series.date(t)))
}

/// Forecasts of one model aligned with the realized prices.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastMatrix {
    pub model_id: String,
    pub dates: Vec<NaiveDate>,
    pub forecast: Vec<DayRow>,
    pub realized: Vec<DayRow>,
}

impl ForecastMatrix {
    pub fn new(model_id: impl Into<String>, dates: Vec<NaiveDate>, forecast: Vec<DayRow>, realized: Vec<DayRow>) -> Result<Self> {
        if dates.len() != forecast.len() || forecast.len() != realized.len() {
            return Err(EpfError::ShapeMismatch(format!(
                "{} dates, {} forecast rows, {} realized rows",
                dates.len(),
                forecast.len(),
                realized.len()
            )));
        }
        Ok(Self { model_id: model_id.into(), dates, forecast, realized })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// Forecast errors `forecast - realized`, day by day.
    pub fn errors(&self) -> Vec<DayRow> {
        self.forecast
            .iter()
            .zip(&self.realized)
            .map(|(f, r)| std::array::from_fn(|h| f[h] - r[h]))
            .collect()
    }

    /// Keeps the days whose date satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(NaiveDate) -> bool) -> Self {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(self.dates[i])).collect();
        Self {
            model_id: self.model_id.clone(),
            dates: idx.iter().map(|&i| self.dates[i]).collect(),
            forecast: idx.iter().map(|&i| self.forecast[i]).collect(),
            realized: idx.iter().map(|&i| self.realized[i]).collect(),
        }
    }

    pub fn same_alignment(&self, other: &Self) -> bool {
        self.dates == other.dates && self.realized == other.realized
    }
}
