use std::str::FromStr;

use chrono::{Datelike, NaiveDate};

use crate::error::{EpfError, Result};
use crate::ingest::ForecastMatrix;

/// Mean absolute error over all day x hour cells.
pub fn mae(fm: &ForecastMatrix) -> Result<f64> {
    if fm.is_empty() {
        return Err(EpfError::EmptyMatrix);
    }
    let total: f64 = fm.errors().iter().flat_map(|r| r.iter()).map(|e| e.abs()).sum();
    Ok(total / (24 * fm.len()) as f64)
}

/// Root mean squared error over all day x hour cells.
pub fn rmse(fm: &ForecastMatrix) -> Result<f64> {
    if fm.is_empty() {
        return Err(EpfError::EmptyMatrix);
    }
    let total: f64 = fm.errors().iter().flat_map(|r| r.iter()).map(|e| e * e).sum();
    Ok((total / (24 * fm.len()) as f64).sqrt())
}

/// Mean percentage deviation from the best model.
///
/// `errors[i][j]` is the error of model `i` on dataset `j`; the best model
/// of a dataset is the column minimum. Returns one percentage per model.
pub fn mpdfb(models: &[String], errors: &[Vec<f64>]) -> Result<Vec<f64>> {
    let Some(n_sets) = errors.first().map(Vec::len) else {
        return Ok(Vec::new());
    };
    if n_sets == 0 || errors.iter().any(|r| r.len() != n_sets) || models.len() != errors.len() {
        return Err(EpfError::ShapeMismatch("error table must be rectangular with at least one dataset".into()));
    }
    for (m, row) in models.iter().zip(errors) {
        if let Some(&v) = row.iter().find(|v| !(**v > 0.0)) {
            return Err(EpfError::NonPositiveError { model: m.clone(), value: v });
        }
    }
    let best: Vec<f64> = (0..n_sets).map(|j| errors.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min)).collect();
    Ok(errors
        .iter()
        .map(|row| row.iter().zip(&best).map(|(e, b)| (e - b).abs() / b).sum::<f64>() / n_sets as f64 * 100.0)
        .collect())
}

/// Meteorological seasons used to slice test periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Season {
    Spring,
    Summer,
    Fall,
    Winter,
}

impl Season {
    pub const ALL: [Season; 4] = [Season::Spring, Season::Summer, Season::Fall, Season::Winter];

    pub fn months(self) -> [u32; 3] {
        match self {
            Season::Spring => [3, 4, 5],
            Season::Summer => [6, 7, 8],
            Season::Fall => [9, 10, 11],
            Season::Winter => [12, 1, 2],
        }
    }

    pub fn contains(self, date: NaiveDate) -> bool {
        self.months().contains(&date.month())
    }
}

impl FromStr for Season {
    type Err = EpfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spring" => Ok(Season::Spring),
            "summer" => Ok(Season::Summer),
            "fall" | "autumn" => Ok(Season::Fall),
            "winter" => Ok(Season::Winter),
            _ => Err(EpfError::InvalidArgument(format!("unknown season '{s}'"))),
        }
    }
}
