use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One line of the metrics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub model: String,
    pub dataset: String,
    pub days: usize,
    pub mae: f64,
    pub rmse: f64,
}

pub fn write_metrics(path: impl AsRef<Path>, rows: &[MetricRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_metrics(path: impl AsRef<Path>) -> Result<Vec<MetricRow>> {
    let mut r = csv::Reader::from_path(path.as_ref())?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<MetricRow>, _>>()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpdfbRow {
    pub model: String,
    pub mpdfb: f64,
}

pub fn write_mpdfb(path: impl AsRef<Path>, rows: &[MpdfbRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_mpdfb(path: impl AsRef<Path>) -> Result<Vec<MpdfbRow>> {
    let mut r = csv::Reader::from_path(path.as_ref())?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<MpdfbRow>, _>>()?)
}

/// Writes a square model x model table; `cell(i, j)` renders entry (i, j).
pub fn write_square(path: impl AsRef<Path>, names: &[String], cell: impl Fn(usize, usize) -> String) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    let mut header = vec!["model".to_string()];
    header.extend(names.iter().cloned());
    w.write_record(&header)?;
    for (i, name) in names.iter().enumerate() {
        let mut rec = vec![name.clone()];
        rec.extend((0..names.len()).map(|j| cell(i, j)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a square table written by [`write_square`]; empty cells are `None`.
pub fn read_square(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<Option<f64>>>)> {
    let mut r = csv::Reader::from_path(path.as_ref())?;
    let names: Vec<String> = r.headers()?.iter().skip(1).map(String::from).collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .skip(1)
            .map(|c| {
                if c.is_empty() {
                    Ok(None)
                } else {
                    c.parse::<f64>().map(Some).map_err(|_| crate::error::EpfError::MalformedRow {
                        line: i + 2,
                        reason: format!("bad cell '{c}'"),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((names, rows))
}
