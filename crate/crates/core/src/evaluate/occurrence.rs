use std::collections::BTreeSet;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::backtest::{BacktestRun, SupportLog};
use crate::error::{EpfError, Result};
use crate::models::ModelSpec;

/// Percentage of rolling windows in which each parameter of a lasso model
/// was selected, per equation.
#[derive(Debug, Clone, PartialEq)]
pub struct OccurrenceTable {
    pub model_id: String,
    pub names: Vec<String>,
    /// Equations in ascending order (hours 1..=24, or 0 for a single equation).
    pub equations: Vec<usize>,
    /// `pct[param][equation]`; `None` where the parameter is not part of that equation.
    pub pct: Vec<Vec<Option<f64>>>,
}

/// Occurrence percentages from a support log.
pub fn occurrence(log: &SupportLog) -> OccurrenceTable {
    let equations: Vec<usize> = log.rows.iter().map(|r| r.1).collect::<BTreeSet<_>>().into_iter().collect();
    let mut hits = vec![vec![0usize; equations.len()]; log.names.len()];
    let mut seen = vec![vec![0usize; equations.len()]; log.names.len()];
    for (_, eq, cells) in &log.rows {
        let e = equations.binary_search(eq).expect("collected above");
        for (j, c) in cells.iter().enumerate() {
            if let Some(s) = c {
                seen[j][e] += 1;
                hits[j][e] += *s as usize;
            }
        }
    }
    let pct = hits
        .iter()
        .zip(&seen)
        .map(|(h, s)| h.iter().zip(s).map(|(&h, &s)| (s > 0).then(|| 100.0 * h as f64 / s as f64)).collect())
        .collect();
    OccurrenceTable { model_id: log.model_id.clone(), names: log.names.clone(), equations, pct }
}

/// Occurrence table of `model_id` in a finished run.
pub fn occurrence_for(run: &BacktestRun, model_id: &str) -> Result<OccurrenceTable> {
    let is_lasso = model_id.parse::<ModelSpec>().map(|s| s.is_lasso()).unwrap_or(false);
    match run.supports.get(model_id) {
        Some(log) if is_lasso => Ok(occurrence(log)),
        _ => Err(EpfError::NotALassoModel(model_id.to_string())),
    }
}

impl OccurrenceTable {
    /// `parameter,h1..h24` (or `parameter,all` for a single equation);
    /// empty cells mark parameters absent from an equation.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::from("parameter");
        for e in &self.equations {
            if *e == 0 {
                out.push_str(",all");
            } else {
                out.push_str(&format!(",h{e}"));
            }
        }
        out.push('\n');
        for (name, row) in self.names.iter().zip(&self.pct) {
            out.push_str(name);
            for v in row {
                match v {
                    Some(p) => out.push_str(&format!(",{p:.2}")),
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        File::create(path.as_ref())?.write_all(out.as_bytes())?;
        Ok(())
    }
}
