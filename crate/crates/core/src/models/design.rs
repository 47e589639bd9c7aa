//! Regressor matrices of the expert, multivariate lasso and univariate lasso
//! families. Each builder has a matching row function used at forecast time,
//! so fitted coefficients and forecast features always share one layout.

use super::spec::{ExpertOptions, LassoOptions};
use crate::calendar::{hour_of_week, weekday, HOURS_PER_WEEK};
use crate::error::{EpfError, Result};
use crate::estimation::Design;
use crate::{DayRow, HOURS};

/// Largest daily lag of the expert models.
pub const EXPERT_MAX_LAG: usize = 7;
/// Largest daily lag of the multivariate lasso models.
pub const LASSO24_MAX_LAG: usize = 8;
/// Largest hourly lag of the univariate models.
pub const UNI_MAX_LAG: usize = 196;

fn day_min(row: &DayRow) -> f64 {
    row.iter().copied().fold(f64::INFINITY, f64::min)
}

fn day_max(row: &DayRow) -> f64 {
    row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn dense_design(names: Vec<String>, y: Vec<f64>, rows: &[Vec<f64>]) -> Design {
    let mut d = Design::new(y);
    for (j, name) in names.into_iter().enumerate() {
        d.push_dense(name, rows.iter().map(|r| r[j]).collect());
    }
    d
}

fn check_window(days: usize, max_lag: usize) -> Result<()> {
    // at least as many usable rows as two full weeks
    if days < max_lag + 14 {
        return Err(EpfError::ShortWindow { days, reason: format!("needs {max_lag} lag days plus two weeks") });
    }
    Ok(())
}

// ---------------------------------------------------------------- expert

impl ExpertOptions {
    fn dummy_days(&self) -> Vec<u8> {
        if self.dow_full {
            (1..=7).collect()
        } else {
            vec![1, 6, 7]
        }
    }

    /// Weekday dummies kept in the design; with all seven days and an
    /// intercept the Sunday dummy is redundant.
    fn dummy_terms(&self) -> Vec<u8> {
        let mut j = self.dummy_days();
        if self.dow_full && !self.star {
            j.retain(|&d| d != 7);
        }
        j
    }

    /// Weekday interactions kept; with all seven days the interactions sum
    /// to their base regressor, so the Sunday copy is redundant.
    fn periodic_terms(&self) -> Vec<u8> {
        let mut j = self.dummy_days();
        if self.dow_full {
            j.retain(|&d| d != 7);
        }
        j
    }
}

/// Column names of the expert design for hour `h` (1..=24).
pub fn expert_names(o: ExpertOptions, h: usize) -> Vec<String> {
    let mut n: Vec<String> = Vec::new();
    if !o.star {
        n.push("intercept".into());
    }
    n.extend(["y_d1", "y_d2", "y_d7"].map(String::from));
    if o.nonlinear {
        n.extend(["min_d1", "max_d1"].map(String::from));
    }
    if h != HOURS {
        n.push("y_d1_h24".into());
    }
    n.extend(o.dummy_terms().iter().map(|j| format!("dow{j}")));
    if o.periodic {
        n.extend(o.periodic_terms().iter().map(|j| format!("dow{j}_y_d1")));
        if h != HOURS {
            n.extend(o.periodic_terms().iter().map(|j| format!("dow{j}_y_d1_h24")));
        }
    }
    n
}

/// Expert regressors for day `d` of `panel` (weekday `w`), hour `h`.
pub fn expert_row(o: ExpertOptions, panel: &[DayRow], d: usize, h: usize, w: u8) -> Vec<f64> {
    let prev = &panel[d - 1];
    let y1 = prev[h - 1];
    let y24 = prev[HOURS - 1];
    let mut x = Vec::with_capacity(25);
    if !o.star {
        x.push(1.0);
    }
    x.extend([y1, panel[d - 2][h - 1], panel[d - 7][h - 1]]);
    if o.nonlinear {
        x.extend([day_min(prev), day_max(prev)]);
    }
    if h != HOURS {
        x.push(y24);
    }
    let ind = |j: &u8| if *j == w { 1.0 } else { 0.0 };
    x.extend(o.dummy_terms().iter().map(ind));
    if o.periodic {
        x.extend(o.periodic_terms().iter().map(|j| ind(j) * y1));
        if h != HOURS {
            x.extend(o.periodic_terms().iter().map(|j| ind(j) * y24));
        }
    }
    x
}

/// Hour-of-day means of a block (its column averages).
pub fn hod_means(y: &[DayRow]) -> DayRow {
    let n = y.len() as f64;
    std::array::from_fn(|h| y.iter().map(|r| r[h]).sum::<f64>() / n)
}

/// The panel an expert model is fitted on: the transformed block itself, or
/// for the starred variants the block minus its hour-of-day means.
pub fn expert_panel(o: ExpertOptions, y: &[DayRow]) -> Vec<DayRow> {
    if o.star {
        let m = hod_means(y);
        y.iter().map(|r| std::array::from_fn(|h| r[h] - m[h])).collect()
    } else {
        y.to_vec()
    }
}

/// Expert design for hour `h` on the transformed block `y` whose first day
/// falls on `start_weekday`; rows are days `7..y.len()`.
pub fn build_design_expert(o: ExpertOptions, y: &[DayRow], h: usize, start_weekday: u8) -> Result<Design> {
    check_window(y.len(), EXPERT_MAX_LAG)?;
    let panel = expert_panel(o, y);
    expert_design_on_panel(o, &panel, h, start_weekday)
}

pub(crate) fn expert_design_on_panel(o: ExpertOptions, panel: &[DayRow], h: usize, start_weekday: u8) -> Result<Design> {
    let days = EXPERT_MAX_LAG..panel.len();
    let rows: Vec<Vec<f64>> = days.clone().map(|d| expert_row(o, panel, d, h, weekday(start_weekday, d))).collect();
    let resp: Vec<f64> = days.map(|d| panel[d][h - 1]).collect();
    Ok(dense_design(expert_names(o, h), resp, &rows))
}

// ---------------------------------------------------------------- 24lasso

/// Column names of the multivariate lasso design for hour `h`.
pub fn lasso24_names(o: LassoOptions, h: usize) -> Vec<String> {
    let mut n = Vec::with_capacity(229);
    for k in 1..=LASSO24_MAX_LAG {
        for l in 1..=HOURS {
            n.push(format!("y_d{k}_h{l}"));
        }
    }
    if o.nonlinear {
        n.extend((1..=LASSO24_MAX_LAG).map(|k| format!("min_d{k}")));
        n.extend((1..=LASSO24_MAX_LAG).map(|k| format!("max_d{k}")));
    }
    n.extend((1..=7).map(|j| format!("dow{j}")));
    if o.periodic {
        n.extend((1..=7).map(|j| format!("dow{j}_y_d1_hh")));
        if h != HOURS {
            n.extend((1..=7).map(|j| format!("dow{j}_y_d1_h24")));
        }
    }
    n
}

/// Multivariate lasso regressors for day `d` of `y` (weekday `w`), hour `h`.
pub fn lasso24_row(o: LassoOptions, y: &[DayRow], d: usize, h: usize, w: u8) -> Vec<f64> {
    let mut x = Vec::with_capacity(229);
    for k in 1..=LASSO24_MAX_LAG {
        x.extend_from_slice(&y[d - k]);
    }
    if o.nonlinear {
        x.extend((1..=LASSO24_MAX_LAG).map(|k| day_min(&y[d - k])));
        x.extend((1..=LASSO24_MAX_LAG).map(|k| day_max(&y[d - k])));
    }
    let ind = |j: u8| if j == w { 1.0 } else { 0.0 };
    x.extend((1..=7).map(ind));
    if o.periodic {
        let y1 = y[d - 1][h - 1];
        x.extend((1..=7).map(|j| ind(j) * y1));
        if h != HOURS {
            let y24 = y[d - 1][HOURS - 1];
            x.extend((1..=7).map(|j| ind(j) * y24));
        }
    }
    x
}

/// Multivariate lasso design for hour `h`; rows are days `8..y.len()`.
pub fn build_design_lasso24(o: LassoOptions, y: &[DayRow], h: usize, start_weekday: u8) -> Result<Design> {
    check_window(y.len(), LASSO24_MAX_LAG)?;
    let days = LASSO24_MAX_LAG..y.len();
    let rows: Vec<Vec<f64>> = days.clone().map(|d| lasso24_row(o, y, d, h, weekday(start_weekday, d))).collect();
    let resp: Vec<f64> = days.map(|d| y[d][h - 1]).collect();
    Ok(dense_design(lasso24_names(o, h), resp, &rows))
}

// ---------------------------------------------------------------- univariate lasso

/// Column offsets of the univariate lasso design.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniLayout {
    pub periodic: bool,
    pub nonlinear: bool,
}

impl UniLayout {
    pub fn new(o: LassoOptions) -> Self {
        Self { periodic: o.periodic, nonlinear: o.nonlinear }
    }

    pub const HOW: usize = 0;
    pub const LAGS: usize = HOURS_PER_WEEK;

    pub fn periodic1(&self) -> usize {
        Self::LAGS + UNI_MAX_LAG
    }

    pub fn periodic24(&self) -> usize {
        self.periodic1() + HOURS_PER_WEEK
    }

    pub fn nonlinear_at(&self) -> usize {
        Self::LAGS + UNI_MAX_LAG + if self.periodic { 2 * HOURS_PER_WEEK } else { 0 }
    }

    pub fn n_cols(&self) -> usize {
        self.nonlinear_at() + if self.nonlinear { 2 } else { 0 }
    }

    pub fn names(&self) -> Vec<String> {
        let mut n = Vec::with_capacity(self.n_cols());
        n.extend((1..=HOURS_PER_WEEK).map(|k| format!("how{k}")));
        n.extend((1..=UNI_MAX_LAG).map(|k| format!("y_t{k}")));
        if self.periodic {
            n.extend((1..=HOURS_PER_WEEK).map(|k| format!("how{k}_y_t1")));
            n.extend((1..=HOURS_PER_WEEK).map(|k| format!("how{k}_y_t24")));
        }
        if self.nonlinear {
            n.extend(["min_t24", "max_t24"].map(String::from));
        }
        n
    }

    /// Prediction at hourly index `t` of `series` from coefficients `beta`.
    /// `series[..t]` must hold the (possibly predicted) history and
    /// `prev_day` the previous calendar day's transformed prices.
    pub fn predict(&self, beta: &[f64], series: &[f64], t: usize, how: usize, prev_day: &[f64]) -> f64 {
        let mut v = beta[Self::HOW + how - 1];
        let lags = &beta[Self::LAGS..Self::LAGS + UNI_MAX_LAG];
        v += lags.iter().enumerate().map(|(k, b)| if *b != 0.0 { b * series[t - 1 - k] } else { 0.0 }).sum::<f64>();
        if self.periodic {
            v += beta[self.periodic1() + how - 1] * series[t - 1];
            v += beta[self.periodic24() + how - 1] * series[t - 24];
        }
        if self.nonlinear {
            let at = self.nonlinear_at();
            let mn = prev_day.iter().copied().fold(f64::INFINITY, f64::min);
            let mx = prev_day.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            v += beta[at] * mn + beta[at + 1] * mx;
        }
        v
    }
}

/// Hour-of-week index (1..=168) of hourly position `t` in a series whose
/// first day falls on `start_weekday`.
pub fn how_of_t(t: usize, start_weekday: u8) -> usize {
    hour_of_week(weekday(start_weekday, t / HOURS), t % HOURS + 1)
}

/// Univariate lasso design on the flattened transformed series `flat`;
/// rows are hours `196..flat.len()`. Indicator-driven columns are sparse.
pub fn build_design_lasso_uni(o: LassoOptions, flat: &[f64], start_weekday: u8) -> Result<Design> {
    let n_total = flat.len();
    if n_total % HOURS != 0 || n_total < UNI_MAX_LAG + 2 * HOURS_PER_WEEK {
        return Err(EpfError::ShortWindow {
            days: n_total / HOURS,
            reason: format!("needs {UNI_MAX_LAG} lag hours plus two weeks"),
        });
    }
    let layout = UniLayout::new(o);
    let names = layout.names();
    let rows = UNI_MAX_LAG..n_total;
    let n = rows.len();
    let resp: Vec<f64> = flat[UNI_MAX_LAG..].to_vec();
    let mut design = Design::new(resp);
    let mut name_iter = names.into_iter();

    let mut how_rows: Vec<Vec<u32>> = vec![Vec::new(); HOURS_PER_WEEK];
    for (i, t) in rows.clone().enumerate() {
        how_rows[how_of_t(t, start_weekday) - 1].push(i as u32);
    }
    for idx in &how_rows {
        design.push_sparse(name_iter.next().unwrap(), idx.clone(), vec![1.0; idx.len()]);
    }
    for k in 1..=UNI_MAX_LAG {
        let col: Vec<f64> = rows.clone().map(|t| flat[t - k]).collect();
        design.push_dense(name_iter.next().unwrap(), col);
    }
    if o.periodic {
        for lag in [1usize, 24] {
            for idx in &how_rows {
                let val = idx.iter().map(|&i| flat[UNI_MAX_LAG + i as usize - lag]).collect();
                design.push_sparse(name_iter.next().unwrap(), idx.clone(), val);
            }
        }
    }
    if o.nonlinear {
        let day_ext = |t: usize, f: fn(&[f64]) -> f64| {
            let d = t / HOURS;
            f(&flat[(d - 1) * HOURS..d * HOURS])
        };
        let mins: Vec<f64> = rows.clone().map(|t| day_ext(t, |s| s.iter().copied().fold(f64::INFINITY, f64::min))).collect();
        let maxs: Vec<f64> = rows.clone().map(|t| day_ext(t, |s| s.iter().copied().fold(f64::NEG_INFINITY, f64::max))).collect();
        design.push_dense(name_iter.next().unwrap(), mins);
        design.push_dense(name_iter.next().unwrap(), maxs);
    }
    debug_assert_eq!(design.n_rows(), n);
    debug_assert_eq!(design.n_cols(), layout.n_cols());
    Ok(design)
}
