use std::collections::BTreeMap;

use rayon::prelude::*;

use super::design::{
    build_design_expert, build_design_lasso24, build_design_lasso_uni, expert_panel, expert_row, hod_means,
    how_of_t, lasso24_names, lasso24_row, UniLayout, UNI_MAX_LAG,
};
use super::spec::{LassoOptions, ModelSpec};
use super::window::WindowData;
use crate::calendar::{hour_of_week, Demeaner, SeasonalMeans};
use crate::error::{EpfError, Result};
use crate::estimation::{mv_yule_walker, ols, select_fits, yule_walker, ArFit, InfoCriterion, LassoFit, VarFit};
use crate::transform::TransformSpec;
use crate::{DayRow, HOURS};

/// Maximum AR order of the per-hour daily models and of the VAR.
pub const DAILY_MAX_ORDER: usize = 8;
/// Maximum AR order of the hourly univariate models.
pub const HOURLY_MAX_ORDER: usize = 196;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FitOptions {
    /// Force the VAR order to its maximum instead of selecting it by AIC.
    pub var_fixed_order: bool,
}

/// Estimated parameters of one model on one window.
#[derive(Debug, Clone)]
pub enum Coefficients {
    MeanHoW,
    Naive,
    /// One coefficient vector per hour; `hod` holds the hour-of-day means
    /// removed before fitting the starred variants.
    Expert { beta: Vec<Vec<f64>>, hod: Option<DayRow> },
    Ar24(Vec<ArFit>),
    Var(VarFit),
    Lasso24(Vec<LassoFit>),
    ArUni(ArFit),
    LassoUni(LassoFit),
}

#[derive(Debug, Clone)]
pub struct FittedModel {
    pub spec: ModelSpec,
    pub transform: TransformSpec,
    pub means: SeasonalMeans,
    pub coefficients: Coefficients,
}

fn demeaned_hour_series(w: &WindowData, dem: Demeaner, h: usize) -> Vec<f64> {
    (0..w.len()).map(|d| w.y[d][h - 1] - w.means.value(dem, w.weekday(d), h)).collect()
}

fn demeaned_flat(w: &WindowData, dem: Demeaner) -> Vec<f64> {
    w.means.demean(dem, &w.y).into_iter().flat_map(|r| r.into_iter()).collect()
}

fn fit_expert(spec: ModelSpec, w: &WindowData) -> Result<Coefficients> {
    let ModelSpec::Expert(o) = spec else { unreachable!() };
    let beta = (1..=HOURS)
        .into_par_iter()
        .map(|h| build_design_expert(o, &w.y, h, w.start_weekday).and_then(|d| ols(&d)).map(|f| f.beta))
        .collect::<Result<Vec<_>>>()?;
    Ok(Coefficients::Expert { beta, hod: o.star.then(|| hod_means(&w.y)) })
}

fn fit_lasso24_group(periodic: bool, nonlinear: bool, ics: &[InfoCriterion], w: &WindowData) -> Result<Vec<Vec<LassoFit>>> {
    let o = LassoOptions { periodic, nonlinear, ic: InfoCriterion::Ols };
    let per_hour = (1..=HOURS)
        .into_par_iter()
        .map(|h| build_design_lasso24(o, &w.y, h, w.start_weekday).and_then(|d| select_fits(&d, ics)))
        .collect::<Result<Vec<_>>>()?;
    // transpose [hour][ic] -> [ic][hour]
    Ok((0..ics.len()).map(|i| per_hour.iter().map(|fits| fits[i].clone()).collect()).collect())
}

fn fit_lasso_uni_group(periodic: bool, nonlinear: bool, ics: &[InfoCriterion], w: &WindowData) -> Result<Vec<LassoFit>> {
    let o = LassoOptions { periodic, nonlinear, ic: InfoCriterion::Ols };
    let design = build_design_lasso_uni(o, &w.flat(), w.start_weekday)?;
    select_fits(&design, ics)
}

fn fit_single(spec: ModelSpec, w: &WindowData, opts: &FitOptions) -> Result<Coefficients> {
    match spec {
        ModelSpec::MeanHoW => Ok(Coefficients::MeanHoW),
        ModelSpec::Naive => {
            if w.len() < 7 {
                return Err(EpfError::ShortWindow { days: w.len(), reason: "naive needs a week of history".into() });
            }
            Ok(Coefficients::Naive)
        }
        ModelSpec::Expert(_) => fit_expert(spec, w),
        ModelSpec::Ar24(dem) => {
            let fits = (1..=HOURS)
                .into_par_iter()
                .map(|h| yule_walker(&demeaned_hour_series(w, dem, h), DAILY_MAX_ORDER))
                .collect::<Result<Vec<_>>>()?;
            Ok(Coefficients::Ar24(fits))
        }
        ModelSpec::Var(dem) => {
            let panel = demeaned_flat(w, dem);
            Ok(Coefficients::Var(mv_yule_walker(&panel, HOURS, DAILY_MAX_ORDER, opts.var_fixed_order)?))
        }
        ModelSpec::Lasso24(o) => {
            let mut fits = fit_lasso24_group(o.periodic, o.nonlinear, &[o.ic], w)?;
            Ok(Coefficients::Lasso24(fits.remove(0)))
        }
        ModelSpec::ArUni(dem) => Ok(Coefficients::ArUni(yule_walker(&demeaned_flat(w, dem), HOURLY_MAX_ORDER)?)),
        ModelSpec::LassoUni(o) => {
            let mut fits = fit_lasso_uni_group(o.periodic, o.nonlinear, &[o.ic], w)?;
            Ok(Coefficients::LassoUni(fits.remove(0)))
        }
    }
}

impl FittedModel {
    fn wrap(spec: ModelSpec, w: &WindowData, coefficients: Coefficients) -> Self {
        FittedModel { spec, transform: w.transform, means: w.means.clone(), coefficients }
    }

    /// Fits one model on a prepared window.
    pub fn fit(spec: ModelSpec, window: &WindowData, opts: &FitOptions) -> Result<Self> {
        Ok(Self::wrap(spec, window, fit_single(spec, window, opts)?))
    }

    /// Fits several models on one window. Lasso models sharing a design
    /// share one regularization path, and differ only in the selected penalty.
    pub fn fit_many(specs: &[ModelSpec], window: &WindowData, opts: &FitOptions) -> Vec<Result<Self>> {
        let mut groups: BTreeMap<(bool, bool, bool), Vec<usize>> = BTreeMap::new();
        let mut out: Vec<Option<Result<Self>>> = specs.iter().map(|_| None).collect();
        for (i, s) in specs.iter().enumerate() {
            match s {
                ModelSpec::Lasso24(o) => groups.entry((true, o.periodic, o.nonlinear)).or_default().push(i),
                ModelSpec::LassoUni(o) => groups.entry((false, o.periodic, o.nonlinear)).or_default().push(i),
                _ => {}
            }
        }
        for ((multi, periodic, nonlinear), members) in &groups {
            let ics: Vec<InfoCriterion> = members
                .iter()
                .map(|&i| match specs[i] {
                    ModelSpec::Lasso24(o) | ModelSpec::LassoUni(o) => o.ic,
                    _ => unreachable!(),
                })
                .collect();
            let fitted: Result<Vec<Coefficients>> = if *multi {
                fit_lasso24_group(*periodic, *nonlinear, &ics, window)
                    .map(|v| v.into_iter().map(Coefficients::Lasso24).collect())
            } else {
                fit_lasso_uni_group(*periodic, *nonlinear, &ics, window)
                    .map(|v| v.into_iter().map(Coefficients::LassoUni).collect())
            };
            match fitted {
                Ok(coefs) => {
                    for (&i, c) in members.iter().zip(coefs) {
                        out[i] = Some(Ok(Self::wrap(specs[i], window, c)));
                    }
                }
                // refit individually so each model reports its own error
                Err(_) => {
                    for &i in members {
                        out[i] = Some(Self::fit(specs[i], window, opts));
                    }
                }
            }
        }
        specs
            .iter()
            .zip(out)
            .map(|(s, slot)| slot.unwrap_or_else(|| Self::fit(*s, window, opts)))
            .collect()
    }

    /// Forecast of the day after the window, in transformed units (raw
    /// prices for the naive model).
    pub fn forecast_transformed(&self, w: &WindowData) -> Result<DayRow> {
        let l = w.len();
        let wt = w.target_weekday();
        let mut out = [0.0; HOURS];
        match &self.coefficients {
            Coefficients::MeanHoW => {
                for (h, v) in out.iter_mut().enumerate() {
                    *v = self.means.how[hour_of_week(wt, h + 1) - 1];
                }
            }
            Coefficients::Naive => {
                let back = if matches!(wt, 1 | 6 | 7) { 7 } else { 1 };
                if l < back {
                    return Err(EpfError::MissingHistory);
                }
                out = w.raw[l - back];
            }
            Coefficients::Expert { beta, hod } => {
                let ModelSpec::Expert(o) = self.spec else { unreachable!() };
                if l < 7 {
                    return Err(EpfError::MissingHistory);
                }
                let panel = expert_panel(o, &w.y);
                for h in 1..=HOURS {
                    let x = expert_row(o, &panel, l, h, wt);
                    let z: f64 = x.iter().zip(&beta[h - 1]).map(|(a, b)| a * b).sum();
                    out[h - 1] = z + hod.map_or(0.0, |m| m[h - 1]);
                }
            }
            Coefficients::Ar24(fits) => {
                let ModelSpec::Ar24(dem) = self.spec else { unreachable!() };
                for (h, fit) in (1..=HOURS).zip(fits) {
                    if l < fit.order {
                        return Err(EpfError::MissingHistory);
                    }
                    let x = demeaned_hour_series(w, dem, h);
                    let lags: Vec<f64> = x[l - fit.order..].iter().rev().copied().collect();
                    out[h - 1] = self.means.value(dem, wt, h) + fit.predict(&lags);
                }
            }
            Coefficients::Var(fit) => {
                let ModelSpec::Var(dem) = self.spec else { unreachable!() };
                if l < fit.order {
                    return Err(EpfError::MissingHistory);
                }
                let panel = self.means.demean(dem, &w.y);
                let lags: Vec<&[f64]> = (1..=fit.order).map(|k| &panel[l - k][..]).collect();
                let pred = fit.predict(&lags);
                let m = self.means.row(dem, l);
                for h in 0..HOURS {
                    out[h] = m[h] + pred[h];
                }
            }
            Coefficients::Lasso24(fits) => {
                let ModelSpec::Lasso24(o) = self.spec else { unreachable!() };
                if l < super::design::LASSO24_MAX_LAG {
                    return Err(EpfError::MissingHistory);
                }
                for (h, fit) in (1..=HOURS).zip(fits) {
                    let x = lasso24_row(o, &w.y, l, h, wt);
                    out[h - 1] = x.iter().zip(&fit.beta).map(|(a, b)| a * b).sum();
                }
            }
            Coefficients::ArUni(fit) => {
                let ModelSpec::ArUni(dem) = self.spec else { unreachable!() };
                let mut ext = demeaned_flat(w, dem);
                if ext.len() < fit.order {
                    return Err(EpfError::MissingHistory);
                }
                for h in 1..=HOURS {
                    let t = ext.len();
                    let lags: Vec<f64> = ext[t - fit.order..].iter().rev().copied().collect();
                    let x = fit.predict(&lags);
                    ext.push(x);
                    out[h - 1] = self.means.value(dem, wt, h) + x;
                }
            }
            Coefficients::LassoUni(fit) => {
                let ModelSpec::LassoUni(o) = self.spec else { unreachable!() };
                let layout = UniLayout::new(o);
                let mut ext = w.flat();
                if ext.len() < UNI_MAX_LAG {
                    return Err(EpfError::MissingHistory);
                }
                let prev_day = w.y[l - 1];
                for h in 1..=HOURS {
                    let t = ext.len();
                    let v = layout.predict(&fit.beta, &ext, t, how_of_t(t, w.start_weekday), &prev_day);
                    ext.push(v);
                    out[h - 1] = v;
                }
            }
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(EpfError::InvalidArgument(format!("{} produced a non-finite forecast", self.spec)));
        }
        Ok(out)
    }

    /// Price forecast of the day after the window.
    pub fn forecast(&self, w: &WindowData) -> Result<DayRow> {
        let y = self.forecast_transformed(w)?;
        Ok(match self.coefficients {
            Coefficients::Naive => y,
            _ => self.transform.invert_row(&y),
        })
    }

    /// For lasso models: per equation (hour 1..=24, or 0 for the single
    /// univariate equation) the column names and which coefficients are nonzero.
    pub fn supports(&self) -> Option<Vec<(usize, Vec<String>, Vec<bool>)>> {
        match (&self.coefficients, self.spec) {
            (Coefficients::Lasso24(fits), ModelSpec::Lasso24(o)) => Some(
                (1..=HOURS)
                    .zip(fits)
                    .map(|(h, f)| (h, lasso24_names(o, h), f.support()))
                    .collect(),
            ),
            (Coefficients::LassoUni(fit), ModelSpec::LassoUni(o)) => {
                Some(vec![(0, UniLayout::new(o).names(), fit.support())])
            }
            _ => None,
        }
    }
}
