//! Penalty selection along a lasso path by a generalized information
//! criterion `GIC = RSS + kappa * K * sigma^2`.

use super::design::Design;
use super::lasso::{lambda_grid, LassoFit, LassoProblem};
use super::ols::ols;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InfoCriterion {
    Aic,
    Hqc,
    Bic,
    Ols,
}

impl InfoCriterion {
    pub const ALL: [InfoCriterion; 4] = [Self::Aic, Self::Hqc, Self::Bic, Self::Ols];

    /// Penalty weight for a sample of `n` observations.
    pub fn kappa(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Self::Aic => 2.0,
            Self::Hqc => 2.0 * n.ln().ln(),
            Self::Bic => n.ln(),
            Self::Ols => 0.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Aic => "AIC",
            Self::Hqc => "HQC",
            Self::Bic => "BIC",
            Self::Ols => "OLS",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|ic| ic.label() == s)
    }
}

pub fn gic(fit: &LassoFit, kappa: f64, sigma2: f64) -> f64 {
    fit.rss + kappa * fit.k_nonzero as f64 * sigma2
}

/// Index of the fit minimizing the criterion; ties go to the larger penalty.
pub fn gic_select(path: &[LassoFit], kappa: f64, sigma2: f64) -> usize {
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for (i, fit) in path.iter().enumerate() {
        let v = gic(fit, kappa, sigma2);
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    best
}

/// Sample variance (denominator `n - 1`) of a residual vector.
pub fn residual_variance(residuals: &[f64]) -> f64 {
    let n = residuals.len();
    if n < 2 {
        return 0.0;
    }
    let mean = residuals.iter().sum::<f64>() / n as f64;
    residuals.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1) as f64
}

/// Selects one fit per requested criterion from a single shared path.
///
/// The path runs over the default grid; `sigma2` is the residual variance of
/// its least-penalized fit. The `Ols` criterion has `kappa = 0`, whose
/// minimizer is the unpenalized fit, and is computed directly by [`ols`].
pub fn select_fits(design: &Design, criteria: &[InfoCriterion]) -> Result<Vec<LassoFit>> {
    let n = design.n_rows();
    let penalized: Vec<InfoCriterion> = criteria.iter().copied().filter(|c| *c != InfoCriterion::Ols).collect();
    let mut chosen: Vec<Option<LassoFit>> = vec![None; criteria.len()];
    if !penalized.is_empty() {
        let problem = LassoProblem::new(design)?;
        let path = problem.path(&lambda_grid(problem.lambda_max(), false))?;
        let last = path.last().expect("grid is never empty");
        let sigma2 = residual_variance(&design.residuals(&last.beta));
        for (slot, ic) in chosen.iter_mut().zip(criteria) {
            if *ic != InfoCriterion::Ols {
                *slot = Some(path[gic_select(&path, ic.kappa(n), sigma2)].clone());
            }
        }
    }
    if criteria.contains(&InfoCriterion::Ols) {
        let fit = ols(design)?;
        let k_nonzero = fit.beta.iter().filter(|b| **b != 0.0).count();
        let as_lasso = LassoFit {
            beta_scaled: Vec::new(),
            beta: fit.beta,
            lambda: 0.0,
            k_nonzero,
            rss: fit.rss,
            sweeps: 0,
        };
        for (slot, ic) in chosen.iter_mut().zip(criteria) {
            if *ic == InfoCriterion::Ols {
                *slot = Some(as_lasso.clone());
            }
        }
    }
    Ok(chosen.into_iter().map(|f| f.expect("every criterion handled")).collect())
}
