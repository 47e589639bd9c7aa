//! Univariate autoregression by the Yule-Walker equations, solved with the
//! Levinson-Durbin recursion, with AIC order selection.

use crate::error::{EpfError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ArFit {
    pub order: usize,
    /// AR coefficients for lags `1..=order`.
    pub phi: Vec<f64>,
    /// Sample mean of the (seasonally demeaned) input series.
    pub intercept: f64,
    /// Innovation variance at the selected order.
    pub sigma2: f64,
    /// Innovation variances for orders `0..=p_max`.
    pub innovation_variances: Vec<f64>,
    /// `n ln(sigma2_p) + 2p` for orders `0..=p_max`.
    pub aic: Vec<f64>,
}

impl ArFit {
    /// One-step prediction of the next value given lagged values
    /// (`lags[0]` is the most recent observation).
    pub fn predict(&self, lags: &[f64]) -> f64 {
        self.intercept
            + self.phi.iter().zip(lags).map(|(p, x)| p * (x - self.intercept)).sum::<f64>()
    }
}

/// Biased (1/n) sample autocovariances of the mean-centered series for lags `0..=max_lag`.
pub fn autocovariances(series: &[f64], max_lag: usize) -> Vec<f64> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = series.iter().map(|v| v - mean).collect();
    (0..=max_lag)
        .map(|k| {
            if k >= n {
                0.0
            } else {
                x[k..].iter().zip(&x[..n - k]).map(|(a, b)| a * b).sum::<f64>() / n as f64
            }
        })
        .collect()
}

/// Levinson-Durbin recursion. Calls `visit(order, coefficients, sigma2)` for
/// every order `0..=p_max`; returns the innovation variances.
pub fn levinson_durbin(gamma: &[f64], p_max: usize, mut visit: impl FnMut(usize, &[f64], f64)) -> Vec<f64> {
    let mut phi: Vec<f64> = Vec::with_capacity(p_max);
    let mut prev: Vec<f64> = Vec::with_capacity(p_max);
    let mut sigma = Vec::with_capacity(p_max + 1);
    let mut s = gamma[0];
    sigma.push(s);
    visit(0, &phi, s);
    for m in 1..=p_max {
        let k = if s > 0.0 {
            let acc: f64 = phi.iter().enumerate().map(|(i, p)| p * gamma[m - 1 - i]).sum();
            (gamma[m] - acc) / s
        } else {
            0.0
        };
        prev.clear();
        prev.extend_from_slice(&phi);
        for i in 0..m - 1 {
            phi[i] = prev[i] - k * prev[m - 2 - i];
        }
        phi.push(k);
        s *= 1.0 - k * k;
        if s < 0.0 {
            s = 0.0;
        }
        sigma.push(s);
        visit(m, &phi, s);
    }
    sigma
}

fn aic(n: usize, sigma2: f64, order: usize) -> f64 {
    n as f64 * sigma2.ln() + 2.0 * order as f64
}

/// Fits an AR model to a demeaned series, choosing the order in `0..=p_max`
/// that minimizes `n ln(sigma2_p) + 2p`.
pub fn yule_walker(series: &[f64], p_max: usize) -> Result<ArFit> {
    fit(series, p_max, None)
}

/// Fits an AR model of exactly `order`.
pub fn yule_walker_fixed(series: &[f64], order: usize) -> Result<ArFit> {
    fit(series, order, Some(order))
}

fn fit(series: &[f64], p_max: usize, fixed: Option<usize>) -> Result<ArFit> {
    let n = series.len();
    if n <= p_max {
        return Err(EpfError::ShortSeries { len: n, needed: p_max });
    }
    if let Some(line) = series.iter().position(|v| !v.is_finite()) {
        return Err(EpfError::NonFiniteValue { line });
    }
    let intercept = series.iter().sum::<f64>() / n as f64;
    let gamma = autocovariances(series, p_max);
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    let mut aics = Vec::with_capacity(p_max + 1);
    let sigma = levinson_durbin(&gamma, p_max, |m, phi, s2| {
        let crit = aic(n, s2, m);
        aics.push(crit);
        let take = match fixed {
            Some(p) => m == p,
            None => best.as_ref().is_none_or(|(b, _, _)| crit < *b),
        };
        if take {
            best = Some((crit, m, phi.to_vec()));
        }
    });
    let (_, order, phi) = best.expect("order 0 always visited");
    Ok(ArFit {
        order,
        phi,
        intercept,
        sigma2: sigma[order],
        innovation_variances: sigma,
        aic: aics,
    })
}
