//! Vector autoregression by the multivariate Yule-Walker equations.
//!
//! For order `p` the coefficient blocks solve the block-Toeplitz system
//! `[Phi_1 .. Phi_p] R = [Gamma(1) .. Gamma(p)]` with `R[i][m] = Gamma(m - i)`
//! and `Gamma(-h) = Gamma(h)'`. The order minimizes
//! `D ln det Sigma_p + 2 p k^2`.

use super::linalg::{cholesky, spd_solve_multi};
use crate::error::{EpfError, Result};

/// Minimum number of observations accepted by [`mv_yule_walker`].
pub const MIN_VAR_OBS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct VarFit {
    pub dim: usize,
    pub order: usize,
    /// `phi[k]` is the row-major `dim x dim` coefficient matrix of lag `k + 1`.
    pub phi: Vec<Vec<f64>>,
    /// Column means of the input panel.
    pub intercept: Vec<f64>,
    /// Residual covariance at the selected order, row-major.
    pub sigma: Vec<f64>,
    /// Criterion values for orders `0..=p_max`.
    pub aic: Vec<f64>,
}

impl VarFit {
    /// One-step prediction; `lags[k]` is the observation `k + 1` steps back.
    pub fn predict(&self, lags: &[&[f64]]) -> Vec<f64> {
        let k = self.dim;
        let mut out = self.intercept.clone();
        for (phi, x) in self.phi.iter().zip(lags) {
            for i in 0..k {
                let row = &phi[i * k..(i + 1) * k];
                out[i] += row
                    .iter()
                    .zip(x.iter().zip(&self.intercept))
                    .map(|(c, (v, m))| c * (v - m))
                    .sum::<f64>();
            }
        }
        out
    }
}

/// Sample autocovariance matrices `Gamma(0..=max_lag)` (biased, 1/D) of a
/// row-major panel with `dim` columns, after centering each column.
pub fn autocovariance_matrices(panel: &[f64], dim: usize, max_lag: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = panel.len() / dim;
    let mut mean = vec![0.0; dim];
    for row in panel.chunks_exact(dim) {
        mean.iter_mut().zip(row).for_each(|(m, v)| *m += v);
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let x: Vec<f64> = panel.chunks_exact(dim).flat_map(|r| r.iter().zip(&mean).map(|(v, m)| v - m)).collect();
    let gammas = (0..=max_lag)
        .map(|h| {
            let mut g = vec![0.0; dim * dim];
            for t in h..n {
                let cur = &x[t * dim..(t + 1) * dim];
                let lag = &x[(t - h) * dim..(t - h + 1) * dim];
                for i in 0..dim {
                    let ci = cur[i];
                    let gi = &mut g[i * dim..(i + 1) * dim];
                    gi.iter_mut().zip(lag).for_each(|(o, l)| *o += ci * l);
                }
            }
            g.iter_mut().for_each(|v| *v /= n as f64);
            g
        })
        .collect();
    (mean, gammas)
}

fn transpose(m: &[f64], k: usize) -> Vec<f64> {
    let mut t = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            t[j * k + i] = m[i * k + j];
        }
    }
    t
}

struct OrderSolution {
    phi: Vec<Vec<f64>>,
    sigma: Vec<f64>,
    log_det: f64,
}

fn solve_order(gammas: &[Vec<f64>], k: usize, p: usize) -> Result<OrderSolution> {
    let g0 = &gammas[0];
    if p == 0 {
        let f = cholesky(g0, k).ok_or(EpfError::SingularGamma { order: 0 })?;
        return Ok(OrderSolution { phi: Vec::new(), sigma: g0.clone(), log_det: f.log_det() });
    }
    let kp = k * p;
    // R: block (i, m) = Gamma(m - i)
    let mut r = vec![0.0; kp * kp];
    for bi in 0..p {
        for bm in 0..p {
            let block = if bm >= bi { gammas[bm - bi].clone() } else { transpose(&gammas[bi - bm], k) };
            for a in 0..k {
                for b in 0..k {
                    r[(bi * k + a) * kp + bm * k + b] = block[a * k + b];
                }
            }
        }
    }
    // right-hand side C' (kp x k): block m is Gamma(m)'
    let mut rhs = vec![0.0; kp * k];
    for bm in 0..p {
        let gt = transpose(&gammas[bm + 1], k);
        for a in 0..k {
            for b in 0..k {
                rhs[(bm * k + a) * k + b] = gt[a * k + b];
            }
        }
    }
    let f = cholesky(&r, kp).ok_or(EpfError::SingularGamma { order: p })?;
    // X = B' (kp x k)
    let x = spd_solve_multi(&f, &rhs, k);
    let phi: Vec<Vec<f64>> = (0..p)
        .map(|lag| {
            let mut m = vec![0.0; k * k];
            for a in 0..k {
                for b in 0..k {
                    m[b * k + a] = x[(lag * k + a) * k + b];
                }
            }
            m
        })
        .collect();
    // Sigma = Gamma(0) - sum_i Phi_i Gamma(i)'
    let mut sigma = g0.clone();
    for (i, ph) in phi.iter().enumerate() {
        let g = &gammas[i + 1];
        for a in 0..k {
            for b in 0..k {
                // (Phi Gamma')[a][b] = sum_c Phi[a][c] Gamma[b][c]
                let s: f64 = (0..k).map(|c| ph[a * k + c] * g[b * k + c]).sum();
                sigma[a * k + b] -= s;
            }
        }
    }
    for a in 0..k {
        for b in a + 1..k {
            let avg = 0.5 * (sigma[a * k + b] + sigma[b * k + a]);
            sigma[a * k + b] = avg;
            sigma[b * k + a] = avg;
        }
    }
    let fs = cholesky(&sigma, k).ok_or(EpfError::SingularGamma { order: p })?;
    Ok(OrderSolution { phi, sigma, log_det: fs.log_det() })
}

/// Fits a VAR on a row-major `D x dim` panel of demeaned observations.
///
/// With `fixed_order = true` the order is forced to `p_max`; otherwise it is
/// chosen by the multivariate AIC over `0..=p_max`.
pub fn mv_yule_walker(panel: &[f64], dim: usize, p_max: usize, fixed_order: bool) -> Result<VarFit> {
    if dim == 0 || panel.len() % dim != 0 {
        return Err(EpfError::ShapeMismatch(format!("panel of {} values is not a multiple of {dim}", panel.len())));
    }
    let n = panel.len() / dim;
    if n < MIN_VAR_OBS || n <= p_max {
        return Err(EpfError::ShortSeries { len: n, needed: MIN_VAR_OBS.max(p_max + 1) });
    }
    if let Some(i) = panel.iter().position(|v| !v.is_finite()) {
        return Err(EpfError::NonFiniteValue { line: i / dim });
    }
    let (mean, gammas) = autocovariance_matrices(panel, dim, p_max);
    let penalty = (dim * dim) as f64;
    let orders: Vec<usize> = if fixed_order { vec![p_max] } else { (0..=p_max).collect() };
    let mut aic = vec![f64::NAN; p_max + 1];
    let mut best: Option<(f64, usize, OrderSolution)> = None;
    for p in orders {
        let sol = solve_order(&gammas, dim, p)?;
        let crit = n as f64 * sol.log_det + 2.0 * p as f64 * penalty;
        aic[p] = crit;
        if best.as_ref().is_none_or(|(b, _, _)| crit < *b) {
            best = Some((crit, p, sol));
        }
    }
    let (_, order, sol) = best.expect("at least one order");
    Ok(VarFit { dim, order, phi: sol.phi, intercept: mean, sigma: sol.sigma, aic })
}
