//! Lasso by cyclic coordinate descent along a decreasing penalty path.
//!
//! Columns and the response are scaled to unit Euclidean norm (no centering)
//! and the objective in scaled coordinates is
//! `||y - X b||^2 + lambda * ||b||_1`, so the coordinate update is a soft
//! threshold at `lambda / 2`. Updates run on the scaled Gram matrix
//! (covariance updates), which keeps each sweep `O(p * active)` regardless of
//! the number of rows.

use super::design::Design;
use super::linalg::cholesky;
use crate::error::{EpfError, Result};

/// Convergence threshold on the largest coefficient change in one sweep.
pub const CD_TOL: f64 = 1e-7;
/// Maximum number of coordinate sweeps per penalty value.
pub const MAX_SWEEPS: usize = 100_000;
/// Minimum number of active-set sweeps between attempts to solve the
/// active set exactly.
const MIN_SWEEPS_BEFORE_POLISH: usize = 5;
/// Number of log-spaced penalties in the default grid.
pub const GRID_LEN: usize = 100;
/// Ratio of the smallest to the largest penalty in the default grid.
pub const GRID_RATIO: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    /// Coefficients in the original units of the design.
    pub beta: Vec<f64>,
    /// Coefficients in scaled coordinates.
    pub beta_scaled: Vec<f64>,
    pub lambda: f64,
    pub k_nonzero: usize,
    /// Residual sum of squares in original units.
    pub rss: f64,
    pub sweeps: usize,
}

impl LassoFit {
    pub fn support(&self) -> Vec<bool> {
        self.beta.iter().map(|b| *b != 0.0).collect()
    }
}

pub fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Default penalty grid: [`GRID_LEN`] log-spaced values from `lambda_max`
/// down to `GRID_RATIO * lambda_max`, optionally followed by `0`.
pub fn lambda_grid(lambda_max: f64, include_zero: bool) -> Vec<f64> {
    let mut grid = if lambda_max > 0.0 {
        let step = GRID_RATIO.ln() / (GRID_LEN - 1) as f64;
        (0..GRID_LEN).map(|i| lambda_max * (step * i as f64).exp()).collect()
    } else {
        Vec::new()
    };
    if include_zero || grid.is_empty() {
        grid.push(0.0);
    }
    grid
}

/// Scaled lasso problem prepared from a design: everything coordinate
/// descent needs, independent of the penalty.
#[derive(Debug, Clone)]
pub struct LassoProblem {
    p: usize,
    /// Scaled Gram matrix, row-major.
    gram: Vec<f64>,
    /// Scaled `x_j' y`.
    c: Vec<f64>,
    col_norm: Vec<f64>,
    y_norm: f64,
}

impl LassoProblem {
    pub fn new(design: &Design) -> Result<Self> {
        design.validate()?;
        let p = design.n_cols();
        let col_norm: Vec<f64> = design.columns().iter().map(|c| c.sq_norm().sqrt()).collect();
        let y_norm = design.y().iter().map(|v| v * v).sum::<f64>().sqrt();
        let raw = design.gram();
        let xty = design.xty();
        let mut gram = vec![0.0; p * p];
        let mut c = vec![0.0; p];
        for i in 0..p {
            if col_norm[i] == 0.0 {
                continue;
            }
            if y_norm > 0.0 {
                c[i] = xty[i] / (col_norm[i] * y_norm);
            }
            for j in 0..p {
                if col_norm[j] > 0.0 {
                    gram[i * p + j] = raw[i * p + j] / (col_norm[i] * col_norm[j]);
                }
            }
        }
        Ok(Self { p, gram, c, col_norm, y_norm })
    }

    pub fn n_cols(&self) -> usize {
        self.p
    }

    /// Smallest penalty at which every coefficient is zero.
    pub fn lambda_max(&self) -> f64 {
        2.0 * self.c.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn usable(&self, j: usize) -> bool {
        self.col_norm[j] > 0.0
    }

    /// Gradient `x~' (y~ - X~ b~)` in scaled coordinates.
    pub fn gradient(&self, beta_scaled: &[f64]) -> Vec<f64> {
        let p = self.p;
        let mut g = self.c.clone();
        for (k, &b) in beta_scaled.iter().enumerate() {
            if b != 0.0 {
                for j in 0..p {
                    g[j] -= self.gram[j * p + k] * b;
                }
            }
        }
        g
    }

    /// Largest violation of the stationarity conditions at `beta_scaled`
    /// for penalty `lambda`, in scaled coordinates.
    pub fn kkt_violation(&self, beta_scaled: &[f64], lambda: f64) -> f64 {
        let g = self.gradient(beta_scaled);
        (0..self.p)
            .filter(|&j| self.usable(j))
            .map(|j| {
                let b = beta_scaled[j];
                if b != 0.0 {
                    (2.0 * g[j] - lambda * b.signum()).abs()
                } else {
                    (2.0 * g[j].abs() - lambda).max(0.0)
                }
            })
            .fold(0.0, f64::max)
    }

    /// One pass over `coords`; returns the largest absolute coefficient change.
    fn sweep(&self, coords: &[usize], half_lambda: f64, beta: &mut [f64], grad: &mut [f64]) -> f64 {
        let p = self.p;
        let mut max_delta = 0.0f64;
        for &j in coords {
            let gjj = self.gram[j * p + j];
            let old = beta[j];
            let z = grad[j] + gjj * old;
            let new = soft_threshold(z, half_lambda) / gjj;
            let delta = new - old;
            if delta != 0.0 {
                beta[j] = new;
                let col = &self.gram[j * p..(j + 1) * p];
                grad.iter_mut().zip(col).for_each(|(g, gk)| *g -= gk * delta);
                max_delta = max_delta.max(delta.abs());
            }
        }
        max_delta
    }

    /// Moves the active coefficients towards the solution of the
    /// stationarity equations with their current signs. When a coefficient
    /// would change sign, the step stops where it first reaches zero, that
    /// coordinate leaves the active set and the solve is repeated. Every step
    /// lowers the objective. Returns `false` if a system is not numerically
    /// positive definite, leaving `beta` at the last accepted point.
    fn polish_active(&self, active: &[usize], half_lambda: f64, beta: &mut [f64]) -> bool {
        let mut set: Vec<usize> = active.iter().copied().filter(|&j| beta[j] != 0.0).collect();
        while !set.is_empty() {
            let k = set.len();
            let mut g = vec![0.0; k * k];
            let mut rhs = vec![0.0; k];
            for (a, &i) in set.iter().enumerate() {
                for (b, &j) in set.iter().enumerate() {
                    g[a * k + b] = self.gram[i * self.p + j];
                }
                rhs[a] = self.c[i] - half_lambda * beta[i].signum();
            }
            let Some(f) = cholesky(&g, k) else {
                return false;
            };
            let target = f.solve(&rhs);
            if target.iter().any(|t| !t.is_finite()) {
                return false;
            }
            let mut step = 1.0;
            let mut blocking = None;
            for (a, &j) in set.iter().enumerate() {
                if target[a].signum() != beta[j].signum() || target[a] == 0.0 {
                    let t = beta[j] / (beta[j] - target[a]);
                    if t < step {
                        step = t;
                        blocking = Some(a);
                    }
                }
            }
            for (a, &j) in set.iter().enumerate() {
                beta[j] += step * (target[a] - beta[j]);
            }
            match blocking {
                None => return true,
                Some(a) => {
                    beta[set[a]] = 0.0;
                    set.remove(a);
                }
            }
        }
        true
    }

    fn solve(&self, lambda: f64, beta: &mut [f64]) -> Result<usize> {
        let all: Vec<usize> = (0..self.p).filter(|&j| self.usable(j)).collect();
        let half = 0.5 * lambda;
        let mut grad = self.gradient(beta);
        let mut sweeps = 0;
        loop {
            sweeps += 1;
            if self.sweep(&all, half, beta, &mut grad) < CD_TOL {
                return Ok(sweeps);
            }
            let active: Vec<usize> = all.iter().copied().filter(|&j| beta[j] != 0.0).collect();
            let polish_every = MIN_SWEEPS_BEFORE_POLISH.max(active.len() * active.len() / (10 * self.p));
            let mut inner = 0;
            loop {
                if sweeps >= MAX_SWEEPS {
                    return Err(EpfError::NoConvergence { lambda, sweeps });
                }
                sweeps += 1;
                inner += 1;
                if self.sweep(&active, half, beta, &mut grad) < CD_TOL {
                    break;
                }
                if inner % polish_every == 0 {
                    let ok = self.polish_active(&active, half, beta);
                    grad = self.gradient(beta);
                    if ok {
                        break;
                    }
                }
            }
            if sweeps >= MAX_SWEEPS {
                return Err(EpfError::NoConvergence { lambda, sweeps });
            }
        }
    }

    fn finish(&self, lambda: f64, beta_scaled: &[f64], sweeps: usize) -> LassoFit {
        let grad = self.gradient(beta_scaled);
        let cb: f64 = self.c.iter().zip(beta_scaled).map(|(a, b)| a * b).sum();
        let bg: f64 = beta_scaled.iter().zip(&grad).map(|(a, b)| a * b).sum();
        let rss_scaled = if self.y_norm > 0.0 { (1.0 - cb - bg).max(0.0) } else { 0.0 };
        let beta: Vec<f64> = beta_scaled
            .iter()
            .zip(&self.col_norm)
            .map(|(&b, &n)| if b != 0.0 { b * self.y_norm / n } else { 0.0 })
            .collect();
        LassoFit {
            k_nonzero: beta.iter().filter(|b| **b != 0.0).count(),
            beta,
            beta_scaled: beta_scaled.to_vec(),
            lambda,
            rss: rss_scaled * self.y_norm * self.y_norm,
            sweeps,
        }
    }

    /// Fits every penalty of a strictly descending grid with warm starts.
    pub fn path(&self, lambdas: &[f64]) -> Result<Vec<LassoFit>> {
        if lambdas.windows(2).any(|w| !(w[0] > w[1])) || lambdas.iter().any(|l| !(*l >= 0.0)) {
            return Err(EpfError::InvalidArgument("penalty grid must be non-negative and strictly descending".into()));
        }
        let mut beta = vec![0.0; self.p];
        let mut out = Vec::with_capacity(lambdas.len());
        for &lambda in lambdas {
            let sweeps = if self.y_norm > 0.0 { self.solve(lambda, &mut beta)? } else { 0 };
            out.push(self.finish(lambda, &beta, sweeps));
        }
        Ok(out)
    }
}

/// Convenience wrapper: scales `design` and fits the path over `lambdas`.
pub fn lasso_path(design: &Design, lambdas: &[f64]) -> Result<Vec<LassoFit>> {
    LassoProblem::new(design)?.path(lambdas)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
    }

    #[test]
    fn grid_shape() {
        let g = lambda_grid(2.0, true);
        assert_eq!(g.len(), GRID_LEN + 1);
        assert_eq!(g[0], 2.0);
        assert!((g[GRID_LEN - 1] - 2.0 * GRID_RATIO).abs() < 1e-15);
        assert_eq!(*g.last().unwrap(), 0.0);
        assert!(g.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn zero_column_is_ignored() {
        let mut d = Design::new(vec![1.0, 2.0, 3.0]);
        d.push_dense("x", vec![1.0, 1.0, 1.0]);
        d.push_dense("zero", vec![0.0, 0.0, 0.0]);
        let fits = lasso_path(&d, &[0.0]).unwrap();
        assert!((fits[0].beta[0] - 2.0).abs() < 1e-9);
        assert_eq!(fits[0].beta[1], 0.0);
    }

    #[test]
    fn rejects_ascending_grid() {
        let mut d = Design::new(vec![1.0, 2.0]);
        d.push_dense("x", vec![1.0, 0.0]);
        assert!(lasso_path(&d, &[0.1, 0.2]).is_err());
    }
}
