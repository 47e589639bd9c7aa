//! Diebold-Mariano tests on absolute-error loss differentials.
//!
//! `p_forward` tests the null that forecast X is not more accurate than Y;
//! it is small when X's errors are systematically smaller. `p_reverse`
//! tests the complementary null.

use rayon::prelude::*;

use crate::error::{EpfError, Result};
use crate::ingest::ForecastMatrix;
use crate::HOURS;

/// Minimum length of a loss differential series.
pub const MIN_DM_OBS: usize = 30;
/// Significance level used for hourly counts.
pub const DM_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmResult {
    pub stat: f64,
    pub p_forward: f64,
    pub p_reverse: f64,
    pub n: usize,
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// DM test on a loss differential `delta = |e_X| - |e_Y|`.
///
/// The variance of the mean uses the sample variance of `delta`; with
/// `hac_lags > 0` Bartlett-weighted autocovariances up to that lag are added.
pub fn dm_test(delta: &[f64], hac_lags: usize) -> Result<DmResult> {
    let n = delta.len();
    if n < MIN_DM_OBS {
        return Err(EpfError::InsufficientData { got: n, needed: MIN_DM_OBS });
    }
    let nf = n as f64;
    let mean = delta.iter().sum::<f64>() / nf;
    let centered: Vec<f64> = delta.iter().map(|d| d - mean).collect();
    let mut var = centered.iter().map(|c| c * c).sum::<f64>() / (nf - 1.0);
    for k in 1..=hac_lags.min(n - 1) {
        let gamma = centered[k..].iter().zip(&centered[..n - k]).map(|(a, b)| a * b).sum::<f64>() / nf;
        var += 2.0 * (1.0 - k as f64 / (hac_lags + 1) as f64) * gamma;
    }
    if !(var > 0.0) {
        return Err(EpfError::DegenerateDifferential);
    }
    let stat = mean / (var / nf).sqrt();
    Ok(DmResult {
        stat,
        p_forward: normal_cdf(stat),
        p_reverse: 0.5 * libm::erfc(stat / std::f64::consts::SQRT_2),
        n,
    })
}

fn check_aligned(x: &ForecastMatrix, y: &ForecastMatrix) -> Result<()> {
    if !x.same_alignment(y) {
        return Err(EpfError::ShapeMismatch(format!("{} and {} are not aligned", x.model_id, y.model_id)));
    }
    Ok(())
}

/// Per-day differential of summed absolute errors over the 24 hours.
pub fn multivariate_differential(x: &ForecastMatrix, y: &ForecastMatrix) -> Result<Vec<f64>> {
    check_aligned(x, y)?;
    Ok(x.errors()
        .iter()
        .zip(y.errors())
        .map(|(ex, ey)| ex.iter().map(|e| e.abs()).sum::<f64>() - ey.iter().map(|e| e.abs()).sum::<f64>())
        .collect())
}

/// Per-day differential of absolute errors at hour `h` (1..=24).
pub fn hourly_differential(x: &ForecastMatrix, y: &ForecastMatrix, h: usize) -> Result<Vec<f64>> {
    check_aligned(x, y)?;
    Ok(x.errors().iter().zip(y.errors()).map(|(ex, ey)| ex[h - 1].abs() - ey[h - 1].abs()).collect())
}

pub fn dm_multivariate(x: &ForecastMatrix, y: &ForecastMatrix, hac_lags: usize) -> Result<DmResult> {
    dm_test(&multivariate_differential(x, y)?, hac_lags)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HourlyDm {
    /// Test per hour; `None` where the differential is degenerate.
    pub results: Vec<Option<DmResult>>,
    pub forward_significant: usize,
    pub reverse_significant: usize,
}

/// One DM test per hour; degenerate hours count as not significant.
pub fn dm_hourly(x: &ForecastMatrix, y: &ForecastMatrix, hac_lags: usize) -> Result<HourlyDm> {
    let mut results = Vec::with_capacity(HOURS);
    for h in 1..=HOURS {
        match dm_test(&hourly_differential(x, y, h)?, hac_lags) {
            Ok(r) => results.push(Some(r)),
            Err(EpfError::DegenerateDifferential) => results.push(None),
            Err(e) => return Err(e),
        }
    }
    let count = |f: fn(&DmResult) -> f64| results.iter().flatten().filter(|r| f(r) < DM_ALPHA).count();
    Ok(HourlyDm {
        forward_significant: count(|r| r.p_forward),
        reverse_significant: count(|r| r.p_reverse),
        results,
    })
}

/// Square matrix over `models`: entry `[i][j]` is the forward p-value of the
/// multivariate test with X = model i, Y = model j (`None` on the diagonal
/// and for degenerate pairs).
pub fn pairwise_dm(models: &[ForecastMatrix], hac_lags: usize) -> Result<Vec<Vec<Option<f64>>>> {
    let m = models.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let tests = pairs
        .par_iter()
        .map(|&(i, j)| match dm_multivariate(&models[i], &models[j], hac_lags) {
            Ok(r) => Ok(Some(r)),
            Err(EpfError::DegenerateDifferential) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![vec![None; m]; m];
    for (&(i, j), r) in pairs.iter().zip(tests) {
        if let Some(r) = r {
            out[i][j] = Some(r.p_forward);
            out[j][i] = Some(r.p_reverse);
        }
    }
    Ok(out)
}

/// Square matrix over `models`: entry `[i][j]` counts the hours in which
/// model i is significantly more accurate than model j.
pub fn pairwise_hourly_counts(models: &[ForecastMatrix], hac_lags: usize) -> Result<Vec<Vec<usize>>> {
    let m = models.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let tests = pairs
        .par_iter()
        .map(|&(i, j)| dm_hourly(&models[i], &models[j], hac_lags))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![vec![0; m]; m];
    for (&(i, j), r) in pairs.iter().zip(tests) {
        out[i][j] = r.forward_significant;
        out[j][i] = r.reverse_significant;
    }
    Ok(out)
}
