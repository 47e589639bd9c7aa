//! Variance-stabilizing asinh transform with (median, MAD) normalization.
//!
//! Prices are standardized as `x = (P - a) / b` where `a` is the median of the
//! calibration window and `b` the median absolute deviation around it, scaled
//! to be a consistent estimator of the standard deviation under normality.
//! The transformed value is `asinh(x)`; forecasts are mapped back with
//! `b * sinh(y) + a`.

use crate::error::{EpfError, Result};
use crate::DayRow;

/// 75% quantile of the standard normal distribution.
pub const Z_075: f64 = 0.674_489_750_196_082;

/// Normal-consistency factor for the MAD, `1 / z_0.75`.
pub const MAD_FACTOR: f64 = 1.0 / Z_075;

/// Shift and scale of the asinh normalization fitted on one calibration window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformSpec {
    /// Shift: sample median of the window.
    pub a: f64,
    /// Scale: normal-consistent MAD about the median. Always positive.
    pub b: f64,
}

/// Median of a slice; the mean of the two central order statistics for even lengths.
///
/// Returns `None` for an empty slice. The input is not reordered.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut buf = values.to_vec();
    Some(median_in_place(&mut buf))
}

fn median_in_place(buf: &mut [f64]) -> f64 {
    let n = buf.len();
    let mid = n / 2;
    let (_, upper, _) = buf.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        // largest element of the lower half
        let lower = buf[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

impl TransformSpec {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(EpfError::DegenerateWindow);
        }
        Ok(Self { a, b })
    }

    /// Fits the shift and scale on a flat sample of prices.
    pub fn fit_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(EpfError::EmptyMatrix);
        }
        if let Some(line) = values.iter().position(|v| !v.is_finite()) {
            return Err(EpfError::NonFiniteValue { line });
        }
        let mut buf = values.to_vec();
        let a = median_in_place(&mut buf);
        for (dst, src) in buf.iter_mut().zip(values) {
            *dst = (src - a).abs();
        }
        let mad = median_in_place(&mut buf);
        if mad == 0.0 {
            return Err(EpfError::DegenerateWindow);
        }
        Ok(Self { a, b: MAD_FACTOR * mad })
    }

    /// Fits on a day x hour calibration block.
    pub fn fit(calib: &[DayRow]) -> Result<Self> {
        let flat: Vec<f64> = calib.iter().flatten().copied().collect();
        Self::fit_values(&flat)
    }

    #[inline]
    pub fn apply(&self, price: f64) -> f64 {
        ((price - self.a) / self.b).asinh()
    }

    #[inline]
    pub fn invert(&self, y: f64) -> f64 {
        self.b * y.sinh() + self.a
    }

    pub fn apply_block(&self, block: &[DayRow]) -> Vec<DayRow> {
        block.iter().map(|row| row.map(|p| self.apply(p))).collect()
    }

    pub fn invert_row(&self, row: &DayRow) -> DayRow {
        row.map(|y| self.invert(y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mad_factor_matches_reference() {
        assert!((MAD_FACTOR - 1.4826).abs() < 5e-5);
        assert!((MAD_FACTOR - 1.482_602_218_505_602).abs() < 1e-12);
    }

    #[test]
    fn small_sample_fit() {
        let spec = TransformSpec::fit_values(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(spec.a, 2.0);
        assert!((spec.b - MAD_FACTOR).abs() < 1e-15);
    }

    #[test]
    fn even_median_averages_central_pair() {
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn constant_window_is_degenerate() {
        let block = vec![[7.5; 24]; 10];
        assert!(matches!(TransformSpec::fit(&block), Err(EpfError::DegenerateWindow)));
    }

    #[test]
    fn apply_and_invert_values() {
        let spec = TransformSpec::new(0.0, 1.0).unwrap();
        assert!((spec.apply(10.0) - (10.0 + 101f64.sqrt()).ln()).abs() < 1e-14);
        assert!((spec.apply(10.0) - 2.998223).abs() < 1e-6);
        let spec = TransformSpec::new(30.0, 10.0).unwrap();
        assert_eq!(spec.apply(30.0), 0.0);
        assert_eq!(spec.invert(0.0), 30.0);
        assert!((spec.invert(1.0) - 41.7520).abs() < 1e-4);
        assert!((spec.invert(spec.apply(-50.0)) + 50.0).abs() < 1e-9);
    }

    #[test]
    fn log_asymptote() {
        let spec = TransformSpec::new(0.0, 1.0).unwrap();
        for x in [1e6, -1e6] {
            let approx = f64::signum(x) * (2.0 * f64::abs(x)).ln();
            assert!((spec.apply(x) - approx).abs() < 1e-9);
        }
    }
}
