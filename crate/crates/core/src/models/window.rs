use crate::calendar::{weekday, SeasonalMeans};
use crate::error::Result;
use crate::transform::TransformSpec;
use crate::DayRow;

/// One calibration window prepared for fitting: raw prices, the transform
/// fitted on them, the transformed block and its seasonal means.
///
/// The forecast target is the day immediately after the window, i.e.
/// block-relative day `len()`.
#[derive(Debug, Clone)]
pub struct WindowData<'a> {
    pub raw: &'a [DayRow],
    pub transform: TransformSpec,
    pub y: Vec<DayRow>,
    pub means: SeasonalMeans,
    /// Weekday of the first day of the window.
    pub start_weekday: u8,
}

impl<'a> WindowData<'a> {
    pub fn new(raw: &'a [DayRow], start_weekday: u8) -> Result<Self> {
        let transform = TransformSpec::fit(raw)?;
        let y = transform.apply_block(raw);
        let means = SeasonalMeans::fit(&y, start_weekday)?;
        Ok(Self { raw, transform, y, means, start_weekday })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Weekday of block-relative day `d`.
    pub fn weekday(&self, d: usize) -> u8 {
        weekday(self.start_weekday, d)
    }

    /// Weekday of the forecast target.
    pub fn target_weekday(&self) -> u8 {
        self.weekday(self.len())
    }

    /// Transformed series flattened to hourly resolution.
    pub fn flat(&self) -> Vec<f64> {
        self.y.iter().flat_map(|r| r.iter().copied()).collect()
    }
}
