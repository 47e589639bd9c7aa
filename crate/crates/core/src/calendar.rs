//! Seasonal dummies (hour-of-day, day-of-week, hour-of-week) and the
//! corresponding bucket means used as regressors and de-meaning terms.
//!
//! Weekdays are numbered 1 (Monday) to 7 (Sunday). Day indices are zero-based
//! offsets from a start day whose weekday is known.

use crate::error::{EpfError, Result};
use crate::{DayRow, HOURS};

pub const HOURS_PER_WEEK: usize = 168;

/// Weekday (1 = Monday .. 7 = Sunday) of day `d` given the weekday of day 0.
#[inline]
pub fn weekday(start_weekday: u8, d: usize) -> u8 {
    debug_assert!((1..=7).contains(&start_weekday));
    ((start_weekday as usize - 1 + d) % 7 + 1) as u8
}

/// One-based hour-of-week index for weekday `w` and hour `h`.
#[inline]
pub fn hour_of_week(w: u8, h: usize) -> usize {
    (w as usize - 1) * HOURS + h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DummyKind {
    /// Hour of the day, 1..=24.
    HoD(usize),
    /// Day of the week, 1..=7.
    DoW(u8),
    /// Hour of the week, 1..=168.
    HoW(usize),
}

/// Value of a seasonal dummy at day `d`, hour `h` (1..=24).
pub fn dummy_value(kind: DummyKind, d: usize, h: usize, start_weekday: u8) -> u8 {
    let w = weekday(start_weekday, d);
    let hit = match kind {
        DummyKind::HoD(k) => k == h,
        DummyKind::DoW(k) => k == w,
        DummyKind::HoW(k) => k == hour_of_week(w, h),
    };
    hit as u8
}

/// Which seasonal mean a model removes before fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Demeaner {
    Overall,
    DoW,
    HoD,
    HoW,
}

impl Demeaner {
    pub fn label(self) -> &'static str {
        match self {
            Demeaner::Overall => "",
            Demeaner::DoW => "DoW",
            Demeaner::HoD => "HoD",
            Demeaner::HoW => "HoW",
        }
    }
}

/// Bucket means of a transformed calibration block.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonalMeans {
    pub how: [f64; HOURS_PER_WEEK],
    pub hod: [f64; HOURS],
    pub dow: [f64; 7],
    pub overall: f64,
    /// Weekday of the first day of the block the means were fitted on.
    pub start_weekday: u8,
}

impl SeasonalMeans {
    /// Bucket averages over `block`, whose first row falls on `start_weekday`.
    pub fn fit(block: &[DayRow], start_weekday: u8) -> Result<Self> {
        if block.len() < 7 {
            return Err(EpfError::ShortWindow {
                days: block.len(),
                reason: "seasonal means need at least one full week".into(),
            });
        }
        let mut how = [0.0; HOURS_PER_WEEK];
        let mut hod = [0.0; HOURS];
        let mut dow = [0.0; 7];
        let mut n_dow = [0usize; 7];
        let mut total = 0.0;
        for (d, row) in block.iter().enumerate() {
            let w = weekday(start_weekday, d) as usize;
            n_dow[w - 1] += 1;
            for (h, &y) in row.iter().enumerate() {
                how[(w - 1) * HOURS + h] += y;
                hod[h] += y;
                dow[w - 1] += y;
                total += y;
            }
        }
        let days = block.len() as f64;
        for (w, count) in n_dow.iter().enumerate() {
            let c = *count as f64;
            dow[w] /= c * HOURS as f64;
            for h in 0..HOURS {
                how[w * HOURS + h] /= c;
            }
        }
        for v in hod.iter_mut() {
            *v /= days;
        }
        Ok(Self {
            how,
            hod,
            dow,
            overall: total / (days * HOURS as f64),
            start_weekday,
        })
    }

    /// Mean for weekday `w` and hour `h` (1..=24) under the given grouping.
    #[inline]
    pub fn value(&self, demeaner: Demeaner, w: u8, h: usize) -> f64 {
        match demeaner {
            Demeaner::Overall => self.overall,
            Demeaner::DoW => self.dow[w as usize - 1],
            Demeaner::HoD => self.hod[h - 1],
            Demeaner::HoW => self.how[hour_of_week(w, h) - 1],
        }
    }

    /// Mean row for block-relative day `d` (may lie beyond the block).
    pub fn row(&self, demeaner: Demeaner, d: usize) -> DayRow {
        let w = weekday(self.start_weekday, d);
        std::array::from_fn(|h| self.value(demeaner, w, h + 1))
    }

    /// Subtracts the per-observation mean from every cell of `block`.
    pub fn demean(&self, demeaner: Demeaner, block: &[DayRow]) -> Vec<DayRow> {
        block
            .iter()
            .enumerate()
            .map(|(d, row)| {
                let m = self.row(demeaner, d);
                std::array::from_fn(|h| row[h] - m[h])
            })
            .collect()
    }
}
