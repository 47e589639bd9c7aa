//! Synthetic inputs shared by the benchmarks.

use chrono::NaiveDate;
use epf_core::{DayRow, PriceSeries};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

/// Hourly prices with daily and weekly profiles, AR(1) noise at hourly
/// resolution and occasional spikes, starting on Monday 3 January 2011.
pub fn synthetic_prices(days: usize, seed: u64) -> PriceSeries {
    let mut r = StdRng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 3.0).expect("valid standard deviation");
    let mut state = 0.0;
    let prices: Vec<DayRow> = (0..days)
        .map(|d| {
            let level = if d % 7 >= 5 { 32.0 } else { 42.0 };
            std::array::from_fn(|h| {
                state = 0.9 * state + noise.sample(&mut r);
                let daily = 8.0 * ((h as f64 - 6.0) / 24.0 * std::f64::consts::TAU).sin();
                let spike = if r.random::<f64>() < 0.002 { 60.0 } else { 0.0 };
                level + daily + state + spike
            })
        })
        .collect();
    let start = NaiveDate::from_ymd_opt(2011, 1, 3).expect("valid date");
    PriceSeries::new(start, prices, "synthetic", None).expect("finite prices")
}

/// The series flattened hour by hour.
pub fn hourly(series: &PriceSeries) -> Vec<f64> {
    series.prices.iter().flatten().copied().collect()
}
