#![allow(dead_code)]

use chrono::NaiveDate;
use epf_core::estimation::Design;
use epf_core::{DayRow, PriceSeries};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal, StandardNormal};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Hourly prices with daily and weekly profiles, AR(1) noise at hourly
/// resolution and occasional spikes, starting on a Monday.
pub fn synthetic_prices(days: usize, seed: u64) -> PriceSeries {
    let mut r = rng(seed);
    let noise = Normal::new(0.0, 3.0).unwrap();
    let mut state = 0.0;
    let prices: Vec<DayRow> = (0..days)
        .map(|d| {
            let weekend = matches!(d % 7, 5 | 6);
            std::array::from_fn(|h| {
                state = 0.9 * state + noise.sample(&mut r);
                let daily = 8.0 * ((h as f64 - 6.0) / 24.0 * std::f64::consts::TAU).sin();
                let level = if weekend { 32.0 } else { 42.0 };
                let spike = if r.random::<f64>() < 0.002 { 60.0 } else { 0.0 };
                level + daily + state + spike
            })
        })
        .collect();
    // 3 Jan 2011 was a Monday
    PriceSeries::new(NaiveDate::from_ymd_opt(2011, 1, 3).unwrap(), prices, "synthetic", None).unwrap()
}

/// Row-major `n x p` matrix of standard normals.
pub fn normal_matrix(r: &mut StdRng, n: usize, p: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..p).map(|_| r.sample(StandardNormal)).collect()).collect()
}

pub fn normal_vec(r: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.sample(StandardNormal)).collect()
}

/// Random regression problem with a sparse true coefficient vector.
pub fn random_design(r: &mut StdRng, n: usize, p: usize, k_true: usize, noise_sd: f64) -> (Design, Vec<f64>) {
    let x = normal_matrix(r, n, p);
    let mut beta = vec![0.0; p];
    for b in beta.iter_mut().take(k_true) {
        *b = if r.random::<bool>() { 1.0 } else { -1.0 } * (1.0 + r.random::<f64>());
    }
    let y: Vec<f64> = x
        .iter()
        .map(|row| row.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>() + noise_sd * r.sample::<f64, _>(StandardNormal))
        .collect();
    (Design::from_rows(&x, y).unwrap(), beta)
}

/// Simulates `n` values of an AR process with standard normal innovations
/// after a burn-in.
pub fn simulate_ar(r: &mut StdRng, phi: &[f64], n: usize) -> Vec<f64> {
    let burn = 500;
    let mut x = vec![0.0; n + burn];
    for t in phi.len()..n + burn {
        let e: f64 = r.sample(StandardNormal);
        x[t] = e + phi.iter().enumerate().map(|(k, p)| p * x[t - 1 - k]).sum::<f64>();
    }
    x.split_off(burn)
}

/// Independent least-squares solve through an SVD pseudo-inverse.
pub fn svd_ols(design: &Design) -> Vec<f64> {
    let n = design.n_rows();
    let p = design.n_cols();
    let x = nalgebra::DMatrix::from_fn(n, p, |i, j| design.column(j).get(i));
    let y = nalgebra::DVector::from_column_slice(design.y());
    let svd = x.svd(true, true);
    svd.solve(&y, 1e-12).unwrap().iter().copied().collect()
}
