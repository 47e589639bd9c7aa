mod common;

use epf_core::calendar::{dummy_value, hour_of_week, weekday};
use epf_core::estimation::{ols, Design};
use epf_core::transform::{median, MAD_FACTOR};
use epf_core::{Demeaner, DummyKind, SeasonalMeans, TransformSpec, HOURS};
use rand::Rng;
use rand_distr::{Distribution, Normal};

#[test]
fn transform_scale_estimates_normal_sigma() {
    let mut r = common::rng(1);
    let n = Normal::new(5.0, 2.0).unwrap();
    let values: Vec<f64> = (0..1_000_000).map(|_| n.sample(&mut r)).collect();
    let spec = TransformSpec::fit_values(&values).unwrap();
    assert!((spec.a - 5.0).abs() < 0.01);
    assert!((spec.b - 2.0).abs() < 0.01);
    assert!((MAD_FACTOR - 1.4826).abs() < 5e-5);
}

#[test]
fn transform_known_values_and_inverse() {
    let spec = TransformSpec::new(0.0, 1.0).unwrap();
    assert!((spec.apply(10.0) - (10.0f64 + 101f64.sqrt()).ln()).abs() < 1e-12);
    let spec = TransformSpec::new(40.0, 5.0).unwrap();
    for p in [-150.0, -1.0, 0.0, 39.99, 40.0, 3000.0] {
        assert!((spec.invert(spec.apply(p)) - p).abs() <= 1e-9 * p.abs().max(1.0));
    }
    assert_eq!(spec.apply(40.0), 0.0);
}

#[test]
fn transform_rejects_constant_prices() {
    assert!(TransformSpec::fit_values(&[7.0; 100]).is_err());
}

#[test]
fn median_of_even_and_odd_samples() {
    assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
    assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), Some(2.5));
    assert_eq!(median(&[]), None);
}

#[test]
fn weekday_cycles_and_hour_of_week() {
    assert_eq!(weekday(3, 0), 3);
    assert_eq!(weekday(3, 4), 7);
    assert_eq!(weekday(3, 5), 1);
    assert_eq!(weekday(7, 7 * 52 + 1), 1);
    assert_eq!(hour_of_week(1, 1), 1);
    assert_eq!(hour_of_week(7, 24), 168);
    assert_eq!(hour_of_week(2, 3), 27);
}

#[test]
fn dummies_are_indicators() {
    // day 2 of a series starting on Friday is a Sunday
    assert_eq!(dummy_value(DummyKind::DoW(7), 2, 5, 5), 1);
    assert_eq!(dummy_value(DummyKind::DoW(6), 2, 5, 5), 0);
    assert_eq!(dummy_value(DummyKind::HoD(5), 2, 5, 5), 1);
    assert_eq!(dummy_value(DummyKind::HoW(7 * 24), 2, 24, 5), 1);
}

/// Hour-of-week means must equal least-squares coefficients on a full set
/// of hour-of-week dummies without intercept.
#[test]
fn how_means_equal_dummy_regression() {
    let mut r = common::rng(2);
    let days = 30;
    let start = 4;
    let block: Vec<[f64; HOURS]> = (0..days).map(|_| std::array::from_fn(|_| r.random::<f64>() * 10.0)).collect();
    let means = SeasonalMeans::fit(&block, start).unwrap();
    let y: Vec<f64> = block.iter().flat_map(|row| row.iter().copied()).collect();
    let mut d = Design::new(y);
    for k in 1..=168 {
        let col = (0..days)
            .flat_map(|day| (1..=HOURS).map(move |h| (day, h)))
            .map(|(day, h)| dummy_value(DummyKind::HoW(k), day, h, start) as f64)
            .collect();
        d.push_dense(format!("how{k}"), col);
    }
    let fit = ols(&d).unwrap();
    for k in 0..168 {
        assert!((fit.beta[k] - means.how[k]).abs() < 1e-10);
    }
    let overall = block.iter().flat_map(|r| r.iter()).sum::<f64>() / (days * HOURS) as f64;
    assert!((means.overall - overall).abs() < 1e-12);
}

#[test]
fn demeaning_uses_each_observations_own_bucket() {
    let block: Vec<[f64; HOURS]> = (0..14).map(|d| std::array::from_fn(|h| (d % 7) as f64 * 10.0 + h as f64)).collect();
    let means = SeasonalMeans::fit(&block, 1).unwrap();
    for dem in [Demeaner::HoW, Demeaner::DoW] {
        let z = means.demean(dem, &block);
        let mx = z.iter().flat_map(|r| r.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
        if dem == Demeaner::HoW {
            assert!(mx < 1e-12);
        } else {
            assert!((mx - 11.5).abs() < 1e-12);
        }
    }
    assert_eq!(means.row(Demeaner::HoW, 14), means.row(Demeaner::HoW, 0));
}
