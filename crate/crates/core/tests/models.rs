mod common;

use epf_core::estimation::ols;
use epf_core::models::design::{build_design_expert, expert_names};
use epf_core::models::{Coefficients, ExpertOptions, LassoOptions};
use epf_core::{Demeaner, FitOptions, FittedModel, InfoCriterion, ModelSpec, WindowData, HOURS};

fn opts() -> FitOptions {
    FitOptions::default()
}

#[test]
fn naive_repeats_last_week_on_monday_and_yesterday_on_tuesday() {
    let s = common::synthetic_prices(70, 1);
    // window of 63 days starting Monday: target day 63 is a Monday
    let w = WindowData::new(&s.prices[..63], 1).unwrap();
    assert_eq!(w.target_weekday(), 1);
    let m = FittedModel::fit(ModelSpec::Naive, &w, &opts()).unwrap();
    assert_eq!(m.forecast(&w).unwrap(), s.prices[56]);
    let w = WindowData::new(&s.prices[1..64], 2).unwrap();
    assert_eq!(w.target_weekday(), 2);
    assert_eq!(m.forecast(&w).unwrap(), s.prices[63]);
}

#[test]
fn mean_how_back_transforms_bucket_means() {
    let s = common::synthetic_prices(56, 2);
    let w = WindowData::new(&s.prices, 1).unwrap();
    let m = FittedModel::fit(ModelSpec::MeanHoW, &w, &opts()).unwrap();
    let f = m.forecast(&w).unwrap();
    for h in 0..HOURS {
        let mondays: Vec<f64> = (0..56).step_by(7).map(|d| w.transform.apply(s.prices[d][h])).collect();
        let mean = mondays.iter().sum::<f64>() / mondays.len() as f64;
        assert!((f[h] - w.transform.invert(mean)).abs() < 1e-9);
    }
}

#[test]
fn expert_column_counts() {
    let s = common::synthetic_prices(60, 3);
    let w = WindowData::new(&s.prices, 1).unwrap();
    let full = ExpertOptions { dow_full: true, periodic: true, nonlinear: true, star: false };
    assert_eq!(build_design_expert(full, &w.y, 1, 1).unwrap().n_cols(), 25);
    assert_eq!(build_design_expert(full, &w.y, 24, 1).unwrap().n_cols(), 18);
    let dow_nl = ExpertOptions { dow_full: true, periodic: false, nonlinear: true, star: false };
    assert_eq!(build_design_expert(dow_nl, &w.y, 5, 1).unwrap().n_cols(), 13);
    let star = ExpertOptions { star: true, ..full };
    assert_eq!(expert_names(star, 1).len(), 25);
    let design = build_design_expert(full, &w.y, 3, 1).unwrap();
    assert!(ols(&design).unwrap().dropped.is_empty());
}

#[test]
fn expert_design_has_no_collinear_columns_in_any_variant() {
    let s = common::synthetic_prices(120, 4);
    let w = WindowData::new(&s.prices, 1).unwrap();
    for spec in ModelSpec::all() {
        if let ModelSpec::Expert(o) = spec {
            for h in [1, 12, 24] {
                let d = build_design_expert(o, &w.y, h, 1).unwrap();
                assert!(ols(&d).unwrap().dropped.is_empty(), "{spec} h={h}");
            }
        }
    }
}

#[test]
fn ar24_forecast_of_pure_weekly_profile_returns_the_profile() {
    let mut r = common::rng(5);
    let profile: [f64; HOURS] = std::array::from_fn(|h| 40.0 + 10.0 * (h as f64 / 4.0).sin());
    let prices: Vec<[f64; HOURS]> = (0..200)
        .map(|_| std::array::from_fn(|h| profile[h] + 0.01 * common::normal_vec(&mut r, 1)[0]))
        .collect();
    let w = WindowData::new(&prices, 1).unwrap();
    let m = FittedModel::fit(ModelSpec::Ar24(Demeaner::HoD), &w, &opts()).unwrap();
    let f = m.forecast(&w).unwrap();
    for h in 0..HOURS {
        assert!((f[h] - profile[h]).abs() < 0.05, "hour {}", h + 1);
    }
}

#[test]
fn every_model_forecasts_finite_values() {
    let s = common::synthetic_prices(500, 6);
    let w = WindowData::new(&s.prices, 1).unwrap();
    let specs = ModelSpec::all();
    let fitted = FittedModel::fit_many(&specs, &w, &opts());
    for (spec, m) in specs.iter().zip(fitted) {
        let m = m.unwrap_or_else(|e| panic!("{spec}: {e}"));
        let f = m.forecast(&w).unwrap();
        assert!(f.iter().all(|v| v.is_finite() && *v > 0.0 && *v < 500.0), "{spec}: {f:?}");
        assert_eq!(m.supports().is_some(), spec.is_lasso());
    }
}

#[test]
fn grouped_lasso_fits_equal_individual_fits() {
    let s = common::synthetic_prices(400, 7);
    let w = WindowData::new(&s.prices, 1).unwrap();
    let specs: Vec<ModelSpec> = InfoCriterion::ALL
        .iter()
        .map(|&ic| ModelSpec::Lasso24(LassoOptions { periodic: false, nonlinear: true, ic }))
        .collect();
    let grouped = FittedModel::fit_many(&specs, &w, &opts());
    for (spec, g) in specs.iter().zip(grouped) {
        let single = FittedModel::fit(*spec, &w, &opts()).unwrap();
        assert_eq!(g.unwrap().forecast(&w).unwrap(), single.forecast(&w).unwrap(), "{spec}");
    }
}

#[test]
fn ols_criterion_keeps_every_identifiable_coefficient() {
    let s = common::synthetic_prices(300, 8);
    let w = WindowData::new(&s.prices, 1).unwrap();
    let spec = ModelSpec::Lasso24(LassoOptions { periodic: false, nonlinear: false, ic: InfoCriterion::Ols });
    let m = FittedModel::fit(spec, &w, &opts()).unwrap();
    let Coefficients::Lasso24(fits) = &m.coefficients else { panic!("wrong coefficients") };
    assert_eq!(fits.len(), HOURS);
    assert!(fits.iter().all(|f| f.k_nonzero == 199));
}

#[test]
fn short_windows_are_reported_not_panicking() {
    let s = common::synthetic_prices(12, 9);
    let w = WindowData::new(&s.prices, 1).unwrap();
    for spec in ModelSpec::all() {
        let _ = FittedModel::fit(spec, &w, &opts()).and_then(|m| m.forecast(&w));
    }
    assert!(FittedModel::fit(ModelSpec::Var(Demeaner::HoW), &w, &opts()).is_err());
}

#[test]
fn ids_round_trip_and_list_parsing() {
    for spec in ModelSpec::all() {
        assert_eq!(spec.id().parse::<ModelSpec>().unwrap(), spec);
    }
    let list = ModelSpec::parse_list("naive, mean_HoW,naive").unwrap();
    assert_eq!(list, vec![ModelSpec::Naive, ModelSpec::MeanHoW]);
    assert_eq!(ModelSpec::parse_list("all").unwrap().len(), 58);
    assert!("expert_bogus".parse::<ModelSpec>().is_err());
    assert_eq!(ModelSpec::ArUni(Demeaner::Overall).id(), "AR");
    assert_eq!(
        ModelSpec::Expert(ExpertOptions { dow_full: true, periodic: true, nonlinear: true, star: true }).id(),
        "expert_DoW_p_nl_star"
    );
}
