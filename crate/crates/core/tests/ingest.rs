mod common;

use std::io::Write;

use chrono::NaiveDate;
use epf_core::ingest::{load_csv, read_day_rows, read_raw, repair_clock_change, write_day_rows, write_series_wide, CsvSchema};
use epf_core::{EpfError, ErrorClass, PriceSeries, WindowPlan, HOURS};

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.path().join(name);
    std::fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
    p
}

fn long_body(s: &PriceSeries) -> String {
    let mut out = String::from("date,hour,price\n");
    for (d, row) in s.prices.iter().enumerate() {
        for (h, v) in row.iter().enumerate() {
            out.push_str(&format!("{},{},{v}\n", s.date(d), h + 1));
        }
    }
    out
}

#[test]
fn long_and_wide_layouts_load_the_same_series() {
    let s = common::synthetic_prices(20, 1);
    let dir = tempfile::tempdir().unwrap();
    let long = load_csv(write(&dir, "long.csv", &long_body(&s)), &CsvSchema::long()).unwrap();
    let wide_path = dir.path().join("wide.csv");
    write_series_wide(&wide_path, &s).unwrap();
    let wide = load_csv(&wide_path, &CsvSchema::wide()).unwrap();
    assert_eq!(long.prices, s.prices);
    assert_eq!(wide.prices, s.prices);
    assert_eq!(long.start_date, s.start_date);
    assert_eq!(wide.start_weekday, 1);
}

#[test]
fn wide_round_trip_is_idempotent() {
    let s = common::synthetic_prices(15, 2);
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write_series_wide(&a, &s).unwrap();
    write_series_wide(&b, &load_csv(&a, &CsvSchema::wide()).unwrap()).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn clock_change_days_are_repaired() {
    // spring: 2013-03-31 lacks hour 3; autumn: 2013-10-27 has hour 3 twice
    let mut body = String::from("date,hour,price\n");
    for (date, skip) in [("2013-03-31", Some(3)), ("2013-04-01", None)] {
        for h in 1..=HOURS {
            if Some(h) != skip {
                body.push_str(&format!("{date},{h},{}\n", 10 * h));
            }
        }
    }
    let raw = read_raw(body.as_bytes(), &CsvSchema::long()).unwrap();
    let (start, rows) = repair_clock_change(&raw).unwrap();
    assert_eq!(start, NaiveDate::from_ymd_opt(2013, 3, 31).unwrap());
    assert_eq!(rows[0][2], 30.0);

    let mut body = String::from("date,hour,price\n");
    for h in 1..=HOURS {
        body.push_str(&format!("2013-10-27,{h},{}\n", 10 * h));
        if h == 3 {
            body.push_str("2013-10-27,3,40\n");
        }
    }
    let raw = read_raw(body.as_bytes(), &CsvSchema::long()).unwrap();
    let (_, rows) = repair_clock_change(&raw).unwrap();
    assert_eq!(rows[0][2], 35.0);
}

#[test]
fn malformed_inputs_are_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("bad_number.csv", "date,hour,price\n2013-01-01,1,abc\n"),
        ("bad_hour.csv", "date,hour,price\n2013-01-01,25,3\n"),
        ("no_column.csv", "day,hour,price\n2013-01-01,1,3\n"),
        ("nan.csv", "date,hour,price\n2013-01-01,1,NaN\n"),
    ];
    for (name, body) in cases {
        let err = load_csv(write(&dir, name, body), &CsvSchema::long()).unwrap_err();
        assert_eq!(err.class(), ErrorClass::Data, "{name}: {err}");
    }
    let missing = load_csv(dir.path().join("absent.csv"), &CsvSchema::long()).unwrap_err();
    assert!(matches!(missing, EpfError::Io(_)));
}

#[test]
fn gap_between_days_is_rejected() {
    let s = common::synthetic_prices(3, 3);
    let body: String = long_body(&s).lines().filter(|l| !l.starts_with("2011-01-04")).map(|l| format!("{l}\n")).collect();
    let dir = tempfile::tempdir().unwrap();
    let err = load_csv(write(&dir, "gap.csv", &body), &CsvSchema::long()).unwrap_err();
    assert!(matches!(err, EpfError::MissingDay { .. }), "{err}");
}

#[test]
fn day_rows_round_trip_with_fixed_decimals() {
    let s = common::synthetic_prices(5, 4);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("rows.csv");
    let dates: Vec<NaiveDate> = (0..5).map(|d| s.date(d)).collect();
    write_day_rows(&p, &dates, &s.prices, None).unwrap();
    let (d2, rows) = read_day_rows(&p).unwrap();
    assert_eq!(d2, dates);
    assert_eq!(rows, s.prices);
}

#[test]
fn window_plan_validation() {
    let s = common::synthetic_prices(40, 5);
    let plan = WindowPlan::for_series(&s, 30).unwrap();
    assert_eq!((plan.first_forecast_day, plan.last_forecast_day), (30, 39));
    assert_eq!(plan.n_forecast_days(), 10);
    let (block, date) = plan.window(&s, 35).unwrap();
    assert_eq!(block.len(), 30);
    assert_eq!(block[0], s.prices[5]);
    assert_eq!(date, s.date(35));
    assert!(plan.window(&s, 29).is_err());
    assert!(WindowPlan::for_series(&s, 40).is_err());
    assert!(WindowPlan::new(0, 0, 3).is_err());
}

#[test]
fn explicit_start_weekday_overrides_calendar() {
    let s = common::synthetic_prices(3, 6);
    let t = PriceSeries::new(s.start_date, s.prices.clone(), "x", Some(3)).unwrap();
    assert_eq!(t.weekday(0), 3);
    assert_eq!(s.weekday(0), 1);
    assert!(PriceSeries::new(s.start_date, s.prices.clone(), "x", Some(8)).is_err());
}
