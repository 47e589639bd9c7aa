use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chrono::{Days, NaiveDate};
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn epf() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_epf"));
    c.env_remove("EPF_DATA_DIR").env("RUST_LOG", "warn");
    c
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn ok(cmd: &mut Command) -> String {
    let out = run(cmd);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    stdout(&out)
}

/// Long-layout prices from `start`, optionally dropping one hour of one day.
fn long_csv(start: NaiveDate, days: usize, skip: Option<(usize, usize)>, seed: u64) -> String {
    let mut r = StdRng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 3.0).unwrap();
    let mut s = String::from("date,hour,price\n");
    for d in 0..days {
        let date = start + Days::new(d as u64);
        let level = if d % 7 >= 5 { 32.0 } else { 42.0 };
        for h in 1..=24 {
            if skip == Some((d, h)) {
                continue;
            }
            let p = level + 8.0 * (h as f64 / 24.0 * std::f64::consts::TAU).sin() + noise.sample(&mut r);
            s.push_str(&format!("{date},{h},{p:.3}\n"));
        }
    }
    s
}

fn monday() -> NaiveDate {
    NaiveDate::from_ymd_opt(2011, 1, 3).unwrap()
}

/// Ingests a synthetic series of `days` days into `dir/series.csv`.
fn series(dir: &Path, days: usize) -> PathBuf {
    let raw = dir.join("raw.csv");
    fs::write(&raw, long_csv(monday(), days, None, days as u64)).unwrap();
    let wide = dir.join("series.csv");
    ok(epf().args(["ingest", "--format", "long", "--input"]).arg(&raw).arg("--out").arg(&wide));
    wide
}

fn data_rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn ingest_fills_clock_change_gap_and_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.csv");
    let start = NaiveDate::from_ymd_opt(2011, 3, 20).unwrap();
    fs::write(&raw, long_csv(start, 14, Some((7, 3)), 1)).unwrap();
    let once = dir.path().join("once.csv");
    let out = ok(epf().args(["ingest", "--input"]).arg(&raw).arg("--out").arg(&once));
    assert!(out.contains("14 days"), "{out}");
    assert_eq!(data_rows(&once), 14);
    let text = fs::read_to_string(&once).unwrap();
    assert!(text.lines().nth(8).unwrap().starts_with("2011-03-27,"));
    assert!(!text.contains(",,"));

    let twice = dir.path().join("twice.csv");
    ok(epf().args(["ingest", "--format", "wide", "--input"]).arg(&once).arg("--out").arg(&twice));
    assert_eq!(fs::read(&once).unwrap(), fs::read(&twice).unwrap());
}

#[test]
fn backtest_writes_one_file_per_model_with_planned_days() {
    let dir = tempfile::tempdir().unwrap();
    let wide = series(dir.path(), 740);
    let out = dir.path().join("run");
    let msg = ok(epf().args(["backtest", "--models", "mean_HoW,naive", "--calib", "730", "--input"]).arg(&wide).arg("--out").arg(&out));
    assert!(msg.contains("2 forecast file(s), 10 day(s)"), "{msg}");
    for f in ["mean_HoW.csv", "naive.csv", "realized.csv"] {
        assert_eq!(data_rows(&out.join(f)), 10, "{f}");
    }
    let manifest = fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"run_hash\"") && manifest.contains("\"forecast_days\": 10"));
}

#[test]
fn dates_select_the_forecast_range() {
    let dir = tempfile::tempdir().unwrap();
    let wide = series(dir.path(), 120);
    let out = dir.path().join("run");
    ok(epf()
        .args(["backtest", "--models", "naive", "--calib", "100", "--first", "2011-04-15", "--last", "104", "--input"])
        .arg(&wide)
        .arg("--out")
        .arg(&out));
    let text = fs::read_to_string(out.join("naive.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(1).unwrap().starts_with("2011-04-15,"));
}

#[test]
fn exit_codes_distinguish_usage_data_and_numerical_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.csv");
    let out = dir.path().join("run");

    let unknown = run(epf().args(["backtest", "--models", "naive,bogus_model", "--input"]).arg(&missing).arg("--out").arg(&out));
    assert_eq!(code(&unknown), 1);
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("bogus_model"));
    assert_eq!(code(&run(epf().args(["backtest", "--no-such-flag"]))), 1);
    assert_eq!(code(&run(epf().args(["backtest", "--models", "naive"]))), 1);
    assert_eq!(code(&run(epf().arg("--help"))), 0);

    let absent = run(epf().args(["backtest", "--models", "naive", "--input"]).arg(&missing).arg("--out").arg(&out));
    assert_eq!(code(&absent), 2);
    let garbage = dir.path().join("garbage.csv");
    fs::write(&garbage, "date,hour,price\n2011-01-01,1,abc\n").unwrap();
    assert_eq!(code(&run(epf().args(["ingest", "--input"]).arg(&garbage).arg("--out").arg(&out))), 2);

    let constant = dir.path().join("constant.csv");
    let mut s = String::from("date,hour,price\n");
    for d in 0..40u64 {
        for h in 1..=24 {
            s.push_str(&format!("{},{h},50\n", monday() + Days::new(d)));
        }
    }
    fs::write(&constant, s).unwrap();
    let flat = run(epf()
        .args(["backtest", "--format", "long", "--models", "mean_HoW", "--calib", "30", "--input"])
        .arg(&constant)
        .arg("--out")
        .arg(&out));
    assert_eq!(code(&flat), 3);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let wide = series(dir.path(), 110);
    let cfg = dir.path().join("run.cfg");
    let from_cfg = dir.path().join("from_cfg");
    let from_flag = dir.path().join("from_flag");
    fs::write(
        &cfg,
        format!("# smoke run\nmodels = naive\ncalib = 100\nstride = 5\ninput = {}\nout = {}\n", wide.display(), from_cfg.display()),
    )
    .unwrap();
    ok(epf().arg("--config").arg(&cfg).arg("backtest"));
    assert_eq!(data_rows(&from_cfg.join("naive.csv")), 2);

    ok(epf().arg("--config").arg(&cfg).args(["backtest", "--stride", "1", "--out"]).arg(&from_flag));
    assert_eq!(data_rows(&from_flag.join("naive.csv")), 10);

    fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(code(&run(epf().arg("--config").arg(&cfg).arg("backtest"))), 1);
}

#[test]
fn relative_inputs_resolve_against_data_dir() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("market.csv"), long_csv(monday(), 10, None, 3)).unwrap();
    let out = dir.path().join("series.csv");
    ok(epf()
        .env("EPF_DATA_DIR", dir.path())
        .args(["ingest", "--input", "market.csv", "--out"])
        .arg(&out));
    assert_eq!(data_rows(&out), 10);
}

/// Backtest of mean_HoW and naive over 2011-07-22 .. 2012-02-05.
fn two_model_run(dir: &Path) -> PathBuf {
    let wide = series(dir, 400);
    let out = dir.join("run");
    ok(epf().args(["backtest", "--models", "mean_HoW,naive", "--calib", "200", "--input"]).arg(&wide).arg("--out").arg(&out));
    out
}

#[test]
fn evaluate_writes_metrics_mpdfb_and_dm_tables() {
    let dir = tempfile::tempdir().unwrap();
    let run_dir = two_model_run(dir.path());
    let report = dir.path().join("report");
    let text = ok(epf().args(["evaluate", "--forecasts"]).arg(format!("synthetic={}", run_dir.display())).arg("--out").arg(&report));
    assert!(text.contains("mean_HoW"));

    let metrics = fs::read_to_string(report.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 3);
    assert!(metrics.lines().skip(1).all(|l| l.contains(",synthetic,200,")));
    let mpdfb = fs::read_to_string(report.join("mpdfb.csv")).unwrap();
    assert_eq!(mpdfb.lines().filter(|l| l.ends_with(",0.0")).count(), 1, "{mpdfb}");

    let dm = fs::read_to_string(report.join("dm_synthetic.csv")).unwrap();
    let row: Vec<&str> = dm.lines().nth(1).unwrap().split(',').collect();
    let col: Vec<&str> = dm.lines().nth(2).unwrap().split(',').collect();
    let (p, q): (f64, f64) = (row[2].parse().unwrap(), col[1].parse().unwrap());
    assert!((p + q - 1.0).abs() < 1e-5);
    let hourly = fs::read_to_string(report.join("dm_hourly_synthetic.csv")).unwrap();
    let counts: Vec<usize> = hourly.lines().skip(1).flat_map(|l| l.split(',').skip(1).filter_map(|c| c.parse().ok()).collect::<Vec<_>>()).collect();
    assert_eq!(counts.len(), 2);
    assert!(counts.iter().sum::<usize>() <= 24);
}

#[test]
fn single_model_and_identical_forecasts() {
    let dir = tempfile::tempdir().unwrap();
    let run_dir = two_model_run(dir.path());
    let report = dir.path().join("single");
    ok(epf().args(["evaluate", "--models", "naive", "--forecasts"]).arg(&run_dir).arg("--out").arg(&report));
    let metrics = fs::read_to_string(report.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 2);
    assert_eq!(fs::read_to_string(report.join("mpdfb.csv")).unwrap().lines().nth(1).unwrap(), "naive,0.0");

    fs::copy(run_dir.join("naive.csv"), run_dir.join("mean_HoW.csv")).unwrap();
    let report = dir.path().join("same");
    ok(epf().args(["evaluate", "--forecasts"]).arg(&run_dir).arg("--out").arg(&report));
    let dm = fs::read_to_string(report.join("dm_run.csv")).unwrap();
    assert!(dm.lines().skip(1).all(|l| l.split(',').skip(1).all(str::is_empty)), "{dm}");
    let hourly = fs::read_to_string(report.join("dm_hourly_run.csv")).unwrap();
    assert!(hourly.lines().skip(1).all(|l| l.split(',').skip(1).all(|c| c.is_empty() || c == "0")));
    let text = ok(epf().args(["dm", "--x", "naive", "--y", "mean_HoW", "--forecasts"]).arg(&run_dir));
    assert!(text.contains("not significant") && text.contains("0 favour naive, 0 favour mean_HoW"), "{text}");
}

#[test]
fn season_filter_keeps_only_its_months() {
    let dir = tempfile::tempdir().unwrap();
    let run_dir = two_model_run(dir.path());
    let report = dir.path().join("fall");
    ok(epf().args(["evaluate", "--season", "Fall", "--forecasts"]).arg(&run_dir).arg("--out").arg(&report));
    let metrics = fs::read_to_string(report.join("metrics.csv")).unwrap();
    assert!(metrics.lines().skip(1).all(|l| l.contains(",run,91,")), "{metrics}");
    let window = dir.path().join("window");
    ok(epf()
        .args(["evaluate", "--from", "2011-09-01", "--to", "2011-09-10", "--forecasts"])
        .arg(&run_dir)
        .arg("--out")
        .arg(&window));
    assert!(fs::read_to_string(window.join("metrics.csv")).unwrap().contains(",run,10,"));
    assert!(!window.join("dm_run.csv").exists());

    let text = ok(epf().args(["dm", "--x", "naive", "--y", "mean_HoW", "--season", "fall", "--forecasts"]).arg(&run_dir));
    assert!(text.contains("n 91"), "{text}");
    let none = run(epf().args(["evaluate", "--from", "2015-01-01", "--forecasts"]).arg(&run_dir).arg("--out").arg(&window));
    assert_eq!(code(&none), 2);
}

#[test]
fn selection_reports_lasso_occurrence() {
    let dir = tempfile::tempdir().unwrap();
    let wide = series(dir.path(), 303);
    let run_dir = dir.path().join("run");
    ok(epf().args(["backtest", "--models", "lasso_HoW_HQC,naive", "--calib", "300", "--input"]).arg(&wide).arg("--out").arg(&run_dir));

    let tables = dir.path().join("tables");
    let text = ok(epf().args(["selection", "--forecasts"]).arg(&run_dir).arg("--out").arg(&tables));
    assert!(text.contains("lasso_HoW_HQC"), "{text}");
    let table = fs::read_to_string(tables.join("lasso_HoW_HQC.csv")).unwrap();
    assert_eq!(table.lines().next().unwrap(), "parameter,all");
    for line in table.lines().skip(1) {
        let pct: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!([0.0, 100.0 / 3.0, 200.0 / 3.0, 100.0].iter().any(|v| (v - pct).abs() < 0.01), "{line}");
    }

    let report = dir.path().join("report");
    ok(epf().args(["evaluate", "--forecasts"]).arg(&run_dir).arg("--out").arg(&report));
    assert_eq!(fs::read(report.join("occurrence_run/lasso_HoW_HQC.csv")).unwrap(), table.into_bytes());

    let naive = run(epf().args(["selection", "--models", "naive", "--forecasts"]).arg(&run_dir));
    assert_eq!(code(&naive), 2);
}

#[test]
fn all_models_produce_one_file_each() {
    let dir = tempfile::tempdir().unwrap();
    let wide = series(dir.path(), 731);
    let out = dir.path().join("run");
    ok(epf().args(["backtest", "--models", "all", "--calib", "730", "--input"]).arg(&wide).arg("--out").arg(&out));
    let forecasts = fs::read_dir(&out)
        .unwrap()
        .filter(|e| {
            let p = e.as_ref().unwrap().path();
            p.extension().is_some_and(|x| x == "csv") && p.file_name().unwrap() != "realized.csv"
        })
        .count();
    assert_eq!(forecasts, 58);
    assert_eq!(fs::read_dir(out.join("supports")).unwrap().count(), 32);
}
