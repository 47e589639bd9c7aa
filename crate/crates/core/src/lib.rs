//! Day-ahead electricity price forecasting.
//!
//! The crate covers the whole pipeline: ingestion of hourly price CSVs with
//! clock-change repair, the asinh variance-stabilizing transform, seasonal
//! dummies and means, the numerical estimators (OLS, Yule-Walker, VAR,
//! coordinate-descent lasso with information-criterion selection), a zoo of
//! 58 forecasting models, a rolling-window backtest engine and the
//! evaluation suite (MAE/RMSE, m.p.d.f.b., Diebold-Mariano tests, lasso
//! variable-selection statistics).

pub mod backtest;
pub mod calendar;
pub mod error;
pub mod estimation;
pub mod evaluate;
pub mod ingest;
pub mod models;
pub mod transform;

pub use backtest::{combine, BacktestRun, Backtester, SupportLog};
pub use calendar::{Demeaner, DummyKind, SeasonalMeans};
pub use error::{EpfError, ErrorClass, Result};
pub use estimation::{ArFit, Design, InfoCriterion, LassoFit, VarFit};
pub use ingest::{ForecastMatrix, PriceSeries, WindowPlan};
pub use models::{FitOptions, FittedModel, ModelSpec, WindowData};
pub use transform::TransformSpec;

/// Number of hourly load periods in a day.
pub const HOURS: usize = 24;

/// One day of hourly values.
pub type DayRow = [f64; HOURS];
