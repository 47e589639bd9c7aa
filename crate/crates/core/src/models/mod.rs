//! The model zoo: 58 day-ahead forecasting models in eight classes, their
//! design matrices, estimation on one calibration window and forecasting of
//! the following day.

pub mod design;
pub mod fit;
pub mod spec;
pub mod window;

pub use design::{build_design_expert, build_design_lasso24, build_design_lasso_uni, UniLayout};
pub use fit::{Coefficients, FitOptions, FittedModel, DAILY_MAX_ORDER, HOURLY_MAX_ORDER};
pub use spec::{ExpertOptions, LassoOptions, ModelClass, ModelSpec};
pub use window::WindowData;
