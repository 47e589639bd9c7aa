//! Forecast evaluation: error measures, Diebold-Mariano tests and lasso
//! variable-selection statistics, plus CSV emitters for all of them.

pub mod dm;
pub mod metrics;
pub mod occurrence;
pub mod report;

pub use dm::{dm_hourly, dm_multivariate, dm_test, normal_cdf, pairwise_dm, pairwise_hourly_counts, DmResult, HourlyDm};
pub use metrics::{mae, mpdfb, rmse, Season};
pub use occurrence::{occurrence, occurrence_for, OccurrenceTable};
