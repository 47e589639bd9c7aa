//! Numerical estimators shared by the model zoo.

pub mod design;
pub mod gic;
pub mod lasso;
pub mod linalg;
pub mod ols;
pub mod var;
pub mod yule_walker;

pub use design::{Column, Design};
pub use gic::{gic_select, residual_variance, select_fits, InfoCriterion};
pub use lasso::{lambda_grid, lasso_path, soft_threshold, LassoFit, LassoProblem};
pub use ols::{ols, OlsFit};
pub use var::{mv_yule_walker, VarFit};
pub use yule_walker::{yule_walker, yule_walker_fixed, ArFit};
