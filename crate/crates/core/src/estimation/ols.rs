use super::design::Design;
use super::linalg::DroppingCholesky;
use crate::error::{EpfError, Result};

/// Relative residual-diagonal threshold below which a column counts as a
/// linear combination of the columns before it.
pub const COLLINEARITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    /// One coefficient per design column; dropped columns are exactly zero.
    pub beta: Vec<f64>,
    /// Indices of columns removed by the collinearity rule, ascending.
    pub dropped: Vec<usize>,
    pub rss: f64,
}

/// Least squares via the normal equations. Exactly (or numerically) collinear
/// columns are removed in column order, so a later duplicate is the one dropped.
pub fn ols(design: &Design) -> Result<OlsFit> {
    design.validate()?;
    let p = design.n_cols();
    let gram = design.gram();
    let chol = DroppingCholesky::factor(&gram, p, COLLINEARITY_TOL);
    if chol.kept().iter().all(|k| !k) {
        return Err(EpfError::RankDeficient);
    }
    let beta = chol.solve(&design.xty());
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(EpfError::RankDeficient);
    }
    let dropped = chol.dropped();
    if !dropped.is_empty() {
        log::debug!(
            "ols: dropped collinear columns {:?}",
            dropped.iter().map(|&j| design.names()[j].as_str()).collect::<Vec<_>>()
        );
    }
    let rss = design.rss(&beta);
    Ok(OlsFit { beta, dropped, rss })
}
