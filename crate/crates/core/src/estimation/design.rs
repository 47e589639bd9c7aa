use crate::error::{EpfError, Result};

/// One regressor column. Indicator-driven regressors (dummies and their
/// interactions) are mostly zero and stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Dense(Vec<f64>),
    /// Strictly increasing row indices with their values.
    Sparse { idx: Vec<u32>, val: Vec<f64> },
}

impl Column {
    pub fn dot(&self, v: &[f64]) -> f64 {
        match self {
            Column::Dense(x) => x.iter().zip(v).map(|(a, b)| a * b).sum(),
            Column::Sparse { idx, val } => idx.iter().zip(val).map(|(&i, a)| a * v[i as usize]).sum(),
        }
    }

    /// `v += alpha * self`
    pub fn axpy(&self, alpha: f64, v: &mut [f64]) {
        match self {
            Column::Dense(x) => v.iter_mut().zip(x).for_each(|(o, a)| *o += alpha * a),
            Column::Sparse { idx, val } => {
                for (&i, a) in idx.iter().zip(val) {
                    v[i as usize] += alpha * a;
                }
            }
        }
    }

    pub fn dot_col(&self, other: &Column) -> f64 {
        match (self, other) {
            (Column::Dense(a), b) | (b, Column::Dense(a)) => b.dot(a),
            (Column::Sparse { idx: ia, val: va }, Column::Sparse { idx: ib, val: vb }) => {
                let (mut i, mut j, mut s) = (0, 0, 0.0);
                while i < ia.len() && j < ib.len() {
                    match ia[i].cmp(&ib[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            s += va[i] * vb[j];
                            i += 1;
                            j += 1;
                        }
                    }
                }
                s
            }
        }
    }

    pub fn sq_norm(&self) -> f64 {
        match self {
            Column::Dense(x) => x.iter().map(|a| a * a).sum(),
            Column::Sparse { val, .. } => val.iter().map(|a| a * a).sum(),
        }
    }

    pub fn get(&self, row: usize) -> f64 {
        match self {
            Column::Dense(x) => x[row],
            Column::Sparse { idx, val } => idx
                .binary_search(&(row as u32))
                .map(|k| val[k])
                .unwrap_or(0.0),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Column::Dense(x) => x.iter().all(|v| v.is_finite()),
            Column::Sparse { val, .. } => val.iter().all(|v| v.is_finite()),
        }
    }
}

/// Regression problem: `n` responses and `p` named regressor columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    y: Vec<f64>,
    columns: Vec<Column>,
    names: Vec<String>,
}

impl Design {
    pub fn new(y: Vec<f64>) -> Self {
        Self { y, columns: Vec::new(), names: Vec::new() }
    }

    /// Builds a design from row-major regressors (mainly for tests and small problems).
    pub fn from_rows(rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        if rows.len() != y.len() {
            return Err(EpfError::ShapeMismatch(format!("{} rows vs {} responses", rows.len(), y.len())));
        }
        let p = rows.first().map_or(0, Vec::len);
        let mut d = Design::new(y);
        for j in 0..p {
            let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            d.push_dense(format!("x{}", j + 1), col);
        }
        Ok(d)
    }

    pub fn push_dense(&mut self, name: impl Into<String>, values: Vec<f64>) {
        assert_eq!(values.len(), self.y.len(), "column length");
        self.columns.push(Column::Dense(values));
        self.names.push(name.into());
    }

    pub fn push_sparse(&mut self, name: impl Into<String>, idx: Vec<u32>, val: Vec<f64>) {
        debug_assert!(idx.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(idx.last().is_none_or(|&i| (i as usize) < self.y.len()));
        self.columns.push(Column::Sparse { idx, val });
        self.names.push(name.into());
    }

    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Column {
        &self.columns[j]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c.get(i)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.y.is_empty() || self.columns.is_empty() {
            return Err(EpfError::ShapeMismatch("design needs n > 0 and p >= 1".into()));
        }
        if let Some(line) = self.y.iter().position(|v| !v.is_finite()) {
            return Err(EpfError::NonFiniteValue { line });
        }
        if let Some(j) = self.columns.iter().position(|c| !c.is_finite()) {
            return Err(EpfError::InvalidArgument(format!("column {} has non-finite values", self.names[j])));
        }
        Ok(())
    }

    /// `X'X`, row-major `p x p`.
    pub fn gram(&self) -> Vec<f64> {
        let p = self.n_cols();
        let mut g = vec![0.0; p * p];
        for i in 0..p {
            for j in i..p {
                let v = self.columns[i].dot_col(&self.columns[j]);
                g[i * p + j] = v;
                g[j * p + i] = v;
            }
        }
        g
    }

    /// `X'y`
    pub fn xty(&self) -> Vec<f64> {
        self.columns.iter().map(|c| c.dot(&self.y)).collect()
    }

    pub fn predict(&self, beta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_rows()];
        for (c, &b) in self.columns.iter().zip(beta) {
            if b != 0.0 {
                c.axpy(b, &mut out);
            }
        }
        out
    }

    pub fn residuals(&self, beta: &[f64]) -> Vec<f64> {
        let fitted = self.predict(beta);
        self.y.iter().zip(fitted).map(|(y, f)| y - f).collect()
    }

    pub fn rss(&self, beta: &[f64]) -> f64 {
        self.residuals(beta).iter().map(|r| r * r).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_and_dense_agree() {
        let mut d = Design::new(vec![1.0, 2.0, 3.0, 4.0]);
        d.push_dense("a", vec![1.0, 0.0, 2.0, 0.0]);
        d.push_sparse("b", vec![0, 2], vec![1.0, 2.0]);
        d.push_sparse("c", vec![1, 2], vec![5.0, -1.0]);
        let g = d.gram();
        assert_eq!(g[0 * 3 + 1], 5.0);
        assert_eq!(g[1 * 3 + 1], 5.0);
        assert_eq!(g[1 * 3 + 2], -2.0);
        assert_eq!(g[2 * 3 + 0], -2.0);
        assert_eq!(d.xty(), vec![7.0, 7.0, 7.0]);
        assert_eq!(d.row(2), vec![2.0, 2.0, -1.0]);
        assert_eq!(d.predict(&[1.0, -1.0, 0.5]), vec![0.0, 2.5, -0.5, 0.0]);
    }
}
