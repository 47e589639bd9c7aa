//! Small dense kernels on row-major square matrices.

/// Lower Cholesky factor of a symmetric positive semidefinite matrix computed
/// in natural column order. A column whose residual diagonal falls below
/// `rel_tol` times its original diagonal is linearly dependent on the columns
/// before it; it is dropped (its row and column of the factor stay zero).
#[derive(Debug, Clone)]
pub struct DroppingCholesky {
    p: usize,
    l: Vec<f64>,
    kept: Vec<bool>,
}

impl DroppingCholesky {
    pub fn factor(g: &[f64], p: usize, rel_tol: f64) -> Self {
        assert_eq!(g.len(), p * p);
        let mut l = vec![0.0; p * p];
        let mut kept = vec![false; p];
        let mut v = vec![0.0; p];
        for j in 0..p {
            let gjj = g[j * p + j];
            for i in j..p {
                let (ri, rj) = (&l[i * p..i * p + j], &l[j * p..j * p + j]);
                v[i] = g[i * p + j] - ri.iter().zip(rj).map(|(a, b)| a * b).sum::<f64>();
            }
            let d = v[j];
            if !(gjj > 0.0) || !(d > rel_tol * gjj) {
                continue;
            }
            let s = d.sqrt();
            kept[j] = true;
            l[j * p + j] = s;
            for i in j + 1..p {
                l[i * p + j] = v[i] / s;
            }
        }
        Self { p, l, kept }
    }

    pub fn kept(&self) -> &[bool] {
        &self.kept
    }

    pub fn dropped(&self) -> Vec<usize> {
        (0..self.p).filter(|&j| !self.kept[j]).collect()
    }

    /// Solves `G x = b` restricted to the kept columns; dropped entries are zero.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let p = self.p;
        let mut z = vec![0.0; p];
        for i in 0..p {
            if !self.kept[i] {
                continue;
            }
            let row = &self.l[i * p..i * p + i];
            let s: f64 = row.iter().zip(&z[..i]).map(|(a, b)| a * b).sum();
            z[i] = (b[i] - s) / self.l[i * p + i];
        }
        let mut x = vec![0.0; p];
        for i in (0..p).rev() {
            if !self.kept[i] {
                continue;
            }
            let mut s = z[i];
            for k in i + 1..p {
                s -= self.l[k * p + i] * x[k];
            }
            x[i] = s / self.l[i * p + i];
        }
        x
    }

    /// Sum of log pivots squared, i.e. log-determinant over the kept block.
    pub fn log_det(&self) -> f64 {
        (0..self.p).filter(|&j| self.kept[j]).map(|j| 2.0 * self.l[j * self.p + j].ln()).sum()
    }

    pub fn is_full_rank(&self) -> bool {
        self.kept.iter().all(|&k| k)
    }
}

/// Strict Cholesky factorization; `None` when the matrix is not numerically positive definite.
pub fn cholesky(g: &[f64], p: usize) -> Option<DroppingCholesky> {
    let f = DroppingCholesky::factor(g, p, 1e-13);
    f.is_full_rank().then_some(f)
}

/// Solves `A X = B` for a symmetric positive definite `A` (p x p) and a
/// row-major right-hand side with `m` columns.
pub fn spd_solve_multi(f: &DroppingCholesky, b: &[f64], m: usize) -> Vec<f64> {
    let p = f.p;
    let mut x = vec![0.0; p * m];
    let mut col = vec![0.0; p];
    for c in 0..m {
        for i in 0..p {
            col[i] = b[i * m + c];
        }
        let sol = f.solve(&col);
        for i in 0..p {
            x[i * m + c] = sol[i];
        }
    }
    x
}
