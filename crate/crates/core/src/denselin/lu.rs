use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// LU factorization with partial pivoting, `P·A = L·U` packed in one matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
    sign: f64,
    singular_pivot: Option<f64>,
}

impl Lu {
    /// Factorizes a square matrix. Never fails; singularity is recorded and
    /// surfaces in [`Lu::solve`].
    pub fn new(a: &DenseMatrix) -> Self {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular_pivot = None;
        let pivot_tol = n.max(1) as f64 * f64::EPSILON * a.max_abs();

        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            if pmax <= pivot_tol {
                if singular_pivot.is_none() {
                    singular_pivot = Some(pmax);
                }
                continue;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    lu[(i, j)] -= f * lu[(k, j)];
                }
            }
        }
        Self {
            lu,
            perm,
            sign,
            singular_pivot,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular_pivot.is_some()
    }

    /// Product of the pivots with the permutation sign.
    pub fn determinant(&self) -> f64 {
        let n = self.lu.rows();
        (0..n).fold(self.sign, |d, i| d * self.lu[(i, i)])
    }

    pub fn solve(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} rows, system has {n}",
                b.rows()
            )));
        }
        if let Some(pivot) = self.singular_pivot {
            return Err(Error::Singular { pivot });
        }
        let mut x = DenseMatrix::from_fn(n, b.cols(), |i, j| b[(self.perm[i], j)]);
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }
}

/// Solves `a·x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "solve_linear needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Lu::new(a).solve(b)
}

/// Determinant through pivoted elimination.
pub fn determinant(a: &DenseMatrix) -> f64 {
    Lu::new(a).determinant()
}

/// Determinant of the `n×n` Toeplitz tridiagonal matrix with constant
/// `diag`, `upper` and `lower` bands, by the three-term recurrence
/// `D_k = diag·D_{k-1} - upper·lower·D_{k-2}`.
pub fn tridiag_det(diag: f64, upper: f64, lower: f64, n: usize) -> f64 {
    let off = upper * lower;
    let (mut d_prev, mut d) = (1.0, diag);
    if n == 0 {
        return 1.0;
    }
    for _ in 1..n {
        let next = diag * d - off * d_prev;
        d_prev = d;
        d = next;
    }
    d
}

/// Solves a tridiagonal system with the Thomas algorithm. `sub[0]` and
/// `sup[n-1]` are ignored.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert!(sub.len() == n && sup.len() == n && rhs.len() == n);
    let scale = diag
        .iter()
        .chain(sub)
        .chain(sup)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = n as f64 * f64::EPSILON * scale;
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    for i in 0..n {
        if i > 0 {
            denom = diag[i] - sub[i] * c[i - 1];
        }
        if denom.abs() <= tol {
            return Err(Error::Singular { pivot: denom.abs() });
        }
        c[i] = if i + 1 < n { sup[i] / denom } else { 0.0 };
        let prev = if i > 0 { sub[i] * d[i - 1] } else { 0.0 };
        d[i] = (rhs[i] - prev) / denom;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}
