//! Singular value decomposition by one-sided Jacobi rotations on columns.

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// `a = u_left · diag(sigma) · v_rightᵀ` with both factors square and orthogonal.
#[derive(Debug, Clone)]
pub struct SvdForm {
    pub u_left: DenseMatrix,
    /// Descending, non-negative, length `min(m, n)`.
    pub sigma: Vec<f64>,
    pub v_right: DenseMatrix,
}

impl SvdForm {
    /// The `m×n` middle factor.
    pub fn sigma_matrix(&self) -> DenseMatrix {
        let (m, n) = (self.u_left.rows(), self.v_right.rows());
        let mut s = DenseMatrix::zeros(m, n);
        for (i, &v) in self.sigma.iter().enumerate() {
            s[(i, i)] = v;
        }
        s
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.u_left
            .matmul(&self.sigma_matrix())
            .matmul(&self.v_right.transpose())
    }

    /// Number of singular values above `rel_tol · sigma_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let top = self.sigma.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        self.sigma.iter().filter(|&&s| s >= rel_tol * top).count()
    }
}

/// Singular value decomposition of any real matrix.
///
/// `tol` is the relative orthogonality threshold between column pairs at
/// which the Jacobi sweeps stop.
pub fn svd(a: &DenseMatrix, tol: f64) -> Result<SvdForm> {
    if a.rows() >= a.cols() {
        svd_tall(a, tol)
    } else {
        let t = svd_tall(&a.transpose(), tol)?;
        Ok(SvdForm {
            u_left: t.v_right,
            sigma: t.sigma,
            v_right: t.u_left,
        })
    }
}

fn svd_tall(a: &DenseMatrix, tol: f64) -> Result<SvdForm> {
    let (m, n) = a.shape();
    // work on columns stored contiguously
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let mut converged = n < 2;
    let mut worst = 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        worst = 0.0f64;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let off = gamma.abs() / (alpha * beta).sqrt();
                worst = worst.max(off);
                if off <= tol {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut cols, p, q, c, s);
                rotate_pair(&mut v, p, q, c, s);
            }
        }
        converged = worst <= tol;
    }
    if !converged {
        return Err(Error::Convergence {
            what: "one-sided Jacobi SVD",
            iterations: MAX_SWEEPS,
            residual: worst,
        });
    }

    let mut order: Vec<(usize, f64)> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| (j, c.iter().map(|x| x * x).sum::<f64>().sqrt()))
        .collect();
    order.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));

    let sigma: Vec<f64> = order.iter().map(|&(_, s)| s).collect();
    let top = sigma.first().copied().unwrap_or(0.0);
    let negligible = (m.max(n) as f64) * f64::EPSILON * top;

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    for &(j, s) in &order {
        if s > negligible && s > 0.0 {
            basis.push(cols[j].iter().map(|x| x / s).collect());
        } else {
            break;
        }
    }
    complete_basis(&mut basis, m);

    let u_left = DenseMatrix::from_fn(m, m, |i, k| basis[k][i]);
    let v_right = DenseMatrix::from_fn(n, n, |i, k| v[order[k].0][i]);
    Ok(SvdForm {
        u_left,
        sigma,
        v_right,
    })
}

fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Extends an orthonormal set of vectors in `R^m` to a full basis using
/// Gram-Schmidt (applied twice) against the canonical vectors.
fn complete_basis(basis: &mut Vec<Vec<f64>>, m: usize) {
    let mut e = 0;
    while basis.len() < m && e < m {
        let mut w: Vec<f64> = (0..m).map(|i| if i == e { 1.0 } else { 0.0 }).collect();
        for _ in 0..2 {
            for b in basis.iter() {
                let d: f64 = b.iter().zip(&w).map(|(x, y)| x * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= d * bi;
                }
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.5 / (m as f64).sqrt() {
            basis.push(w.into_iter().map(|x| x / norm).collect());
        }
        e += 1;
    }
    debug_assert_eq!(basis.len(), m);
}
