//! Real Schur decomposition: Householder reduction to upper Hessenberg form
//! followed by Francis double-shift QR with deflation.
//!
//! The result satisfies `a = q·t·qᵀ` where `t` is quasi-upper-triangular.
//! Real eigenvalues sit on 1×1 diagonal blocks; each complex-conjugate pair
//! sits on a standardized 2×2 block `[[p, b], [c, p]]` with `b·c < 0`.

use num_complex::Complex64;

use super::matrix::{frobenius_norm, DenseMatrix};
use crate::error::{Error, Result};

/// Convergence controls for [`real_schur`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurOptions {
    /// Relative size below which a subdiagonal entry is deflated.
    pub tol: f64,
    /// Iteration cap, counted in sweeps per unit of dimension.
    pub max_iters_per_dim: usize,
}

impl Default for SchurOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iters_per_dim: 100,
        }
    }
}

/// `a = q·t·qᵀ` with `q` orthogonal and `t` quasi-upper-triangular.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: DenseMatrix,
    pub t: DenseMatrix,
    pub eigenvalues: Vec<Complex64>,
}

impl SchurForm {
    /// Sizes of the diagonal blocks of `t`, top to bottom.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        diagonal_blocks(&self.t)
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.q.matmul(&self.t).matmul(&self.q.transpose())
    }
}

/// `(start, size)` of every 1×1 or 2×2 diagonal block of a quasi-triangular matrix.
pub(crate) fn diagonal_blocks(t: &DenseMatrix) -> Vec<(usize, usize)> {
    let n = t.rows();
    let mut out = Vec::new();
    let mut k = 0;
    while k < n {
        if k + 1 < n && t[(k + 1, k)] != 0.0 {
            out.push((k, 2));
            k += 2;
        } else {
            out.push((k, 1));
            k += 1;
        }
    }
    out
}

/// Householder vector `v` (with `v[0] = 1`) and `beta` such that
/// `(I - beta·v·vᵀ)·x` is a multiple of `e_1`.
fn householder(x: &[f64]) -> (Vec<f64>, f64) {
    let sigma: f64 = x[1..].iter().map(|v| v * v).sum();
    let mut v = x.to_vec();
    v[0] = 1.0;
    if sigma == 0.0 {
        return (v, 0.0);
    }
    let mu = (x[0] * x[0] + sigma).sqrt();
    let v0 = if x[0] <= 0.0 {
        x[0] - mu
    } else {
        -sigma / (x[0] + mu)
    };
    let beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
    for vi in v[1..].iter_mut() {
        *vi /= v0;
    }
    (v, beta)
}

/// `rows(r0..r0+len) ← (I - beta v vᵀ) rows`, restricted to columns `cols`.
fn reflect_rows(
    m: &mut DenseMatrix,
    r0: usize,
    v: &[f64],
    beta: f64,
    cols: std::ops::Range<usize>,
) {
    if beta == 0.0 {
        return;
    }
    for j in cols {
        let s: f64 = v
            .iter()
            .enumerate()
            .map(|(k, vk)| vk * m[(r0 + k, j)])
            .sum();
        let s = beta * s;
        for (k, vk) in v.iter().enumerate() {
            m[(r0 + k, j)] -= s * vk;
        }
    }
}

/// `cols(c0..c0+len) ← cols (I - beta v vᵀ)`, restricted to rows `rows`.
fn reflect_cols(
    m: &mut DenseMatrix,
    c0: usize,
    v: &[f64],
    beta: f64,
    rows: std::ops::Range<usize>,
) {
    if beta == 0.0 {
        return;
    }
    for i in rows {
        let s: f64 = v
            .iter()
            .enumerate()
            .map(|(k, vk)| vk * m[(i, c0 + k)])
            .sum();
        let s = beta * s;
        for (k, vk) in v.iter().enumerate() {
            m[(i, c0 + k)] -= s * vk;
        }
    }
}

/// Applies the rotation `R = [[cs, -sn], [sn, cs]]` as `Rᵀ·m` on rows `(p, p+1)`.
fn rotate_rows(m: &mut DenseMatrix, p: usize, cs: f64, sn: f64, cols: std::ops::Range<usize>) {
    for j in cols {
        let a = m[(p, j)];
        let b = m[(p + 1, j)];
        m[(p, j)] = cs * a + sn * b;
        m[(p + 1, j)] = -sn * a + cs * b;
    }
}

/// Applies `m·R` on columns `(p, p+1)`.
fn rotate_cols(m: &mut DenseMatrix, p: usize, cs: f64, sn: f64, rows: std::ops::Range<usize>) {
    for i in rows {
        let a = m[(i, p)];
        let b = m[(i, p + 1)];
        m[(i, p)] = cs * a + sn * b;
        m[(i, p + 1)] = -sn * a + cs * b;
    }
}

fn sign1(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Standardizes a real 2×2 block (LAPACK `dlanv2`). Returns the new block
/// `[a, b, c, d]` and the rotation `(cs, sn)` with
/// `old = [[cs, -sn], [sn, cs]] · new · [[cs, sn], [-sn, cs]]`.
///
/// Real eigenvalues give `c = 0`; complex ones give `a = d` and `b·c < 0`.
fn standardize_2x2(mut a: f64, mut b: f64, mut c: f64, mut d: f64) -> ([f64; 4], f64, f64) {
    let eps = f64::EPSILON;
    let (mut cs, mut sn);
    if c == 0.0 {
        cs = 1.0;
        sn = 0.0;
    } else if b == 0.0 {
        cs = 0.0;
        sn = 1.0;
        std::mem::swap(&mut a, &mut d);
        b = -c;
        c = 0.0;
    } else if a - d == 0.0 && sign1(b) != sign1(c) {
        cs = 1.0;
        sn = 0.0;
    } else {
        let temp = a - d;
        let mut p = 0.5 * temp;
        let bcmax = b.abs().max(c.abs());
        let bcmis = b.abs().min(c.abs()) * sign1(b) * sign1(c);
        let scale = p.abs().max(bcmax);
        let mut z = p / scale * p + bcmax / scale * bcmis;
        if z >= 4.0 * eps {
            // real eigenvalues
            z = p + sign1(p) * scale.sqrt() * z.sqrt();
            a = d + z;
            d -= bcmax / z * bcmis;
            let tau = c.hypot(z);
            cs = z / tau;
            sn = c / tau;
            b -= c;
            c = 0.0;
        } else {
            let sigma = b + c;
            let tau = sigma.hypot(temp);
            cs = (0.5 * (1.0 + sigma.abs() / tau)).sqrt();
            sn = -(p / (tau * cs)) * sign1(sigma);

            let aa = a * cs + b * sn;
            let bb = -a * sn + b * cs;
            let cc = c * cs + d * sn;
            let dd = -c * sn + d * cs;

            a = aa * cs + cc * sn;
            b = bb * cs + dd * sn;
            c = -aa * sn + cc * cs;
            d = -bb * sn + dd * cs;

            let mid = 0.5 * (a + d);
            a = mid;
            d = mid;
            if c != 0.0 {
                if b != 0.0 {
                    if sign1(b) == sign1(c) {
                        // real eigenvalues after all: split into triangular form
                        let sab = b.abs().sqrt();
                        let sac = c.abs().sqrt();
                        p = sign1(c) * sab * sac;
                        let tau = 1.0 / (b + c).abs().sqrt();
                        a = mid + p;
                        d = mid - p;
                        b -= c;
                        c = 0.0;
                        let cs1 = sab * tau;
                        let sn1 = sac * tau;
                        let t = cs * cs1 - sn * sn1;
                        sn = cs * sn1 + sn * cs1;
                        cs = t;
                    }
                } else {
                    b = -c;
                    c = 0.0;
                    let t = cs;
                    cs = -sn;
                    sn = t;
                }
            }
        }
    }
    ([a, b, c, d], cs, sn)
}

/// Standardizes the 2×2 block at `(p, p)` in place, updating `q`.
fn standardize_block(h: &mut DenseMatrix, q: &mut DenseMatrix, p: usize) {
    let n = h.rows();
    let ([a, b, c, d], cs, sn) =
        standardize_2x2(h[(p, p)], h[(p, p + 1)], h[(p + 1, p)], h[(p + 1, p + 1)]);
    if sn != 0.0 || cs != 1.0 {
        rotate_rows(h, p, cs, sn, p + 2..n);
        rotate_cols(h, p, cs, sn, 0..p);
        rotate_cols(q, p, cs, sn, 0..n);
    }
    h[(p, p)] = a;
    h[(p, p + 1)] = b;
    h[(p + 1, p)] = c;
    h[(p + 1, p + 1)] = d;
}

/// Reduces `a` to upper Hessenberg form, returning `(q, h)` with `a = q·h·qᵀ`.
pub fn hessenberg(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    assert!(a.is_square());
    let n = a.rows();
    let mut h = a.clone();
    let mut q = DenseMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<f64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let (v, beta) = householder(&x);
        if beta == 0.0 {
            continue;
        }
        reflect_rows(&mut h, k + 1, &v, beta, k..n);
        reflect_cols(&mut h, k + 1, &v, beta, 0..n);
        reflect_cols(&mut q, k + 1, &v, beta, 0..n);
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
    (q, h)
}

/// Eigenvalues read off the diagonal blocks of a quasi-triangular matrix.
pub(crate) fn block_eigenvalues(t: &DenseMatrix) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(t.rows());
    for (k, size) in diagonal_blocks(t) {
        if size == 1 {
            out.push(Complex64::new(t[(k, k)], 0.0));
        } else {
            let (a, b, c, d) = (t[(k, k)], t[(k, k + 1)], t[(k + 1, k)], t[(k + 1, k + 1)]);
            let re = 0.5 * (a + d);
            let disc = 0.25 * (a - d) * (a - d) + b * c;
            if disc >= 0.0 {
                out.push(Complex64::new(re + disc.sqrt(), 0.0));
                out.push(Complex64::new(re - disc.sqrt(), 0.0));
            } else {
                let im = (-disc).sqrt();
                out.push(Complex64::new(re, im));
                out.push(Complex64::new(re, -im));
            }
        }
    }
    out
}

/// Real Schur decomposition `a = q·t·qᵀ`.
pub fn real_schur(a: &DenseMatrix, opts: SchurOptions) -> Result<SchurForm> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "real_schur needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.all_finite() {
        return Err(Error::DimensionMismatch("non-finite entry".into()));
    }
    let n = a.rows();
    let (mut q, mut h) = hessenberg(a);
    if n == 0 {
        return Ok(SchurForm {
            q,
            t: h,
            eigenvalues: Vec::new(),
        });
    }
    let norm = frobenius_norm(&h);
    let max_iters = opts.max_iters_per_dim * n.max(1);
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;

    loop {
        if hi == 0 {
            break;
        }
        // locate the start of the unreduced block ending at `hi`
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].abs() <= opts.tol * s {
                h[(l, l - 1)] = 0.0;
                break;
            }
            l -= 1;
        }

        if l == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        if l + 1 == hi {
            standardize_block(&mut h, &mut q, l);
            if h[(hi, hi - 1)] == 0.0 {
                // split into two real eigenvalues; the upper one may still couple
                hi -= 1;
            } else if hi >= 2 {
                hi -= 2;
            } else {
                break;
            }
            its = 0;
            continue;
        }

        total += 1;
        its += 1;
        if total > max_iters {
            let residual = (l + 1..=hi).fold(0.0f64, |m, i| m.max(h[(i, i - 1)].abs()));
            return Err(Error::Convergence {
                what: "real Schur QR iteration",
                iterations: total,
                residual,
            });
        }

        // double-shift polynomial coefficients: trace and determinant
        let (s, t) = if its.is_multiple_of(10) {
            let e = h[(hi, hi - 1)].abs() + h[(hi - 1, hi - 2)].abs();
            let h11 = 0.75 * e + h[(hi, hi)];
            let h12 = -0.4375 * e;
            (2.0 * h11, h11 * h11 - h12 * e)
        } else {
            let (a11, a12, a21, a22) = (
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            );
            (a11 + a22, a11 * a22 - a12 * a21)
        };

        let mut x = h[(l, l)] * h[(l, l)] + h[(l, l + 1)] * h[(l + 1, l)] - s * h[(l, l)] + t;
        let mut y = h[(l + 1, l)] * (h[(l, l)] + h[(l + 1, l + 1)] - s);
        let mut z = h[(l + 1, l)] * h[(l + 2, l + 1)];

        for k in l..=hi - 2 {
            let (v, beta) = householder(&[x, y, z]);
            let c0 = if k > l { k - 1 } else { l };
            reflect_rows(&mut h, k, &v, beta, c0..n);
            let r1 = (k + 3).min(hi) + 1;
            reflect_cols(&mut h, k, &v, beta, 0..r1);
            reflect_cols(&mut q, k, &v, beta, 0..n);
            if k > l {
                h[(k + 1, k - 1)] = 0.0;
                h[(k + 2, k - 1)] = 0.0;
            }
            x = h[(k + 1, k)];
            y = h[(k + 2, k)];
            if k + 3 <= hi {
                z = h[(k + 3, k)];
            }
        }
        // closing Givens rotation on rows (hi-1, hi)
        let r = x.hypot(y);
        if r != 0.0 {
            let (cs, sn) = (x / r, y / r);
            rotate_rows(&mut h, hi - 1, cs, sn, hi - 2..n);
            rotate_cols(&mut h, hi - 1, cs, sn, 0..hi + 1);
            rotate_cols(&mut q, hi - 1, cs, sn, 0..n);
            h[(hi, hi - 2)] = 0.0;
        }
    }

    // clear rounding debris below the first subdiagonal
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            h[(i, j)] = 0.0;
        }
    }
    let eigenvalues = block_eigenvalues(&h);
    Ok(SchurForm {
        q,
        t: h,
        eigenvalues,
    })
}

/// Eigenvalues of a square matrix. Triangular inputs are read off the
/// diagonal exactly; everything else goes through [`real_schur`].
pub fn eigenvalues(a: &DenseMatrix, opts: SchurOptions) -> Result<Vec<Complex64>> {
    let n = a.rows();
    let upper = (0..n).all(|i| (0..i).all(|j| a[(i, j)] == 0.0));
    let lower = (0..n).all(|i| (i + 1..n).all(|j| a[(i, j)] == 0.0));
    if a.is_square() && (upper || lower) {
        return Ok(a
            .diagonal()
            .into_iter()
            .map(|d| Complex64::new(d, 0.0))
            .collect());
    }
    Ok(real_schur(a, opts)?.eigenvalues)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &DenseMatrix) -> SchurForm {
        let f = real_schur(a, SchurOptions::default()).unwrap();
        let n = a.rows();
        let orth = frobenius_norm(&f.q.tr_matmul(&f.q).sub(&DenseMatrix::identity(n)));
        assert!(orth <= 1e-10 * n as f64, "orthogonality {orth}");
        let rec = frobenius_norm(&f.reconstruct().sub(a));
        assert!(
            rec <= 1e-9 * frobenius_norm(a).max(1e-300),
            "reconstruction {rec}"
        );
        for i in 0..n {
            for j in 0..i.saturating_sub(1) {
                assert_eq!(f.t[(i, j)], 0.0);
            }
        }
        for (k, size) in f.blocks() {
            if size == 2 {
                let (b, c) = (f.t[(k, k + 1)], f.t[(k + 1, k)]);
                assert!(b * c < 0.0, "2x2 block with real eigenvalues");
                assert_eq!(f.t[(k, k)], f.t[(k + 1, k + 1)]);
            }
        }
        f
    }

    #[test]
    fn triangular_input_is_fixed_point() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0, 3.0], [0.0, -4.0, 5.0], [0.0, 0.0, 6.0]]);
        let f = check(&a);
        assert_eq!(f.q, DenseMatrix::identity(3));
        assert_eq!(f.t, a);
    }

    #[test]
    fn rotation_block_is_kept() {
        let a = DenseMatrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]);
        let f = check(&a);
        assert_eq!(f.t, a);
        let mut ev = f.eigenvalues.clone();
        ev.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        assert_eq!(
            ev,
            vec![Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0)]
        );
    }

    #[test]
    fn real_2x2_is_split() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        let f = check(&a);
        assert_eq!(f.t[(1, 0)], 0.0);
        let disc = (33.0f64).sqrt();
        let mut ev: Vec<f64> = f.eigenvalues.iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - (5.0 - disc) / 2.0).abs() < 1e-14);
        assert!((ev[1] - (5.0 + disc) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn companion_and_defective_inputs() {
        // x^4 - 1: eigenvalues ±1, ±i
        let c = DenseMatrix::from_rows(&[
            [0.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ]);
        let f = check(&c);
        for z in &f.eigenvalues {
            assert!((z.norm() - 1.0).abs() < 1e-10);
        }
        // Jordan block: convergence is slow but must terminate
        let j = DenseMatrix::from_fn(6, 6, |i, k| if i == k + 1 { 2.0 } else { 0.0 });
        check(&j);
        check(&DenseMatrix::zeros(3, 3));
        check(&DenseMatrix::identity(5));
    }

    #[test]
    fn hessenberg_structure() {
        let a = DenseMatrix::from_fn(5, 5, |i, j| ((i * 7 + j * 3) % 5) as f64 - 1.5);
        let (q, h) = hessenberg(&a);
        for i in 0..5usize {
            for j in 0..i.saturating_sub(1) {
                assert_eq!(h[(i, j)], 0.0);
            }
        }
        let rec = q.matmul(&h).matmul(&q.transpose());
        assert!(frobenius_norm(&rec.sub(&a)) < 1e-12 * frobenius_norm(&a));
    }

    #[test]
    fn triangular_eigenvalues_are_exact() {
        let a = DenseMatrix::from_fn(5, 5, |i, j| if i == j + 1 { 3.0 } else { 0.0 });
        let ev = eigenvalues(&a, SchurOptions::default()).unwrap();
        assert!(ev.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }
}
