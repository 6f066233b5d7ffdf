//! Solvers and solvability checks for `A·X + X·B = C`.
//!
//! [`solve_bartels_stewart`] reduces both coefficient matrices to real Schur
//! form and back-substitutes block column by block column.
//! [`kronecker_solve`] vectorizes the equation and eliminates directly; it
//! is the independent check for small sizes.

use num_complex::Complex64;

use crate::assembly::SylvesterSystem;
use crate::denselin::{
    diagonal_blocks, eigenvalues, frobenius_norm, real_schur, solve_linear, tridiag_det,
    DenseMatrix, Lu, SchurOptions,
};
use crate::error::{Error, Result};

/// Largest unknown count accepted by the Kronecker solvers.
pub const KRONECKER_LIMIT: usize = 4096;

/// Relative spectral gap below which two spectra are treated as intersecting.
pub const SPECTRA_GAP_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SylvesterSolveReport {
    pub x: DenseMatrix,
    /// `‖A·x + x·B - C‖_F`, recomputed from `x`.
    pub residual_norm: f64,
    /// `min |λ_A + λ_B|` over all eigenvalue pairs.
    pub spectra_gap: f64,
}

fn check_shapes(a: &DenseMatrix, b: &DenseMatrix, c: &DenseMatrix) -> Result<()> {
    if !a.is_square() || !b.is_square() || c.rows() != a.rows() || c.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "A {}x{}, B {}x{}, C {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
            c.rows(),
            c.cols()
        )));
    }
    Ok(())
}

/// Smallest distance between `spec(A)` and `spec(-B)`.
pub fn spectra_gap(eig_a: &[Complex64], eig_b: &[Complex64]) -> f64 {
    eig_a
        .iter()
        .flat_map(|la| eig_b.iter().map(move |lb| (la + lb).norm()))
        .fold(f64::INFINITY, f64::min)
}

// Gaps are judged against the entries, not the eigenvalues: a matrix whose
// eigenvalues are all round-off is still singular.
fn entry_scale(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.max_abs() + b.max_abs()
}

/// Solves the `p×q` Sylvester equation `t·y + y·s = r` for `p, q ∈ {1, 2}`.
fn small_sylvester(t: &DenseMatrix, s: &DenseMatrix, r: &DenseMatrix) -> Result<DenseMatrix> {
    let (p, q) = (t.rows(), s.rows());
    if p == 1 && q == 1 {
        let d = t[(0, 0)] + s[(0, 0)];
        if d == 0.0 {
            return Err(Error::Singular { pivot: 0.0 });
        }
        return Ok(DenseMatrix::from_rows(&[[r[(0, 0)] / d]]));
    }
    let k = kron_operator(t, s);
    let y = solve_linear(&k, &DenseMatrix::column_vector(&r.vectorize()))?;
    Ok(DenseMatrix::unvectorize(p, q, y.as_slice()))
}

/// `(I ⊗ a) + (bᵀ ⊗ I)`, the matrix of `x ↦ a·x + x·b` acting on `vec(x)`.
fn kron_operator(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (m, n) = (a.rows(), b.rows());
    let mut k = DenseMatrix::zeros(m * n, m * n);
    for j in 0..n {
        for i in 0..m {
            for l in 0..m {
                k[(j * m + i, j * m + l)] += a[(i, l)];
            }
        }
    }
    for j in 0..n {
        for l in 0..n {
            let w = b[(l, j)];
            if w == 0.0 {
                continue;
            }
            for i in 0..m {
                k[(j * m + i, l * m + i)] += w;
            }
        }
    }
    k
}

/// Solves `ta·y + y·tb = f` with both factors quasi-upper-triangular.
fn solve_quasi_triangular(
    ta: &DenseMatrix,
    tb: &DenseMatrix,
    f: &DenseMatrix,
) -> Result<DenseMatrix> {
    let (m, n) = f.shape();
    let a_blocks = diagonal_blocks(ta);
    let b_blocks = diagonal_blocks(tb);
    let mut y = DenseMatrix::zeros(m, n);

    for &(j0, q) in &b_blocks {
        // right-hand side for block column j0..j0+q
        let mut rhs = f.submatrix(0, j0, m, q);
        for k in 0..j0 {
            for jj in 0..q {
                let w = tb[(k, j0 + jj)];
                if w == 0.0 {
                    continue;
                }
                for i in 0..m {
                    rhs[(i, jj)] -= y[(i, k)] * w;
                }
            }
        }
        let s = tb.submatrix(j0, j0, q, q);
        for &(i0, p) in a_blocks.iter().rev() {
            let mut r = rhs.submatrix(i0, 0, p, q);
            for ii in 0..p {
                for l in i0 + p..m {
                    let w = ta[(i0 + ii, l)];
                    if w == 0.0 {
                        continue;
                    }
                    for jj in 0..q {
                        r[(ii, jj)] -= w * y[(l, j0 + jj)];
                    }
                }
            }
            let t = ta.submatrix(i0, i0, p, p);
            let blk = small_sylvester(&t, &s, &r)?;
            for ii in 0..p {
                for jj in 0..q {
                    y[(i0 + ii, j0 + jj)] = blk[(ii, jj)];
                }
            }
        }
    }
    Ok(y)
}

/// Bartels-Stewart solution of `a·x + x·b = c`.
pub fn solve_bartels_stewart(
    a: &DenseMatrix,
    b: &DenseMatrix,
    c: &DenseMatrix,
) -> Result<SylvesterSolveReport> {
    check_shapes(a, b, c)?;
    let opts = SchurOptions::default();
    let sa = real_schur(a, opts)?;
    let sb = real_schur(b, opts)?;
    let gap = spectra_gap(&sa.eigenvalues, &sb.eigenvalues);
    let tolerance = SPECTRA_GAP_TOL * entry_scale(a, b);
    if gap <= tolerance {
        return Err(Error::NearSingular { gap, tolerance });
    }

    let solve = |rhs: &DenseMatrix| -> Result<DenseMatrix> {
        let f = sa.q.tr_matmul(rhs).matmul(&sb.q);
        let y = solve_quasi_triangular(&sa.t, &sb.t, &f).map_err(|e| match e {
            Error::Singular { .. } => Error::NearSingular { gap, tolerance },
            other => other,
        })?;
        Ok(sa.q.matmul(&y).matmul(&sb.q.transpose()))
    };
    let mut x = solve(c)?;
    // one refinement step with the same factors
    let r = c.sub(&a.matmul(&x).add(&x.matmul(b)));
    if !r.is_zero() {
        x = x.add(&solve(&r)?);
    }
    let residual_norm = frobenius_norm(&a.matmul(&x).add(&x.matmul(b)).sub(c));
    Ok(SylvesterSolveReport {
        x,
        residual_norm,
        spectra_gap: gap,
    })
}

/// Solves `a·x + x·b = c` through `((I ⊗ a) + (bᵀ ⊗ I))·vec(x) = vec(c)`.
pub fn kronecker_solve(a: &DenseMatrix, b: &DenseMatrix, c: &DenseMatrix) -> Result<DenseMatrix> {
    check_shapes(a, b, c)?;
    let (m, n) = c.shape();
    if m * n > KRONECKER_LIMIT {
        return Err(Error::TooLarge {
            unknowns: m * n,
            limit: KRONECKER_LIMIT,
        });
    }
    let k = kron_operator(a, b);
    let v = solve_linear(&k, &DenseMatrix::column_vector(&c.vectorize()))?;
    Ok(DenseMatrix::unvectorize(m, n, v.as_slice()))
}

/// Whether the stacked Kronecker matrix of `(a, b)` is singular under pivoted elimination.
pub fn kronecker_is_singular(a: &DenseMatrix, b: &DenseMatrix) -> bool {
    Lu::new(&kron_operator(a, b)).is_singular()
}

/// Matrix of the full operator `u ↦ M1·u + u·M2 + L(u)` on `vec(u)`.
pub fn system_operator(system: &SylvesterSystem) -> Result<DenseMatrix> {
    let (m, n) = (system.interior(), system.steps());
    if m * n > KRONECKER_LIMIT {
        return Err(Error::TooLarge {
            unknowns: m * n,
            limit: KRONECKER_LIMIT,
        });
    }
    let mut k = DenseMatrix::zeros(m * n, m * n);
    let mut unit = DenseMatrix::zeros(m, n);
    for col in 0..m * n {
        let (i, j) = (col % m, col / m);
        unit[(i, j)] = 1.0;
        let image = system.apply(&unit).vectorize();
        unit[(i, j)] = 0.0;
        k.set_column(col, &image);
    }
    Ok(k)
}

/// Solves the assembled system with the cross operator included, by dense
/// elimination on the vectorized operator.
pub fn solve_system_dense(system: &SylvesterSystem, rhs: &DenseMatrix) -> Result<DenseMatrix> {
    let k = system_operator(system)?;
    let v = solve_linear(&k, &DenseMatrix::column_vector(&rhs.vectorize()))?;
    Ok(DenseMatrix::unvectorize(
        system.interior(),
        system.steps(),
        v.as_slice(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Unique,
    NonUnique,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Unique => "unique",
            Verdict::NonUnique => "non-unique",
        }
    }
}

/// Closed-form characteristic roots and the numerically computed spectra,
/// each with its own verdict.
#[derive(Debug, Clone)]
pub struct UniquenessReport {
    /// `β ± √(δε)`.
    pub paper_roots_m1: [Complex64; 2],
    /// `±√(αγ)`.
    pub paper_roots_m2: [Complex64; 2],
    pub paper_gap: f64,
    pub paper_verdict: Verdict,
    pub exact_eigen_m1: Vec<Complex64>,
    pub exact_eigen_m2: Vec<Complex64>,
    /// `min |λ(M1) + λ(M2)|`.
    pub exact_gap: f64,
    pub exact_tolerance: f64,
    pub exact_verdict: Verdict,
}

/// Compares the closed-form roots of the characteristic polynomials and the
/// computed spectra of `M1` and `-M2`.
pub fn uniqueness_check(system: &SylvesterSystem) -> Result<UniquenessReport> {
    let k = &system.coefficients;
    let root = Complex64::new(k.delta * k.epsilon, 0.0).sqrt();
    let beta = Complex64::new(k.beta, 0.0);
    let paper_roots_m1 = [beta + root, beta - root];
    let r2 = Complex64::new(k.alpha * k.gamma, 0.0).sqrt();
    let paper_roots_m2 = [r2, -r2];
    // ±√(αγ) is symmetric, so matching against -M2 is matching against M2
    let paper_gap = spectra_gap(&paper_roots_m1, &paper_roots_m2);
    let paper_scale = [k.alpha, k.beta, k.gamma, k.delta, k.epsilon]
        .iter()
        .map(|w| w.abs())
        .fold(0.0, f64::max);
    let paper_verdict = if paper_gap <= SPECTRA_GAP_TOL * paper_scale {
        Verdict::NonUnique
    } else {
        Verdict::Unique
    };

    let opts = SchurOptions::default();
    let exact_eigen_m1 = eigenvalues(&system.m1, opts)?;
    let exact_eigen_m2 = eigenvalues(&system.m2, opts)?;
    let exact_gap = spectra_gap(&exact_eigen_m1, &exact_eigen_m2);
    let exact_tolerance = SPECTRA_GAP_TOL * entry_scale(&system.m1, &system.m2);
    let exact_verdict = if exact_gap <= exact_tolerance {
        Verdict::NonUnique
    } else {
        Verdict::Unique
    };
    Ok(UniquenessReport {
        paper_roots_m1,
        paper_roots_m2,
        paper_gap,
        paper_verdict,
        exact_eigen_m1,
        exact_eigen_m2,
        exact_gap,
        exact_tolerance,
        exact_verdict,
    })
}

/// Closed-form and exact determinants of `M1`.
#[derive(Debug, Clone)]
pub struct InvertibilityReport {
    /// `(β² - δε)^((n_x-1)/2)`.
    pub paper_determinant: f64,
    pub paper_invertible: bool,
    /// Three-term recurrence on the tridiagonal Toeplitz `M1`.
    pub exact_determinant: f64,
    /// Pivoted elimination on the assembled `M1`.
    pub exact_invertible: bool,
    /// Lax-Wendroff condition `(-1/τ + c²τ/h²)² ≠ (σ² - 1)c²/(4h²)`, when it applies.
    pub lax_wendroff_condition: Option<bool>,
}

impl InvertibilityReport {
    pub fn agree(&self) -> bool {
        self.paper_determinant == self.exact_determinant
    }
}

/// Relative threshold for calling `β² - δε` zero.
const DET_BASE_TOL: f64 = 1e-10;

pub fn invertibility_check_m1(system: &SylvesterSystem) -> InvertibilityReport {
    let k = &system.coefficients;
    let n = system.interior();
    let base = k.beta * k.beta - k.delta * k.epsilon;
    let mut paper_determinant = 1.0;
    for _ in 0..n / 2 {
        paper_determinant *= base;
    }
    let base_scale = k.beta * k.beta + (k.delta * k.epsilon).abs();
    let paper_invertible = base.abs() > DET_BASE_TOL * base_scale;
    let exact_determinant = tridiag_det(k.beta, k.delta, k.epsilon, n);
    let exact_invertible = !Lu::new(&system.m1).is_singular();

    let lax_wendroff_condition = (k.scheme_id == crate::scheme::SchemeId::LaxWendroff).then(|| {
        let g = &system.grid;
        let (h, tau, c, s) = (g.h(), g.tau(), g.c(), g.sigma());
        let lhs = (-1.0 / tau + c * c * tau / (h * h)).powi(2);
        let rhs = (s * s - 1.0) * c * c / (4.0 * h * h);
        (lhs - rhs).abs() > DET_BASE_TOL * (lhs.abs() + rhs.abs())
    });
    InvertibilityReport {
        paper_determinant,
        paper_invertible,
        exact_determinant,
        exact_invertible,
        lax_wendroff_condition,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NilpotencyReport {
    /// `Some(k)` when `M2^k = 0` and `M2^(k-1) ≠ 0` was verified.
    pub order: Option<usize>,
    /// `α = γ = 0`, so `M2` is the zero matrix.
    pub degenerate: bool,
    /// `M2 = α·Nᵀ + γ·N` entrywise, `N` the upper shift.
    pub decomposition_holds: bool,
}

/// Upper shift matrix `N` with ones on the superdiagonal.
pub fn upper_shift(n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| if j == i + 1 { 1.0 } else { 0.0 })
}

pub fn nilpotency_order(system: &SylvesterSystem) -> NilpotencyReport {
    let k = &system.coefficients;
    let nt = system.steps();
    let shift = upper_shift(nt);
    let rebuilt = shift.transpose().scale(k.alpha).add(&shift.scale(k.gamma));
    let decomposition_holds = rebuilt == system.m2;

    if k.alpha == 0.0 && k.gamma == 0.0 {
        return NilpotencyReport {
            order: Some(1),
            degenerate: true,
            decomposition_holds,
        };
    }
    if k.alpha != 0.0 && k.gamma != 0.0 {
        return NilpotencyReport {
            order: None,
            degenerate: false,
            decomposition_holds,
        };
    }
    // power the 0/1 pattern so large weights cannot overflow
    let pattern = system.m2.scale(1.0 / system.m2.max_abs());
    let below = pattern.pow(nt - 1);
    let full = below.matmul(&pattern);
    let order = (full.is_zero() && !below.is_zero()).then_some(nt);
    NilpotencyReport {
        order,
        degenerate: false,
        decomposition_holds,
    }
}

/// Final-time interior column of the matrix equation for `γ = 0`, from
/// `M1·U·M2^(n_t-1) = M0·M2^(n_t-1)`.
pub fn final_time_fast_path(system: &SylvesterSystem) -> Result<Vec<f64>> {
    let k = &system.coefficients;
    if k.gamma != 0.0 {
        return Err(Error::Precondition("fast path needs gamma = 0".into()));
    }
    if k.alpha == 0.0 {
        return Err(Error::Precondition("fast path needs alpha != 0".into()));
    }
    if !system.cross.is_zero() {
        return Err(Error::Precondition(
            "fast path needs the cross operator to vanish".into(),
        ));
    }
    let nt = system.steps();
    // M2 / α is the lower shift; its (n_t - 1)-th power has a single unit corner
    let corner = system.m2.scale(1.0 / k.alpha).pow(nt - 1);
    let rhs = system.m0.matmul(&corner);
    let lu = Lu::new(&system.m1);
    let sol = lu.solve(&rhs)?;
    Ok(sol.column(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble_system;
    use crate::scheme::{BoundaryData, Grid, SchemeCoefficients, SchemeId, SignalSpec};

    fn system(id: SchemeId, ni: usize, nt: usize, sigma: f64) -> SylvesterSystem {
        let grid = Grid::from_cfl(1.0, ni + 1, nt, 1.0, sigma).unwrap();
        let k = SchemeCoefficients::build(id, &grid).unwrap();
        let b = BoundaryData::sample_exact(&SignalSpec::new(0.9).unwrap(), &grid);
        assemble_system(&k, &grid, &b).unwrap()
    }

    fn custom_system(weights: [f64; 9], ni: usize, nt: usize) -> SylvesterSystem {
        let grid = Grid::new(0.1, 0.1, 1.0, ni + 1, nt).unwrap();
        let k = SchemeCoefficients::custom(weights).unwrap();
        let b = BoundaryData::sample_exact(&SignalSpec::new(0.9).unwrap(), &grid);
        assemble_system(&k, &grid, &b).unwrap()
    }

    #[test]
    fn scalar_and_diagonal_solves() {
        let r = solve_bartels_stewart(
            &DenseMatrix::from_rows(&[[2.0]]),
            &DenseMatrix::from_rows(&[[3.0]]),
            &DenseMatrix::from_rows(&[[10.0]]),
        )
        .unwrap();
        assert!((r.x[(0, 0)] - 2.0).abs() < 1e-15);
        let r = solve_bartels_stewart(
            &DenseMatrix::from_diag(&[1.0, 2.0]),
            &DenseMatrix::from_rows(&[[3.0]]),
            &DenseMatrix::column_vector(&[4.0, 5.0]),
        )
        .unwrap();
        assert!((r.x[(0, 0)] - 1.0).abs() < 1e-15 && (r.x[(1, 0)] - 1.0).abs() < 1e-15);
        assert!(r.residual_norm < 1e-14);

        let x = kronecker_solve(
            &DenseMatrix::from_rows(&[[2.0]]),
            &DenseMatrix::from_rows(&[[3.0]]),
            &DenseMatrix::from_rows(&[[10.0]]),
        )
        .unwrap();
        assert_eq!(x[(0, 0)], 2.0);
        let (a, b) = ([1.0, -2.0, 4.0], [0.5, 3.0]);
        let c = DenseMatrix::from_fn(3, 2, |i, j| (i + 2 * j) as f64 - 1.0);
        let x =
            kronecker_solve(&DenseMatrix::from_diag(&a), &DenseMatrix::from_diag(&b), &c).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                assert!((x[(i, j)] - c[(i, j)] / (a[i] + b[j])).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn complex_blocks_on_both_sides() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0, 0.0], [-2.0, 1.0, 0.5], [0.0, 0.3, 4.0]]);
        let b = DenseMatrix::from_rows(&[[0.0, 3.0], [-3.0, 0.5]]);
        let c = DenseMatrix::from_fn(3, 2, |i, j| 1.0 + i as f64 - j as f64);
        let bs = solve_bartels_stewart(&a, &b, &c).unwrap();
        let kr = kronecker_solve(&a, &b, &c).unwrap();
        assert!(frobenius_norm(&bs.x.sub(&kr)) < 1e-12 * frobenius_norm(&kr));
    }

    #[test]
    fn common_eigenvalue_is_rejected() {
        let a = DenseMatrix::from_diag(&[1.0, 2.0]);
        let b = DenseMatrix::from_diag(&[-2.0, 5.0]);
        let c = DenseMatrix::from_fn(2, 2, |_, _| 1.0);
        assert!(matches!(
            solve_bartels_stewart(&a, &b, &c),
            Err(Error::NearSingular { .. })
        ));
        assert!(matches!(
            kronecker_solve(&a, &b, &c),
            Err(Error::Singular { .. })
        ));
        assert!(kronecker_is_singular(&a, &b));
    }

    #[test]
    fn kronecker_size_guard() {
        let a = DenseMatrix::identity(65);
        let b = DenseMatrix::identity(64);
        let c = DenseMatrix::zeros(65, 64);
        assert!(matches!(
            kronecker_solve(&a, &b, &c),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn paper_uniqueness_verdicts() {
        for sigma in [0.3, 0.5, 0.9, 1.5] {
            for id in [SchemeId::Lax, SchemeId::LaxWendroff] {
                let r = uniqueness_check(&system(id, 4, 4, sigma)).unwrap();
                assert_eq!(r.paper_verdict, Verdict::Unique, "{id} at {sigma}");
            }
        }
        let r = uniqueness_check(&system(SchemeId::Leapfrog, 4, 4, 1.0)).unwrap();
        assert_eq!(r.paper_verdict, Verdict::NonUnique);
        // equal sizes put the colliding pair in the computed spectra too
        assert_eq!(r.exact_verdict, Verdict::NonUnique);
        let r = uniqueness_check(&system(SchemeId::Leapfrog, 4, 4, 0.5)).unwrap();
        assert_eq!(r.paper_verdict, Verdict::Unique);
        assert_eq!(r.exact_verdict, Verdict::Unique);
    }

    #[test]
    fn lax_at_unit_cfl_collides_at_zero() {
        // δ = 0 makes both M1 and M2 nilpotent
        let r = uniqueness_check(&system(SchemeId::Lax, 4, 4, 1.0)).unwrap();
        assert_eq!(r.paper_verdict, Verdict::NonUnique);
        assert_eq!(r.exact_verdict, Verdict::NonUnique);
    }

    #[test]
    fn determinant_pairs() {
        let s = custom_system([1.0, 2.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0], 4, 4);
        let r = invertibility_check_m1(&s);
        assert_eq!(r.paper_determinant, 9.0);
        assert_eq!(r.exact_determinant, 5.0);
        assert!(!r.agree());
        assert!(r.paper_invertible && r.exact_invertible);

        for ni in [2, 4, 6, 8] {
            let s = system(SchemeId::Lax, ni, 4, 0.6);
            let r = invertibility_check_m1(&s);
            assert_eq!(r.paper_determinant, r.exact_determinant, "n = {ni}");
            assert!(r.paper_invertible && r.exact_invertible);
            assert!(r.lax_wendroff_condition.is_none());
        }
        let s = system(SchemeId::LaxWendroff, 4, 4, 0.5);
        assert_eq!(
            invertibility_check_m1(&s).lax_wendroff_condition,
            Some(true)
        );
        let s = system(SchemeId::LaxWendroff, 4, 4, 2.0 / 3.0f64.sqrt());
        let r = invertibility_check_m1(&s);
        assert_eq!(r.lax_wendroff_condition, Some(false));
        assert!(!r.paper_invertible);
    }

    #[test]
    fn nilpotency_reports() {
        let r = nilpotency_order(&system(SchemeId::Lax, 4, 4, 0.5));
        assert_eq!(r.order, Some(4));
        assert!(r.decomposition_holds && !r.degenerate);
        let r = nilpotency_order(&system(SchemeId::Leapfrog, 4, 4, 0.5));
        assert_eq!(r.order, None);
        assert!(r.decomposition_holds);
        let s = system(SchemeId::Leapfrog, 4, 4, 0.5);
        let sq = s.m2.matmul(&s.m2);
        let ag = s.coefficients.alpha * s.coefficients.gamma;
        assert_eq!(sq[(1, 1)], 2.0 * ag);
        let r = nilpotency_order(&custom_system(
            [0.0, 1.0, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0],
            4,
            4,
        ));
        assert_eq!(r.order, Some(1));
        assert!(r.degenerate);
    }

    #[test]
    fn fast_path_matches_full_solve() {
        let s = system(SchemeId::Lax, 4, 4, 0.5);
        let fast = final_time_fast_path(&s).unwrap();
        let full = solve_bartels_stewart(&s.m1, &s.m2, &s.m0).unwrap();
        let last = full.x.column(3);
        for (a, b) in fast.iter().zip(&last) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0));
        }
        // n_t = 2: M1·x = (M0·M2)[:, 0] / α
        let s = system(SchemeId::LaxWendroff, 4, 2, 0.5);
        let fast = final_time_fast_path(&s).unwrap();
        let rhs = s.m0.matmul(&s.m2).scale(1.0 / s.coefficients.alpha);
        let direct = solve_linear(&s.m1, &DenseMatrix::column_vector(&rhs.column(0))).unwrap();
        for i in 0..4 {
            assert!((fast[i] - direct[(i, 0)]).abs() < 1e-12);
        }
        assert!(matches!(
            final_time_fast_path(&system(SchemeId::Leapfrog, 4, 4, 0.5)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn fast_path_zero_data() {
        let grid = Grid::from_cfl(1.0, 5, 4, 1.0, 0.5).unwrap();
        let k = SchemeCoefficients::build(SchemeId::Lax, &grid).unwrap();
        let b = BoundaryData::new(&grid, vec![0.0; 5], vec![0.0; 5], vec![0.0; 6], None).unwrap();
        let s = assemble_system(&k, &grid, &b).unwrap();
        assert!(final_time_fast_path(&s).unwrap().iter().all(|&v| v == 0.0));
    }
}
