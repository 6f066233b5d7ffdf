//! Error analysis for `M1·E + E·M2 = F`: closed-form Gram blocks and
//! spectra, the SVD split into uncoupled per-cell problems with their
//! minimum-norm solution, the error bound on `‖F̃11‖`, and the Lax
//! normalization with its CFL-dependent bound.

use crate::assembly::{FieldMatrix, SylvesterSystem};
use crate::denselin::{frobenius_norm, svd, DenseMatrix, SvdForm, SVD_TOL};
use crate::error::{Error, Result};
use crate::scheme::{Grid, SchemeCoefficients, SchemeId};

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_TOL: f64 = 1e-12;

/// The 2×2 blocks claimed for `M1·M1ᵀ` and `M2·M2ᵀ`.
pub fn gram_blocks_paper(k: &SchemeCoefficients) -> (DenseMatrix, DenseMatrix) {
    let (b, d, e) = (k.beta, k.delta, k.epsilon);
    let off = b * (d + e);
    let g1 = DenseMatrix::from_rows(&[[b * b + d * d, off], [off, e * e + b * b]]);
    let g2 = DenseMatrix::from_diag(&[k.gamma * k.gamma, k.alpha * k.alpha]);
    (g1, g2)
}

/// Closed-form values next to the computed singular values.
///
/// The closed-form values are eigenvalues of the Gram blocks, so they are
/// compared against squared singular values.
#[derive(Debug, Clone)]
pub struct PaperSpectra {
    /// `½(2β²+δ²+ε² ∓ (δ+ε)√(4β²+δ²+ε²-2δε))`, each of multiplicity `(n_x-1)/2`.
    pub m1_pair: [f64; 2],
    pub m1_multiplicity: usize,
    /// `(α², γ²)`, each of multiplicity `n_t/2`.
    pub m2_pair: [f64; 2],
    pub m2_multiplicity: usize,
    pub exact_m1: Vec<f64>,
    pub exact_m2: Vec<f64>,
}

impl PaperSpectra {
    /// Closed-form values expanded by multiplicity, sorted descending.
    pub fn expanded_m1(&self) -> Vec<f64> {
        expand(self.m1_pair, self.m1_multiplicity)
    }

    pub fn expanded_m2(&self) -> Vec<f64> {
        expand(self.m2_pair, self.m2_multiplicity)
    }

    /// Largest gap between expanded closed-form values and squared singular values of `M1`.
    pub fn m1_deviation(&self) -> f64 {
        max_gap(&self.expanded_m1(), &self.exact_m1)
    }

    pub fn m2_deviation(&self) -> f64 {
        max_gap(&self.expanded_m2(), &self.exact_m2)
    }
}

fn expand(pair: [f64; 2], mult: usize) -> Vec<f64> {
    let mut v: Vec<f64> = std::iter::repeat_n(pair[0], mult)
        .chain(std::iter::repeat_n(pair[1], mult))
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn max_gap(closed: &[f64], singular: &[f64]) -> f64 {
    closed
        .iter()
        .zip(singular)
        .map(|(c, s)| (c - s * s).abs())
        .fold(0.0, f64::max)
}

pub fn singular_values_paper(k: &SchemeCoefficients, grid: &Grid) -> Result<PaperSpectra> {
    grid.require_even()?;
    let (b, d, e) = (k.beta, k.delta, k.epsilon);
    let base = 2.0 * b * b + d * d + e * e;
    let root = (4.0 * b * b + d * d + e * e - 2.0 * d * e).max(0.0).sqrt();
    let m1_pair = [0.5 * (base - (d + e) * root), 0.5 * (base + (d + e) * root)];
    let m2_pair = [k.alpha * k.alpha, k.gamma * k.gamma];

    let (ni, nt) = (grid.interior(), grid.n_t());
    let m1 = DenseMatrix::from_fn(ni, ni, |r, c| {
        if r == c {
            b
        } else if c == r + 1 {
            d
        } else if r == c + 1 {
            e
        } else {
            0.0
        }
    });
    let m2 = DenseMatrix::from_fn(nt, nt, |r, c| {
        if c == r + 1 {
            k.gamma
        } else if r == c + 1 {
            k.alpha
        } else {
            0.0
        }
    });
    Ok(PaperSpectra {
        m1_pair,
        m1_multiplicity: ni / 2,
        m2_pair,
        m2_multiplicity: nt / 2,
        exact_m1: svd(&m1, SVD_TOL)?.sigma,
        exact_m2: svd(&m2, SVD_TOL)?.sigma,
    })
}

/// Block split of `Uᵀ1·F·V2` and the cellwise minimum-norm solution.
///
/// `Ẽ = V1ᵀ·E·V2` and `Ẽ̃ = Uᵀ1·E·U2` are treated as independent unknowns.
/// Blocks the three block equations leave free are set to zero.
#[derive(Debug, Clone)]
pub struct MinNormSolution {
    pub rank_m1: usize,
    pub rank_m2: usize,
    /// Nonzero singular values of `M1` and `M2`.
    pub m1_tilde: Vec<f64>,
    pub m2_tilde: Vec<f64>,
    pub f11: DenseMatrix,
    pub f12: DenseMatrix,
    pub f21: DenseMatrix,
    pub f22: DenseMatrix,
    /// `ẽ_ij` over the leading block.
    pub e11: DenseMatrix,
    /// `M̃1⁻¹·F̃12`.
    pub e12: DenseMatrix,
    /// `ẽ̃_ij` over the leading block.
    pub ee11: DenseMatrix,
    /// `F̃21·M̃2⁻¹`.
    pub ee21: DenseMatrix,
    /// `sqrt(‖Ẽ‖² + ‖Ẽ̃‖²)` with free blocks at zero.
    pub norm: f64,
    /// `‖Uᵀ1·F·V2‖_F`.
    pub transformed_norm: f64,
}

/// Cellwise minimizer of `e² + ee²` subject to `m1·e + m2·ee = f`.
pub fn min_norm_cell(m1: f64, m2: f64, f: f64) -> Option<(f64, f64)> {
    let denom = m1 * m1 + m2 * m2;
    if denom == 0.0 {
        return None;
    }
    Some((m1 * f / denom, m2 * f / denom))
}

/// Splits `M1·E + E·M2 = f` through the SVDs of `m1` and `m2`.
pub fn min_norm_split(
    m1: &DenseMatrix,
    m2: &DenseMatrix,
    f: &DenseMatrix,
) -> Result<MinNormSolution> {
    if !m1.is_square() || !m2.is_square() || f.shape() != (m1.rows(), m2.rows()) {
        return Err(Error::DimensionMismatch(format!(
            "M1 {}x{}, M2 {}x{}, F {}x{}",
            m1.rows(),
            m1.cols(),
            m2.rows(),
            m2.cols(),
            f.rows(),
            f.cols()
        )));
    }
    let s1 = svd(m1, SVD_TOL)?;
    let s2 = svd(m2, SVD_TOL)?;
    split_with(&s1, &s2, f)
}

fn split_with(s1: &SvdForm, s2: &SvdForm, f: &DenseMatrix) -> Result<MinNormSolution> {
    let (m, n) = f.shape();
    let (r1, r2) = (s1.rank(RANK_TOL), s2.rank(RANK_TOL));
    let m1_tilde = s1.sigma[..r1].to_vec();
    let m2_tilde = s2.sigma[..r2].to_vec();
    let ft = s1.u_left.tr_matmul(f).matmul(&s2.v_right);
    let f11 = ft.submatrix(0, 0, r1, r2);
    let f12 = ft.submatrix(0, r2, r1, n - r2);
    let f21 = ft.submatrix(r1, 0, m - r1, r2);
    let f22 = ft.submatrix(r1, r2, m - r1, n - r2);

    let mut e11 = DenseMatrix::zeros(r1, r2);
    let mut ee11 = DenseMatrix::zeros(r1, r2);
    for i in 0..r1 {
        for j in 0..r2 {
            let (e, ee) = min_norm_cell(m1_tilde[i], m2_tilde[j], f11[(i, j)])
                .ok_or(Error::DegeneratePair { i, j })?;
            e11[(i, j)] = e;
            ee11[(i, j)] = ee;
        }
    }
    let e12 = DenseMatrix::from_fn(r1, n - r2, |i, j| f12[(i, j)] / m1_tilde[i]);
    let ee21 = DenseMatrix::from_fn(m - r1, r2, |i, j| f21[(i, j)] / m2_tilde[j]);
    let norm = [&e11, &e12, &ee11, &ee21]
        .iter()
        .map(|b| frobenius_norm(b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(MinNormSolution {
        rank_m1: r1,
        rank_m2: r2,
        m1_tilde,
        m2_tilde,
        transformed_norm: frobenius_norm(&ft),
        f11,
        f12,
        f21,
        f22,
        e11,
        e12,
        ee11,
        ee21,
        norm,
    })
}

/// Both sides of the error bound on `‖F̃11‖` and the terms that build the right side.
#[derive(Debug, Clone)]
pub struct BoundReport {
    /// `‖F̃11‖`, computed directly.
    pub lhs: f64,
    /// `‖F‖_F` with `F = M1·U_exact + U_exact·M2 - M0`.
    pub f_norm: f64,
    /// `‖U1‖² = n_x - 1` and `‖V2‖² = n_t`.
    pub u1_norm_sq: f64,
    pub v2_norm_sq: f64,
    /// `((n_x-1)/2)(2β²+δ²+ε²)` and `(n_t/2)(α²+γ²)`.
    pub m1_norm_sq_paper: f64,
    pub m2_norm_sq_paper: f64,
    pub m1_norm_sq_exact: f64,
    pub m2_norm_sq_exact: f64,
    pub m0_norm: f64,
    pub u_exact_norm: f64,
    pub rhs: f64,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Evaluates the bound with `L` left out.
pub fn error_bound(system: &SylvesterSystem, u_exact: &FieldMatrix) -> Result<BoundReport> {
    let k = &system.coefficients;
    let (ni, nt) = (system.interior() as f64, system.steps() as f64);
    let u = &u_exact.values;
    let f = system
        .m1
        .matmul(u)
        .add(&u.matmul(&system.m2))
        .sub(&system.m0);
    let split = min_norm_split(&system.m1, &system.m2, &f)?;

    let m1_sq = 0.5 * ni * (2.0 * k.beta * k.beta + k.delta * k.delta + k.epsilon * k.epsilon);
    let m2_sq = 0.5 * nt * (k.alpha * k.alpha + k.gamma * k.gamma);
    let m0_norm = frobenius_norm(&system.m0);
    let u_norm = frobenius_norm(u);
    let rhs = (nt * ni).sqrt() * (u_norm * (m1_sq.sqrt() + m2_sq.sqrt()) + m0_norm);
    Ok(BoundReport {
        lhs: frobenius_norm(&split.f11),
        f_norm: frobenius_norm(&f),
        u1_norm_sq: ni,
        v2_norm_sq: nt,
        m1_norm_sq_paper: m1_sq,
        m2_norm_sq_paper: m2_sq,
        m1_norm_sq_exact: frobenius_norm(&system.m1).powi(2),
        m2_norm_sq_exact: frobenius_norm(&system.m2).powi(2),
        m0_norm,
        u_exact_norm: u_norm,
        rhs,
    })
}

/// Right side of the error bound for the normalized Lax scheme.
pub fn lax_bound(cfl: f64, n_x: usize, n_t: usize, u0: f64, u_l: f64) -> Result<f64> {
    if !(cfl.is_finite() && cfl > 0.0) {
        return Err(Error::Domain(format!("cfl must be positive, got {cfl}")));
    }
    if n_x < 1 {
        return Err(Error::Domain("n_x must be at least 1".into()));
    }
    let plus = 0.5 + 1.0 / (2.0 * cfl);
    let minus = 0.5 - 1.0 / (2.0 * cfl);
    let nt = n_t as f64;
    let ni = (n_x - 1) as f64;
    Ok(plus * plus * nt * nt * u0 * u0
        + minus * minus * nt * nt * u_l * u_l
        + (ni / 2.0).sqrt() * (plus * plus + minus * minus).sqrt()
        + nt.sqrt() / (2.0f64.sqrt() * cfl))
}

/// Lax weights scaled by `h`, the scaled `M0`, and both ways of taking its norm.
#[derive(Debug, Clone)]
pub struct NormalizedLax {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub m0: DenseMatrix,
    /// `δ̄²·Σ(u_{n_x}^n)² + ε̄²·Σ(u_0^n)²` over `n = 1..n_t`.
    pub boundary_norm_sq: f64,
    /// `‖h·M0‖²_F` from the assembled matrix.
    pub assembled_norm_sq: f64,
}

pub fn normalize_lax(
    system: &SylvesterSystem,
    left: &[f64],
    right: &[f64],
) -> Result<NormalizedLax> {
    let k = &system.coefficients;
    if k.scheme_id != SchemeId::Lax {
        return Err(Error::Precondition(format!(
            "normalization applies to the Lax scheme, got {}",
            k.scheme_id
        )));
    }
    let nt = system.steps();
    if left.len() != nt + 1 || right.len() != nt + 1 {
        return Err(Error::DimensionMismatch(format!(
            "boundary sequences need {} values",
            nt + 1
        )));
    }
    let h = system.grid.h();
    let (delta, epsilon) = (h * k.delta, h * k.epsilon);
    let m0 = system.m0.scale(h);
    let sum_sq = |v: &[f64]| v[1..].iter().map(|x| x * x).sum::<f64>();
    Ok(NormalizedLax {
        alpha: h * k.alpha,
        beta: h * k.beta,
        delta,
        epsilon,
        boundary_norm_sq: delta * delta * sum_sq(right) + epsilon * epsilon * sum_sq(left),
        assembled_norm_sq: frobenius_norm(&m0).powi(2),
        m0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_system, exact_matrix};
    use crate::scheme::{BoundaryData, SignalSpec};

    fn lax(ni: usize, nt: usize, sigma: f64, h_len: f64) -> (SylvesterSystem, BoundaryData) {
        let grid = Grid::from_cfl(h_len, ni + 1, nt, 1.0, sigma).unwrap();
        let k = SchemeCoefficients::build(SchemeId::Lax, &grid).unwrap();
        let b = BoundaryData::sample_exact(&SignalSpec::new(0.7).unwrap(), &grid);
        (assemble_system(&k, &grid, &b).unwrap(), b)
    }

    #[test]
    fn gram_block_examples() {
        let k = SchemeCoefficients::custom([1.0, 0.0, 0.0, 2.0, -3.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let (g1, g2) = gram_blocks_paper(&k);
        assert_eq!(g1, DenseMatrix::from_diag(&[4.0, 9.0]));
        assert_eq!(g2, DenseMatrix::from_diag(&[0.0, 1.0]));

        let (s, _) = lax(2, 2, 1.0, 1.0);
        assert_eq!(s.coefficients.delta, 0.0);
        let (g1, _) = gram_blocks_paper(&s.coefficients);
        let e2 = s.coefficients.epsilon.powi(2);
        assert_eq!(g1, DenseMatrix::from_rows(&[[0.0, 0.0], [0.0, e2]]));
    }

    #[test]
    fn gram_blocks_exact_at_size_two() {
        let k =
            SchemeCoefficients::custom([1.5, 0.7, -0.4, 1.1, -2.3, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let grid = Grid::new(0.1, 0.1, 1.0, 3, 2).unwrap();
        let b = BoundaryData::sample_exact(&SignalSpec::new(1.0).unwrap(), &grid);
        let s = assemble_system(&k, &grid, &b).unwrap();
        let (g1, g2) = gram_blocks_paper(&k);
        let t1 = s.m1.matmul(&s.m1.transpose());
        let t2 = s.m2.matmul(&s.m2.transpose());
        assert!(frobenius_norm(&t1.sub(&g1)) < 1e-15);
        assert!(frobenius_norm(&t2.sub(&g2)) < 1e-15);
    }

    #[test]
    fn closed_form_spectra() {
        let grid = Grid::new(0.1, 0.1, 1.0, 3, 2).unwrap();
        let k = SchemeCoefficients::custom([1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let p = singular_values_paper(&k, &grid).unwrap();
        assert_eq!(p.m1_pair, [1.0, 1.0]);
        assert!((p.exact_m1[0] - 1.0).abs() < 1e-15 && (p.exact_m1[1] - 1.0).abs() < 1e-15);

        let k = SchemeCoefficients::custom([1.0, -1.7, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let g = Grid::new(0.1, 0.1, 1.0, 7, 4).unwrap();
        let p = singular_values_paper(&k, &g).unwrap();
        assert_eq!(p.m1_pair, [1.7 * 1.7, 1.7 * 1.7]);
        assert!(p.m1_deviation() < 1e-12);
        // a shift of length 4 has three unit singular values, not two
        assert_eq!(p.m2_deviation(), 1.0);
    }

    #[test]
    fn coupled_bands_break_the_block_claim() {
        let grid = Grid::from_cfl(1.0, 7, 4, 1.0, 0.5).unwrap();
        let k = SchemeCoefficients::build(SchemeId::Lax, &grid).unwrap();
        let p = singular_values_paper(&k, &grid).unwrap();
        assert!(p.m1_deviation() > 1e-6);
    }

    #[test]
    fn cell_examples() {
        assert_eq!(min_norm_cell(1.0, 1.0, 2.0), Some((1.0, 1.0)));
        assert_eq!(min_norm_cell(0.0, 0.0, 2.0), None);
        let z = min_norm_split(
            &DenseMatrix::from_diag(&[2.0, 1.0]),
            &DenseMatrix::from_diag(&[3.0, 0.5]),
            &DenseMatrix::zeros(2, 2),
        )
        .unwrap();
        assert_eq!(z.norm, 0.0);
    }

    #[test]
    fn split_respects_rank_deficiency() {
        let m1 = DenseMatrix::from_diag(&[2.0, 0.0, 1.0]);
        let m2 = DenseMatrix::from_rows(&[[0.0, 0.0], [3.0, 0.0]]);
        let f = DenseMatrix::from_fn(3, 2, |i, j| 1.0 + i as f64 + 0.5 * j as f64);
        let s = min_norm_split(&m1, &m2, &f).unwrap();
        assert_eq!((s.rank_m1, s.rank_m2), (2, 1));
        assert_eq!(s.f22.shape(), (1, 1));
        assert_eq!(s.e12.shape(), (2, 1));
        assert_eq!(s.ee21.shape(), (1, 1));
        for i in 0..2 {
            for j in 0..1 {
                let c = s.m1_tilde[i] * s.e11[(i, j)] + s.m2_tilde[j] * s.ee11[(i, j)];
                assert!((c - s.f11[(i, j)]).abs() < 1e-14);
            }
            assert!((s.m1_tilde[i] * s.e12[(i, 0)] - s.f12[(i, 0)]).abs() < 1e-14);
        }
        assert!((s.transformed_norm - frobenius_norm(&f)).abs() < 1e-12 * frobenius_norm(&f));
    }

    #[test]
    fn lax_bound_values() {
        let v = lax_bound(1.0, 5, 4, 1.0, 1.0).unwrap();
        assert!((v - (16.0 + 2.0 * 2.0f64.sqrt())).abs() < 1e-12);
        assert!((v - 18.828).abs() < 1e-3);
        // uL drops out at cfl = 1
        assert_eq!(
            lax_bound(1.0, 5, 4, 1.0, 0.0).unwrap(),
            lax_bound(1.0, 5, 4, 1.0, 7.0).unwrap()
        );
        assert!(lax_bound(0.0, 5, 4, 1.0, 1.0).is_err());
        assert!(lax_bound(-0.5, 5, 4, 1.0, 1.0).is_err());
    }

    #[test]
    fn lax_bound_decreasing() {
        let vals: Vec<f64> = (1..=100)
            .map(|k| lax_bound(k as f64 / 100.0, 65, 50, 1.0, 1.0).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn bound_on_exact_lax_shift() {
        let (s, _) = lax(8, 6, 1.0, 1.0);
        let exact = exact_matrix(&SignalSpec::new(0.7).unwrap(), &s.grid);
        let r = error_bound(&s, &exact).unwrap();
        assert!(r.holds());
        assert!(r.rhs > 0.0);
        assert!(r.lhs < r.rhs);
    }

    #[test]
    fn bound_of_empty_problem() {
        let grid = Grid::from_cfl(1.0, 5, 4, 1.0, 0.5).unwrap();
        let k = SchemeCoefficients::build(SchemeId::Lax, &grid).unwrap();
        let b = BoundaryData::new(&grid, vec![0.0; 5], vec![0.0; 5], vec![0.0; 6], None).unwrap();
        let s = assemble_system(&k, &grid, &b).unwrap();
        let zero = FieldMatrix::new(DenseMatrix::zeros(4, 4), crate::assembly::FieldRole::Exact);
        let r = error_bound(&s, &zero).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn normalization() {
        let (s, b) = lax(4, 4, 0.5, 5.0);
        assert_eq!(s.grid.h(), 1.0);
        let n = normalize_lax(&s, b.left(), b.right()).unwrap();
        assert_eq!(
            (n.alpha, n.delta, n.epsilon),
            (
                s.coefficients.alpha,
                s.coefficients.delta,
                s.coefficients.epsilon
            )
        );
        assert_eq!(n.m0, s.m0);

        let (s, b) = lax(6, 4, 1.0, 1.0);
        let n = normalize_lax(&s, b.left(), b.right()).unwrap();
        assert_eq!(n.delta, 0.0);
        assert!((n.boundary_norm_sq - n.assembled_norm_sq).abs() <= 1e-12 * n.assembled_norm_sq);

        let grid = Grid::from_cfl(1.0, 5, 4, 1.0, 0.5).unwrap();
        let k = SchemeCoefficients::build(SchemeId::LaxWendroff, &grid).unwrap();
        let bd = BoundaryData::sample_exact(&SignalSpec::new(1.0).unwrap(), &grid);
        let s = assemble_system(&k, &grid, &bd).unwrap();
        assert!(matches!(
            normalize_lax(&s, bd.left(), bd.right()),
            Err(Error::Precondition(_))
        ));
    }
}
