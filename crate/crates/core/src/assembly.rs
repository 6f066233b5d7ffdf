//! Assembly of `M1·U + U·M2 + L(U) = M0` from a stencil, plus the
//! time-marched reference field and the error and truncation matrices.
//!
//! Rows of `U` are interior space nodes `i = 1..n_x-1`, columns are time
//! levels `n = 1..n_t`. Row `(i, n)` of the system is the stencil centred
//! at node `(i, n)`. Terms that land on the boundary or on level 0 are moved
//! to `M0`; terms on level `n_t + 1` have no column and are dropped.

use crate::denselin::{frobenius_norm, solve_tridiagonal, DenseMatrix};
use crate::error::{Error, Result};
use crate::scheme::{exact_field, BoundaryData, Grid, SchemeCoefficients, SignalSpec};

/// What a [`FieldMatrix`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldRole {
    Numeric,
    Exact,
    Error,
    Residual,
}

/// Interior field values, `(n_x - 1) × n_t`, entry `(i-1, n-1) = u_i^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMatrix {
    pub values: DenseMatrix,
    pub role: FieldRole,
}

impl FieldMatrix {
    pub fn new(values: DenseMatrix, role: FieldRole) -> Self {
        Self { values, role }
    }

    pub fn norm(&self) -> f64 {
        frobenius_norm(&self.values)
    }

    /// Column for time level `n` (1-based).
    pub fn level(&self, n: usize) -> Vec<f64> {
        self.values.column(n - 1)
    }
}

/// The four weights of the cross operator `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossWeights {
    pub zeta: f64,
    pub eta: f64,
    pub theta: f64,
    pub vartheta: f64,
}

impl CrossWeights {
    pub fn is_zero(&self) -> bool {
        self.zeta == 0.0 && self.eta == 0.0 && self.theta == 0.0 && self.vartheta == 0.0
    }
}

/// Assembled matrix equation for one scheme, grid and boundary data set.
#[derive(Debug, Clone)]
pub struct SylvesterSystem {
    pub m1: DenseMatrix,
    pub m2: DenseMatrix,
    pub m0: DenseMatrix,
    pub cross: CrossWeights,
    pub grid: Grid,
    pub coefficients: SchemeCoefficients,
}

/// Builds `M1`, `M2`, `M0` and the cross weights.
pub fn assemble_system(
    coefficients: &SchemeCoefficients,
    grid: &Grid,
    boundary: &BoundaryData,
) -> Result<SylvesterSystem> {
    grid.require_even()?;
    boundary.check_grid(grid)?;
    if coefficients.is_three_level() && boundary.startup().is_none() {
        return Err(Error::MissingStartup);
    }
    let k = coefficients;
    let (ni, nt) = (grid.interior(), grid.n_t());

    let m1 = DenseMatrix::from_fn(ni, ni, |r, c| {
        if r == c {
            k.beta
        } else if c == r + 1 {
            k.delta
        } else if r == c + 1 {
            k.epsilon
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

    let n_x = grid.n_x();
    let mut m0 = DenseMatrix::zeros(ni, nt);
    for i in 1..=ni {
        for n in 1..=nt {
            let mut acc = 0.0;
            for (w, di, dn) in k.stencil() {
                if w == 0.0 {
                    continue;
                }
                let (ii, nn) = ((i as isize + di) as usize, (n as isize + dn) as usize);
                if nn == nt + 1 {
                    continue;
                }
                if let Some(v) = boundary.known(ii, nn, n_x) {
                    acc -= w * v;
                }
            }
            m0[(i - 1, n - 1)] = acc;
        }
    }

    Ok(SylvesterSystem {
        m1,
        m2,
        m0,
        cross: CrossWeights {
            zeta: k.zeta,
            eta: k.eta,
            theta: k.theta,
            vartheta: k.vartheta,
        },
        grid: *grid,
        coefficients: *coefficients,
    })
}

impl SylvesterSystem {
    pub fn interior(&self) -> usize {
        self.m1.rows()
    }

    pub fn steps(&self) -> usize {
        self.m2.rows()
    }

    fn check_shape(&self, u: &DenseMatrix) {
        assert_eq!(
            u.shape(),
            (self.interior(), self.steps()),
            "field shape does not match the system"
        );
    }

    /// `L(u)` on a raw matrix.
    pub fn cross_term(&self, u: &DenseMatrix) -> DenseMatrix {
        self.check_shape(u);
        let (ni, nt) = u.shape();
        let w = self.cross;
        let at = |i: isize, n: isize| -> f64 {
            if i < 0 || n < 0 || i >= ni as isize || n >= nt as isize {
                0.0
            } else {
                u[(i as usize, n as usize)]
            }
        };
        DenseMatrix::from_fn(ni, nt, |r, c| {
            let (i, n) = (r as isize, c as isize);
            w.zeta * at(i + 1, n + 1)
                + w.eta * at(i - 1, n - 1)
                + w.theta * at(i - 1, n + 1)
                + w.vartheta * at(i + 1, n - 1)
        })
    }

    /// `M1·u + u·M2 + L(u)`.
    pub fn apply(&self, u: &DenseMatrix) -> DenseMatrix {
        self.check_shape(u);
        let mut out = self.m1.matmul(u).add(&u.matmul(&self.m2));
        if !self.cross.is_zero() {
            out = out.add(&self.cross_term(u));
        }
        out
    }

    /// Scale used for relative tolerances on residuals of `u`.
    pub fn scale(&self, u: &DenseMatrix) -> f64 {
        frobenius_norm(&self.m0)
            + frobenius_norm(u) * (frobenius_norm(&self.m1) + frobenius_norm(&self.m2))
    }
}

/// `L(u)` with out-of-range neighbours dropped.
pub fn apply_cross_operator(system: &SylvesterSystem, u: &FieldMatrix) -> FieldMatrix {
    FieldMatrix::new(system.cross_term(&u.values), u.role)
}

/// `M1·u + u·M2 + L(u) - M0`.
pub fn residual(system: &SylvesterSystem, u: &FieldMatrix) -> FieldMatrix {
    FieldMatrix::new(system.apply(&u.values).sub(&system.m0), FieldRole::Residual)
}

/// Marches the stencil forward and returns the full `(n_x + 1) × (n_t + 1)`
/// field, boundary and initial lines included (row `i`, column `n`).
///
/// Two-level schemes start from `u^0`; three-level schemes need the
/// startup line `u^1`. Levels with `ζ` or `θ` present are solved as a
/// tridiagonal system.
pub fn march(
    coefficients: &SchemeCoefficients,
    grid: &Grid,
    boundary: &BoundaryData,
) -> Result<DenseMatrix> {
    boundary.check_grid(grid)?;
    let k = coefficients;
    if k.alpha == 0.0 {
        return Err(Error::UnsupportedExplicitAdvance);
    }
    let (nx, nt) = (grid.n_x(), grid.n_t());
    let mut u = DenseMatrix::zeros(nx + 1, nt + 1);
    for n in 0..=nt {
        u[(0, n)] = boundary.left()[n];
        u[(nx, n)] = boundary.right()[n];
    }
    for i in 0..=nx {
        u[(i, 0)] = boundary.initial()[i];
    }
    let first = if k.is_three_level() {
        let startup = boundary.startup().ok_or(Error::MissingStartup)?;
        for i in 1..nx {
            u[(i, 1)] = startup[i];
        }
        1
    } else {
        0
    };

    let implicit = k.zeta != 0.0 || k.theta != 0.0;
    let ni = nx - 1;
    let mut rhs = vec![0.0; ni];
    for n in first..nt {
        for i in 1..nx {
            let mut s = k.beta * u[(i, n)] + k.delta * u[(i + 1, n)] + k.epsilon * u[(i - 1, n)];
            if n >= 1 {
                s += k.gamma * u[(i, n - 1)]
                    + k.eta * u[(i - 1, n - 1)]
                    + k.vartheta * u[(i + 1, n - 1)];
            }
            rhs[i - 1] = -s;
        }
        if implicit {
            rhs[0] -= k.theta * u[(0, n + 1)];
            rhs[ni - 1] -= k.zeta * u[(nx, n + 1)];
            let next = solve_tridiagonal(
                &vec![k.theta; ni],
                &vec![k.alpha; ni],
                &vec![k.zeta; ni],
                &rhs,
            )?;
            for (i, v) in next.into_iter().enumerate() {
                u[(i + 1, n + 1)] = v;
            }
        } else {
            for i in 1..nx {
                u[(i, n + 1)] = rhs[i - 1] / k.alpha;
            }
        }
    }
    Ok(u)
}

/// Interior block of a full `(n_x + 1) × (n_t + 1)` field.
pub fn interior_of(full: &DenseMatrix) -> DenseMatrix {
    full.submatrix(1, 1, full.rows() - 2, full.cols() - 1)
}

/// Time-marched solution of the stencil restricted to the interior box.
pub fn reference_timestep(
    coefficients: &SchemeCoefficients,
    grid: &Grid,
    boundary: &BoundaryData,
) -> Result<FieldMatrix> {
    let full = march(coefficients, grid, boundary)?;
    Ok(FieldMatrix::new(interior_of(&full), FieldRole::Numeric))
}

/// Samples the exact signal over the interior box.
pub fn exact_matrix(signal: &SignalSpec, grid: &Grid) -> FieldMatrix {
    let values = DenseMatrix::from_fn(grid.interior(), grid.n_t(), |r, c| {
        exact_field(signal, grid, grid.x(r + 1), grid.t(c + 1))
    });
    FieldMatrix::new(values, FieldRole::Exact)
}

/// Error matrix, truncation residual and the identity check tying them.
#[derive(Debug, Clone)]
pub struct ErrorTruncation {
    /// `E = U - U_exact`.
    pub error: FieldMatrix,
    /// `F = M1·U_exact + U_exact·M2 + L(U_exact) - M0`.
    pub truncation: FieldMatrix,
    /// `M1·E + E·M2 + L(E) + F`, which vanishes when `U` solves the system.
    pub identity_residual: DenseMatrix,
}

pub fn error_and_truncation(
    system: &SylvesterSystem,
    u: &FieldMatrix,
    u_exact: &FieldMatrix,
) -> ErrorTruncation {
    let e = u.values.sub(&u_exact.values);
    let f = system.apply(&u_exact.values).sub(&system.m0);
    let identity_residual = system.apply(&e).add(&f);
    ErrorTruncation {
        error: FieldMatrix::new(e, FieldRole::Error),
        truncation: FieldMatrix::new(f, FieldRole::Residual),
        identity_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::SchemeId;

    fn setup(
        id: SchemeId,
        ni: usize,
        nt: usize,
        sigma: f64,
    ) -> (SchemeCoefficients, Grid, BoundaryData) {
        let n_x = ni + 1;
        let grid = Grid::from_cfl(1.0, n_x, nt, 1.0, sigma).unwrap();
        let k = SchemeCoefficients::build(id, &grid).unwrap();
        let b = BoundaryData::sample_exact(&SignalSpec::new(0.8).unwrap(), &grid);
        (k, grid, b)
    }

    #[test]
    fn lax_two_by_two_layout() {
        let (k, grid, b) = setup(SchemeId::Lax, 2, 2, 0.5);
        let s = assemble_system(&k, &grid, &b).unwrap();
        assert_eq!(
            s.m1,
            DenseMatrix::from_rows(&[[0.0, k.delta], [k.epsilon, 0.0]])
        );
        assert_eq!(s.m2, DenseMatrix::from_rows(&[[0.0, 0.0], [k.alpha, 0.0]]));
        for n in 1..=2 {
            assert_eq!(s.m0[(0, n - 1)], -(k.epsilon * b.left()[n]));
            assert_eq!(s.m0[(1, n - 1)], -(k.delta * b.right()[n]));
        }
    }

    #[test]
    fn leapfrog_m0_carries_initial_line() {
        let (k, grid, b) = setup(SchemeId::Leapfrog, 6, 4, 0.5);
        let s = assemble_system(&k, &grid, &b).unwrap();
        // interior rows away from the boundary see only the γ term
        for i in 2..=5 {
            assert_eq!(s.m0[(i - 1, 0)], -(k.gamma * b.initial()[i]));
        }
        // bordure only
        for r in 1..5 {
            for c in 1..3 {
                assert_eq!(s.m0[(r, c)], 0.0);
            }
        }
    }

    #[test]
    fn assembly_errors() {
        let (k, _, _) = setup(SchemeId::Lax, 4, 4, 0.5);
        let odd = Grid::from_cfl(1.0, 6, 4, 1.0, 0.5).unwrap();
        let b = BoundaryData::sample_exact(&SignalSpec::new(1.0).unwrap(), &odd);
        assert!(matches!(
            assemble_system(&k, &odd, &b),
            Err(Error::OddDimension { .. })
        ));

        let (k, grid, b) = setup(SchemeId::Leapfrog, 4, 4, 0.5);
        let b = b.with_startup(None);
        assert_eq!(
            assemble_system(&k, &grid, &b).unwrap_err(),
            Error::MissingStartup
        );
        assert_eq!(
            reference_timestep(&k, &grid, &b).unwrap_err(),
            Error::MissingStartup
        );
    }

    #[test]
    fn cross_operator_shift_count() {
        let k = SchemeCoefficients::custom([1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        let grid = Grid::new(0.2, 0.1, 1.0, 5, 4).unwrap();
        let b = BoundaryData::sample_exact(&SignalSpec::new(1.0).unwrap(), &grid);
        let s = assemble_system(&k, &grid, &b).unwrap();
        let ones = FieldMatrix::new(DenseMatrix::from_fn(4, 4, |_, _| 1.0), FieldRole::Numeric);
        let l = apply_cross_operator(&s, &ones);
        for i in 0..4 {
            for n in 0..4 {
                let want = if i < 3 && n < 3 { 1.0 } else { 0.0 };
                assert_eq!(l.values[(i, n)], want);
            }
        }
        let lax = setup(SchemeId::Lax, 4, 4, 0.5);
        let s = assemble_system(&lax.0, &lax.1, &lax.2).unwrap();
        assert!(apply_cross_operator(&s, &ones).values.is_zero());
    }

    #[test]
    fn lax_at_unit_cfl_is_a_shift() {
        let (k, grid, b) = setup(SchemeId::Lax, 8, 6, 1.0);
        let u = reference_timestep(&k, &grid, &b).unwrap();
        let exact = exact_matrix(&SignalSpec::new(0.8).unwrap(), &grid);
        let diff = u.values.sub(&exact.values).max_abs();
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn lax_wendroff_without_advection_is_frozen() {
        let grid = Grid::new(0.1, 0.05, 0.0, 9, 6).unwrap();
        let k = SchemeCoefficients::build(SchemeId::LaxWendroff, &grid).unwrap();
        let b = BoundaryData::sample_exact(&SignalSpec::new(0.5).unwrap(), &grid);
        let u = reference_timestep(&k, &grid, &b).unwrap();
        for i in 0..8 {
            for n in 0..6 {
                assert!((u.values[(i, n)] - b.initial()[i + 1]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn exact_matrix_spot_checks() {
        let grid = Grid::new(0.1, 0.25, 1.0, 9, 8).unwrap();
        let sig = SignalSpec::new(0.5).unwrap();
        let e = exact_matrix(&sig, &grid);
        for &(i, n) in &[(1, 1), (4, 3), (8, 8)] {
            assert_eq!(
                e.values[(i - 1, n - 1)],
                exact_field(&sig, &grid, i as f64 * 0.1, n as f64 * 0.25)
            );
        }
        // c·t_2 = 0.5 = λ: level 2 repeats the initial interior row
        for i in 1..=8 {
            let init = exact_field(&sig, &grid, grid.x(i), 0.0);
            assert!((e.values[(i - 1, 1)] - init).abs() < 1e-12);
        }
    }

    #[test]
    fn residual_of_zero_field_without_data() {
        let (k, grid, _) = setup(SchemeId::Lax, 4, 4, 0.5);
        let zero =
            BoundaryData::new(&grid, vec![0.0; 5], vec![0.0; 5], vec![0.0; 6], None).unwrap();
        let s = assemble_system(&k, &grid, &zero).unwrap();
        assert!(s.m0.is_zero());
        let u = FieldMatrix::new(DenseMatrix::zeros(4, 4), FieldRole::Numeric);
        assert!(residual(&s, &u).values.is_zero());
    }

    #[test]
    fn error_identity_for_exact_input() {
        let (k, grid, b) = setup(SchemeId::LaxWendroff, 4, 4, 0.5);
        let s = assemble_system(&k, &grid, &b).unwrap();
        let exact = exact_matrix(&SignalSpec::new(0.8).unwrap(), &grid);
        let et = error_and_truncation(&s, &exact, &exact);
        assert!(et.error.values.is_zero());
        assert_eq!(et.identity_residual, et.truncation.values);
    }
}
