use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stencilmat::analysis::{error_bound, lax_bound, normalize_lax, singular_values_paper};
use stencilmat::assembly::{assemble_system, exact_matrix, march, reference_timestep, residual};
use stencilmat::denselin::{real_schur, SchurOptions};
use stencilmat::sylvester::{
    invertibility_check_m1, kronecker_solve, nilpotency_order, solve_bartels_stewart,
    solve_system_dense, spectra_gap, uniqueness_check, Verdict,
};
use stencilmat::{
    frobenius_norm, BoundaryData, DenseMatrix, Grid, SchemeId, SignalSpec, SylvesterSystem,
};

use crate::args::{Cli, CommandKind};
use crate::config::RunConfig;
use crate::output::{num, sidecar, write_csv};
use crate::{CliError, Outcome};

const SOLVE_TOL: f64 = 1e-8;
const ORACLE_TOL: f64 = 1e-9;
/// Oracle instances need `gap > ORACLE_GAP · (max|a| + max|b|)`.
const ORACLE_GAP: f64 = 1e-6;

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let (kind, args) = cli.command.split();
    let cfg = RunConfig::from_args(kind, args)?;
    match kind {
        CommandKind::Solve => run_solve(&cfg),
        CommandKind::Analyze => run_analyze(&cfg),
        CommandKind::Sweep => run_sweep(&cfg),
        CommandKind::Bound => run_bound(&cfg),
        CommandKind::Oracle => run_oracle(&cfg),
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves `M1·U + U·M2 + L(U) = rhs`: Bartels-Stewart when `L` vanishes,
/// dense elimination on the vectorized operator otherwise.
pub fn solve_matrix_equation(
    system: &SylvesterSystem,
    rhs: &DenseMatrix,
) -> Result<DenseMatrix, CliError> {
    if system.cross.is_zero() {
        Ok(solve_bartels_stewart(&system.m1, &system.m2, rhs)?.x)
    } else {
        Ok(solve_system_dense(system, rhs)?)
    }
}

struct Problem {
    grid: Grid,
    signal: SignalSpec,
    system: SylvesterSystem,
}

fn problem(cfg: &RunConfig) -> Result<Problem, CliError> {
    let grid = cfg.single_grid()?;
    let k = cfg.coefficients(&grid)?;
    let signal = SignalSpec::new(cfg.wavelength)?;
    let boundary = BoundaryData::sample_exact(&signal, &grid);
    let system = assemble_system(&k, &grid, &boundary)?;
    Ok(Problem {
        grid,
        signal,
        system,
    })
}

pub fn run_solve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let Problem {
        grid,
        signal,
        system,
    } = problem(cfg)?;
    let k = system.coefficients;
    let (ni, nt) = (system.interior(), system.steps());

    let uq = uniqueness_check(&system)?;
    if uq.paper_verdict == Verdict::NonUnique || uq.exact_verdict == Verdict::NonUnique {
        return Err(CliError::Degenerate(format!(
            "no unique solution: paper verdict {} (gap {}), exact verdict {} (gap {}, tolerance {})",
            uq.paper_verdict.label(),
            num(uq.paper_gap),
            uq.exact_verdict.label(),
            num(uq.exact_gap),
            num(uq.exact_tolerance)
        )));
    }

    let u = solve_matrix_equation(&system, &system.m0)?;
    let marched = reference_timestep(&k, &grid, &BoundaryData::sample_exact(&signal, &grid))?;
    let res_syl = residual(
        &system,
        &stencilmat::FieldMatrix::new(u.clone(), stencilmat::FieldRole::Numeric),
    );
    let res_marched = residual(&system, &marched);
    let marched_head = frobenius_norm(&res_marched.values.submatrix(0, 0, ni, nt - 1));

    // the last row of the matrix equation has no room for level n_t + 1; fold
    // the marched values of that level into the right side and solve again
    let longer = grid.with_steps(nt + 1)?;
    let ext = march(&k, &longer, &BoundaryData::sample_exact(&signal, &longer))?;
    let mut rhs = system.m0.clone();
    for i in 1..=ni {
        rhs[(i - 1, nt - 1)] -= k.alpha * ext[(i, nt + 1)]
            + k.zeta * ext[(i + 1, nt + 1)]
            + k.theta * ext[(i - 1, nt + 1)];
    }
    let corrected = solve_matrix_equation(&system, &rhs)?;
    let marched_norm = marched.norm();
    let dual = if marched_norm == 0.0 {
        frobenius_norm(&corrected)
    } else {
        frobenius_norm(&corrected.sub(&marched.values)) / marched_norm
    };
    let tol = cfg.tol.unwrap_or(SOLVE_TOL);

    let mut rows = Vec::with_capacity(ni * nt);
    for n in 1..=nt {
        for i in 1..=ni {
            let (a, b) = (u[(i - 1, n - 1)], marched.values[(i - 1, n - 1)]);
            rows.push(vec![
                i.to_string(),
                n.to_string(),
                num(grid.x(i)),
                num(grid.t(n)),
                num(a),
                num(b),
                num(a - b),
            ]);
        }
    }
    write_csv(
        &cfg.out,
        &["i", "n", "x", "t", "sylvester", "marched", "difference"],
        &rows,
    )?;

    let summary = [
        ("scheme", k.scheme_id.to_string()),
        ("n_x", grid.n_x().to_string()),
        ("n_t", nt.to_string()),
        ("h", num(grid.h())),
        ("tau", num(grid.tau())),
        ("sigma", num(grid.sigma())),
        ("residual_norm_sylvester", num(res_syl.norm())),
        ("residual_norm_marched", num(res_marched.norm())),
        ("residual_norm_marched_head", num(marched_head)),
        (
            "difference_norm",
            num(frobenius_norm(&u.sub(&marched.values))),
        ),
        ("dual_method_relative_difference", num(dual)),
        ("dual_method_tolerance", num(tol)),
        ("paper_spectra_gap", num(uq.paper_gap)),
        ("exact_spectra_gap", num(uq.exact_gap)),
    ];
    let side = sidecar(&cfg.out, "summary");
    let srows: Vec<Vec<String>> = summary
        .iter()
        .map(|(a, b)| vec![a.to_string(), b.clone()])
        .collect();
    write_csv(&side, &["quantity", "value"], &srows)?;

    let mut report = String::new();
    for (key, value) in &summary {
        let _ = writeln!(report, "{key:<34} {value}");
    }
    let verdict = if dual <= tol {
        "agree".to_string()
    } else {
        format!(
            "differ beyond {} (the operator may be ill-conditioned)",
            num(tol)
        )
    };
    let _ = writeln!(report, "matrix solve and time marching {verdict}");
    Ok(Outcome {
        report,
        files: vec![cfg.out.clone(), side],
    })
}

/// Rows of `(section, quantity, value)` and the matching text report.
#[derive(Default)]
struct Table {
    rows: Vec<Vec<String>>,
    text: String,
    current: String,
}

impl Table {
    fn section(&mut self, name: &str) {
        let _ = writeln!(self.text, "\n[{name}]");
        self.current = name.to_string();
    }

    fn put(&mut self, quantity: &str, value: String) {
        let _ = writeln!(self.text, "  {quantity:<32} {value}");
        self.rows
            .push(vec![self.current.clone(), quantity.to_string(), value]);
    }

    fn num(&mut self, quantity: &str, value: f64) {
        self.put(quantity, num(value));
    }

    fn flag(&mut self, quantity: &str, value: bool) {
        self.put(quantity, value.to_string());
    }
}

pub fn run_analyze(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let Problem {
        grid,
        signal,
        system,
    } = problem(cfg)?;
    let k = system.coefficients;
    let mut t = Table::default();

    t.section("configuration");
    t.put("scheme", k.scheme_id.to_string());
    t.put("n_x", grid.n_x().to_string());
    t.put("n_t", grid.n_t().to_string());
    t.num("h", grid.h());
    t.num("tau", grid.tau());
    t.num("c", grid.c());
    t.num("sigma", grid.sigma());
    for (name, w) in [
        "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "vartheta",
    ]
    .iter()
    .zip(k.weights())
    {
        t.num(name, w);
    }

    let uq = uniqueness_check(&system)?;
    t.section("uniqueness");
    for (i, z) in uq.paper_roots_m1.iter().enumerate() {
        t.num(&format!("paper_root_m1_{i}_re"), z.re);
        t.num(&format!("paper_root_m1_{i}_im"), z.im);
    }
    for (i, z) in uq.paper_roots_m2.iter().enumerate() {
        t.num(&format!("paper_root_m2_{i}_re"), z.re);
        t.num(&format!("paper_root_m2_{i}_im"), z.im);
    }
    t.num("paper_gap", uq.paper_gap);
    t.put(
        "paper_verdict",
        format!("{} (paper)", uq.paper_verdict.label()),
    );
    t.num("exact_gap", uq.exact_gap);
    t.num("exact_tolerance", uq.exact_tolerance);
    t.put(
        "exact_verdict",
        format!("{} (exact)", uq.exact_verdict.label()),
    );

    let inv = invertibility_check_m1(&system);
    t.section("invertibility");
    t.num("paper_determinant", inv.paper_determinant);
    t.put(
        "paper_verdict",
        if inv.paper_invertible {
            "invertible (paper formula)"
        } else {
            "singular (paper formula)"
        }
        .into(),
    );
    t.num("exact_determinant", inv.exact_determinant);
    t.put(
        "exact_verdict",
        if inv.exact_invertible {
            "invertible (exact)"
        } else {
            "singular (exact)"
        }
        .into(),
    );
    t.flag("determinants_agree", inv.agree());
    if let Some(c) = inv.lax_wendroff_condition {
        t.put(
            "lax_wendroff_condition",
            if c {
                "invertible (paper formula)"
            } else {
                "singular (paper formula)"
            }
            .into(),
        );
    }

    let nil = nilpotency_order(&system);
    t.section("nilpotency");
    t.put(
        "order",
        nil.order.map_or("none".to_string(), |o| o.to_string()),
    );
    t.flag("degenerate", nil.degenerate);
    t.flag("shift_decomposition_holds", nil.decomposition_holds);

    let sp = singular_values_paper(&k, &grid)?;
    t.section("spectra");
    t.num("m1_paper_value_0", sp.m1_pair[0]);
    t.num("m1_paper_value_1", sp.m1_pair[1]);
    t.put("m1_paper_multiplicity", sp.m1_multiplicity.to_string());
    for (i, s) in sp.exact_m1.iter().enumerate() {
        t.num(&format!("m1_singular_value_{i}"), *s);
        t.num(&format!("m1_singular_value_sq_{i}"), s * s);
    }
    t.num("m1_max_deviation", sp.m1_deviation());
    t.num("m2_paper_value_0", sp.m2_pair[0]);
    t.num("m2_paper_value_1", sp.m2_pair[1]);
    t.put("m2_paper_multiplicity", sp.m2_multiplicity.to_string());
    for (i, s) in sp.exact_m2.iter().enumerate() {
        t.num(&format!("m2_singular_value_{i}"), *s);
        t.num(&format!("m2_singular_value_sq_{i}"), s * s);
    }
    t.num("m2_max_deviation", sp.m2_deviation());

    let b = error_bound(&system, &exact_matrix(&signal, &grid))?;
    t.section("bound");
    if !system.cross.is_zero() {
        t.put("note", "cross operator left out of the bound".into());
    }
    t.num("lhs_f11_norm", b.lhs);
    t.num("f_norm", b.f_norm);
    t.num("u1_norm_sq", b.u1_norm_sq);
    t.num("v2_norm_sq", b.v2_norm_sq);
    t.num("m1_norm_sq_paper", b.m1_norm_sq_paper);
    t.num("m1_norm_sq_exact", b.m1_norm_sq_exact);
    t.num("m2_norm_sq_paper", b.m2_norm_sq_paper);
    t.num("m2_norm_sq_exact", b.m2_norm_sq_exact);
    t.num("m0_norm", b.m0_norm);
    t.num("u_exact_norm", b.u_exact_norm);
    t.num("rhs", b.rhs);
    t.flag("holds", b.holds());

    if k.scheme_id == SchemeId::Lax {
        let bd = BoundaryData::sample_exact(&signal, &grid);
        let n = normalize_lax(&system, bd.left(), bd.right())?;
        t.section("normalization");
        t.num("alpha_bar", n.alpha);
        t.num("beta_bar", n.beta);
        t.num("delta_bar", n.delta);
        t.num("epsilon_bar", n.epsilon);
        t.num("m0_bar_norm_sq_formula", n.boundary_norm_sq);
        t.num("m0_bar_norm_sq_assembled", n.assembled_norm_sq);
    }

    write_csv(&cfg.out, &["section", "quantity", "value"], &t.rows)?;
    Ok(Outcome {
        report: t.text.trim_start().to_string(),
        files: vec![cfg.out.clone()],
    })
}

/// Per-level L2 errors of one time-marched run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub cfl: f64,
    pub grid: Grid,
    /// Entry `n - 1` is `√h · ‖u^n - u_exact^n‖` over interior nodes, `n = 1..=n_t`.
    pub errors: Vec<f64>,
}

pub fn sweep_errors(cfg: &RunConfig) -> Result<Vec<SweepCurve>, CliError> {
    let grids = cfg.grids()?;
    let signal = SignalSpec::new(cfg.wavelength)?;
    let coefficients = grids
        .iter()
        .map(|(_, g)| cfg.coefficients(g))
        .collect::<Result<Vec<_>, _>>()?;

    // points are independent; results are collected back in input order
    let results: Vec<Result<SweepCurve, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = grids
            .iter()
            .zip(&coefficients)
            .map(|((cfl, grid), k)| {
                let signal = &signal;
                scope.spawn(move || -> Result<SweepCurve, CliError> {
                    let u = march(k, grid, &BoundaryData::sample_exact(signal, grid))?;
                    let sqrt_h = grid.h().sqrt();
                    let errors = (1..=grid.n_t())
                        .map(|n| {
                            let e: Vec<f64> = (1..grid.n_x())
                                .map(|i| {
                                    u[(i, n)]
                                        - stencilmat::scheme::exact_field(
                                            signal,
                                            grid,
                                            grid.x(i),
                                            grid.t(n),
                                        )
                                })
                                .collect();
                            sqrt_h * norm(&e)
                        })
                        .collect();
                    Ok(SweepCurve {
                        cfl: *cfl,
                        grid: *grid,
                        errors,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    results.into_iter().collect()
}

pub fn run_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let curves = sweep_errors(cfg)?;
    let mut rows = Vec::new();
    let mut report = String::new();
    for c in &curves {
        for (n, e) in c.errors.iter().enumerate() {
            rows.push(vec![
                num(c.cfl),
                (n + 1).to_string(),
                num(c.grid.t(n + 1)),
                num(*e),
            ]);
        }
        let max = c.errors.iter().cloned().fold(0.0, f64::max);
        let last = c.errors.last().copied().unwrap_or(0.0);
        let _ = writeln!(
            report,
            "cfl {}  max l2 error {}  final l2 error {}",
            num(c.cfl),
            num(max),
            num(last)
        );
    }
    write_csv(&cfg.out, &["cfl", "n", "t", "l2_error"], &rows)?;
    let _ = writeln!(
        report,
        "{} points in {:.3} s",
        rows.len(),
        start.elapsed().as_secs_f64()
    );
    Ok(Outcome {
        report,
        files: vec![cfg.out.clone()],
    })
}

pub fn run_bound(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cfl = cfg.cfl_values()?;
    let values = cfl
        .iter()
        .map(|&s| Ok((s, lax_bound(s, cfg.n_x, cfg.n_t, 1.0, 1.0)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let rows: Vec<Vec<String>> = values.iter().map(|(s, v)| vec![num(*s), num(*v)]).collect();
    write_csv(&cfg.out, &["cfl", "bound"], &rows)?;
    let (best, value) = values
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("cfl list is nonempty");
    let report = format!("minimum bound {} at cfl {}\n", num(value), num(best));
    Ok(Outcome {
        report,
        files: vec![cfg.out.clone()],
    })
}

/// One seeded oracle instance.
#[derive(Debug, Clone)]
pub struct OracleCase {
    pub m: usize,
    pub n: usize,
    pub gap: f64,
    pub relative_error: f64,
    pub residual_norm: f64,
}

pub fn oracle_cases(seed: u64, cases: usize, max_size: usize) -> Result<Vec<OracleCase>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = SchurOptions::default();
    let mut out = Vec::with_capacity(cases);
    while out.len() < cases {
        let m = rng.gen_range(1..=max_size);
        let n = rng.gen_range(1..=max_size);
        let mut rand = |r, c| DenseMatrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0));
        let (a, b, c) = (rand(m, m), rand(n, n), rand(m, n));
        let gap = spectra_gap(
            &real_schur(&a, opts)?.eigenvalues,
            &real_schur(&b, opts)?.eigenvalues,
        );
        if gap <= ORACLE_GAP * (a.max_abs() + b.max_abs()) {
            continue;
        }
        let fast = solve_bartels_stewart(&a, &b, &c)?;
        let slow = kronecker_solve(&a, &b, &c)?;
        out.push(OracleCase {
            m,
            n,
            gap,
            relative_error: frobenius_norm(&fast.x.sub(&slow)) / frobenius_norm(&slow),
            residual_norm: fast.residual_norm,
        });
    }
    Ok(out)
}

pub fn run_oracle(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tol = cfg.tol.unwrap_or(ORACLE_TOL);
    let cases = oracle_cases(cfg.seed, cfg.cases, cfg.max_size)?;
    let rows: Vec<Vec<String>> = cases
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                i.to_string(),
                c.m.to_string(),
                c.n.to_string(),
                num(c.gap),
                num(c.relative_error),
                num(c.residual_norm),
            ]
        })
        .collect();
    write_csv(
        &cfg.out,
        &[
            "case",
            "m",
            "n",
            "spectra_gap",
            "relative_error",
            "residual_norm",
        ],
        &rows,
    )?;
    let worst = cases.iter().map(|c| c.relative_error).fold(0.0, f64::max);
    let failed = cases
        .iter()
        .filter(|c| c.relative_error.is_nan() || c.relative_error > tol)
        .count();
    let report = format!(
        "{} instances, worst relative error {}, {} above tolerance {}\n",
        cases.len(),
        num(worst),
        failed,
        num(tol)
    );
    if failed > 0 {
        return Err(CliError::Failed(report));
    }
    Ok(Outcome {
        report,
        files: vec![cfg.out.clone()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_gives_zero_field() {
        for id in [
            SchemeId::Lax,
            SchemeId::LaxWendroff,
            SchemeId::CrankNicolson,
        ] {
            let grid = Grid::from_cfl(1.0, 9, 6, 1.0, 0.5).unwrap();
            let k = stencilmat::SchemeCoefficients::build(id, &grid).unwrap();
            let b = BoundaryData::new(
                &grid,
                vec![0.0; 7],
                vec![0.0; 7],
                vec![0.0; 10],
                Some(vec![0.0; 10]),
            )
            .unwrap();
            let s = assemble_system(&k, &grid, &b).unwrap();
            assert!(s.m0.is_zero());
            assert!(solve_matrix_equation(&s, &s.m0).unwrap().is_zero());
        }
    }

    #[test]
    fn oracle_is_seeded() {
        let a = oracle_cases(5, 4, 6).unwrap();
        let b = oracle_cases(5, 4, 6).unwrap();
        assert_eq!(a.len(), 4);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(
                (x.m, x.n, x.relative_error.to_bits()),
                (y.m, y.n, y.relative_error.to_bits())
            );
        }
    }
}
