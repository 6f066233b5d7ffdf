use std::path::PathBuf;

use stencilmat::{Grid, SchemeCoefficients, SchemeId};

use crate::args::{CommandKind, RunArgs};
use crate::CliError;

/// How the time step is fixed.
#[derive(Debug, Clone, PartialEq)]
pub enum Spacing {
    /// h = length / n_x and τ = cfl·h/c, one grid per CFL number.
    Cfl { length: f64, cfl: Vec<f64> },
    /// h = length / n_x and τ = horizon / n_t.
    Horizon { length: f64, horizon: f64 },
    /// Explicit steps.
    Steps { h: f64, tau: f64 },
}

/// Validated command configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub scheme: SchemeId,
    pub weights: Option<[f64; 9]>,
    pub n_x: usize,
    pub n_t: usize,
    pub c: f64,
    pub spacing: Spacing,
    pub wavelength: f64,
    pub out: PathBuf,
    pub tol: Option<f64>,
    pub seed: u64,
    pub cases: usize,
    pub max_size: usize,
}

fn default_cfl(command: CommandKind) -> Vec<f64> {
    match command {
        CommandKind::Sweep => vec![0.7, 0.9, 1.0],
        CommandKind::Bound => (1..=20).map(|k| 0.05 * k as f64).collect(),
        _ => vec![0.5],
    }
}

// the matrix commands need an even interior, so they default to 16 × 10
fn default_dims(command: CommandKind) -> (usize, usize) {
    match command {
        CommandKind::Solve | CommandKind::Analyze => (17, 10),
        _ => (64, 50),
    }
}

impl RunConfig {
    pub fn from_args(command: CommandKind, a: &RunArgs) -> Result<Self, CliError> {
        let scheme: SchemeId = a
            .scheme
            .parse()
            .map_err(|e: stencilmat::Error| CliError::Config(e.to_string()))?;
        let weights = match (scheme, &a.coeffs) {
            (SchemeId::Custom, Some(w)) => {
                let w: [f64; 9] = w
                    .as_slice()
                    .try_into()
                    .map_err(|_| CliError::Config("--coeffs takes exactly nine values".into()))?;
                Some(w)
            }
            (SchemeId::Custom, None) => {
                return Err(CliError::Config("--scheme custom needs --coeffs".into()));
            }
            (_, Some(_)) => {
                return Err(CliError::Config(
                    "--coeffs is only used with --scheme custom".into(),
                ));
            }
            (_, None) => None,
        };

        let (dx, dt) = default_dims(command);
        let spacing = match (a.h, a.tau, a.horizon) {
            (Some(h), Some(tau), _) => Spacing::Steps { h, tau },
            (_, _, Some(horizon)) => {
                if !(horizon.is_finite() && horizon > 0.0) {
                    return Err(CliError::Config(format!(
                        "--horizon must be positive, got {horizon}"
                    )));
                }
                Spacing::Horizon {
                    length: a.length.unwrap_or(1.0),
                    horizon,
                }
            }
            _ => {
                let cfl = if a.cfl.is_empty() {
                    default_cfl(command)
                } else {
                    a.cfl.clone()
                };
                Spacing::Cfl {
                    length: a.length.unwrap_or(1.0),
                    cfl,
                }
            }
        };
        if let Spacing::Cfl { cfl, .. } = &spacing {
            if let Some(bad) = cfl.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(CliError::Config(format!("cfl must be positive, got {bad}")));
            }
            if matches!(command, CommandKind::Sweep | CommandKind::Bound) {
                if let Some(bad) = cfl.iter().find(|v| **v > 1.0) {
                    return Err(CliError::Config(format!(
                        "cfl must lie in (0, 1], got {bad}"
                    )));
                }
            }
            if matches!(command, CommandKind::Solve | CommandKind::Analyze) && cfl.len() != 1 {
                return Err(CliError::Config(format!(
                    "{} takes a single --cfl",
                    command.name()
                )));
            }
        }
        if !(a.wavelength.is_finite() && a.wavelength > 0.0) {
            return Err(CliError::Config(format!(
                "--wavelength must be positive, got {}",
                a.wavelength
            )));
        }
        if let Some(t) = a.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Config(format!("--tol must be positive, got {t}")));
            }
        }
        if command == CommandKind::Oracle && (a.cases == 0 || a.max_size == 0) {
            return Err(CliError::Config(
                "--cases and --max-size must be positive".into(),
            ));
        }

        Ok(RunConfig {
            command,
            scheme,
            weights,
            n_x: a.nx.unwrap_or(dx),
            n_t: a.nt.unwrap_or(dt),
            c: a.c,
            spacing,
            wavelength: a.wavelength,
            out: a
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("{}.csv", command.name()))),
            tol: a.tol,
            seed: a.seed,
            cases: a.cases,
            max_size: a.max_size,
        })
    }

    /// One grid per CFL number (or the single grid of the other spacings).
    pub fn grids(&self) -> Result<Vec<(f64, Grid)>, CliError> {
        let grids = match &self.spacing {
            Spacing::Cfl { length, cfl } => cfl
                .iter()
                .map(|&s| Ok((s, Grid::from_cfl(*length, self.n_x, self.n_t, self.c, s)?)))
                .collect::<stencilmat::Result<Vec<_>>>()?,
            Spacing::Horizon { length, horizon } => {
                let g = Grid::new(
                    length / self.n_x as f64,
                    horizon / self.n_t as f64,
                    self.c,
                    self.n_x,
                    self.n_t,
                )?;
                vec![(g.sigma(), g)]
            }
            Spacing::Steps { h, tau } => {
                let g = Grid::new(*h, *tau, self.c, self.n_x, self.n_t)?;
                vec![(g.sigma(), g)]
            }
        };
        Ok(grids)
    }

    pub fn single_grid(&self) -> Result<Grid, CliError> {
        let mut grids = self.grids()?;
        if grids.len() != 1 {
            return Err(CliError::Config("expected a single grid".into()));
        }
        Ok(grids.remove(0).1)
    }

    pub fn cfl_values(&self) -> Result<Vec<f64>, CliError> {
        match &self.spacing {
            Spacing::Cfl { cfl, .. } => Ok(cfl.clone()),
            _ => Err(CliError::Config(format!(
                "{} needs --cfl values",
                self.command.name()
            ))),
        }
    }

    pub fn coefficients(&self, grid: &Grid) -> Result<SchemeCoefficients, CliError> {
        Ok(match self.weights {
            Some(w) => SchemeCoefficients::custom(w)?,
            None => SchemeCoefficients::build(self.scheme, grid)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> RunArgs {
        RunArgs {
            scheme: "lax".into(),
            c: 1.0,
            wavelength: 1.0,
            cases: 50,
            max_size: 16,
            ..Default::default()
        }
    }

    #[test]
    fn per_command_defaults() {
        let s = RunConfig::from_args(CommandKind::Sweep, &args()).unwrap();
        assert_eq!((s.n_x, s.n_t), (64, 50));
        assert_eq!(s.cfl_values().unwrap(), vec![0.7, 0.9, 1.0]);
        assert_eq!(s.out, PathBuf::from("sweep.csv"));
        let b = RunConfig::from_args(CommandKind::Bound, &args()).unwrap();
        assert_eq!(b.cfl_values().unwrap().len(), 20);
        let v = RunConfig::from_args(CommandKind::Solve, &args()).unwrap();
        assert_eq!((v.n_x, v.n_t), (17, 10));
        assert!(v.single_grid().is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        let mut a = args();
        a.scheme = "upwind".into();
        assert!(RunConfig::from_args(CommandKind::Solve, &a).is_err());

        let mut a = args();
        a.cfl = vec![0.5, 1.5];
        assert!(RunConfig::from_args(CommandKind::Sweep, &a).is_err());
        assert!(RunConfig::from_args(CommandKind::Solve, &a).is_err());

        let mut a = args();
        a.scheme = "custom".into();
        assert!(RunConfig::from_args(CommandKind::Solve, &a).is_err());
        a.coeffs = Some(vec![1.0; 3]);
        assert!(RunConfig::from_args(CommandKind::Solve, &a).is_err());
        a.coeffs = Some(vec![1.0; 9]);
        assert!(RunConfig::from_args(CommandKind::Solve, &a).is_ok());

        let mut a = args();
        a.nt = Some(0);
        let cfg = RunConfig::from_args(CommandKind::Sweep, &a).unwrap();
        assert!(cfg.grids().is_err());
    }

    #[test]
    fn explicit_steps() {
        let mut a = args();
        a.h = Some(0.1);
        a.tau = Some(0.05);
        let cfg = RunConfig::from_args(CommandKind::Analyze, &a).unwrap();
        let g = cfg.single_grid().unwrap();
        assert_eq!((g.h(), g.tau()), (0.1, 0.05));
        assert!(cfg.cfl_values().is_err());
    }
}
