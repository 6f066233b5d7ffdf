//! Grids, the nine-weight stencil family, Dirichlet data and the exact
//! advected sinusoid.
//!
//! The stencil relation at interior node `(i, n)` is
//!
//! ```text
//! α·u_i^{n+1} + β·u_i^n + γ·u_i^{n-1} + δ·u_{i+1}^n + ε·u_{i-1}^n
//!   + ζ·u_{i+1}^{n+1} + η·u_{i-1}^{n-1} + θ·u_{i-1}^{n+1} + ϑ·u_{i+1}^{n-1} = 0
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Uniform space-time mesh on `[0, L] × [0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    h: f64,
    tau: f64,
    c: f64,
    n_x: usize,
    n_t: usize,
}

impl Grid {
    /// Validates `h, tau > 0`, finite `c`, `n_x >= 3` and `n_t >= 2`.
    ///
    /// Evenness of `n_x - 1` and `n_t` is only required once a matrix
    /// system is assembled; time-marching works on any grid.
    pub fn new(h: f64, tau: f64, c: f64, n_x: usize, n_t: usize) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("h must be positive, got {h}")));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "tau must be positive, got {tau}"
            )));
        }
        if !c.is_finite() {
            return Err(Error::InvalidGrid(format!("c must be finite, got {c}")));
        }
        if n_x < 3 {
            return Err(Error::InvalidGrid(format!(
                "n_x must be at least 3, got {n_x}"
            )));
        }
        if n_t < 2 {
            return Err(Error::InvalidGrid(format!(
                "n_t must be at least 2, got {n_t}"
            )));
        }
        Ok(Self {
            h,
            tau,
            c,
            n_x,
            n_t,
        })
    }

    /// Grid with `h = length / n_x` and `tau = cfl · h / c`.
    pub fn from_cfl(length: f64, n_x: usize, n_t: usize, c: f64, cfl: f64) -> Result<Self> {
        if n_x == 0 {
            return Err(Error::InvalidGrid("n_x must be at least 3, got 0".into()));
        }
        if c == 0.0 {
            return Err(Error::InvalidGrid("cfl cannot fix tau when c = 0".into()));
        }
        let h = length / n_x as f64;
        Self::new(h, cfl * h / c, c, n_x, n_t)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    /// Number of interior space nodes, `n_x - 1`.
    pub fn interior(&self) -> usize {
        self.n_x - 1
    }

    pub fn length(&self) -> f64 {
        self.n_x as f64 * self.h
    }

    pub fn horizon(&self) -> f64 {
        self.n_t as f64 * self.tau
    }

    /// CFL number `c·tau/h`.
    pub fn sigma(&self) -> f64 {
        self.c * self.tau / self.h
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.tau
    }

    /// Same mesh with a different number of time steps.
    pub fn with_steps(&self, n_t: usize) -> Result<Self> {
        Self::new(self.h, self.tau, self.c, self.n_x, n_t)
    }

    /// Errors unless `n_x - 1` and `n_t` are both even.
    pub fn require_even(&self) -> Result<()> {
        if !self.interior().is_multiple_of(2) || !self.n_t.is_multiple_of(2) {
            return Err(Error::OddDimension {
                interior: self.interior(),
                steps: self.n_t,
            });
        }
        Ok(())
    }
}

/// Named schemes of the stencil family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    Leapfrog,
    Lax,
    LaxWendroff,
    CrankNicolson,
    Custom,
}

impl SchemeId {
    pub const NAMED: [SchemeId; 4] = [
        SchemeId::Leapfrog,
        SchemeId::Lax,
        SchemeId::LaxWendroff,
        SchemeId::CrankNicolson,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeId::Leapfrog => "leapfrog",
            SchemeId::Lax => "lax",
            SchemeId::LaxWendroff => "lax-wendroff",
            SchemeId::CrankNicolson => "crank-nicolson",
            SchemeId::Custom => "custom",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "leapfrog" => Ok(SchemeId::Leapfrog),
            "lax" => Ok(SchemeId::Lax),
            "lax-wendroff" | "laxwendroff" => Ok(SchemeId::LaxWendroff),
            "crank-nicolson" | "cranknicolson" => Ok(SchemeId::CrankNicolson),
            "custom" => Ok(SchemeId::Custom),
            other => Err(Error::InvalidCoefficients(format!(
                "unknown scheme '{other}'"
            ))),
        }
    }
}

/// The nine stencil weights plus the scheme they came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeCoefficients {
    pub scheme_id: SchemeId,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub zeta: f64,
    pub eta: f64,
    pub theta: f64,
    pub vartheta: f64,
}

impl SchemeCoefficients {
    /// Evaluates the coefficient row of a named scheme on `grid`.
    pub fn build(scheme_id: SchemeId, grid: &Grid) -> Result<Self> {
        let (h, tau, c) = (grid.h(), grid.tau(), grid.c());
        let sigma = grid.sigma();
        let zero = Self::zero(scheme_id);
        let coeffs = match scheme_id {
            SchemeId::Leapfrog => Self {
                alpha: 1.0 / (2.0 * tau),
                gamma: -1.0 / (2.0 * tau),
                delta: c / (2.0 * h),
                epsilon: -c / (2.0 * h),
                ..zero
            },
            SchemeId::Lax => Self {
                alpha: 1.0 / tau,
                delta: -1.0 / (2.0 * tau) + c / (2.0 * h),
                epsilon: -1.0 / (2.0 * tau) - c / (2.0 * h),
                ..zero
            },
            SchemeId::LaxWendroff => Self {
                alpha: 1.0 / tau,
                beta: -1.0 / tau + c * c * tau / (h * h),
                delta: (1.0 - sigma) * c / (2.0 * h),
                epsilon: -(1.0 + sigma) * c / (2.0 * h),
                ..zero
            },
            // taken as tabulated, including the c/h² weights
            SchemeId::CrankNicolson => Self {
                alpha: 1.0 / tau + c / (h * h),
                beta: -1.0 / tau + c / (h * h),
                delta: -c / (h * h),
                epsilon: -c / (h * h),
                eta: -c / (h * h),
                theta: -c / (h * h),
                ..zero
            },
            SchemeId::Custom => {
                return Err(Error::InvalidCoefficients(
                    "custom coefficients are built with SchemeCoefficients::custom".into(),
                ))
            }
        };
        Ok(coeffs)
    }

    /// Custom weights in the order `α, β, γ, δ, ε, ζ, η, θ, ϑ`.
    pub fn custom(weights: [f64; 9]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidCoefficients("weights must be finite".into()));
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(Error::InvalidCoefficients(
                "all nine weights are zero".into(),
            ));
        }
        let [alpha, beta, gamma, delta, epsilon, zeta, eta, theta, vartheta] = weights;
        Ok(Self {
            scheme_id: SchemeId::Custom,
            alpha,
            beta,
            gamma,
            delta,
            epsilon,
            zeta,
            eta,
            theta,
            vartheta,
        })
    }

    fn zero(scheme_id: SchemeId) -> Self {
        Self {
            scheme_id,
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
            delta: 0.0,
            epsilon: 0.0,
            zeta: 0.0,
            eta: 0.0,
            theta: 0.0,
            vartheta: 0.0,
        }
    }

    pub fn weights(&self) -> [f64; 9] {
        [
            self.alpha,
            self.beta,
            self.gamma,
            self.delta,
            self.epsilon,
            self.zeta,
            self.eta,
            self.theta,
            self.vartheta,
        ]
    }

    /// Stencil terms as `(weight, space offset, time offset)`.
    pub fn stencil(&self) -> [(f64, isize, isize); 9] {
        [
            (self.alpha, 0, 1),
            (self.beta, 0, 0),
            (self.gamma, 0, -1),
            (self.delta, 1, 0),
            (self.epsilon, -1, 0),
            (self.zeta, 1, 1),
            (self.eta, -1, -1),
            (self.theta, -1, 1),
            (self.vartheta, 1, -1),
        ]
    }

    /// True when any weight reaches back to level `n - 1`.
    pub fn is_three_level(&self) -> bool {
        self.gamma != 0.0 || self.eta != 0.0 || self.vartheta != 0.0
    }

    /// True when the cross operator `L` is present.
    pub fn has_cross_terms(&self) -> bool {
        self.zeta != 0.0 || self.eta != 0.0 || self.theta != 0.0 || self.vartheta != 0.0
    }
}

/// The advected signal `cos(2π/λ · (x - c·t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalSpec {
    wavelength: f64,
}

impl SignalSpec {
    pub fn new(wavelength: f64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::InvalidSignal(wavelength));
        }
        Ok(Self { wavelength })
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }
}

/// Exact solution of the transport equation for `signal` at `(x, t)`.
pub fn exact_field(signal: &SignalSpec, grid: &Grid, x: f64, t: f64) -> f64 {
    (2.0 * PI / signal.wavelength * (x - grid.c() * t)).cos()
}

/// Dirichlet data on `x = 0`, `x = L`, the initial line and the optional
/// startup line `u^1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    left: Vec<f64>,
    right: Vec<f64>,
    initial: Vec<f64>,
    startup: Option<Vec<f64>>,
}

fn corners_agree(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

impl BoundaryData {
    /// `left`, `right` have length `n_t + 1`; `initial` and `startup` have length `n_x + 1`.
    pub fn new(
        grid: &Grid,
        left: Vec<f64>,
        right: Vec<f64>,
        initial: Vec<f64>,
        startup: Option<Vec<f64>>,
    ) -> Result<Self> {
        let (nx, nt) = (grid.n_x(), grid.n_t());
        let bad_len = |name: &str, got: usize, want: usize| {
            Error::InvalidBoundary(format!("{name} has {got} values, expected {want}"))
        };
        if left.len() != nt + 1 {
            return Err(bad_len("left", left.len(), nt + 1));
        }
        if right.len() != nt + 1 {
            return Err(bad_len("right", right.len(), nt + 1));
        }
        if initial.len() != nx + 1 {
            return Err(bad_len("initial", initial.len(), nx + 1));
        }
        if let Some(s) = &startup {
            if s.len() != nx + 1 {
                return Err(bad_len("startup", s.len(), nx + 1));
            }
        }
        let all = left
            .iter()
            .chain(&right)
            .chain(&initial)
            .chain(startup.iter().flatten());
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBoundary("non-finite value".into()));
        }
        if !corners_agree(left[0], initial[0]) || !corners_agree(right[0], initial[nx]) {
            return Err(Error::InvalidBoundary(
                "initial line disagrees with boundary at t = 0".into(),
            ));
        }
        if let Some(s) = &startup {
            if !corners_agree(left[1], s[0]) || !corners_agree(right[1], s[nx]) {
                return Err(Error::InvalidBoundary(
                    "startup line disagrees with boundary at t = tau".into(),
                ));
            }
        }
        Ok(Self {
            left,
            right,
            initial,
            startup,
        })
    }

    /// Samples the exact signal on the boundary, initial and startup lines.
    pub fn sample_exact(signal: &SignalSpec, grid: &Grid) -> Self {
        let u = |i: usize, n: usize| exact_field(signal, grid, grid.x(i), grid.t(n));
        let (nx, nt) = (grid.n_x(), grid.n_t());
        Self {
            left: (0..=nt).map(|n| u(0, n)).collect(),
            right: (0..=nt).map(|n| u(nx, n)).collect(),
            initial: (0..=nx).map(|i| u(i, 0)).collect(),
            startup: Some((0..=nx).map(|i| u(i, 1)).collect()),
        }
    }

    /// Replaces the startup line.
    pub fn with_startup(mut self, startup: Option<Vec<f64>>) -> Self {
        self.startup = startup;
        self
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn startup(&self) -> Option<&[f64]> {
        self.startup.as_deref()
    }

    /// Known value at a node on the boundary, initial or startup lines.
    pub(crate) fn known(&self, i: usize, n: usize, n_x: usize) -> Option<f64> {
        if i == 0 {
            self.left.get(n).copied()
        } else if i == n_x {
            self.right.get(n).copied()
        } else if n == 0 {
            self.initial.get(i).copied()
        } else {
            None
        }
    }

    pub(crate) fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.left.len() != grid.n_t() + 1 || self.initial.len() != grid.n_x() + 1 {
            return Err(Error::InvalidBoundary(format!(
                "boundary data sized for a different grid (n_x = {}, n_t = {})",
                self.initial.len().saturating_sub(1),
                self.left.len().saturating_sub(1)
            )));
        }
        Ok(())
    }
}
