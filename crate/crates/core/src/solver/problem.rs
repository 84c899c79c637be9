use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fracops::TimeGrid;
use crate::operators::{DiagonalSectorialOperator, FracParams, SineTransform, SpectralField};

/// `g(t, y, z, (Bz))` evaluated pointwise in physical space.
pub type PointwiseG = Arc<dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync>;
/// `f(t, y, z)` evaluated pointwise in physical space.
pub type PointwiseF = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
/// Memory kernel `k(t, s)` of the integral term.
pub type Kernel = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// One term `c_i u(t_i)` of the nonlocal condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlocalPoint {
    pub t: f64,
    pub c: f64,
}

/// Constants of the growth and boundedness hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBounds {
    /// `k1` in `||g|| <= k1 + k2 exp(-delta t)` (taken constant in time).
    pub k1: f64,
    pub k2: f64,
    pub delta: f64,
    /// Bound on `||h(u)||`.
    pub k_bound_h3: f64,
}

impl Default for GrowthBounds {
    fn default() -> Self {
        GrowthBounds { k1: 7.4, k2: 0.1, delta: 1.0, k_bound_h3: 0.2 }
    }
}

/// Data of the nonlocal Cauchy problem
/// `D^{a,g} u + A u = g(t, u, Bu)`, `I^{(1-a)(1-g)} u(0+) + h(u) = u0`,
/// with `Bu(t) = int_0^t k(t, s) f(s, u(s)) ds` and `h(u) = sum c_i u(t_i)`.
#[derive(Clone)]
pub struct ProblemSpec {
    pub params: FracParams,
    pub op: DiagonalSectorialOperator,
    /// `None` means `g = 0`.
    pub g: Option<PointwiseG>,
    /// `None` means `f = 0`, hence `Bu = 0`.
    pub f: Option<PointwiseF>,
    pub kernel: Option<Kernel>,
    pub nonlocal: Vec<NonlocalPoint>,
    pub u0: SpectralField,
    pub bounds: GrowthBounds,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("params", &self.params)
            .field("modes", &self.op.modes())
            .field("g", &self.g.is_some())
            .field("f", &self.f.is_some())
            .field("kernel", &self.kernel.is_some())
            .field("nonlocal", &self.nonlocal)
            .field("u0", &self.u0)
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl ProblemSpec {
    /// `g = 0`, `h = 0`: the solution is `S_{a,g}(t) u0`.
    pub fn linear(params: FracParams, op: DiagonalSectorialOperator, u0: SpectralField) -> Self {
        ProblemSpec {
            params,
            op,
            g: None,
            f: None,
            kernel: None,
            nonlocal: Vec::new(),
            u0,
            bounds: GrowthBounds::default(),
        }
    }

    /// The heat-type example on `[0, pi]`: `g = y cos z + Bz`, `f = sin z`,
    /// `k(t, s) = exp(-(t - s))`, `u0 = sin y`, two nonlocal points.
    pub fn heat_example(params: FracParams, op: DiagonalSectorialOperator, nonlocal: Vec<NonlocalPoint>) -> Self {
        let modes = op.modes();
        ProblemSpec {
            params,
            op,
            g: Some(Arc::new(|_t, y, z, bz| y * z.cos() + bz)),
            f: Some(Arc::new(|_t, _y, z| z.sin())),
            kernel: Some(Arc::new(|t, s| (-(t - s)).exp())),
            nonlocal,
            u0: SpectralField::basis(modes, 1),
            bounds: GrowthBounds::default(),
        }
    }

    pub fn modes(&self) -> usize {
        self.op.modes()
    }

    /// Every violated invariant.
    pub fn violations(&self) -> Vec<String> {
        let mut v = self.params.violations();
        if self.u0.modes() != self.op.modes() {
            v.push(format!("u0 has {} modes, operator has {}", self.u0.modes(), self.op.modes()));
        }
        if !self.u0.is_finite() {
            v.push("u0 has non-finite coefficients".into());
        }
        for (i, p) in self.nonlocal.iter().enumerate() {
            if !(p.t > 0.0 && p.t <= self.params.horizon) {
                v.push(format!("nonlocal t[{i}] = {} must lie in (0, T]", p.t));
            }
            if !p.c.is_finite() {
                v.push(format!("nonlocal c[{i}] is not finite"));
            }
        }
        if self.f.is_some() && self.kernel.is_none() {
            v.push("an inner nonlinearity f needs a kernel".into());
        }
        let b = &self.bounds;
        if !(b.k1 >= 0.0 && b.k2 >= 0.0 && b.delta >= 0.0 && b.k_bound_h3 >= 0.0) {
            v.push("growth bounds k1, k2, delta_decay, k_bound_h3 must be >= 0".into());
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    pub fn is_linear(&self) -> bool {
        self.g.is_none() && self.nonlocal.is_empty()
    }
}

/// Discretization and iteration controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stopping threshold on the weighted sup-norm of successive iterates.
    pub tolerance: f64,
    /// Damping `w` in `u <- (1 - w) u + w P u`.
    pub relaxation: f64,
    /// Points of the Gauss-Jacobi rule used to cross-check the convolution weights.
    pub quadrature_order: usize,
    /// Radius of the ball the iterates are expected to stay in.
    pub radius_r: f64,
    /// Volterra residual above which a run is flagged under-resolved.
    pub residual_cap: f64,
    /// Time mesh: `intervals` subintervals graded with exponent `grading`.
    pub intervals: usize,
    pub grading: f64,
    /// Physical sample points for the nonlinearities; `0` selects `2 N`.
    pub transform_points: usize,
    pub exec: Exec,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 50,
            tolerance: 1e-8,
            relaxation: 0.8,
            quadrature_order: 16,
            radius_r: 25.0,
            residual_cap: 1e-3,
            intervals: 200,
            grading: 2.0,
            transform_points: 0,
            exec: Exec::default(),
        }
    }
}

impl SolverConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.max_iterations < 1 {
            v.push("max_iter must be >= 1".into());
        }
        if !(self.tolerance > 0.0) {
            v.push(format!("tol must be > 0 (got {})", self.tolerance));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            v.push(format!("relaxation must lie in (0, 1] (got {})", self.relaxation));
        }
        if self.quadrature_order < 1 {
            v.push("quadrature_order must be >= 1".into());
        }
        if !(self.radius_r > 0.0) {
            v.push(format!("radius_r must be > 0 (got {})", self.radius_r));
        }
        if !(self.residual_cap > 0.0) {
            v.push(format!("residual_cap must be > 0 (got {})", self.residual_cap));
        }
        if self.intervals < 2 {
            v.push(format!("mesh needs at least 2 intervals (got {})", self.intervals));
        }
        if !(self.grading >= 1.0) {
            v.push(format!("grading must be >= 1 (got {})", self.grading));
        }
        v
    }

    pub fn grid(&self, horizon: f64) -> Result<TimeGrid> {
        TimeGrid::graded(horizon, self.intervals, self.grading)
    }

    pub fn transform(&self, modes: usize) -> Result<SineTransform> {
        let p = if self.transform_points == 0 { 2 * modes } else { self.transform_points };
        SineTransform::new(modes, p)
    }
}

/// Spectral states on a time grid.
///
/// Node 0 holds the weighted limit `lim t^w u(t)`; every other node holds
/// `u(t_j)` itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub states: Vec<SpectralField>,
    pub weight_exponent: f64,
}

impl Trajectory {
    pub fn zeros(grid: &TimeGrid, modes: usize, weight_exponent: f64) -> Self {
        Trajectory { grid: grid.clone(), states: vec![SpectralField::zeros(modes); grid.len()], weight_exponent }
    }

    pub fn modes(&self) -> usize {
        self.states[0].modes()
    }

    /// `t^w`, with the convention that node 0 is already weighted.
    pub fn weight(&self, j: usize) -> f64 {
        if j == 0 {
            1.0
        } else {
            self.grid.t(j).powf(self.weight_exponent)
        }
    }

    /// Weighted norm at node `j`.
    pub fn weighted_norm(&self, j: usize) -> f64 {
        self.weight(j) * self.states[j].l2_norm()
    }

    pub fn weighted_norms(&self) -> Vec<f64> {
        (0..self.states.len()).map(|j| self.weighted_norm(j)).collect()
    }

    /// `sup_{j >= 1} t_j^w ||u(t_j)||`.
    pub fn weighted_sup(&self) -> f64 {
        (1..self.states.len()).map(|j| self.weighted_norm(j)).fold(0.0, f64::max)
    }

    /// Weighted sup-norm distance over the positive nodes.
    pub fn weighted_distance(&self, other: &Trajectory) -> f64 {
        (1..self.states.len())
            .map(|j| self.weight(j) * self.states[j].sub(&other.states[j]).l2_norm())
            .fold(0.0, f64::max)
    }

    /// `self <- (1 - w) self + w other`.
    pub fn relax_towards(&mut self, other: &Trajectory, w: f64) {
        for (a, b) in self.states.iter_mut().zip(&other.states) {
            for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
                *x = (1.0 - w) * *x + w * y;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.states.iter().all(SpectralField::is_finite)
    }
}
