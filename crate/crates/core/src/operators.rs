//! Diagonal almost sectorial operators in the Dirichlet sine basis and the
//! operator families built from them.
//!
//! For an operator with eigenvalues `lambda_n` every family acts mode by mode
//! through a scalar multiplier:
//!
//! | family        | multiplier                                         |
//! |---------------|----------------------------------------------------|
//! | `Q(t)`        | `exp(-lambda t)`                                   |
//! | `S_a(t)`      | `E_{a,1}(-lambda t^a)`                             |
//! | `T_a(t)`      | `E_{a,a}(-lambda t^a)`                             |
//! | `R_a(t)`      | `t^{a-1} E_{a,a}(-lambda t^a)`                     |
//! | `S_{a,g}(t)`  | `t^{(a-1)(1-g)} E_{a,a+g(1-a)}(-lambda t^a)`       |
//!
//! `S_a` and `T_a` can also be evaluated through their subordination
//! integrals against the Wright function, which gives an independent path.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fracops::{Origin, RlWeights, TimeGrid};
use crate::quad::{gauss_legendre_16, PanelRule};
use crate::specfun::wright::{wright_m, wright_tail_cutoff};
use crate::specfun::MittagLeffler;

/// Order, type, sectoriality exponent and horizon of a problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracParams {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub horizon: f64,
}

impl FracParams {
    pub fn new(alpha: f64, gamma: f64, beta: f64, horizon: f64) -> Result<Self> {
        let p = FracParams { alpha, gamma, beta, horizon };
        let problems = p.violations();
        if problems.is_empty() {
            Ok(p)
        } else {
            Err(Error::Config(problems))
        }
    }

    /// Every violated invariant, for aggregated configuration errors.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            v.push(format!("alpha must lie in (0, 1) (got {})", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            v.push(format!("gamma must lie in [0, 1] (got {})", self.gamma));
        }
        if !(self.beta > -1.0 && self.beta < 0.0) {
            v.push(format!("beta must lie in (-1, 0) (got {})", self.beta));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            v.push(format!("T must be positive (got {})", self.horizon));
        }
        v
    }

    /// `w = (1 + a b)(1 - g)`, the exponent of the weighted norm.
    pub fn weight_exponent(&self) -> f64 {
        (1.0 + self.alpha * self.beta) * (1.0 - self.gamma)
    }

    /// `nu = g (1 - a)`, the order of the outer integral of the Hilfer derivative.
    pub fn nu(&self) -> f64 {
        self.gamma * (1.0 - self.alpha)
    }

    /// `(a - 1)(1 - g)`, the power of `S_{a,g}(t)` at the origin.
    pub fn singular_exponent(&self) -> f64 {
        (self.alpha - 1.0) * (1.0 - self.gamma)
    }
}

/// A self-adjoint positive operator given by its eigenvalues in the basis
/// `sin(n y)`, `n = 1..N`, on `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSectorialOperator {
    eigenvalues: Vec<f64>,
}

impl DiagonalSectorialOperator {
    /// `lambda_n = n^2 + shift`, the Dirichlet Laplacian `-d^2/dy^2 + shift`.
    pub fn dirichlet_laplacian(modes: usize, shift: f64) -> Result<Self> {
        if modes == 0 {
            return Err(Error::domain("operator needs at least one mode"));
        }
        if !(shift >= 0.0 && shift.is_finite()) {
            return Err(Error::domain(format!("shift must be >= 0 (got {shift})")));
        }
        Ok(DiagonalSectorialOperator { eigenvalues: (1..=modes).map(|n| (n * n) as f64 + shift).collect() })
    }

    /// Arbitrary strictly increasing eigenvalues. A zero first eigenvalue is
    /// accepted so that limiting cases can be probed.
    pub fn from_eigenvalues(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::domain("operator needs at least one mode"));
        }
        if !(eigenvalues[0] >= 0.0) || eigenvalues.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("eigenvalues must be non-negative and strictly increasing"));
        }
        Ok(DiagonalSectorialOperator { eigenvalues })
    }

    pub fn modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Applies the operator itself: `c_n -> lambda_n c_n`.
    pub fn apply(&self, x: &SpectralField) -> SpectralField {
        x.scaled_by(|n| self.eigenvalues[n])
    }
}

/// Sine coefficients `c_n` of a function on `[0, pi]` with zero boundary values.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn zeros(modes: usize) -> Self {
        SpectralField { coeffs: vec![0.0; modes] }
    }

    /// The `k`-th basis function (1-based, matching `sin(k y)`).
    pub fn basis(modes: usize, k: usize) -> Self {
        let mut c = vec![0.0; modes];
        c[k - 1] = 1.0;
        SpectralField { coeffs: c }
    }

    pub fn modes(&self) -> usize {
        self.coeffs.len()
    }

    /// `L^2(0, pi)` norm, `sqrt(pi/2 sum c_n^2)`.
    pub fn l2_norm(&self) -> f64 {
        (0.5 * PI * self.coeffs.iter().map(|c| c * c).sum::<f64>()).sqrt()
    }

    /// `sum c_n sin(n y)`.
    pub fn eval(&self, y: f64) -> f64 {
        self.coeffs.iter().enumerate().map(|(n, c)| c * ((n + 1) as f64 * y).sin()).sum()
    }

    pub fn scaled_by(&self, f: impl Fn(usize) -> f64) -> Self {
        SpectralField { coeffs: self.coeffs.iter().enumerate().map(|(n, c)| c * f(n)).collect() }
    }

    pub fn axpy(&mut self, a: f64, x: &SpectralField) {
        for (c, d) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *c += a * d;
        }
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

/// Discrete sine transform between `N` modes and `P` equispaced interior
/// points `y_p = p pi / (P + 1)`.
#[derive(Debug, Clone)]
pub struct SineTransform {
    modes: usize,
    points: Vec<f64>,
    /// `sin(n y_p)`, row-major by point
    table: Vec<f64>,
}

impl SineTransform {
    pub fn new(modes: usize, points: usize) -> Result<Self> {
        if points < modes {
            return Err(Error::domain(format!("{points} sample points cannot resolve {modes} modes")));
        }
        let h = PI / (points + 1) as f64;
        let ys: Vec<f64> = (1..=points).map(|p| p as f64 * h).collect();
        let mut table = Vec::with_capacity(points * modes);
        for y in &ys {
            for n in 1..=modes {
                table.push((n as f64 * y).sin());
            }
        }
        Ok(SineTransform { modes, points: ys, table })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn synthesize(&self, x: &SpectralField) -> Vec<f64> {
        self.table.chunks_exact(self.modes).map(|row| row.iter().zip(&x.coeffs).map(|(s, c)| s * c).sum()).collect()
    }

    /// Inverse of [`SineTransform::synthesize`] on the first `N` modes; higher
    /// modes present in the samples are truncated.
    pub fn analyze(&self, values: &[f64]) -> SpectralField {
        let scale = 2.0 / (self.points.len() + 1) as f64;
        let mut coeffs = vec![0.0; self.modes];
        for (row, v) in self.table.chunks_exact(self.modes).zip(values) {
            for (c, s) in coeffs.iter_mut().zip(row) {
                *c += v * s;
            }
        }
        for c in &mut coeffs {
            *c *= scale;
        }
        SpectralField { coeffs }
    }
}

/// How `S_a` and `T_a` are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Path {
    /// Mittag-Leffler multiplier per mode.
    Direct,
    /// Wright-function subordination integral per mode.
    Subordination,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Semigroup,
    SAlpha,
    TAlpha,
    RAlpha,
    SAlphaGamma,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Semigroup => "Q",
            Family::SAlpha => "S_alpha",
            Family::TAlpha => "T_alpha",
            Family::RAlpha => "R_alpha",
            Family::SAlphaGamma => "S_alpha_gamma",
        })
    }
}

/// Relative accuracy demanded of the subordination panel rule's mass and
/// first moment before it is used.
const SUBORDINATION_TOL: f64 = 1e-9;

/// Scalar multipliers of all families for one parameter set.
///
/// Holds the Mittag-Leffler evaluators (with their precomputed tables) so
/// that per-mode evaluation is cheap.
#[derive(Debug, Clone)]
pub struct FractionalFamilies {
    params: FracParams,
    e_1: MittagLeffler,
    e_a: MittagLeffler,
    e_nu: MittagLeffler,
    e_a1: MittagLeffler,
    e_a2: MittagLeffler,
    cutoff: f64,
}

impl FractionalFamilies {
    pub fn new(params: FracParams) -> Result<Self> {
        let a = params.alpha;
        let fam = FractionalFamilies {
            params,
            e_1: MittagLeffler::with_params(a, 1.0)?,
            e_a: MittagLeffler::with_params(a, a)?,
            e_nu: MittagLeffler::with_params(a, a + params.nu())?,
            e_a1: MittagLeffler::with_params(a, a + 1.0)?,
            e_a2: MittagLeffler::with_params(a, a + 2.0)?,
            cutoff: wright_tail_cutoff(a),
        };
        Ok(fam)
    }

    pub fn params(&self) -> &FracParams {
        &self.params
    }

    /// Checks that the truncated subordination rule reproduces the mass
    /// `int M_a = 1` and mean `int theta M_a = 1/Gamma(1+a)`.
    pub fn subordination_self_check(&self) -> Result<()> {
        let a = self.params.alpha;
        let mass = self.subordinate(0.0, |_| 1.0)?;
        let mean = self.subordinate(0.0, |th| th)?;
        let want = crate::specfun::rgamma(1.0 + a);
        let err = (mass - 1.0).abs().max((mean - want).abs() / want);
        if err > SUBORDINATION_TOL {
            return Err(Error::Accuracy {
                what: "subordination tail truncation".into(),
                achieved: err,
                requested: SUBORDINATION_TOL,
            });
        }
        Ok(())
    }

    /// `int_0^cutoff g(theta) M_a(theta) exp(-c theta) d theta` on panels of
    /// width at most 0.5, narrowed when `c` is large so each panel sees a
    /// bounded amount of exponential decay.
    fn subordinate(&self, c: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
        let a = self.params.alpha;
        let upper = if c > 0.0 { self.cutoff.min(60.0 / c).max(1e-300) } else { self.cutoff };
        let width = if c > 0.0 { 0.5f64.min(8.0 / c) } else { 0.5 };
        let rule = PanelRule::new(0.0, upper, width, gauss_legendre_16());
        let mut s = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            s += w * g(*x) * wright_m(a, *x)? * (-c * x).exp();
        }
        Ok(s)
    }

    pub fn semigroup(&self, lambda: f64, t: f64) -> f64 {
        (-lambda * t).exp()
    }

    pub fn s_alpha(&self, lambda: f64, t: f64, path: Path) -> Result<f64> {
        check_time(t)?;
        let z = lambda * t.powf(self.params.alpha);
        match path {
            Path::Direct => self.e_1.eval(-z),
            Path::Subordination => self.subordinate(z, |_| 1.0),
        }
    }

    pub fn t_alpha(&self, lambda: f64, t: f64, path: Path) -> Result<f64> {
        check_time(t)?;
        let a = self.params.alpha;
        let z = lambda * t.powf(a);
        match path {
            Path::Direct => self.e_a.eval(-z),
            Path::Subordination => Ok(a * self.subordinate(z, |th| th)?),
        }
    }

    pub fn r_alpha(&self, lambda: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::domain(format!("R_alpha is singular at t = {t}")));
        }
        Ok(t.powf(self.params.alpha - 1.0) * self.t_alpha(lambda, t, Path::Direct)?)
    }

    /// `S_{a,g}(t)`; at `t = 0` only the case `g = 1` has a finite limit (the identity).
    pub fn s_alpha_gamma(&self, lambda: f64, t: f64) -> Result<f64> {
        let p = &self.params;
        if t == 0.0 {
            return if p.gamma == 1.0 {
                Ok(1.0)
            } else {
                Err(Error::domain("S_alpha_gamma is singular at t = 0 for gamma < 1"))
            };
        }
        check_time(t)?;
        Ok(t.powf(p.singular_exponent()) * self.e_nu.eval(-lambda * t.powf(p.alpha))?)
    }

    /// `int_0^tau s^{a-1} E_{a,a}(-lambda s^a) ds = tau^a E_{a,a+1}(-lambda tau^a)`.
    pub fn kernel_primitive(&self, lambda: f64, tau: f64) -> Result<f64> {
        let a = self.params.alpha;
        if tau == 0.0 {
            return Ok(0.0);
        }
        let ta = tau.powf(a);
        Ok(ta * self.e_a1.eval(-lambda * ta)?)
    }

    /// Second primitive, `tau^{a+1} E_{a,a+2}(-lambda tau^a)`.
    pub fn kernel_second_primitive(&self, lambda: f64, tau: f64) -> Result<f64> {
        let a = self.params.alpha;
        if tau == 0.0 {
            return Ok(0.0);
        }
        let ta = tau.powf(a);
        Ok(ta * tau * self.e_a2.eval(-lambda * ta)?)
    }

    pub fn multiplier(&self, family: Family, lambda: f64, t: f64, path: Path) -> Result<f64> {
        match family {
            Family::Semigroup => Ok(self.semigroup(lambda, t)),
            Family::SAlpha => self.s_alpha(lambda, t, path),
            Family::TAlpha => self.t_alpha(lambda, t, path),
            Family::RAlpha => self.r_alpha(lambda, t),
            Family::SAlphaGamma => self.s_alpha_gamma(lambda, t),
        }
    }

    /// Applies a family to a field mode by mode.
    pub fn apply(
        &self,
        family: Family,
        op: &DiagonalSectorialOperator,
        t: f64,
        x: &SpectralField,
        path: Path,
    ) -> Result<SpectralField> {
        check_modes(op, x)?;
        let m = Exec::default().try_map(op.modes(), |n| self.multiplier(family, op.eigenvalues()[n], t, path))?;
        Ok(x.scaled_by(|n| m[n]))
    }

    /// `S_{a,g}` on every node of `grid` for one eigenvalue, by applying the
    /// grid fractional integral of order `g(1-a)` to sampled `R_a`.
    ///
    /// This is a second path to [`FractionalFamilies::s_alpha_gamma`], whose
    /// accuracy is that of the product integration on the grid.
    pub fn s_alpha_gamma_by_quadrature(&self, lambda: f64, grid: &TimeGrid) -> Result<Vec<f64>> {
        let a = self.params.alpha;
        let nu = self.params.nu();
        let mut r = vec![f64::NAN; grid.len()];
        for (j, &t) in grid.nodes().iter().enumerate().skip(1) {
            r[j] = self.r_alpha(lambda, t)?;
        }
        if nu == 0.0 {
            return Ok(r);
        }
        let w = RlWeights::new(grid, nu, Origin::Power(a - 1.0))?;
        Ok(w.apply_values(&r))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("time must be finite and >= 0 (got {t})")))
    }
}

fn check_modes(op: &DiagonalSectorialOperator, x: &SpectralField) -> Result<()> {
    if op.modes() == x.modes() {
        Ok(())
    } else {
        Err(Error::domain(format!("field has {} modes, operator has {}", x.modes(), op.modes())))
    }
}

/// `Q(t) x`.
pub fn semigroup_apply(op: &DiagonalSectorialOperator, t: f64, x: &SpectralField) -> Result<SpectralField> {
    check_time(t)?;
    check_modes(op, x)?;
    Ok(x.scaled_by(|n| (-op.eigenvalues()[n] * t).exp()))
}

pub fn s_alpha_apply(
    params: &FracParams,
    op: &DiagonalSectorialOperator,
    t: f64,
    x: &SpectralField,
    path: Path,
) -> Result<SpectralField> {
    FractionalFamilies::new(*params)?.apply(Family::SAlpha, op, t, x, path)
}

pub fn t_alpha_apply(
    params: &FracParams,
    op: &DiagonalSectorialOperator,
    t: f64,
    x: &SpectralField,
    path: Path,
) -> Result<SpectralField> {
    FractionalFamilies::new(*params)?.apply(Family::TAlpha, op, t, x, path)
}

pub fn r_alpha_apply(
    params: &FracParams,
    op: &DiagonalSectorialOperator,
    t: f64,
    x: &SpectralField,
) -> Result<SpectralField> {
    FractionalFamilies::new(*params)?.apply(Family::RAlpha, op, t, x, Path::Direct)
}

pub fn s_alpha_gamma_apply(
    params: &FracParams,
    op: &DiagonalSectorialOperator,
    t: f64,
    x: &SpectralField,
) -> Result<SpectralField> {
    FractionalFamilies::new(*params)?.apply(Family::SAlphaGamma, op, t, x, Path::Direct)
}

/// Outcome of checking an inequality `norm(s) <= C s^p` over a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundProbeReport {
    pub family: String,
    pub exponent_expected: f64,
    /// Log-log slope between the two smallest samples.
    pub exponent_fitted: f64,
    /// Smallest `C` for which the inequality holds on the refined sample.
    pub constant_fitted: f64,
    /// Largest relative slack `norm / (C s^p) - 1` on the validation
    /// sample; at most zero when the inequality holds.
    pub max_violation: f64,
    /// Validation points where the fitted inequality fails.
    pub violations: usize,
    /// Largest relative slack below the sampled range; positive values mean
    /// the ratio is still growing towards `t = 0`.
    pub tail_growth: f64,
}

impl BoundProbeReport {
    pub fn holds(&self) -> bool {
        self.constant_fitted.is_finite() && self.violations == 0
    }
}

/// Fits `C` as the largest ratio on `samples` refined 16-fold geometrically
/// and validates on the samples and the refined set. The ratio is also
/// tracked over ten halvings below the smallest sample, where an exponent
/// that is too large shows up as growth.
fn fit_bound(
    family: String,
    exponent: f64,
    samples: &[f64],
    norm: impl Fn(f64) -> Result<f64>,
) -> Result<BoundProbeReport> {
    let mut s: Vec<f64> = samples.to_vec();
    s.sort_by(f64::total_cmp);
    s.dedup();
    if s.is_empty() {
        return Err(Error::domain("bound probe needs at least one sample"));
    }
    let mut fit = Vec::with_capacity(16 * s.len());
    for w in s.windows(2) {
        let r = (w[1] / w[0]).ln();
        fit.extend((0..16).map(|k| w[0] * (r * k as f64 / 16.0).exp()));
    }
    fit.push(s[s.len() - 1]);
    let ratio = |x: f64| -> Result<f64> { Ok(norm(x)? / x.powf(exponent)) };
    let mut constant = 0.0f64;
    for &x in &fit {
        constant = constant.max(ratio(x)?);
    }
    let exponent_fitted = if s.len() >= 2 { (norm(s[1])? / norm(s[0])?).ln() / (s[1] / s[0]).ln() } else { f64::NAN };
    let mut max_violation = f64::NEG_INFINITY;
    let mut violations = 0;
    for &x in s.iter().chain(&fit) {
        let slack = ratio(x)? / constant - 1.0;
        max_violation = max_violation.max(slack);
        if slack > 1e-12 {
            violations += 1;
        }
    }
    let mut tail_growth = f64::NEG_INFINITY;
    for k in 1..=10 {
        tail_growth = tail_growth.max(ratio(s[0] * 0.5f64.powi(k))? / constant - 1.0);
    }
    Ok(BoundProbeReport {
        family,
        exponent_expected: exponent,
        exponent_fitted,
        constant_fitted: constant,
        max_violation,
        violations,
        tail_growth,
    })
}

/// `||R(z, -A)|| <= M |z|^beta` over complex samples, with `||R|| = max_n 1/|z + lambda_n|`.
pub fn resolvent_probe(op: &DiagonalSectorialOperator, z_samples: &[Complex64], beta: f64) -> Result<BoundProbeReport> {
    let resolvent = |z: Complex64| -> Result<f64> {
        let mut best = 0.0f64;
        for &l in op.eigenvalues() {
            let d = (z + l).norm();
            if d <= 1e-12 * (1.0 + l) {
                return Err(Error::domain(format!("sample {z} lies on the spectrum")));
            }
            best = best.max(1.0 / d);
        }
        Ok(best)
    };
    let mut constant = 0.0f64;
    let mut norms = Vec::with_capacity(z_samples.len());
    for &z in z_samples {
        let r = resolvent(z)?;
        constant = constant.max(r / z.norm().powf(beta));
        norms.push((z, r));
    }
    let mut max_violation = f64::NEG_INFINITY;
    for (z, r) in &norms {
        max_violation = max_violation.max(r / (constant * z.norm().powf(beta)) - 1.0);
    }
    let exponent_fitted = if norms.len() >= 2 {
        (norms[1].1 / norms[0].1).ln() / (norms[1].0.norm() / norms[0].0.norm()).ln()
    } else {
        f64::NAN
    };
    Ok(BoundProbeReport {
        family: "resolvent".into(),
        exponent_expected: beta,
        exponent_fitted,
        constant_fitted: constant,
        max_violation,
        violations: 0,
        tail_growth: f64::NAN,
    })
}

/// Checks `||F(t)|| <= C t^p` for `T_a` (`p = -a(1+b)`) or `S_{a,g}`
/// (`p = g(1-a) - a b - 1`), with the operator norm taken as the largest
/// mode multiplier.
pub fn norm_bound_probe(
    fam: &FractionalFamilies,
    op: &DiagonalSectorialOperator,
    family: Family,
    t_samples: &[f64],
) -> Result<BoundProbeReport> {
    let p = fam.params();
    let exponent = match family {
        Family::TAlpha => -p.alpha * (1.0 + p.beta),
        Family::SAlphaGamma => p.nu() - p.alpha * p.beta - 1.0,
        other => {
            return Err(Error::domain(format!("no norm bound is probed for {other}")));
        }
    };
    if t_samples.iter().any(|&t| !(t > 0.0 && t <= p.horizon)) {
        return Err(Error::domain("bound probe samples must lie in (0, T]"));
    }
    fit_bound(family.to_string(), exponent, t_samples, |t| operator_norm(fam, op, family, t))
}

/// Like [`norm_bound_probe`] with a caller-chosen exponent.
pub fn power_law_probe(
    fam: &FractionalFamilies,
    op: &DiagonalSectorialOperator,
    family: Family,
    exponent: f64,
    t_samples: &[f64],
) -> Result<BoundProbeReport> {
    fit_bound(family.to_string(), exponent, t_samples, |t| operator_norm(fam, op, family, t))
}

fn operator_norm(fam: &FractionalFamilies, op: &DiagonalSectorialOperator, family: Family, t: f64) -> Result<f64> {
    let mut best = 0.0f64;
    for &l in op.eigenvalues() {
        best = best.max(fam.multiplier(family, l, t, Path::Direct)?.abs());
    }
    Ok(best)
}

/// `||F(t_2) x - F(t_1) x||` for each pair.
pub fn strong_continuity_probe(
    fam: &FractionalFamilies,
    op: &DiagonalSectorialOperator,
    family: Family,
    x: &SpectralField,
    t_pairs: &[(f64, f64)],
) -> Result<Vec<f64>> {
    t_pairs
        .iter()
        .map(|&(t1, t2)| {
            let a = fam.apply(family, op, t1, x, Path::Direct)?;
            let b = fam.apply(family, op, t2, x, Path::Direct)?;
            Ok(b.sub(&a).l2_norm())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{gamma, rgamma};
    use approx::assert_relative_eq;

    fn params(alpha: f64, gamma: f64) -> FracParams {
        FracParams::new(alpha, gamma, -0.5, 1.0).unwrap()
    }

    #[test]
    fn params_validation_lists_everything() {
        match FracParams::new(1.5, 2.0, 0.5, -1.0) {
            Err(Error::Config(v)) => assert_eq!(v.len(), 4),
            other => panic!("{other:?}"),
        }
        let p = params(0.75, 0.5);
        assert_relative_eq!(p.weight_exponent(), 0.3125);
        assert_relative_eq!(p.singular_exponent(), -0.125);
    }

    #[test]
    fn semigroup_basics() {
        let op = DiagonalSectorialOperator::dirichlet_laplacian(4, 0.0).unwrap();
        let x = SpectralField { coeffs: vec![1.0, -2.0, 0.5, 3.0] };
        assert_eq!(semigroup_apply(&op, 0.0, &x).unwrap(), x);
        let e1 = semigroup_apply(&op, 1.0, &SpectralField::basis(4, 1)).unwrap();
        assert_relative_eq!(e1.coeffs[0], 0.367_879_441_171_442_3, max_relative = 1e-15);
        let ts = semigroup_apply(&op, 0.3, &semigroup_apply(&op, 0.2, &x).unwrap()).unwrap();
        let direct = semigroup_apply(&op, 0.5, &x).unwrap();
        for (a, b) in ts.coeffs.iter().zip(&direct.coeffs) {
            assert_relative_eq!(a, b, max_relative = 1e-14);
        }
        assert!(semigroup_apply(&op, 0.7, &x).unwrap().l2_norm() <= x.l2_norm());
    }

    #[test]
    fn resolvent_examples() {
        let op = DiagonalSectorialOperator::dirichlet_laplacian(64, 0.0).unwrap();
        let zs: Vec<Complex64> = [1.0, 10.0, 100.0].iter().map(|&s| Complex64::new(0.0, s)).collect();
        let r = resolvent_probe(&op, &zs, -1.0).unwrap();
        assert_relative_eq!(r.constant_fitted, 100.0 / (100.0f64 * 100.0 + 1.0).sqrt(), max_relative = 1e-12);
        assert!(r.max_violation <= 0.0);
        let single = DiagonalSectorialOperator::from_eigenvalues(vec![1.0]).unwrap();
        let r = resolvent_probe(&single, &[Complex64::new(-0.5, 0.0)], 0.0).unwrap();
        assert_relative_eq!(r.constant_fitted, 2.0);
        assert!(resolvent_probe(&single, &[Complex64::new(-1.0, 0.0)], -0.5).is_err());
        let r = resolvent_probe(&op, &zs, -0.5).unwrap();
        assert!(r.constant_fitted.is_finite());
    }

    #[test]
    fn t_alpha_examples() {
        let fam = FractionalFamilies::new(params(0.75, 0.5)).unwrap();
        // zero eigenvalue: alpha * Gamma(2) / Gamma(1 + alpha) = 1 / Gamma(alpha)
        assert_relative_eq!(fam.t_alpha(0.0, 0.7, Path::Direct).unwrap(), rgamma(0.75), max_relative = 1e-14);
        assert_relative_eq!(fam.t_alpha(0.0, 0.7, Path::Subordination).unwrap(), rgamma(0.75), max_relative = 1e-9);
        let d = fam.t_alpha(4.0, 0.5, Path::Direct).unwrap();
        let s = fam.t_alpha(4.0, 0.5, Path::Subordination).unwrap();
        assert_relative_eq!(d, s, max_relative = 1e-6);
        let half = FractionalFamilies::new(params(0.5, 0.5)).unwrap();
        assert!(half.t_alpha(1.0, 100.0, Path::Direct).unwrap() < half.t_alpha(1.0, 1.0, Path::Direct).unwrap());
    }

    #[test]
    fn s_alpha_examples() {
        let fam = FractionalFamilies::new(params(0.5, 0.5)).unwrap();
        assert_eq!(fam.s_alpha(0.0, 0.3, Path::Direct).unwrap(), 1.0);
        assert_relative_eq!(fam.s_alpha(0.0, 0.3, Path::Subordination).unwrap(), 1.0, max_relative = 1e-9);
        assert_relative_eq!(fam.s_alpha(1.0, 1.0, Path::Direct).unwrap(), 0.427_583_576_155_807, max_relative = 1e-13);
    }

    #[test]
    fn paths_agree_on_grid() {
        for a in [0.5, 0.75] {
            let fam = FractionalFamilies::new(params(a, 0.5)).unwrap();
            fam.subordination_self_check().unwrap();
            for l in [1.0, 4.0, 25.0] {
                for t in [0.01, 0.1, 0.5, 1.0] {
                    for fam_kind in [Family::SAlpha, Family::TAlpha] {
                        let d = fam.multiplier(fam_kind, l, t, Path::Direct).unwrap();
                        let s = fam.multiplier(fam_kind, l, t, Path::Subordination).unwrap();
                        assert_relative_eq!(d, s, max_relative = 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn r_alpha_and_s_alpha_gamma() {
        let fam = FractionalFamilies::new(params(0.75, 0.5)).unwrap();
        assert!(fam.r_alpha(1.0, 0.0).is_err());
        let direct = crate::specfun::MittagLeffler::with_params(0.75, 0.75).unwrap().eval(-1.0).unwrap();
        assert_relative_eq!(fam.r_alpha(1.0, 1.0).unwrap(), direct, max_relative = 1e-15);
        let t = 0.37;
        assert_eq!(fam.r_alpha(2.0, t).unwrap(), t.powf(-0.25) * fam.t_alpha(2.0, t, Path::Direct).unwrap());
        assert!(fam.s_alpha_gamma(1.0, 0.0).is_err());

        let caputo = FractionalFamilies::new(params(0.75, 1.0)).unwrap();
        assert_eq!(caputo.s_alpha_gamma(3.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(
            caputo.s_alpha_gamma(3.0, 0.4).unwrap(),
            caputo.s_alpha(3.0, 0.4, Path::Direct).unwrap(),
            max_relative = 1e-14
        );

        let rl = FractionalFamilies::new(params(0.75, 0.0)).unwrap();
        let v = rl.s_alpha_gamma(0.0, 0.5).unwrap();
        assert_relative_eq!(v, 0.5f64.powf(-0.25) / gamma(0.75).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn s_alpha_gamma_quadrature_path() {
        let fam = FractionalFamilies::new(params(0.75, 0.5)).unwrap();
        let grid = TimeGrid::graded(1.0, 400, 2.0).unwrap();
        for l in [0.0, 1.0, 9.0] {
            let q = fam.s_alpha_gamma_by_quadrature(l, &grid).unwrap();
            for (j, &t) in grid.nodes().iter().enumerate().skip(1) {
                let d = fam.s_alpha_gamma(l, t).unwrap();
                assert_relative_eq!(q[j], d, max_relative = 1e-4);
            }
        }
    }

    #[test]
    fn norm_bounds_hold() {
        let p = params(0.75, 0.5);
        let fam = FractionalFamilies::new(p).unwrap();
        let op = DiagonalSectorialOperator::dirichlet_laplacian(16, 0.0).unwrap();
        let ts: Vec<f64> = (0..=30).map(|k| 10f64.powf(-3.0 + 0.1 * k as f64)).collect();
        for family in [Family::TAlpha, Family::SAlphaGamma] {
            let r = norm_bound_probe(&fam, &op, family, &ts).unwrap();
            assert!(r.holds(), "{r:?}");
        }
        // uniform bound by 1 / Gamma(alpha)
        let r = power_law_probe(&fam, &op, Family::TAlpha, 0.0, &ts).unwrap();
        assert!(r.holds() && r.constant_fitted <= rgamma(0.75));
        // single zero mode: exact power law
        let zero = DiagonalSectorialOperator::from_eigenvalues(vec![0.0]).unwrap();
        let r = power_law_probe(&fam, &zero, Family::SAlphaGamma, p.singular_exponent(), &ts).unwrap();
        assert!((r.exponent_fitted - p.singular_exponent()).abs() < 1e-10);
    }

    #[test]
    fn continuity_probe() {
        let fam = FractionalFamilies::new(params(0.75, 0.5)).unwrap();
        let op = DiagonalSectorialOperator::dirichlet_laplacian(8, 0.0).unwrap();
        let x = SpectralField { coeffs: vec![1.0, 0.5, 0.25, 0.125, 0.0, 0.0, 0.0, 0.1] };
        let pairs = [(0.5, 0.6), (0.5, 0.55), (0.5, 0.525)];
        let d = strong_continuity_probe(&fam, &op, Family::SAlphaGamma, &x, &pairs).unwrap();
        assert!(d[0] > d[1] && d[1] > d[2]);
        let zero = SpectralField::zeros(8);
        let d = strong_continuity_probe(&fam, &op, Family::TAlpha, &zero, &pairs).unwrap();
        assert!(d.iter().all(|&v| v == 0.0));
        let near0 = [(0.1, 0.11), (0.01, 0.02), (0.001, 0.011)];
        let d = strong_continuity_probe(&fam, &op, Family::SAlphaGamma, &x, &near0).unwrap();
        assert!(d[2] > d[0]);
    }

    #[test]
    fn sine_transform_round_trip() {
        let st = SineTransform::new(8, 16).unwrap();
        let x = SpectralField { coeffs: (1..=8).map(|n| 1.0 / n as f64).collect() };
        let back = st.analyze(&st.synthesize(&x));
        for (a, b) in back.coeffs.iter().zip(&x.coeffs) {
            assert_relative_eq!(a, b, epsilon = 1e-14);
        }
        assert_relative_eq!(st.synthesize(&x)[3], x.eval(st.points()[3]), epsilon = 1e-14);
    }

    proptest::proptest! {
        #[test]
        fn multipliers_positive_and_decreasing_in_lambda(t in 0.001f64..1.0, idx in 0usize..2) {
            let a = [0.5, 0.75][idx];
            let fam = FractionalFamilies::new(params(a, 0.5)).unwrap();
            for kind in [Family::SAlpha, Family::TAlpha] {
                let mut prev = f64::INFINITY;
                for n in 1..=16 {
                    let m = fam.multiplier(kind, (n * n) as f64, t, Path::Direct).unwrap();
                    proptest::prop_assert!(m > 0.0 && m < prev);
                    prev = m;
                }
            }
        }

        #[test]
        fn semigroup_is_contractive(t in 0.0f64..5.0, c in proptest::collection::vec(-5.0f64..5.0, 6)) {
            let op = DiagonalSectorialOperator::dirichlet_laplacian(6, 0.0).unwrap();
            let x = SpectralField { coeffs: c };
            proptest::prop_assert!(semigroup_apply(&op, t, &x).unwrap().l2_norm() <= x.l2_norm() + 1e-15);
        }
    }
}
