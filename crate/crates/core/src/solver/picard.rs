use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fracops::{Origin, RlWeights, TimeGrid};
use crate::operators::{FractionalFamilies, SineTransform, SpectralField};
use crate::quad::{gauss_jacobi, gauss_legendre};
use crate::specfun::rgamma;

use super::audit::{audit_hypotheses, HypothesisCheck};
use super::problem::{ProblemSpec, SolverConfig, Trajectory};

/// A nonlocal point resolved to a grid node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnappedPoint {
    pub node: usize,
    pub c: f64,
    /// `|t_node - t_i|`
    pub snap_error: f64,
}

/// Packed lower-triangular product-integration weights of
/// `int_0^{t_j} (t_j - r)^{a-1} E_{a,a}(-lambda (t_j - r)^a) g(r) dr`
/// for one eigenvalue, with `g` piecewise linear.
///
/// The kernel is integrated exactly through its primitives
/// `K1(s) = s^a E_{a,a+1}(-lambda s^a)` and `K2(s) = s^{a+1} E_{a,a+2}(-lambda s^a)`.
#[derive(Debug, Clone)]
pub struct ConvolutionWeights {
    packed: Vec<f64>,
}

impl ConvolutionWeights {
    pub fn new(fam: &FractionalFamilies, lambda: f64, grid: &TimeGrid) -> Result<Self> {
        let t = grid.nodes();
        let m = grid.intervals();
        let mut packed = vec![0.0; (m + 1) * (m + 2) / 2];
        let mut k1 = vec![0.0; m + 1];
        let mut k2 = vec![0.0; m + 1];
        for j in 1..=m {
            for i in 0..j {
                let tau = t[j] - t[i];
                k1[i] = fam.kernel_primitive(lambda, tau)?;
                k2[i] = fam.kernel_second_primitive(lambda, tau)?;
            }
            k1[j] = 0.0;
            k2[j] = 0.0;
            let row = &mut packed[j * (j + 1) / 2..(j + 1) * (j + 2) / 2];
            for i in 0..j {
                let h = t[i + 1] - t[i];
                let d2 = k2[i] - k2[i + 1];
                row[i] += (h * k1[i] - d2) / h;
                row[i + 1] += (d2 - h * k1[i + 1]) / h;
            }
        }
        Ok(ConvolutionWeights { packed })
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.packed[j * (j + 1) / 2..(j + 1) * (j + 2) / 2]
    }
}

/// Row `j` of the same convolution computed with a Gauss-Jacobi rule on
/// each cell (weight `(1-x)^{a-1}` on the cell ending at `t_j`, Gauss-Legendre
/// elsewhere). Independent of the exact-primitive construction; used as a check.
pub fn convolution_row_by_quadrature(
    fam: &FractionalFamilies,
    lambda: f64,
    grid: &TimeGrid,
    j: usize,
    points: usize,
) -> Result<Vec<f64>> {
    let a = fam.params().alpha;
    let t = grid.nodes();
    let gj = gauss_jacobi(points, a - 1.0, 0.0)?;
    let gl = gauss_legendre(points);
    let mut row = vec![0.0; j + 1];
    let tj = t[j];
    for i in 0..j {
        let (lo, hi) = (t[i], t[i + 1]);
        let h = hi - lo;
        let (mut wl, mut wr) = (0.0, 0.0);
        if i + 1 == j {
            // (t_j - r)^{a-1} = (h/2)^{a-1} (1-x)^{a-1}
            for (x, w) in gj.nodes.iter().zip(&gj.weights) {
                let r = lo + 0.5 * h * (1.0 + x);
                let tau = tj - r;
                let e = fam.t_alpha(lambda, tau, crate::operators::Path::Direct)?;
                let c = w * (0.5 * h).powf(a) * e;
                wl += c * (hi - r) / h;
                wr += c * (r - lo) / h;
            }
        } else {
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                let r = lo + 0.5 * h * (1.0 + x);
                let k = fam.r_alpha(lambda, tj - r)?;
                let c = w * 0.5 * h * k;
                wl += c * (hi - r) / h;
                wr += c * (r - lo) / h;
            }
        }
        row[i] += wl;
        row[i + 1] += wr;
    }
    Ok(row)
}

/// Outcome of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub converged: bool,
    pub iterations_used: usize,
    pub final_update_norm: f64,
    /// Weighted update norm after each sweep.
    pub update_history: Vec<f64>,
    /// `||P u - u||` in the weighted norm, recomputed on the returned iterate.
    pub mild_self_consistency: f64,
    /// Weighted sup-norm mismatch of the equivalent Volterra equation.
    pub volterra_residual_weighted: f64,
    /// Estimated weighted norm of the modes beyond the truncation.
    pub modal_tail_estimate: f64,
    /// Largest weighted norm over all iterates.
    pub max_iterate_norm: f64,
    /// Iterates whose weighted norm exceeded the configured radius.
    pub radius_violations: usize,
    pub nonlocal_snap_error: f64,
    /// See [`Solver::convolution_crosscheck`]; `None` without a source term.
    pub convolution_crosscheck: Option<f64>,
    pub hypothesis_checks: Vec<HypothesisCheck>,
    pub under_resolved: bool,
    pub warnings: Vec<String>,
}

/// Precomputed operators for one problem on one mesh.
pub struct Solver {
    spec: ProblemSpec,
    config: SolverConfig,
    fam: FractionalFamilies,
    grid: TimeGrid,
    transform: SineTransform,
    /// `S_{a,g}(t_j)` per node (row) and mode (column); row 0 unused.
    s_ag: Vec<Vec<f64>>,
    conv: Vec<ConvolutionWeights>,
    snapped: Vec<SnappedPoint>,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver")
            .field("spec", &self.spec)
            .field("config", &self.config)
            .field("grid_intervals", &self.grid.intervals())
            .finish()
    }
}

/// Intermediate fields of one sweep.
struct SweepFields {
    /// `g(t_j, u(t_j), Bu(t_j))`
    g: Vec<SpectralField>,
}

impl Solver {
    pub fn new(spec: ProblemSpec, config: SolverConfig) -> Result<Self> {
        let mut problems = spec.violations();
        problems.extend(config.violations());
        if !problems.is_empty() {
            return Err(Error::Config(problems));
        }
        let fam = FractionalFamilies::new(spec.params)?;
        let grid = config.grid(spec.params.horizon)?;
        let transform = config.transform(spec.modes())?;
        let snapped = snap_nonlocal(&spec, &grid)?;
        let exec = config.exec;
        let lambdas = spec.op.eigenvalues().to_vec();
        let s_ag = exec.try_map(grid.len(), |j| {
            if j == 0 {
                return Ok(vec![0.0; lambdas.len()]);
            }
            lambdas.iter().map(|&l| fam.s_alpha_gamma(l, grid.t(j))).collect::<Result<Vec<_>>>()
        })?;
        let conv = if spec.g.is_some() {
            exec.try_map(lambdas.len(), |n| ConvolutionWeights::new(&fam, lambdas[n], &grid))?
        } else {
            Vec::new()
        };
        Ok(Solver { spec, config, fam, grid, transform, s_ag, conv, snapped })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn families(&self) -> &FractionalFamilies {
        &self.fam
    }

    pub fn transform(&self) -> &SineTransform {
        &self.transform
    }

    pub fn snapped_points(&self) -> &[SnappedPoint] {
        &self.snapped
    }

    pub fn convolution_weights(&self, mode: usize) -> Option<&ConvolutionWeights> {
        self.conv.get(mode)
    }

    /// Last-row convolutions of the data `1` and `t` for the lowest mode,
    /// exact weights against [`convolution_row_by_quadrature`] at
    /// `quadrature_order` points; largest relative gap. Stiff modes are left
    /// out: the Gauss-Legendre cells cannot resolve `R_a` once `lambda h^a`
    /// is large, so the gap there measures the quadrature, not the weights.
    pub fn convolution_crosscheck(&self) -> Result<Option<f64>> {
        let Some(conv) = self.conv.first() else {
            return Ok(None);
        };
        let j = self.grid.len() - 1;
        let t = self.grid.nodes();
        let lambda = self.spec.op.eigenvalues()[0];
        let exact = conv.row(j);
        let quad = convolution_row_by_quadrature(&self.fam, lambda, &self.grid, j, self.config.quadrature_order)?;
        let mut worst = 0.0f64;
        for data in [|_: f64| 1.0, |t: f64| t] {
            let e: f64 = exact.iter().zip(t).map(|(w, &x)| w * data(x)).sum();
            let q: f64 = quad.iter().zip(t).map(|(w, &x)| w * data(x)).sum();
            worst = worst.max((e - q).abs() / e.abs());
        }
        Ok(Some(worst))
    }

    fn exec(&self) -> Exec {
        self.config.exec
    }

    fn weight_exponent(&self) -> f64 {
        self.spec.params.weight_exponent()
    }

    fn gamma_is_one(&self) -> bool {
        self.spec.params.gamma == 1.0
    }

    /// `S_{a,g}(t) u0` on the grid, the initial iterate.
    pub fn initial_trajectory(&self) -> Trajectory {
        let mut traj = Trajectory::zeros(&self.grid, self.spec.modes(), self.weight_exponent());
        self.fill_homogeneous(&mut traj, &self.spec.u0);
        traj
    }

    /// Writes `S_{a,g}(t_j) d` into every node, with the weighted limit at node 0.
    fn fill_homogeneous(&self, traj: &mut Trajectory, d: &SpectralField) {
        for j in 1..self.grid.len() {
            traj.states[j] = d.scaled_by(|n| self.s_ag[j][n]);
        }
        traj.states[0] = if self.gamma_is_one() { d.clone() } else { SpectralField::zeros(d.modes()) };
    }

    /// `h(u) = sum c_i u(t_i)` with each `t_i` snapped to its nearest node.
    pub fn nonlocal_h(&self, traj: &Trajectory) -> SpectralField {
        let mut h = SpectralField::zeros(self.spec.modes());
        for p in &self.snapped {
            h.axpy(p.c, &traj.states[p.node]);
        }
        h
    }

    /// Index of the first node whose state is used as-is for the
    /// nonlinearities; node 0 is replaced by node 1 when `u` is singular there.
    fn physical_source(&self, j: usize) -> usize {
        if j == 0 && !self.gamma_is_one() {
            1
        } else {
            j
        }
    }

    /// `f(t_j, u(t_j))` in spectral form, for all nodes.
    fn inner_fields(&self, traj: &Trajectory) -> Result<Vec<SpectralField>> {
        let f = match &self.spec.f {
            Some(f) => f,
            None => return Ok(vec![SpectralField::zeros(self.spec.modes()); self.grid.len()]),
        };
        let ys = self.transform.points();
        self.exec().try_map(self.grid.len(), |j| {
            let src = self.physical_source(j);
            let t = self.grid.t(src);
            let z = self.transform.synthesize(&traj.states[src]);
            let mut v = Vec::with_capacity(ys.len());
            for (y, zp) in ys.iter().zip(&z) {
                let val = f(t, *y, *zp);
                if !val.is_finite() {
                    return Err(Error::Evaluation { t, detail: format!("inner nonlinearity f is {val} at y = {y}") });
                }
                v.push(val);
            }
            Ok(self.transform.analyze(&v))
        })
    }

    /// `Bu(t_j) = int_0^{t_j} k(t_j, s) f(s, u(s)) ds` by the trapezoid rule on the mesh.
    fn b_fields(&self, inner: &[SpectralField]) -> Vec<SpectralField> {
        self.exec().map(self.grid.len(), |j| self.b_at(inner, j))
    }

    fn b_at(&self, inner: &[SpectralField], j: usize) -> SpectralField {
        let mut acc = SpectralField::zeros(self.spec.modes());
        let kernel = match &self.spec.kernel {
            Some(k) if self.spec.f.is_some() => k,
            _ => return acc,
        };
        let t = self.grid.nodes();
        for i in 0..j {
            let h = 0.5 * (t[i + 1] - t[i]);
            acc.axpy(h * kernel(t[j], t[i]), &inner[i]);
            acc.axpy(h * kernel(t[j], t[i + 1]), &inner[i + 1]);
        }
        acc
    }

    fn sweep_fields(&self, traj: &Trajectory) -> Result<SweepFields> {
        let inner = self.inner_fields(traj)?;
        let b = self.b_fields(&inner);
        let g = match &self.spec.g {
            None => vec![SpectralField::zeros(self.spec.modes()); self.grid.len()],
            Some(g) => {
                let ys = self.transform.points();
                self.exec().try_map(self.grid.len(), |j| {
                    let src = self.physical_source(j);
                    let t = self.grid.t(src);
                    let z = self.transform.synthesize(&traj.states[src]);
                    let bz = self.transform.synthesize(&b[src]);
                    let mut v = Vec::with_capacity(ys.len());
                    for p in 0..ys.len() {
                        let val = g(t, ys[p], z[p], bz[p]);
                        if !val.is_finite() {
                            return Err(Error::Evaluation {
                                t,
                                detail: format!("nonlinearity g is {val} at y = {}", ys[p]),
                            });
                        }
                        v.push(val);
                    }
                    Ok(self.transform.analyze(&v))
                })?
            }
        };
        Ok(SweepFields { g })
    }

    /// `Bu(t_j)` for one node.
    pub fn b_term(&self, traj: &Trajectory, j: usize) -> Result<SpectralField> {
        if j == 0 || j >= self.grid.len() {
            return Err(Error::domain(format!("b_term needs a node index in 1..={}", self.grid.intervals())));
        }
        let inner = self.inner_fields(traj)?;
        Ok(self.b_at(&inner, j))
    }

    /// `g(t_j, u(t_j), Bu(t_j))` at all nodes.
    pub fn g_fields(&self, traj: &Trajectory) -> Result<Vec<SpectralField>> {
        Ok(self.sweep_fields(traj)?.g)
    }

    /// `(P u)(t_j) = S_{a,g}(t_j)[u0 - h(u)] + int_0^{t_j} R_a(t_j - r) g(r) dr`.
    pub fn picard_map(&self, traj: &Trajectory) -> Result<Trajectory> {
        self.picard_map_parts(traj).map(|(p, _)| p)
    }

    fn picard_map_parts(&self, traj: &Trajectory) -> Result<(Trajectory, Vec<SpectralField>)> {
        if traj.grid != self.grid || traj.modes() != self.spec.modes() {
            return Err(Error::Invariant("trajectory does not match the solver mesh".into()));
        }
        let h = self.nonlocal_h(traj);
        let d = self.spec.u0.sub(&h);
        let mut out = Trajectory::zeros(&self.grid, self.spec.modes(), self.weight_exponent());
        self.fill_homogeneous(&mut out, &d);
        if self.spec.g.is_none() {
            return Ok((out, Vec::new()));
        }
        let fields = self.sweep_fields(traj)?;
        let modes = self.spec.modes();
        let len = self.grid.len();
        // per-mode convolutions, then scattered back to node-major storage
        let per_mode: Vec<Vec<f64>> = self.exec().map(modes, |n| {
            let w = &self.conv[n];
            let mut col = vec![0.0; len];
            for (j, c) in col.iter_mut().enumerate().skip(1) {
                let row = w.row(j);
                let mut s = 0.0;
                for i in 0..=j {
                    s += row[i] * fields.g[i].coeffs[n];
                }
                *c = s;
            }
            col
        });
        for j in 1..len {
            for n in 0..modes {
                out.states[j].coeffs[n] += per_mode[n][j];
            }
        }
        Ok((out, fields.g))
    }

    /// Damped Picard iteration from `S_{a,g}(t) u0`.
    pub fn solve(&self) -> Result<(Trajectory, ResidualReport)> {
        let cfg = &self.config;
        let mut u = self.initial_trajectory();
        let mut history = Vec::new();
        let mut warnings = Vec::new();
        let mut max_norm = u.weighted_sup();
        let mut radius_violations = usize::from(max_norm > cfg.radius_r);
        let mut converged = false;
        for _ in 0..cfg.max_iterations {
            let pu = self.picard_map(&u)?;
            let mut next = u.clone();
            next.relax_towards(&pu, cfg.relaxation);
            let update = next.weighted_distance(&u);
            u = next;
            if !u.is_finite() {
                return Err(Error::Divergence { history });
            }
            history.push(update);
            let norm = u.weighted_sup();
            max_norm = max_norm.max(norm);
            if norm > cfg.radius_r {
                radius_violations += 1;
            }
            if update <= cfg.tolerance {
                converged = true;
                break;
            }
            if diverging(&history) {
                return Err(Error::Divergence { history });
            }
        }
        if radius_violations > 0 {
            warnings.push(format!(
                "{radius_violations} iterates left the ball of radius {} (max weighted norm {max_norm:.6e})",
                cfg.radius_r
            ));
        }
        if !converged {
            warnings.push(format!("no convergence within {} iterations", cfg.max_iterations));
        }
        let (pu, g) = self.picard_map_parts(&u)?;
        let mild = pu.weighted_distance(&u);
        let g = if g.is_empty() { vec![SpectralField::zeros(self.spec.modes()); self.grid.len()] } else { g };
        let volterra = self.volterra_residual_with(&u, &g)?;
        let tail = modal_tail_estimate(&u);
        let checks = audit_hypotheses(self, &u)?;
        for c in checks.iter().filter(|c| !c.passed) {
            warnings.push(format!("hypothesis {} not met: {}", c.name, c.detail));
        }
        let under_resolved = volterra > cfg.residual_cap;
        if under_resolved {
            warnings
                .push(format!("under-resolved: Volterra residual {volterra:.3e} exceeds cap {:.3e}", cfg.residual_cap));
        }
        let report = ResidualReport {
            converged,
            iterations_used: history.len(),
            final_update_norm: history.last().copied().unwrap_or(0.0),
            update_history: history,
            mild_self_consistency: mild,
            volterra_residual_weighted: volterra,
            modal_tail_estimate: tail,
            max_iterate_norm: max_norm,
            radius_violations,
            nonlocal_snap_error: self.snapped.iter().map(|p| p.snap_error).fold(0.0, f64::max),
            convolution_crosscheck: self.convolution_crosscheck()?,
            hypothesis_checks: checks,
            under_resolved,
            warnings,
        };
        Ok((u, report))
    }

    /// Weighted sup-norm mismatch of
    /// `u = [u0 - h(u)] t^{(a-1)(1-g)} / Gamma(a + g(1-a)) + I^a[-A u + g](t)`.
    pub fn volterra_residual(&self, traj: &Trajectory) -> Result<f64> {
        let g = if self.spec.g.is_some() {
            self.sweep_fields(traj)?.g
        } else {
            vec![SpectralField::zeros(self.spec.modes()); self.grid.len()]
        };
        self.volterra_residual_with(traj, &g)
    }

    fn volterra_residual_with(&self, traj: &Trajectory, g: &[SpectralField]) -> Result<f64> {
        let p = &self.spec.params;
        let e = p.singular_exponent();
        let u_origin = if self.gamma_is_one() { Origin::Regular } else { Origin::Power(e) };
        let wu = RlWeights::with_exec(&self.grid, p.alpha, u_origin, self.exec())?;
        let wg = RlWeights::with_exec(&self.grid, p.alpha, Origin::Regular, self.exec())?;
        let d = self.spec.u0.sub(&self.nonlocal_h(traj));
        let c0 = rgamma(p.alpha + p.nu());
        let modes = self.spec.modes();
        let len = self.grid.len();
        let lambdas = self.spec.op.eigenvalues();
        let per_mode: Vec<Vec<f64>> = self.exec().map(modes, |n| {
            let un: Vec<f64> = traj.states.iter().map(|s| s.coeffs[n]).collect();
            let gn: Vec<f64> = g.iter().map(|s| s.coeffs[n]).collect();
            let mut res = vec![0.0; len];
            for j in 1..len {
                let t = self.grid.t(j);
                let rhs = d.coeffs[n] * c0 * t.powf(e) - lambdas[n] * wu.apply_at(&un, j) + wg.apply_at(&gn, j);
                res[j] = un[j] - rhs;
            }
            res
        });
        let mut worst = 0.0f64;
        for j in 1..len {
            let s: f64 = (0..modes).map(|n| per_mode[n][j] * per_mode[n][j]).sum();
            worst = worst.max(traj.weight(j) * (0.5 * std::f64::consts::PI * s).sqrt());
        }
        Ok(worst)
    }
}

fn snap_nonlocal(spec: &ProblemSpec, grid: &TimeGrid) -> Result<Vec<SnappedPoint>> {
    let mut out = Vec::with_capacity(spec.nonlocal.len());
    let mut problems = Vec::new();
    for (i, p) in spec.nonlocal.iter().enumerate() {
        if p.t > grid.horizon() {
            problems.push(format!("nonlocal t[{i}] = {} exceeds T = {}", p.t, grid.horizon()));
            continue;
        }
        let (node, err) = grid.nearest(p.t);
        if node == 0 {
            problems.push(format!("nonlocal t[{i}] = {} is not resolved by the mesh", p.t));
            continue;
        }
        out.push(SnappedPoint { node, c: p.c, snap_error: err });
    }
    if problems.is_empty() {
        Ok(out)
    } else {
        Err(Error::Config(problems))
    }
}

/// Divergence: the update grew over five consecutive sweeps, by 10x in total.
fn diverging(history: &[f64]) -> bool {
    let n = history.len();
    if n < 6 {
        return false;
    }
    let w = &history[n - 6..];
    w.windows(2).all(|p| p[1] > p[0]) && w[5] >= 10.0 * w[0]
}

/// Weighted norm of the modes beyond `N`, extrapolated from a power-law fit
/// to the upper half of the envelope `max_j t_j^w |u_n(t_j)|`.
pub fn modal_tail_estimate(traj: &Trajectory) -> f64 {
    let modes = traj.modes();
    if modes < 4 {
        return 0.0;
    }
    let envelope: Vec<f64> = (0..modes)
        .map(|n| (1..traj.states.len()).map(|j| traj.weight(j) * traj.states[j].coeffs[n].abs()).fold(0.0, f64::max))
        .collect();
    let pts: Vec<(f64, f64)> =
        (modes / 2..modes).filter(|&n| envelope[n] > 0.0).map(|n| (((n + 1) as f64).ln(), envelope[n].ln())).collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let k = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / k, sy / k);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let decay = -sxy / sxx;
    if decay <= 0.5 {
        return f64::INFINITY;
    }
    let amp = (my + decay * mx).exp();
    // sum_{n > N} amp^2 n^{-2p} ~ amp^2 (N + 1/2)^{1-2p} / (2p - 1)
    let tail_sq = amp * amp * (modes as f64 + 0.5).powf(1.0 - 2.0 * decay) / (2.0 * decay - 1.0);
    (0.5 * std::f64::consts::PI * tail_sq).sqrt()
}

/// Builds a solver and runs it.
pub fn solve(spec: ProblemSpec, config: SolverConfig) -> Result<(Trajectory, ResidualReport)> {
    Solver::new(spec, config)?.solve()
}
