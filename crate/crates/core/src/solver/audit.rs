//! Numeric audits of the growth/boundedness hypotheses and the
//! equicontinuity probe for the fixed-point map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::operators::SpectralField;
use crate::specfun::{gamma, mittag_leffler, rgamma, MLParams};

use super::picard::Solver;
use super::problem::Trajectory;

/// Outcome of one hypothesis audit. `value <= bound` is the pass condition
/// unless `detail` says otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
    pub detail: String,
}

impl HypothesisCheck {
    fn new(name: &str, value: f64, bound: f64, detail: String) -> Self {
        HypothesisCheck { name: name.into(), passed: value.is_finite() && value <= bound, value, bound, detail }
    }
}

/// `int_0^t (t - r)^{s-1} [k1 + k2 exp(-delta r)] dr`
/// `= k1 t^s / s + k2 Gamma(s) t^s E_{1,s+1}(-delta t)`.
pub fn growth_convolution(k1: f64, k2: f64, delta: f64, sigma: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let ts = t.powf(sigma);
    let e = mittag_leffler(MLParams { alpha: 1.0, beta_ml: sigma + 1.0 }, -delta * t)?;
    Ok(k1 * ts / sigma + k2 * gamma(sigma)? * ts * e)
}

/// Runs the four hypothesis audits for `traj`.
pub fn audit_hypotheses(solver: &Solver, traj: &Trajectory) -> Result<Vec<HypothesisCheck>> {
    Ok(vec![
        audit_continuity(solver),
        audit_growth(solver, traj)?,
        audit_nonlocal_bound(solver, traj),
        audit_ball_invariance(solver)?,
    ])
}

/// Continuity of `g` and `f` in the state arguments: finite values and a
/// small response to a `1e-7` perturbation on a sample lattice.
pub fn audit_continuity(solver: &Solver) -> HypothesisCheck {
    let spec = solver.spec();
    let eps = 1e-7;
    let zs = [-4.0, -1.5, -0.3, 0.0, 0.7, 2.0, 5.0];
    let ts = [solver.grid().t(1), 0.5 * spec.params.horizon, spec.params.horizon];
    let mut worst = 0.0f64;
    for &t in &ts {
        for &y in solver.transform().points().iter().step_by(3) {
            for &z in &zs {
                if let Some(f) = &spec.f {
                    let d = (f(t, y, z + eps) - f(t, y, z)).abs();
                    worst = worst.max(if d.is_finite() { d } else { f64::INFINITY });
                }
                if let Some(g) = &spec.g {
                    for &b in &zs {
                        let d0 = (g(t, y, z + eps, b) - g(t, y, z, b)).abs();
                        let d1 = (g(t, y, z, b + eps) - g(t, y, z, b)).abs();
                        let d = d0.max(d1);
                        worst = worst.max(if d.is_finite() { d } else { f64::INFINITY });
                    }
                }
            }
        }
    }
    HypothesisCheck::new("continuity", worst, 1e-4, format!("max response to a {eps:e} perturbation"))
}

/// `||g(t_j, u, Bu)|| <= k1 + k2 exp(-delta t_j)` along the trajectory, and
/// `t^w I^{-ab}[k1 + k2 exp(-delta t)] -> 0` as `t -> 0`.
pub fn audit_growth(solver: &Solver, traj: &Trajectory) -> Result<HypothesisCheck> {
    let spec = solver.spec();
    let b = spec.bounds;
    let p = spec.params;
    let sigma = -p.alpha * p.beta;
    let w = p.weight_exponent();
    let mut ratio = 0.0f64;
    if spec.g.is_some() {
        let g = solver.g_fields(traj)?;
        for (j, gj) in g.iter().enumerate().skip(1) {
            let t = solver.grid().t(j);
            let bound = b.k1 + b.k2 * (-b.delta * t).exp();
            let n = gj.l2_norm();
            ratio = ratio.max(if bound > 0.0 {
                n / bound
            } else if n > 0.0 {
                f64::INFINITY
            } else {
                0.0
            });
        }
    }
    // I^s[m](t) = conv / Gamma(s); the weighted value at the first node must be small
    let t1 = solver.grid().t(1);
    let near_zero = t1.powf(w) * growth_convolution(b.k1, b.k2, b.delta, sigma, t1)? * rgamma(sigma);
    let mut check = HypothesisCheck::new(
        "growth",
        ratio,
        1.0,
        format!("max ||g|| / (k1 + k2 e^(-delta t)) along the trajectory; t^w I[bound] at t_1 = {near_zero:.3e}"),
    );
    check.passed &= w + sigma > 0.0;
    Ok(check)
}

/// `||h(u)|| <= k_bound_h3` for the given trajectory.
pub fn audit_nonlocal_bound(solver: &Solver, traj: &Trajectory) -> HypothesisCheck {
    let n = solver.nonlocal_h(traj).l2_norm();
    HypothesisCheck::new("nonlocal_bound", n, solver.spec().bounds.k_bound_h3, "||h(u)||".into())
}

/// `sup_t t^w ||S_{a,g}(t)|| (||u0|| + k) + t^w int_0^t (t-r)^{-ab-1}[k1 + k2 e^{-delta r}] dr <= r`,
/// with the supremum over the positive mesh nodes.
pub fn audit_ball_invariance(solver: &Solver) -> Result<HypothesisCheck> {
    let value = ball_bound_left_side(solver)?;
    Ok(HypothesisCheck::new(
        "ball_invariance",
        value,
        solver.config().radius_r,
        "sup of the ball bound left side over the mesh".into(),
    ))
}

pub fn ball_bound_left_side(solver: &Solver) -> Result<f64> {
    let spec = solver.spec();
    let p = spec.params;
    let b = spec.bounds;
    let sigma = -p.alpha * p.beta;
    let w = p.weight_exponent();
    let data = spec.u0.l2_norm() + b.k_bound_h3;
    let fam = solver.families();
    let mut sup = 0.0f64;
    for j in 1..solver.grid().len() {
        let t = solver.grid().t(j);
        let mut s_norm = 0.0f64;
        for &l in spec.op.eigenvalues() {
            s_norm = s_norm.max(fam.s_alpha_gamma(l, t)?.abs());
        }
        let tw = t.powf(w);
        let v = tw * s_norm * data + tw * growth_convolution(b.k1, b.k2, b.delta, sigma, t)?;
        sup = sup.max(v);
    }
    Ok(sup)
}

/// Modulus of continuity of the weighted images: per gap `d`, the maximum
/// of `||t2^w (Py)(t2) - t1^w (Py)(t1)||` over sample images and node pairs
/// with `0 < t2 - t1 <= d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectTable {
    pub gaps: Vec<f64>,
    pub max_defects: Vec<f64>,
    /// The same maximum restricted to `t1` at the first positive node.
    pub origin_defects: Vec<f64>,
}

impl DefectTable {
    pub fn strictly_decreasing(&self) -> bool {
        self.max_defects.windows(2).all(|w| w[1] < w[0])
    }

    pub fn origin_strictly_decreasing(&self) -> bool {
        self.origin_defects.windows(2).all(|w| w[1] < w[0])
    }
}

pub fn equicontinuity_probe(solver: &Solver, samples: &[Trajectory], gaps: &[f64]) -> Result<DefectTable> {
    if gaps.iter().any(|g| !(*g > 0.0)) {
        return Err(Error::domain("gap buckets must be positive"));
    }
    let grid = solver.grid();
    let len = grid.len();
    // weighted images, positive nodes only
    let images: Vec<Vec<SpectralField>> = samples
        .iter()
        .map(|s| {
            let p = solver.picard_map(s)?;
            Ok((1..len).map(|j| p.states[j].scaled_by(|_| p.weight(j))).collect())
        })
        .collect::<Result<_>>()?;
    let widest = gaps.iter().cloned().fold(0.0, f64::max);
    // (gap, defect) for every admissible pair, then bucketed
    let pairs: Vec<Vec<(f64, f64, bool)>> = solver.config().exec.map(len - 1, |a| {
        let mut out = Vec::new();
        for b in a + 1..len - 1 {
            let gap = grid.t(b + 1) - grid.t(a + 1);
            if gap > widest {
                break;
            }
            let d = images.iter().map(|img| img[b].sub(&img[a]).l2_norm()).fold(0.0, f64::max);
            out.push((gap, d, a == 0));
        }
        out
    });
    let mut max_defects = vec![0.0f64; gaps.len()];
    let mut origin_defects = vec![0.0f64; gaps.len()];
    for &(gap, d, at_origin) in pairs.iter().flatten() {
        for (k, &g) in gaps.iter().enumerate() {
            if gap <= g {
                max_defects[k] = max_defects[k].max(d);
                if at_origin {
                    origin_defects[k] = origin_defects[k].max(d);
                }
            }
        }
    }
    Ok(DefectTable { gaps: gaps.to_vec(), max_defects, origin_defects })
}

/// `||t2^w u(t2) - t1^w u(t1)||`.
pub fn weighted_difference(traj: &Trajectory, j1: usize, j2: usize) -> f64 {
    let mut a = traj.states[j2].clone();
    a.coeffs.iter_mut().for_each(|c| *c *= traj.weight(j2));
    let mut b = traj.states[j1].clone();
    b.coeffs.iter_mut().for_each(|c| *c *= traj.weight(j1));
    a.sub(&b).l2_norm()
}

/// Seeded random members of the ball: weighted coefficients
/// `(A_n + B_n t) / n^2` with `A_n, B_n` uniform in `[-1, 1]`, rescaled to a
/// weighted norm of `fraction * radius`.
pub fn random_ball_samples(solver: &Solver, count: usize, fraction: f64, seed: u64) -> Vec<Trajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes = solver.spec().modes();
    let w = solver.spec().params.weight_exponent();
    let grid = solver.grid();
    let target = fraction * solver.config().radius_r;
    (0..count)
        .map(|_| {
            let ab: Vec<(f64, f64)> = (1..=modes)
                .map(|n| {
                    let s = 1.0 / (n * n) as f64;
                    (s * rng.random_range(-1.0..=1.0), s * rng.random_range(-1.0..=1.0))
                })
                .collect();
            let mut traj = Trajectory::zeros(grid, modes, w);
            for (j, state) in traj.states.iter_mut().enumerate() {
                let t = grid.t(j);
                *state = SpectralField { coeffs: ab.iter().map(|(a, b)| a + b * t).collect() };
            }
            // weighted values are stored above; rescale, then unweight
            let sup = traj.states.iter().map(SpectralField::l2_norm).fold(0.0, f64::max);
            let scale = if sup > 0.0 { target / sup } else { 0.0 };
            for (j, state) in traj.states.iter_mut().enumerate() {
                let unweight = if j == 0 { 1.0 } else { grid.t(j).powf(-w) };
                state.coeffs.iter_mut().for_each(|c| *c *= scale * unweight);
            }
            traj
        })
        .collect()
}
