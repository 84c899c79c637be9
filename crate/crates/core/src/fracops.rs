//! Grid realizations of the Riemann-Liouville integral and derivative, the
//! Caputo derivative and the Hilfer derivative.
//!
//! Functions are sampled on a graded mesh `t_j = T (j/M)^q`. Each sample
//! carries an [`Origin`] tag describing its behaviour at `t = 0`, which the
//! integral uses to treat the first subinterval exactly and the derivative
//! uses to factor out the leading power before differencing.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::quad::{gauss_jacobi, Rule};
use crate::specfun::gamma::{gamma_unchecked, rgamma};

/// Exponents closer than this are treated as equal (e.g. `p + a == 0`).
const POWER_EPS: f64 = 1e-12;

/// Graded time mesh on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    grading: f64,
    nodes: Vec<f64>,
}

impl TimeGrid {
    /// `intervals + 1` nodes `T (j/M)^q`.
    pub fn graded(horizon: f64, intervals: usize, grading: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::domain(format!("horizon must be positive (got {horizon})")));
        }
        if intervals < 1 {
            return Err(Error::domain("a time grid needs at least one interval"));
        }
        if !(grading >= 1.0 && grading.is_finite()) {
            return Err(Error::domain(format!("grading must be >= 1 (got {grading})")));
        }
        let m = intervals as f64;
        let mut nodes: Vec<f64> = (0..=intervals).map(|j| horizon * (j as f64 / m).powf(grading)).collect();
        nodes[intervals] = horizon;
        Ok(TimeGrid { horizon, grading, nodes })
    }

    pub fn uniform(horizon: f64, intervals: usize) -> Result<Self> {
        Self::graded(horizon, intervals, 1.0)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    /// Number of subintervals `M`.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn t(&self, j: usize) -> f64 {
        self.nodes[j]
    }

    /// The same grading with twice as many intervals.
    pub fn refined(&self) -> Self {
        Self::graded(self.horizon, 2 * self.intervals(), self.grading).expect("refining a valid grid")
    }

    /// Index of the node nearest to `t` and the distance to it.
    pub fn nearest(&self, t: f64) -> (usize, f64) {
        let idx = self.nodes.partition_point(|&x| x < t);
        let best = [idx.saturating_sub(1), idx.min(self.intervals())]
            .into_iter()
            .min_by(|&a, &b| (self.nodes[a] - t).abs().total_cmp(&(self.nodes[b] - t).abs()))
            .unwrap_or(0);
        (best, (self.nodes[best] - t).abs())
    }
}

/// Behaviour of a sampled function at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Origin {
    /// Bounded and continuous at 0; `values[0]` is the value there.
    Regular,
    /// Behaves like `c t^p` as `t -> 0` with `p > -1`. `values[0]` holds the
    /// limit for `p > 0` (zero) and is NaN, i.e. flagged, for `p < 0`.
    Power(f64),
}

impl Origin {
    fn is_singular(self) -> bool {
        matches!(self, Origin::Power(p) if p < 0.0)
    }
}

/// Node values of a scalar function on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFn {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub origin: Origin,
}

impl SampledFn {
    pub fn new(grid: TimeGrid, values: Vec<f64>, origin: Origin) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain(format!("{} values for a grid of {} nodes", values.len(), grid.len())));
        }
        if let Origin::Power(p) = origin {
            if !(p > -1.0) {
                return Err(Error::domain(format!("origin exponent must exceed -1 (got {p})")));
            }
        }
        Ok(SampledFn { grid, values, origin })
    }

    /// Samples a function that is regular at 0.
    pub fn from_fn(grid: &TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        SampledFn { grid: grid.clone(), values, origin: Origin::Regular }
    }

    /// Samples `f`, which behaves like `t^p` at the origin.
    pub fn from_fn_power(grid: &TimeGrid, p: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut values: Vec<f64> = grid.nodes().iter().map(|&t| f(t)).collect();
        values[0] = origin_value(p, 0.0);
        Self::new(grid.clone(), values, Origin::Power(p))
    }

    /// `t^p` on the grid.
    pub fn power(grid: &TimeGrid, p: f64) -> Result<Self> {
        if p == 0.0 {
            return Ok(Self::from_fn(grid, |_| 1.0));
        }
        Self::from_fn_power(grid, p, |t| t.powf(p))
    }

    /// Values at the positive nodes; the node at `t = 0` is excluded.
    pub fn interior(&self) -> &[f64] {
        &self.values[1..]
    }

    pub fn is_singular_at_origin(&self) -> bool {
        self.origin.is_singular()
    }

    /// Largest absolute difference over the positive nodes.
    pub fn max_abs_diff(&self, other: &SampledFn) -> f64 {
        self.interior().iter().zip(other.interior()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

fn origin_value(p: f64, limit: f64) -> f64 {
    if p.abs() <= POWER_EPS {
        limit
    } else if p > 0.0 {
        0.0
    } else {
        f64::NAN
    }
}

/// Product-integration weights of `I^a` on a fixed grid.
///
/// Row `j` holds the weights that map node values `f_0..f_j` to
/// `(I^a f)(t_j)`. Rows are stored packed, so memory is `O(M^2 / 2)`.
/// For a power-type origin the smooth factor `f / t^p` is interpolated,
/// linearly extrapolated on `[0, t_1]`, which makes row 1 reach `f_2`.
/// Building the table is the expensive part; applying it to many sampled
/// functions (one per spectral mode in the solver) is a dot product per row.
#[derive(Debug, Clone)]
pub struct RlWeights {
    order: f64,
    origin: Origin,
    grid: TimeGrid,
    packed: Vec<f64>,
    offsets: Vec<usize>,
}

impl RlWeights {
    pub fn new(grid: &TimeGrid, order: f64, origin: Origin) -> Result<Self> {
        Self::with_exec(grid, order, origin, Exec::default())
    }

    pub fn with_exec(grid: &TimeGrid, order: f64, origin: Origin, exec: Exec) -> Result<Self> {
        if !(order > 0.0 && order.is_finite()) {
            return Err(Error::domain(format!("fractional integral order must be > 0 (got {order})")));
        }
        let t = grid.nodes();
        let m = grid.intervals();
        let rows = match origin {
            Origin::Regular => exec.map(m + 1, |j| weight_row(t, j, order)),
            Origin::Power(p) if p > -1.0 => {
                let cells = PowerCells::new(t, order, p)?;
                exec.map(m + 1, |j| cells.row(t, j))
            }
            Origin::Power(p) => return Err(Error::domain(format!("origin exponent must exceed -1 (got {p})"))),
        };
        let mut packed = Vec::with_capacity((m + 1) * (m + 2) / 2 + 1);
        let mut offsets = Vec::with_capacity(m + 2);
        offsets.push(0);
        for row in rows {
            packed.extend(row);
            offsets.push(packed.len());
        }
        Ok(RlWeights { order, origin, grid: grid.clone(), packed, offsets })
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    /// Weights of row `j`: `j + 1` entries, except that row 1 of a
    /// power-origin table also reaches node 2.
    pub fn row(&self, j: usize) -> &[f64] {
        &self.packed[self.offsets[j]..self.offsets[j + 1]]
    }

    /// `(I^a f)(t_j)` for `j >= 1` from raw node values.
    pub fn apply_at(&self, values: &[f64], j: usize) -> f64 {
        let row = self.row(j);
        let skip = usize::from(self.origin != Origin::Regular);
        let mut s = 0.0;
        for i in skip..row.len() {
            s += row[i] * values[i];
        }
        s
    }

    /// Applies the weights to raw node values; index 0 of the result is the
    /// value at the origin according to [`RlWeights::output_origin`].
    pub fn apply_values(&self, values: &[f64]) -> Vec<f64> {
        debug_assert_eq!(values.len(), self.grid.len());
        let mut out = Vec::with_capacity(values.len());
        out.push(self.origin_output_value(values));
        for j in 1..values.len() {
            out.push(self.apply_at(values, j));
        }
        out
    }

    pub fn apply(&self, f: &SampledFn) -> Result<SampledFn> {
        if f.grid != self.grid || f.origin != self.origin {
            return Err(Error::Invariant("weights built for a different grid or origin".into()));
        }
        Ok(SampledFn { grid: self.grid.clone(), values: self.apply_values(&f.values), origin: self.output_origin() })
    }

    /// Origin behaviour of `I^a f`: exponent `p + a`, with `p = 0` for regular input.
    pub fn output_origin(&self) -> Origin {
        let q = match self.origin {
            Origin::Regular => self.order,
            Origin::Power(p) => p + self.order,
        };
        if q.abs() <= POWER_EPS {
            Origin::Regular
        } else {
            Origin::Power(q)
        }
    }

    fn origin_output_value(&self, values: &[f64]) -> f64 {
        match (self.origin, self.output_origin()) {
            (Origin::Power(p), Origin::Regular) => {
                // I^a (c t^{-a}) = c Gamma(1 - a), with c extrapolated from t_1, t_2
                let t = self.grid.nodes();
                let phi1 = values[1] / t[1].powf(p);
                let c = if t.len() > 2 {
                    let phi2 = values[2] / t[2].powf(p);
                    phi1 - t[1] * (phi2 - phi1) / (t[2] - t[1])
                } else {
                    phi1
                };
                c * gamma_unchecked(p + 1.0)
            }
            (_, Origin::Power(q)) => origin_value(q, 0.0),
            (Origin::Regular, Origin::Regular) => 0.0,
        }
    }
}

fn weight_row(t: &[f64], j: usize, a: f64) -> Vec<f64> {
    let mut w = vec![0.0; j + 1];
    let ga = rgamma(a);
    let tj = t[j];
    for i in 0..j {
        let h = t[i + 1] - t[i];
        let big = tj - t[i];
        // integral of (t_j - s)^{a-1} and of (t_j - s)^{a-1} (s - t_i) over the cell
        let r = (-h / big).ln_1p();
        let m0 = -big.powf(a) * (a * r).exp_m1() / a;
        let d1 = -big.powf(a + 1.0) * ((a + 1.0) * r).exp_m1() / (a + 1.0);
        let m1 = big * m0 - d1;
        w[i] += (m0 - m1 / h) * ga;
        w[i + 1] += m1 / h * ga;
    }
    w
}

/// Quadrature data for `f = s^p phi(s)` with `phi` piecewise linear.
///
/// On cell `i >= 1` the factor `s^p` times each hat function is folded into
/// the Gauss-Legendre weights, so each target node only needs the kernel at
/// 16 points. The cell ending at the target uses Gauss-Jacobi with the
/// kernel singularity as weight. On `[0, t_1]` `phi` is extrapolated
/// linearly from `t_1, t_2` and `s^p` is the Jacobi weight.
struct PowerCells {
    a: f64,
    p: f64,
    /// per cell: nodes, left-hat and right-hat weights
    smooth: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)>,
    /// per cell: exact-singularity weights for the left and right hat
    last: Vec<(f64, f64)>,
    head: Rule,
    head_last: Rule,
}

impl PowerCells {
    fn new(t: &[f64], a: f64, p: f64) -> Result<Self> {
        let gl = crate::quad::gauss_legendre_16();
        let gj = gauss_jacobi(16, a - 1.0, 0.0)?;
        let m = t.len() - 1;
        let mut smooth = Vec::with_capacity(m);
        let mut last = Vec::with_capacity(m);
        for i in 0..m {
            let (lo, hi) = (t[i], t[i + 1]);
            let h = hi - lo;
            let mut nodes = Vec::with_capacity(16);
            let mut wl = Vec::with_capacity(16);
            let mut wr = Vec::with_capacity(16);
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                let s = lo + 0.5 * h * (1.0 + x);
                let c = w * 0.5 * h * s.powf(p);
                nodes.push(s);
                wl.push(c * (hi - s) / h);
                wr.push(c * (s - lo) / h);
            }
            smooth.push((nodes, wl, wr));
            let (mut sl, mut sr) = (0.0, 0.0);
            for (x, w) in gj.nodes.iter().zip(&gj.weights) {
                let s = lo + 0.5 * h * (1.0 + x);
                let c = w * s.powf(p);
                sl += c * (hi - s) / h;
                sr += c * (s - lo) / h;
            }
            let scale = (0.5 * h).powf(a);
            last.push((sl * scale, sr * scale));
        }
        Ok(PowerCells { a, p, smooth, last, head: gauss_jacobi(16, 0.0, p)?, head_last: gauss_jacobi(16, a - 1.0, p)? })
    }

    /// Weights on `f_0..f_j`; the entry for `f_0` is zero.
    fn row(&self, t: &[f64], j: usize) -> Vec<f64> {
        let (a, p) = (self.a, self.p);
        let mut w = vec![0.0; j + 1];
        if j == 0 {
            return w;
        }
        let ga = rgamma(a);
        let tj = t[j];
        // weights on phi_i, converted to weights on f_i at the end
        let t1 = t[1];
        let half = 0.5 * t1;
        if j == 1 && t.len() > 2 {
            // row 1 reaches t_2 for the extrapolation of phi
            w.push(0.0);
            let d = t[2] - t1;
            let (mut h1, mut h2) = (0.0, 0.0);
            for (x, wt) in self.head_last.nodes.iter().zip(&self.head_last.weights) {
                let s = half * (1.0 + x);
                h1 += wt * (t[2] - s) / d;
                h2 += wt * (s - t1) / d;
            }
            let scale = half.powf(a + p);
            w[1] += h1 * scale;
            w[2] += h2 * scale;
        } else if j == 1 {
            let s: f64 = self.head_last.weights.iter().sum();
            w[1] += s * half.powf(a + p);
        } else {
            let d = t[2] - t1;
            let (mut h1, mut h2) = (0.0, 0.0);
            for (x, wt) in self.head.nodes.iter().zip(&self.head.weights) {
                let s = half * (1.0 + x);
                let k = wt * (tj - s).powf(a - 1.0);
                h1 += k * (t[2] - s) / d;
                h2 += k * (s - t1) / d;
            }
            let scale = half.powf(p + 1.0);
            w[1] += h1 * scale;
            w[2] += h2 * scale;
        }
        for i in 1..j {
            if i + 1 == j {
                let (sl, sr) = self.last[i];
                w[i] += sl;
                w[i + 1] += sr;
            } else {
                let (nodes, wl, wr) = &self.smooth[i];
                let (mut sl, mut sr) = (0.0, 0.0);
                for k in 0..nodes.len() {
                    let kern = (tj - nodes[k]).powf(a - 1.0);
                    sl += wl[k] * kern;
                    sr += wr[k] * kern;
                }
                w[i] += sl;
                w[i + 1] += sr;
            }
        }
        for i in 1..w.len() {
            w[i] *= ga / t[i].powf(p);
        }
        w
    }
}

/// `(I^a f)(t_j)` by piecewise-linear product integration.
pub fn rl_integral(order: f64, f: &SampledFn) -> Result<SampledFn> {
    RlWeights::new(&f.grid, order, f.origin)?.apply(f)
}

fn integral_or_identity(order: f64, f: &SampledFn) -> Result<SampledFn> {
    if order == 0.0 {
        Ok(f.clone())
    } else {
        rl_integral(order, f)
    }
}

/// First derivative on the grid by three-point non-uniform differences.
///
/// For an origin of type `t^q` the smooth factor `f / t^q` is differenced
/// and the product rule applied, which keeps the first nodes accurate.
pub fn grid_derivative(f: &SampledFn) -> SampledFn {
    let t = f.grid.nodes();
    match f.origin {
        Origin::Regular => {
            SampledFn { grid: f.grid.clone(), values: differences(t, &f.values), origin: Origin::Regular }
        }
        Origin::Power(q) => {
            let phi: Vec<f64> = (1..t.len()).map(|j| f.values[j] / t[j].powf(q)).collect();
            let dphi = differences(&t[1..], &phi);
            let mut values = Vec::with_capacity(t.len());
            let out = q - 1.0;
            let origin = if out.abs() <= POWER_EPS { Origin::Regular } else { Origin::Power(out) };
            // phi(0) by linear extrapolation, used only when the result is regular at 0
            let phi0 = phi[0] - t[1] * dphi[0];
            values.push(origin_value(out, q * phi0));
            for j in 1..t.len() {
                let tq = t[j].powf(q);
                values.push(q * tq / t[j] * phi[j - 1] + tq * dphi[j - 1]);
            }
            SampledFn { grid: f.grid.clone(), values, origin }
        }
    }
}

fn differences(t: &[f64], v: &[f64]) -> Vec<f64> {
    let n = t.len();
    if n == 1 {
        return vec![0.0];
    }
    if n == 2 {
        let d = (v[1] - v[0]) / (t[1] - t[0]);
        return vec![d, d];
    }
    let mut out = vec![0.0; n];
    {
        let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
        out[0] =
            -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * v[0] + (h1 + h2) / (h1 * h2) * v[1] - h1 / (h2 * (h1 + h2)) * v[2];
    }
    for j in 1..n - 1 {
        let (h1, h2) = (t[j] - t[j - 1], t[j + 1] - t[j]);
        out[j] = -h2 / (h1 * (h1 + h2)) * v[j - 1] + (h2 - h1) / (h1 * h2) * v[j] + h1 / (h2 * (h1 + h2)) * v[j + 1];
    }
    {
        let k = n - 1;
        let (h1, h2) = (t[k] - t[k - 1], t[k - 1] - t[k - 2]);
        out[k] = (2.0 * h1 + h2) / (h1 * (h1 + h2)) * v[k] - (h1 + h2) / (h1 * h2) * v[k - 1]
            + h1 / (h2 * (h1 + h2)) * v[k - 2];
    }
    out
}

fn check_order(order: f64) -> Result<()> {
    if order > 0.0 && order < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("derivative order must lie in (0, 1) (got {order})")))
    }
}

/// Riemann-Liouville derivative `D I^{1-a} f`.
pub fn rl_derivative(order: f64, f: &SampledFn) -> Result<SampledFn> {
    check_order(order)?;
    hilfer_path(order, 0.0, f)
}

/// Caputo derivative `I^{1-a} D f`.
pub fn caputo_derivative(order: f64, f: &SampledFn) -> Result<SampledFn> {
    check_order(order)?;
    hilfer_path(order, 1.0, f)
}

/// Hilfer derivative `I^{g(1-a)} D I^{(1-a)(1-g)} f` of order `a` and type `g`.
///
/// At `g = 0` and `g = 1` the outer or inner integral has order zero and is
/// skipped, so the result is the Riemann-Liouville or Caputo derivative
/// computed along exactly the same path.
pub fn hilfer_derivative(order: f64, type_g: f64, f: &SampledFn) -> Result<SampledFn> {
    check_order(order)?;
    if !(0.0..=1.0).contains(&type_g) {
        return Err(Error::domain(format!("Hilfer type must lie in [0, 1] (got {type_g})")));
    }
    hilfer_path(order, type_g, f)
}

fn hilfer_path(order: f64, type_g: f64, f: &SampledFn) -> Result<SampledFn> {
    let inner = (1.0 - order) * (1.0 - type_g);
    let outer = type_g * (1.0 - order);
    let g = integral_or_identity(inner, f)?;
    let dg = grid_derivative(&g);
    integral_or_identity(outer, &dg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(m: usize) -> TimeGrid {
        TimeGrid::graded(1.0, m, 2.0).unwrap()
    }

    fn power_integral_error(p: f64, a: f64, m: usize) -> f64 {
        let g = grid(m);
        let f = SampledFn::power(&g, p).unwrap();
        let out = rl_integral(a, &f).unwrap();
        let c = gamma_unchecked(p + 1.0) / gamma_unchecked(p + 1.0 + a);
        g.nodes()[1..].iter().zip(out.interior()).map(|(t, v)| (v - c * t.powf(p + a)).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn grid_shape() {
        let g = grid(4);
        assert_eq!(g.nodes(), &[0.0, 0.0625, 0.25, 0.5625, 1.0]);
        assert!(TimeGrid::graded(1.0, 0, 2.0).is_err());
        assert!(TimeGrid::graded(1.0, 4, 0.5).is_err());
        assert_eq!(g.nearest(0.3), (2, 0.04999999999999999));
        assert_eq!(g.refined().intervals(), 8);
    }

    #[test]
    fn first_order_integral_of_one_is_t() {
        let g = grid(20);
        let out = rl_integral(1.0, &SampledFn::from_fn(&g, |_| 1.0)).unwrap();
        for (t, v) in g.nodes().iter().zip(&out.values) {
            assert_relative_eq!(*v, *t, max_relative = 1e-13);
        }
    }

    #[test]
    fn half_integral_of_t() {
        let g = grid(50);
        let out = rl_integral(0.5, &SampledFn::from_fn(&g, |t| t)).unwrap();
        assert_relative_eq!(*out.values.last().unwrap(), 0.752_252_778_063_675_2, max_relative = 1e-13);
    }

    #[test]
    fn integrals_compose() {
        let err = |m: usize| {
            let g = grid(m);
            let f = SampledFn::from_fn(&g, |t| t * t);
            let composed = rl_integral(0.7, &rl_integral(0.3, &f).unwrap()).unwrap();
            let direct = rl_integral(1.0, &f).unwrap();
            assert!(composed.max_abs_diff(&direct) < 1e-4);
            (composed.values[m] - 1.0 / 3.0).abs()
        };
        let (e1, e2) = (err(100), err(200));
        assert!(e2 < 2e-5 && (e1 / e2).log2() > 1.8, "{e1} {e2}");
    }

    #[test]
    fn power_calculus_converges() {
        for p in [0.5, 1.0, 2.0] {
            for a in [0.25, 0.5, 0.75] {
                let e1 = power_integral_error(p, a, 40);
                let e2 = power_integral_error(p, a, 80);
                if e1 < 1e-13 {
                    continue; // exact for linear data
                }
                let order = (e1 / e2).log2();
                assert!(order >= 1.5, "p={p} a={a} order={order} e1={e1} e2={e2}");
            }
        }
    }

    #[test]
    fn rl_derivative_annihilates_kernel_power() {
        let g = grid(100);
        let f = SampledFn::power(&g, -0.5).unwrap();
        let d = rl_derivative(0.5, &f).unwrap();
        assert!(d.interior().iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn rl_derivative_of_constant() {
        let g = grid(100);
        let d = rl_derivative(0.5, &SampledFn::from_fn(&g, |_| 1.0)).unwrap();
        for (t, v) in g.nodes()[1..].iter().zip(d.interior()) {
            assert_relative_eq!(*v, t.powf(-0.5) * rgamma(0.5), max_relative = 1e-10);
        }
        assert!(d.is_singular_at_origin());
    }

    #[test]
    fn rl_derivative_near_integer_order() {
        let mut errs = Vec::new();
        for m in [50, 100] {
            let g = grid(m);
            let d = rl_derivative(0.999, &SampledFn::from_fn(&g, |t| t * t)).unwrap();
            errs.push((d.values[m] - 2.0).abs());
        }
        assert!(errs[1] < 1e-2);
    }

    #[test]
    fn caputo_kills_constants() {
        let g = grid(30);
        let d = caputo_derivative(0.4, &SampledFn::from_fn(&g, |_| 3.0)).unwrap();
        assert!(d.values.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn caputo_of_powers() {
        let g = grid(100);
        let d = caputo_derivative(0.5, &SampledFn::from_fn(&g, |t| t)).unwrap();
        for (t, v) in g.nodes()[1..].iter().zip(d.interior()) {
            assert_relative_eq!(*v, t.sqrt() * rgamma(1.5), max_relative = 1e-10);
        }
        let d = caputo_derivative(0.25, &SampledFn::from_fn(&g, |t| t * t)).unwrap();
        for (t, v) in g.nodes()[1..].iter().zip(d.interior()) {
            assert_relative_eq!(*v, 2.0 * t.powf(1.75) * rgamma(2.75), max_relative = 1e-8);
        }
    }

    #[test]
    fn hilfer_endpoints_share_the_path() {
        let g = grid(80);
        let f = SampledFn::from_fn(&g, |t| (2.0 * t).sin() + t);
        let rl = rl_derivative(0.6, &f).unwrap();
        let h0 = hilfer_derivative(0.6, 0.0, &f).unwrap();
        assert_eq!(rl.interior(), h0.interior());
        let cap = caputo_derivative(0.6, &f).unwrap();
        let h1 = hilfer_derivative(0.6, 1.0, &f).unwrap();
        assert_eq!(cap.values, h1.values);
    }

    #[test]
    fn hilfer_annihilates_its_kernel_power() {
        let (a, gm) = (0.75, 0.5);
        let g = grid(100);
        let f = SampledFn::power(&g, (1.0 - a) * (gm - 1.0)).unwrap();
        let d = hilfer_derivative(a, gm, &f).unwrap();
        assert!(d.interior().iter().all(|v| v.abs() < 1e-10), "{:?}", &d.values[..4]);
    }

    #[test]
    fn hilfer_lies_between_rl_and_caputo() {
        let g = grid(100);
        let f = SampledFn::from_fn(&g, |t| t);
        let a = 0.6;
        let rl = hilfer_derivative(a, 0.0, &f).unwrap();
        let mid = hilfer_derivative(a, 0.5, &f).unwrap();
        let cap = hilfer_derivative(a, 1.0, &f).unwrap();
        for j in 1..g.len() {
            let (lo, hi) = (rl.values[j].min(cap.values[j]), rl.values[j].max(cap.values[j]));
            assert!(
                mid.values[j] >= lo - 1e-9 && mid.values[j] <= hi + 1e-9,
                "node {j}: {} {} {}",
                rl.values[j],
                mid.values[j],
                cap.values[j]
            );
        }
    }

    #[test]
    fn left_inverse() {
        let g = grid(200);
        let f = SampledFn::from_fn(&g, |t| (3.0 * t).cos());
        let back = rl_derivative(0.4, &rl_integral(0.4, &f).unwrap()).unwrap();
        assert!(back.max_abs_diff(&f) < 1e-3, "{}", back.max_abs_diff(&f));
    }

    #[test]
    fn rejects_bad_orders() {
        let g = grid(4);
        let f = SampledFn::from_fn(&g, |t| t);
        assert!(rl_integral(0.0, &f).is_err());
        assert!(rl_derivative(1.0, &f).is_err());
        assert!(hilfer_derivative(0.5, 1.5, &f).is_err());
        assert!(SampledFn::power(&g, -1.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn integral_is_linear(a in 0.1f64..1.5, c in -3.0f64..3.0) {
            let g = grid(16);
            let f = SampledFn::from_fn(&g, |t| t.exp());
            let cf = SampledFn::from_fn(&g, |t| c * t.exp());
            let lhs = rl_integral(a, &cf).unwrap();
            let rhs = rl_integral(a, &f).unwrap();
            for (x, y) in lhs.interior().iter().zip(rhs.interior()) {
                proptest::prop_assert!((x - c * y).abs() <= 1e-12 * (1.0 + y.abs()));
            }
        }

        #[test]
        fn integral_of_positive_is_positive(a in 0.05f64..2.0) {
            let g = grid(12);
            let f = SampledFn::from_fn(&g, |t| 1.0 + t * t);
            let out = rl_integral(a, &f).unwrap();
            proptest::prop_assert!(out.interior().iter().all(|v| *v > 0.0));
        }
    }
}
