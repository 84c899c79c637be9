//! Quadrature rules: Gauss-Legendre, Gauss-Jacobi, composite panels and an
//! adaptive Gauss-Kronrod integrator.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::specfun::gamma::ln_gamma;

/// Nodes and weights of an interpolatory rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Integrates `f` over `[a, b]`, mapping the reference interval affinely.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(mid + half * x);
        }
        s * half
    }
}

/// Gauss-Legendre rule with `n` points, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

/// The 16-point Gauss-Legendre rule used by all panel quadratures.
pub fn gauss_legendre_16() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Gauss-Jacobi rule for the weight `(1 - x)^a (1 + x)^b` on `[-1, 1]`,
/// computed by the Golub-Welsch eigenvalue method.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<Rule> {
    if n == 0 || a <= -1.0 || b <= -1.0 {
        return Err(Error::domain(format!("gauss-jacobi needs n >= 1 and exponents > -1 (got n={n}, a={a}, b={b})")));
    }
    let ab = a + b;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    jac[(0, 0)] = (b - a) / (ab + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        jac[(k, k)] = (b * b - a * a) / (s * (s + 2.0));
        let off2 = if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        let off = off2.sqrt();
        jac[(k, k - 1)] = off;
        jac[(k - 1, k)] = off;
    }
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(ab + 2.0)).exp();
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> =
        (0..n).map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() })
}

/// Composite rule: `[a, b]` split into equal panels of at most `width`,
/// each carrying a Gauss-Legendre rule.
#[derive(Debug, Clone)]
pub struct PanelRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PanelRule {
    pub fn new(a: f64, b: f64, width: f64, base: &Rule) -> Self {
        let panels = (((b - a) / width).ceil() as usize).max(1);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * base.nodes.len());
        let mut weights = Vec::with_capacity(panels * base.nodes.len());
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (x, w) in base.nodes.iter().zip(&base.weights) {
                nodes.push(lo + 0.5 * h * (x + 1.0));
                weights.push(0.5 * h * w);
            }
        }
        PanelRule { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15(a: f64, b: f64, f: &impl Fn(f64) -> f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub segments: usize,
}

/// Globally adaptive Gauss-Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// Bisects the segment with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol * |I|)`.
pub fn adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<Estimate> {
    let mut segs = vec![{
        let (v, e) = gk15(a, b, &f);
        (a, b, v, e)
    }];
    loop {
        let value: f64 = segs.iter().map(|s| s.2).sum();
        let error: f64 = segs.iter().map(|s| s.3).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Estimate { value, error, segments: segs.len() });
        }
        if segs.len() >= max_segments {
            return Err(Error::Accuracy {
                what: "adaptive quadrature".into(),
                achieved: error,
                requested: abs_tol.max(rel_tol * value.abs()),
            });
        }
        let (idx, _) = segs.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).expect("non-empty");
        let (lo, hi, _, _) = segs.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(lo, mid, &f);
        let (v2, e2) = gk15(mid, hi, &f);
        segs.push((lo, mid, v1, e1));
        segs.push((mid, hi, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = gauss_legendre(16);
        let sum_w: f64 = r.weights.iter().sum();
        assert_relative_eq!(sum_w, 2.0, max_relative = 1e-14);
        // degree 31 is the exactness limit
        let v = r.integrate(0.0, 1.0, |x| x.powi(31));
        assert_relative_eq!(v, 1.0 / 32.0, max_relative = 1e-13);
        let odd = gauss_legendre(7);
        assert_eq!(odd.nodes[3], 0.0);
        assert_relative_eq!(odd.integrate(-1.0, 1.0, |x| x.powi(12)), 2.0 / 13.0, max_relative = 1e-13);
    }

    #[test]
    fn jacobi_handles_endpoint_singularity() {
        // int_{-1}^{1} (1+x)^{-1/2} dx = 2 sqrt(2)
        let r = gauss_jacobi(12, 0.0, -0.5).unwrap();
        let v: f64 = r.weights.iter().sum();
        assert_relative_eq!(v, 2.0 * 2f64.sqrt(), max_relative = 1e-13);
        // int_{-1}^{1} (1-x)^{-1/4} (1+x) dx = 2^{7/4} B(3/4, 2)
        let r = gauss_jacobi(8, -0.25, 0.0).unwrap();
        let v = r.integrate(-1.0, 1.0, |x| 1.0 + x);
        let exact = 2f64.powf(1.75) * (ln_gamma(0.75) + ln_gamma(2.0) - ln_gamma(2.75)).exp();
        assert_relative_eq!(v, exact, max_relative = 1e-13);
    }

    #[test]
    fn jacobi_with_legendre_weight_matches_legendre() {
        let j = gauss_jacobi(10, 0.0, 0.0).unwrap();
        let l = gauss_legendre(10);
        for (a, b) in j.nodes.iter().zip(&l.nodes) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn jacobi_rejects_bad_exponents() {
        assert!(gauss_jacobi(4, -1.0, 0.0).is_err());
        assert!(gauss_jacobi(0, 0.0, 0.0).is_err());
    }

    #[test]
    fn adaptive_resolves_peaks() {
        let est = adaptive(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12, 1e-12, 500).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert_relative_eq!(est.value, exact, max_relative = 1e-11);
    }

    #[test]
    fn adaptive_reports_failure() {
        let r = adaptive(|x| (1.0 / x).sin() / x, 1e-9, 1.0, 1e-14, 1e-14, 8);
        assert!(matches!(r, Err(Error::Accuracy { .. })));
    }

    #[test]
    fn panel_rule_matches_exact() {
        let r = PanelRule::new(0.0, 10.0, 0.5, gauss_legendre_16());
        assert_eq!(r.nodes.len(), 20 * 16);
        assert_relative_eq!(r.integrate(|x| (-x).exp()), 1.0 - (-10.0f64).exp(), max_relative = 1e-14);
    }
}
