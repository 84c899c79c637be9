//! The Wright-type function `M_a(theta) = sum_{n>=1} (-theta)^{n-1} / (Gamma(1 - a n) (n-1)!)`.
//!
//! Near the origin the alternating series is summed with compensation.
//! Further out the series cancels catastrophically (for `a = 1/4` and
//! `theta = 30` the largest term is ~1e16 while the sum is ~1e-20), so we
//! switch to the positive integral
//!
//! `M_a(theta) = theta^{a/(1-a)} / (pi (1-a)) int_0^pi A(p) exp(-theta^{1/(1-a)} A(p)) dp`,
//! `A(p) = sin(a p)^{a/(1-a)} sin((1-a) p) / sin(p)^{1/(1-a)}`,
//!
//! which follows from the one-sided stable density through
//! `M_a(theta) = theta^{-1-1/a} f_a(theta^{-1/a}) / a`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{self, gauss_legendre_16, PanelRule};
use crate::specfun::gamma::rgamma;

/// Below this argument the power series is used.
pub const WRIGHT_SERIES_RADIUS: f64 = 1.0;

/// Decay exponent at the subordination cutoff: `M_a(cutoff) ~ exp(-60)`.
const TAIL_EXPONENT: f64 = 60.0;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("Wright function needs 0 < alpha < 1 (got {alpha})")));
    }
    Ok(())
}

/// `M_alpha(theta)` for `0 < alpha < 1`, `theta >= 0`.
pub fn wright_m(alpha: f64, theta: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(theta >= 0.0) {
        return Err(Error::domain(format!("Wright function needs theta >= 0 (got {theta})")));
    }
    Ok(if theta <= WRIGHT_SERIES_RADIUS { wright_series(alpha, theta) } else { wright_integral(alpha, theta) })
}

/// Compensated power series. Accurate for moderate `theta` only.
pub fn wright_series(alpha: f64, theta: f64) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut power = 1.0; // (-theta)^{n-1} / (n-1)!
    let mut small = 0;
    for n in 1..400 {
        let term = power * rgamma(1.0 - alpha * n as f64);
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if term.abs() <= 1e-18 * (sum + comp).abs() {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
        power *= -theta / n as f64;
        if power == 0.0 {
            break;
        }
    }
    sum + comp
}

fn kanter_ln_a(alpha: f64, phi: f64) -> f64 {
    let q = 1.0 / (1.0 - alpha);
    alpha * q * (alpha * phi).sin().ln() + ((1.0 - alpha) * phi).sin().ln() - q * phi.sin().ln()
}

/// Integral representation; valid for every `theta > 0`, used beyond the series radius.
pub fn wright_integral(alpha: f64, theta: f64) -> f64 {
    if theta == 0.0 {
        return rgamma(1.0 - alpha);
    }
    let q = 1.0 / (1.0 - alpha);
    let x = theta.powf(q);
    let a0 = alpha.powf(alpha * q) * (1.0 - alpha);
    // A is increasing on (0, pi): bracket the point where the exponent has decayed by e^-60
    let excess = |phi: f64| x * (kanter_ln_a(alpha, phi).exp() - a0);
    let (mut lo, mut hi) = (0.0, PI);
    if excess(PI * (1.0 - 1e-12)) > 60.0 {
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if excess(mid) > 60.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let f = |phi: f64| {
        let a = kanter_ln_a(alpha, phi).exp();
        a * (-x * (a - a0)).exp()
    };
    // uniform panels on the first half, then geometric grading into the layer at `hi`
    let gl = gauss_legendre_16();
    let mut integral = PanelRule::new(0.0, 0.5 * hi, hi / 16.0, gl).integrate(f);
    let mut gap = 0.5 * hi;
    while gap > hi * 1e-15 {
        integral += gl.integrate(hi - gap, hi - 0.5 * gap, f);
        gap *= 0.5;
    }
    theta.powf(alpha * q) / (PI * (1.0 - alpha)) * (-x * a0).exp() * integral
}

/// Argument beyond which `M_alpha` is below roughly `exp(-60)`.
///
/// From the leading asymptotics `M_a(t) ~ exp(-(1-a)(a^a t)^{1/(1-a)})`,
/// rounded up to a multiple of the subordination panel width 0.5.
pub fn wright_tail_cutoff(alpha: f64) -> f64 {
    let t = (TAIL_EXPONENT / (1.0 - alpha)).powf(1.0 - alpha) / alpha.powf(alpha);
    ((t / 0.5).ceil() * 0.5).max(2.0)
}

/// Upper bound of `M_alpha(theta)` from the leading asymptotic term, for documentation of the cutoff.
pub fn wright_tail_bound(alpha: f64, theta: f64) -> f64 {
    (-(1.0 - alpha) * (alpha.powf(alpha) * theta).powf(1.0 / (1.0 - alpha))).exp()
}

/// `int_0^inf theta^sigma M_alpha(theta) d theta` by 16-point Gauss-Legendre
/// panels of width 0.5 on `[0, cutoff]`.
pub fn wright_moment(alpha: f64, sigma: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(sigma > -1.0) {
        return Err(Error::domain(format!("moment order must exceed -1 (got {sigma})")));
    }
    let rule = PanelRule::new(0.0, wright_tail_cutoff(alpha), 0.5, gauss_legendre_16());
    let mut s = 0.0;
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        s += w * x.powf(sigma) * wright_m(alpha, *x)?;
    }
    Ok(s)
}

/// Absolute defect of the Laplace-type identity
/// `int_0^inf a theta^{-a-1} e^{-r theta} M_a(theta^{-a}) d theta = exp(-r^a)`.
pub fn wright_laplace_check(alpha: f64, r: f64) -> Result<f64> {
    Ok(wright_laplace_sides(alpha, r)?.defect())
}

/// Both sides of the Laplace identity.
#[derive(Debug, Clone, Copy)]
pub struct LaplaceSides {
    pub integral: f64,
    pub closed_form: f64,
}

impl LaplaceSides {
    pub fn defect(&self) -> f64 {
        (self.integral - self.closed_form).abs()
    }
}

pub fn wright_laplace_sides(alpha: f64, r: f64) -> Result<LaplaceSides> {
    check_alpha(alpha)?;
    if !(r > 0.0) {
        return Err(Error::domain(format!("Laplace check needs r > 0 (got {r})")));
    }
    let f = |theta: f64| {
        if theta <= 0.0 {
            return 0.0;
        }
        let m = if theta.powf(-alpha) <= WRIGHT_SERIES_RADIUS {
            wright_series(alpha, theta.powf(-alpha))
        } else {
            wright_integral(alpha, theta.powf(-alpha))
        };
        alpha * theta.powf(-alpha - 1.0) * (-r * theta).exp() * m
    };
    // e^{-r theta} theta^{-a-1} / Gamma(1-a) is below 1e-20 past this point
    let upper = 1.0 + 50.0 / r;
    let head = quad::adaptive(f, 0.0, 1.0, 1e-14, 1e-13, 4000)?;
    let tail = quad::adaptive(f, 1.0, upper, 1e-14, 1e-13, 4000)?;
    Ok(LaplaceSides { integral: head.value + tail.value, closed_form: (-r.powf(alpha)).exp() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::gamma_unchecked;
    use approx::assert_relative_eq;

    #[test]
    fn value_at_origin() {
        assert_relative_eq!(wright_m(0.5, 0.0).unwrap(), 0.564_189_583_547_756_3, max_relative = 1e-14);
        assert_relative_eq!(wright_m(0.25, 0.0).unwrap(), rgamma(0.75), max_relative = 1e-14);
    }

    #[test]
    fn half_order_closed_form() {
        for theta in [0.0, 0.3, 1.0, 1.7, 3.0, 6.0, 12.0, 25.0] {
            let want = (-theta * theta / 4.0f64).exp() / PI.sqrt();
            assert_relative_eq!(wright_m(0.5, theta).unwrap(), want, max_relative = 1e-11);
        }
        assert_relative_eq!(wright_m(0.5, 1.0).unwrap(), 0.439_391_289_467_722_4, max_relative = 1e-12);
    }

    // reference values: 120-digit series summation
    #[test]
    fn matches_high_precision_series() {
        let cases = [
            (0.25, 1.5, 0.251_724_944_038_526_526_3),
            (0.25, 10.0, 0.000_012_708_213_116_565_744_653),
            (0.25, 30.0, 1.749_683_418_930_717_599e-20),
            (0.75, 2.0, 0.225_140_070_148_967_499_1),
            (0.75, 4.0, 4.504_628_075_192_351_682e-12),
            (0.5, 0.7, 0.499_141_856_072_304_857_3),
            (0.75, 0.5, 0.445_024_841_238_736_697_5),
            (0.1, 5.0, 0.007_797_266_934_475_791_49),
        ];
        for (a, theta, want) in cases {
            assert_relative_eq!(wright_m(a, theta).unwrap(), want, max_relative = 1e-10);
        }
    }

    #[test]
    fn series_and_integral_overlap() {
        for a in [0.1, 0.25, 0.5, 0.75, 0.9] {
            for theta in [0.5, 0.8, 1.0, 1.5] {
                if a > 0.8 && theta > 1.0 {
                    // series terms overflow before they decay
                    continue;
                }
                let s = wright_series(a, theta);
                let i = wright_integral(a, theta);
                assert_relative_eq!(s, i, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn first_moment() {
        let got = wright_moment(0.75, 1.0).unwrap();
        assert_relative_eq!(got, 1.088_065_252_131_694_3, max_relative = 1e-10);
        assert_relative_eq!(got, 1.0 / gamma_unchecked(1.75), max_relative = 1e-10);
    }

    #[test]
    fn laplace_identity_small_defect() {
        assert!(wright_laplace_check(0.5, 1.0).unwrap() <= 1e-8);
        assert!(wright_laplace_check(0.75, 2.0).unwrap() <= 1e-8);
        let sides = wright_laplace_sides(0.5, 25.0).unwrap();
        assert!(sides.integral < 1e-2 && sides.closed_form < 1e-2);
        assert!(sides.defect() <= 1e-8);
    }

    #[test]
    fn rejects_bad_order() {
        assert!(wright_m(1.0, 0.5).is_err());
        assert!(wright_m(0.0, 0.5).is_err());
        assert!(wright_m(0.5, -1.0).is_err());
        assert!(wright_laplace_check(1.2, 1.0).is_err());
    }

    #[test]
    fn cutoff_is_where_tail_is_negligible() {
        for a in [0.25, 0.5, 0.75] {
            let c = wright_tail_cutoff(a);
            assert!(wright_m(a, c).unwrap() < 1e-22, "alpha={a} cutoff={c}");
            assert!(wright_tail_bound(a, c) <= (-59.0f64).exp());
        }
    }

    #[test]
    fn moments_match_gamma_ratio() {
        for a in [0.25, 0.5, 0.75] {
            for sigma in [0.0, 1.0, 2.0, 3.5] {
                let exact = gamma_unchecked(1.0 + sigma) / gamma_unchecked(1.0 + a * sigma);
                assert_relative_eq!(wright_moment(a, sigma).unwrap(), exact, max_relative = 1e-8);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn nonnegative(theta in 0.0f64..50.0, idx in 0usize..3) {
            let a = [0.25, 0.5, 0.75][idx];
            proptest::prop_assert!(wright_m(a, theta).unwrap() >= -1e-12);
        }

        #[test]
        fn half_order_matches_gaussian(theta in 0.0f64..12.0) {
            let exact = (-theta * theta / 4.0).exp() / std::f64::consts::PI.sqrt();
            let m = wright_m(0.5, theta).unwrap();
            proptest::prop_assert!((m - exact).abs() <= 1e-13 + 1e-10 * exact);
        }
    }
}
