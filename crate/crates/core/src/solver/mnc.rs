use crate::error::{Error, Result};
use crate::operators::FracParams;
use crate::specfun::ln_gamma;

/// The sequence
/// `a_n = K^n T^{-n a b} Gamma(-a b)^n Gamma(-a b + c) / Gamma(-(n+1) a b + c)`,
/// `c = g (1 + a b)`, `K = 4 C_p k_lip`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionSequence {
    /// `ln a_1 .. ln a_{n_max}`.
    pub log_terms: Vec<f64>,
    /// First `n <= n_max` with `a_m < 1` for every `m >= n`.
    pub n0: Option<usize>,
}

impl ContractionSequence {
    /// `a_1 .. a_{n_max}`; may overflow to infinity before `n0`.
    pub fn terms(&self) -> Vec<f64> {
        self.log_terms.iter().map(|l| l.exp()).collect()
    }

    pub fn term(&self, n: usize) -> Option<f64> {
        self.log_terms.get(n.checked_sub(1)?).map(|l| l.exp())
    }

    /// `a_{n+1} < a_n` for all `n0 <= n < n_max`.
    pub fn decreasing_after_n0(&self) -> bool {
        match self.n0 {
            None => false,
            Some(n0) => self.log_terms[n0 - 1..].windows(2).all(|w| w[1] < w[0]),
        }
    }
}

struct Coefficients {
    log_step: f64,
    sigma: f64,
    c: f64,
    log_num: f64,
}

impl Coefficients {
    fn new(params: &FracParams, c_p: f64, k_lip: f64) -> Result<Self> {
        if !(c_p > 0.0 && k_lip > 0.0 && c_p.is_finite() && k_lip.is_finite()) {
            return Err(Error::domain("C_p and k_lip must be positive and finite"));
        }
        let sigma = -params.alpha * params.beta;
        if !(sigma > 0.0) {
            return Err(Error::domain("the contraction sequence needs -alpha beta > 0"));
        }
        let c = params.gamma * (1.0 + params.alpha * params.beta);
        let log_step = (4.0 * c_p * k_lip).ln() + sigma * params.horizon.ln() + ln_gamma(sigma);
        Ok(Coefficients { log_step, sigma, c, log_num: ln_gamma(sigma + c) })
    }

    fn log_term(&self, n: usize) -> Result<f64> {
        let arg = (n + 1) as f64 * self.sigma + self.c;
        if !(arg > 0.0) {
            return Err(Error::domain(format!("Gamma pole at argument {arg}")));
        }
        Ok(n as f64 * self.log_step + self.log_num - ln_gamma(arg))
    }

    /// `ln(a_{n+1} / a_n)`; decreasing in `n` since `ln Gamma` is convex.
    fn log_ratio(&self, n: usize) -> Result<f64> {
        Ok(self.log_term(n + 1)? - self.log_term(n)?)
    }
}

/// Smallest `n` in `[lo, limit]` with `pred(n)`, for a predicate that stays
/// true once it holds.
fn first_true(lo: usize, limit: usize, pred: impl Fn(usize) -> Result<bool>) -> Result<Option<usize>> {
    let mut hi = lo;
    while !pred(hi)? {
        if hi >= limit {
            return Ok(None);
        }
        hi = (hi.saturating_mul(2)).min(limit);
    }
    let mut lo = if hi == lo { return Ok(Some(lo)) } else { hi / 2 };
    // pred(lo) is false, pred(hi) is true
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// The ratio `a_{n+1}/a_n` falls below one for good at some point; past it
/// the terms decrease monotonically, so `n0` is the first later index with
/// `a_n < 1`.
fn find_n0(k: &Coefficients, limit: usize) -> Result<Option<usize>> {
    let turn = match first_true(1, limit, |n| Ok(k.log_ratio(n)? < 0.0))? {
        Some(n) => n,
        None => return Ok(None),
    };
    first_true(turn, limit, |n| Ok(k.log_term(n)? < 0.0))
}

/// Computes `a_1 .. a_{n_max}` in log space and the threshold `n0`.
pub fn mnc_contraction_sequence(
    params: &FracParams,
    c_p: f64,
    k_lip: f64,
    n_max: usize,
) -> Result<ContractionSequence> {
    if n_max < 1 {
        return Err(Error::domain("n_max must be >= 1"));
    }
    let k = Coefficients::new(params, c_p, k_lip)?;
    let log_terms: Vec<f64> = (1..=n_max).map(|n| k.log_term(n)).collect::<Result<_>>()?;
    let n0 = find_n0(&k, n_max)?;
    Ok(ContractionSequence { log_terms, n0 })
}

/// `n0` without an upper limit on the search (bounded by `limit` as a guard).
pub fn contraction_threshold(params: &FracParams, c_p: f64, k_lip: f64, limit: usize) -> Result<Option<usize>> {
    let k = Coefficients::new(params, c_p, k_lip)?;
    find_n0(&k, limit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo() -> FracParams {
        FracParams::new(0.75, 0.5, -0.5, 1.0).unwrap()
    }

    // K = 4 C_p k_lip; reference values from an independent 30-digit evaluation
    #[test]
    fn unit_constant_matches_gamma_ratio() {
        let s = mnc_contraction_sequence(&demo(), 0.25, 1.0, 200).unwrap();
        assert!((s.term(1).unwrap() - 3.229_644_777_016_580_04).abs() < 1e-12);
        assert!((s.log_terms[199] + 77.648_618_558_638_907_3).abs() < 1e-9);
        assert_eq!(s.n0, Some(69));
        assert!(s.decreasing_after_n0());
        assert!(s.term(200).unwrap() < 1e-30);
    }

    #[test]
    fn large_constant_threshold_far_out() {
        let s = mnc_contraction_sequence(&demo(), 2.5, 1.0, 200).unwrap();
        assert!((s.log_terms[199] - 382.868_400_040_170_229).abs() < 1e-8);
        assert_eq!(s.n0, None);
        assert_eq!(contraction_threshold(&demo(), 2.5, 1.0, 100_000).unwrap(), Some(33_604));
        let long = mnc_contraction_sequence(&demo(), 2.5, 1.0, 40_000).unwrap();
        assert_eq!(long.n0, Some(33_604));
        assert!(long.decreasing_after_n0());
    }

    #[test]
    fn thousandfold_constant_still_vanishes() {
        let n0 = contraction_threshold(&demo(), 250.0, 1.0, usize::MAX / 4).unwrap();
        assert!(n0.is_some());
    }

    #[test]
    fn single_term_reports_none() {
        let s = mnc_contraction_sequence(&demo(), 0.25, 1.0, 1).unwrap();
        assert_eq!(s.log_terms.len(), 1);
        assert!(s.term(1).unwrap() >= 1.0);
        assert_eq!(s.n0, None);
    }

    #[test]
    fn rejects_bad_constants() {
        assert!(mnc_contraction_sequence(&demo(), 0.0, 1.0, 5).is_err());
        assert!(mnc_contraction_sequence(&demo(), 1.0, 1.0, 0).is_err());
    }
}
