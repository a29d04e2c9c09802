//! The associated weight `w_K(r) = sup_m ln(r^m / K_m)` of a log-convex
//! sequence `K`, with `w_K(0) = 0`.
//!
//! Because `ln K` is convex the supremum is attained at the largest `m`
//! whose ratio `ln K_m - ln K_{m-1}` does not exceed `ln r`, so evaluation is
//! a binary search. The supremum over the infinite index set is replaced by
//! the stored range; values whose maximiser sits on the last stored index
//! are flagged as truncated and are only lower bounds.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, ln, E};
use crate::sequences::DualSequence;

/// Relative slack used when comparing `ln r` against a ratio, so that
/// mathematically tied indices resolve to the larger one despite rounding.
const TIE_TOL: f64 = 4.0 * f64::EPSILON;

/// Absolute rounding allowance for [`lemma_gap`].
pub const LEMMA_GAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AssociatedWeight {
    dual: DualSequence,
    /// `ratios[m] = ln K_m - ln K_{m-1}` for `m >= 1`; `ratios[0]` is unused.
    ratios: Vec<f64>,
}

/// A value of `w_K` together with its maximising index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightValue {
    pub value: f64,
    pub index: usize,
    /// The maximiser hit the last stored index: `value` is a lower bound.
    pub truncated: bool,
}

impl AssociatedWeight {
    pub fn new(dual: DualSequence) -> Result<Self> {
        let l = dual.log_terms();
        let mut ratios = Vec::with_capacity(l.len());
        ratios.push(f64::NEG_INFINITY);
        for m in 1..l.len() {
            ratios.push(l[m] - l[m - 1]);
        }
        // Re-check monotonicity; tiny rounding dips are flattened so the
        // binary search sees a sorted slice.
        for m in 2..ratios.len() {
            if ratios[m] < ratios[m - 1] {
                let scale = 1.0 + ratios[m].abs().max(ratios[m - 1].abs()) + l[m].abs();
                if ratios[m - 1] - ratios[m] > 1e-12 * scale {
                    return Err(Error::NotLogConvex { index: m - 1 });
                }
                ratios[m] = ratios[m - 1];
            }
        }
        Ok(AssociatedWeight { dual, ratios })
    }

    pub fn dual(&self) -> &DualSequence {
        &self.dual
    }

    pub fn m_max(&self) -> usize {
        self.dual.m_max()
    }

    /// `ln K_m - ln K_{m-1}` for `m >= 1`.
    pub fn ratio(&self, m: usize) -> f64 {
        self.ratios[m]
    }

    fn check_radius(r: f64) -> Result<()> {
        if r >= 0.0 && r.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument("radius must be finite and nonnegative"))
        }
    }

    fn index_for_log(&self, ln_r: f64) -> usize {
        let bound = ln_r + TIE_TOL * ln_r.abs().max(1.0);
        // ratios[1..] is sorted; count entries <= bound
        self.ratios[1..].partition_point(|&q| q <= bound)
    }

    /// Index maximising `m ln r - ln K_m`; the largest one on ties.
    pub fn trace_index(&self, r: f64) -> Result<(usize, bool)> {
        Self::check_radius(r)?;
        if r == 0.0 {
            return Ok((0, false));
        }
        let m = self.index_for_log(ln(r));
        Ok((m, m == self.m_max()))
    }

    /// `w_K(r)` evaluated from `ln r`.
    pub fn eval_log(&self, ln_r: f64) -> WeightValue {
        if ln_r == f64::NEG_INFINITY {
            return WeightValue { value: 0.0, index: 0, truncated: false };
        }
        let m = self.index_for_log(ln_r);
        let value = if m == 0 { 0.0 } else { m as f64 * ln_r - self.dual.log_term(m) };
        WeightValue { value, index: m, truncated: m == self.m_max() }
    }

    pub fn eval(&self, r: f64) -> Result<WeightValue> {
        Self::check_radius(r)?;
        if r == 0.0 {
            return Ok(WeightValue { value: 0.0, index: 0, truncated: false });
        }
        Ok(self.eval_log(ln(r)))
    }

    /// `sup_{r>0} (N ln r - w_K(r))`, evaluated inside the attainment
    /// interval `[exp(ratio N), exp(ratio N+1)]`. Equals `ln K_N`.
    pub fn legendre_recover(&self, n: usize) -> Result<f64> {
        if n >= self.m_max() {
            return Err(Error::IndexOutOfRange { index: n, max: self.m_max() - 1 });
        }
        let ln_r = if n == 0 { self.ratios[1] - 1.0 } else { 0.5 * (self.ratios[n] + self.ratios[n + 1]) };
        Ok(n as f64 * ln_r - self.eval_log(ln_r).value)
    }

    /// Minimiser `r* = K_N / K_{N-1}` of `e^{w_K(r)} / r^N`.
    pub fn optimal_radius(&self, n: usize) -> Result<f64> {
        if n == 0 || n >= self.m_max() {
            return Err(Error::IndexOutOfRange { index: n, max: self.m_max() - 1 });
        }
        Ok(exp(self.ratios[n]))
    }

    /// `ln r*` for [`optimal_radius`](Self::optimal_radius).
    pub fn ln_optimal_radius(&self, n: usize) -> Result<f64> {
        self.optimal_radius(n).map(|_| self.ratios[n])
    }
}

/// Doubling gap `w_K(e t2^2 r) + 3 ln t1 - 2 w_K(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaGap {
    pub r: f64,
    pub gap: f64,
    /// Either evaluation hit the stored boundary.
    pub truncated: bool,
}

impl LemmaGap {
    /// Nonnegative up to [`LEMMA_GAP_TOL`].
    pub fn holds(&self) -> bool {
        self.gap >= -LEMMA_GAP_TOL
    }
}

pub fn lemma_gap(weight: &AssociatedWeight, r: f64) -> Result<LemmaGap> {
    let inner = weight.eval(r)?;
    let dual = weight.dual();
    let outer = if r == 0.0 {
        WeightValue { value: 0.0, index: 0, truncated: false }
    } else {
        weight.eval_log(1.0 + 2.0 * dual.ln_t2() + ln(r))
    };
    Ok(LemmaGap {
        r,
        gap: outer.value + 3.0 * dual.ln_t1() - 2.0 * inner.value,
        truncated: inner.truncated || outer.truncated,
    })
}

/// Point on the scale `e t2^2 r` used by the doubling inequality.
pub fn doubling_radius(dual: &DualSequence, r: f64) -> f64 {
    E * exp(2.0 * dual.ln_t2()) * r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{ln_factorial, log_space};

    fn cube_root_factorial(m_max: usize) -> AssociatedWeight {
        let terms = (0..=m_max).map(|m| ln_factorial(m) / 3.0).collect();
        AssociatedWeight::new(DualSequence::new(terms, 1e-6, 1e-6).unwrap()).unwrap()
    }

    fn brute_force(w: &AssociatedWeight, r: f64) -> f64 {
        (0..=w.m_max()).map(|m| m as f64 * ln(r) - w.dual().log_term(m)).fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn trace_index_examples() {
        let w = cube_root_factorial(120);
        assert_eq!(w.trace_index(2.0).unwrap(), (8, false));
        assert_eq!(w.trace_index(0.5).unwrap(), (0, false));
        // K_1 = 1: objective ties between m = 0 and m = 1 at r = 1
        assert_eq!(w.trace_index(1.0).unwrap(), (1, false));
        assert_eq!(w.trace_index(0.0).unwrap(), (0, false));
        assert!(w.trace_index(-1.0).is_err());
        assert!(w.trace_index(100.0).unwrap().1);
    }

    #[test]
    fn eval_examples() {
        let w = cube_root_factorial(1000);
        assert_eq!(w.eval(0.0).unwrap().value, 0.0);
        let v = w.eval(2.0).unwrap();
        let oracle = brute_force(&w, 2.0);
        assert!((v.value - oracle).abs() < 1e-12);
        assert!((v.value - 2.010_309).abs() < 1e-5);
        assert_eq!(w.eval(1.0).unwrap().value, 0.0);
    }

    #[test]
    fn eval_matches_brute_force_on_grid() {
        let w = cube_root_factorial(300);
        for r in log_space(1e-3, 6.0, 400) {
            let v = w.eval(r).unwrap();
            assert!(!v.truncated);
            let oracle = brute_force(&w, r);
            assert!((v.value - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()), "r = {r}");
        }
    }

    #[test]
    fn legendre_examples() {
        let w = cube_root_factorial(120);
        assert_eq!(w.legendre_recover(0).unwrap(), 0.0);
        assert!((w.legendre_recover(2).unwrap() - ln(2.0) / 3.0).abs() < 1e-12);
        assert!((exp(w.legendre_recover(5).unwrap()) - 4.932_424).abs() < 1e-6);
        assert!(w.legendre_recover(120).is_err());
    }

    #[test]
    fn legendre_matches_log_grid_infimum() {
        let w = cube_root_factorial(120);
        let grid = log_space(1e-2, 10.0, 20_000);
        for n in [2usize, 5] {
            let inf = grid.iter().map(|&r| exp(brute_force(&w, r)) / r.powi(n as i32)).fold(f64::INFINITY, f64::min);
            let k_n = exp(ln_factorial(n) / 3.0);
            assert!((1.0 / inf - k_n).abs() < 1e-9 * k_n);
        }
    }

    #[test]
    fn optimal_radius_examples() {
        let w = cube_root_factorial(120);
        assert!((w.optimal_radius(8).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(w.optimal_radius(1).unwrap(), 1.0);
        for n in 1..40 {
            let r = w.optimal_radius(n).unwrap();
            let check = exp(w.eval(r).unwrap().value + w.dual().log_term(n)) / r.powi(n as i32);
            assert!((check - 1.0).abs() < 1e-12, "n = {n}");
        }
        assert!(w.optimal_radius(0).is_err());
    }

    #[test]
    fn lemma_gap_examples() {
        let w = cube_root_factorial(1000);
        let g0 = lemma_gap(&w, 0.0).unwrap();
        assert!((g0.gap - 3e-6).abs() < 1e-18);
        let g1 = lemma_gap(&w, 1.0).unwrap();
        // m* = 20 at e(1 + 1e-6)^2
        let expected = 20.0 * (1.0 + 2e-6) - ln_factorial(20) / 3.0 + 3e-6;
        assert!((g1.gap - expected).abs() < 1e-9);
        assert!((g1.gap - 5.888).abs() < 1e-3);
        let g2 = lemma_gap(&w, 2.0).unwrap();
        let outer = brute_force(&w, doubling_radius(w.dual(), 2.0));
        assert!((g2.gap - (outer + 3e-6 - 2.0 * brute_force(&w, 2.0))).abs() < 1e-9);
        assert!(g2.gap > 0.0);
    }

    #[test]
    fn rejects_non_convex_ratios() {
        // DualSequence validation already rejects this shape
        let terms = alloc::vec![0.0, 1.0, 1.5, 3.0];
        assert!(DualSequence::new(terms, 1e-6, 1e-6).is_err());
    }
}
