//! Weight sequences `M = (M_k)` and their log-convex duals `K`.
//!
//! All sequences are stored in the log domain (`ln M_k`), and `ln k!` comes
//! from a cumulative table, so every comparison below is a comparison of
//! sums of logarithms and never overflows for the index ranges in use.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, ln, LnFactorial};

/// The weight sequence `M`, stored as `ln M_k` for `k = 0..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    log_terms: Vec<f64>,
    ln_fact: LnFactorial,
}

impl WeightSequence {
    pub const DEFAULT_K_MAX: usize = 120;
    pub const MIN_K_MAX: usize = 8;

    /// Build from explicit values `ln M_k`. Requires `ln M_0 = 0`, finite
    /// entries and at least `MIN_K_MAX + 1` terms.
    pub fn from_log_terms(log_terms: Vec<f64>) -> Result<Self> {
        if log_terms.len() < Self::MIN_K_MAX + 1 {
            return Err(Error::InvalidArgument("weight sequence needs k_max >= 8"));
        }
        if log_terms[0] != 0.0 {
            return Err(Error::InvalidArgument("weight sequence needs M_0 = 1"));
        }
        if log_terms.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("weight sequence entries must be finite"));
        }
        let ln_fact = LnFactorial::new(log_terms.len() - 1);
        Ok(WeightSequence { log_terms, ln_fact })
    }

    /// Gevrey-type sequence `M_k = (k!)^s`.
    pub fn gevrey(s: f64, k_max: usize) -> Result<Self> {
        Self::geometric_gevrey(1.0, s, k_max)
    }

    /// `M_k = c^k (k!)^s`.
    pub fn geometric_gevrey(c: f64, s: f64, k_max: usize) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument("geometric factor c must be positive"));
        }
        if !s.is_finite() {
            return Err(Error::InvalidArgument("Gevrey exponent s must be finite"));
        }
        let ln_fact = LnFactorial::new(k_max);
        let ln_c = ln(c);
        let log_terms = (0..=k_max).map(|k| k as f64 * ln_c + s * ln_fact.get(k)).collect();
        Self::from_log_terms(log_terms)
    }

    pub fn k_max(&self) -> usize {
        self.log_terms.len() - 1
    }

    /// `ln M_k`.
    #[inline]
    pub fn log_term(&self, k: usize) -> f64 {
        self.log_terms[k]
    }

    pub fn log_terms(&self) -> &[f64] {
        &self.log_terms
    }

    /// `ln k!` from the table shared with this sequence.
    #[inline]
    pub fn ln_factorial(&self, k: usize) -> f64 {
        self.ln_fact.get(k)
    }

    /// `ln(k! / M_k)`, the points whose convex minorant defines `K`.
    pub fn log_factorial_ratio(&self, k: usize) -> f64 {
        self.ln_fact.get(k) - self.log_terms[k]
    }
}

/// Outcome of the log-convexity check `M_k^2 <= M_{k-1} M_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alpha1Report {
    pub pass: bool,
    pub first_violation: Option<usize>,
    pub checked_up_to: usize,
}

/// Log-convexity of `M`, checked with zero tolerance in the log domain.
pub fn validate_alpha1(seq: &WeightSequence) -> Alpha1Report {
    let l = seq.log_terms();
    let first_violation = (1..seq.k_max()).find(|&k| 2.0 * l[k] > l[k - 1] + l[k + 1]);
    Alpha1Report { pass: first_violation.is_none(), first_violation, checked_up_to: seq.k_max() }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthOptions {
    /// `ln M_{k_max} / k_max` must exceed this value.
    pub threshold: f64,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions { threshold: 1.0 }
    }
}

/// Finite-sample proxy for `ln M_k / k -> +inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthReport {
    pub pass: bool,
    /// First index of the tail over which monotonicity is required.
    pub tail_from: usize,
    pub checked_up_to: usize,
    pub eventually_increasing: bool,
    /// `ln M_{k_max} / k_max`.
    pub final_ratio: f64,
    /// Average increase of `ln M_k / k` per index over the tail.
    pub tail_slope: f64,
    pub threshold: f64,
}

/// Strict increase up to a relative rounding margin.
fn strictly_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] - w[0] > 1e-12 * w[0].abs().max(w[1].abs()).max(1e-300))
}

pub fn validate_growth(seq: &WeightSequence, opts: &GrowthOptions) -> GrowthReport {
    let k_max = seq.k_max();
    let tail_from = (k_max / 2).max(1);
    let ratios: Vec<f64> = (tail_from..=k_max).map(|k| seq.log_term(k) / k as f64).collect();
    let eventually_increasing = strictly_increasing(&ratios);
    let final_ratio = ratios[ratios.len() - 1];
    let tail_slope = (final_ratio - ratios[0]) / (k_max - tail_from) as f64;
    GrowthReport {
        pass: eventually_increasing && final_ratio > opts.threshold,
        tail_from,
        checked_up_to: k_max,
        eventually_increasing,
        final_ratio,
        tail_slope,
        threshold: opts.threshold,
    }
}

/// The constant `a_eps` in `M_k <= a_eps eps^k k!` over the stored range,
/// together with the root trend `(M_k / k!)^{1/k}` used as a proxy for
/// the condition holding for every `eps > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Alpha2Certificate {
    pub epsilon: f64,
    pub a_eps: f64,
    pub ln_a_eps: f64,
    pub argmax_k: usize,
    pub k_checked: usize,
    /// `(M_k / k!)^{1/k}` for `k = 1..=k_checked`.
    pub root_trend: Vec<f64>,
    /// Whether the root trend strictly decreases over the upper half.
    pub trend_decreasing: bool,
}

pub fn validate_alpha2(seq: &WeightSequence, epsilons: &[f64]) -> Result<Vec<Alpha2Certificate>> {
    if epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidArgument("epsilon must be positive"));
    }
    let k_max = seq.k_max();
    let root_trend: Vec<f64> = (1..=k_max).map(|k| exp(-seq.log_factorial_ratio(k) / k as f64)).collect();
    let tail: Vec<f64> = root_trend[k_max / 2..].iter().map(|v| -v).collect();
    let trend_decreasing = strictly_increasing(&tail);

    Ok(epsilons
        .iter()
        .map(|&eps| {
            let ln_eps = ln(eps);
            let (argmax_k, ln_a_eps) = (0..=k_max)
                .map(|k| (k, -seq.log_factorial_ratio(k) - k as f64 * ln_eps))
                .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
            Alpha2Certificate {
                epsilon: eps,
                a_eps: exp(ln_a_eps),
                ln_a_eps,
                argmax_k,
                k_checked: k_max,
                root_trend: root_trend.clone(),
                trend_decreasing,
            }
        })
        .collect())
}

/// Outcome of a pairwise product check over `0 <= p, q <= p_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCheckReport {
    pub pass: bool,
    pub p_max: usize,
    pub first_violation: Option<(usize, usize)>,
    /// Smallest slack of the inequality over all pairs (negative on failure).
    pub min_margin: f64,
}

fn pair_check(p_max: usize, margin: impl Fn(usize, usize) -> f64) -> PairCheckReport {
    let mut first_violation = None;
    let mut min_margin = f64::INFINITY;
    for p in 0..=p_max {
        for q in 0..=p_max {
            let m = margin(p, q);
            if m < min_margin {
                min_margin = m;
            }
            if m < 0.0 && first_violation.is_none() {
                first_violation = Some((p, q));
            }
        }
    }
    PairCheckReport { pass: first_violation.is_none(), p_max, first_violation, min_margin }
}

/// `M_{p+q} >= M_p M_q` for all `p, q <= p_max`.
pub fn check_supermultiplicative(seq: &WeightSequence, p_max: usize) -> Result<PairCheckReport> {
    if 2 * p_max > seq.k_max() {
        return Err(Error::IndexOutOfRange { index: 2 * p_max, max: seq.k_max() });
    }
    let l = seq.log_terms();
    Ok(pair_check(p_max, |p, q| l[p + q] - (l[p] + l[q])))
}

/// The log-convex sequence `K` with constants `t1, t2 > 1` such that
/// `t1^-1 t2^-m K_m <= m!/M_m <= t1 t2^m K_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSequence {
    log_terms: Vec<f64>,
    ln_t1: f64,
    ln_t2: f64,
}

/// Relative tolerance for the convexity test of a stored `ln K`.
const CONVEXITY_TOL: f64 = 1e-12;

fn first_convexity_violation(l: &[f64]) -> Option<usize> {
    (1..l.len().saturating_sub(1)).find(|&m| {
        let scale = 1.0 + l[m - 1].abs().max(l[m].abs()).max(l[m + 1].abs());
        l[m + 1] + l[m - 1] - 2.0 * l[m] < -CONVEXITY_TOL * scale
    })
}

impl DualSequence {
    /// Validating constructor: `ln K_0 = 0`, finite entries, log-convexity
    /// and `ln t1, ln t2 > 0`.
    pub fn new(log_terms: Vec<f64>, ln_t1: f64, ln_t2: f64) -> Result<Self> {
        if log_terms.len() < 3 {
            return Err(Error::InvalidArgument("dual sequence needs at least three terms"));
        }
        if log_terms[0] != 0.0 {
            return Err(Error::InvalidArgument("dual sequence needs K_0 = 1"));
        }
        if log_terms.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("dual sequence entries must be finite"));
        }
        if !(ln_t1 > 0.0 && ln_t2 > 0.0 && ln_t1.is_finite() && ln_t2.is_finite()) {
            return Err(Error::InvalidArgument("t1 and t2 must exceed 1"));
        }
        if let Some(index) = first_convexity_violation(&log_terms) {
            return Err(Error::NotLogConvex { index });
        }
        Ok(DualSequence { log_terms, ln_t1, ln_t2 })
    }

    pub fn m_max(&self) -> usize {
        self.log_terms.len() - 1
    }

    /// `ln K_m`.
    #[inline]
    pub fn log_term(&self, m: usize) -> f64 {
        self.log_terms[m]
    }

    pub fn log_terms(&self) -> &[f64] {
        &self.log_terms
    }

    pub fn ln_t1(&self) -> f64 {
        self.ln_t1
    }

    pub fn ln_t2(&self) -> f64 {
        self.ln_t2
    }

    pub fn t1(&self) -> f64 {
        exp(self.ln_t1)
    }

    pub fn t2(&self) -> f64 {
        exp(self.ln_t2)
    }

    /// First index where `|ln(m!/M_m) - ln K_m| <= ln t1 + m ln t2` fails.
    pub fn sandwich_violation(&self, seq: &WeightSequence) -> Option<usize> {
        let top = self.m_max().min(seq.k_max());
        (0..=top).find(|&m| {
            let gap = (seq.log_factorial_ratio(m) - self.log_terms[m]).abs();
            gap - m as f64 * self.ln_t2 > self.ln_t1
        })
    }
}

/// Parameters of the `(t1, t2)` search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualFitOptions {
    /// Lower end of the search box for `ln t1`, `ln t2`.
    pub ln_floor: f64,
    /// Upper end of the search box; exceeding it is an error.
    pub ln_cap: f64,
    pub grid_points: usize,
}

impl Default for DualFitOptions {
    fn default() -> Self {
        DualFitOptions { ln_floor: 1e-6, ln_cap: 10.0, grid_points: 2001 }
    }
}

/// Greatest convex minorant of `values` (as a function of the index),
/// evaluated at every index. Lower hull by a monotone-chain scan; collinear
/// points stay on the hull.
pub fn convex_minorant(values: &[f64]) -> Vec<f64> {
    let mut hull: Vec<usize> = Vec::with_capacity(values.len());
    for i in 0..values.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b - a) as f64 * (values[i] - values[a]) - (values[b] - values[a]) * (i - a) as f64;
            if cross < 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = alloc::vec![0.0; values.len()];
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        out[a] = values[a];
        let slope = (values[b] - values[a]) / (b - a) as f64;
        for (j, slot) in out.iter_mut().enumerate().take(b).skip(a + 1) {
            *slot = values[a] + slope * (j - a) as f64;
        }
    }
    if let Some(&last) = hull.last() {
        out[last] = values[last];
    }
    out
}

/// Smallest `ln t1` for a given `ln t2`, floored at `ln_floor`.
fn min_ln_t1(gaps: &[f64], ln_t2: f64, ln_floor: f64) -> f64 {
    gaps.iter().enumerate().map(|(m, &d)| d - m as f64 * ln_t2).fold(ln_floor, f64::max)
}

/// Derive `K` as the greatest log-convex minorant of `m!/M_m` and fit the
/// smallest sandwich constants.
///
/// For fixed `ln t2` the least admissible `ln t1` is explicit, so the search
/// runs over `ln t2` only: a uniform grid on `[ln_floor, ln_cap]` followed by
/// a ternary refinement of the (convex) objective `ln t1 + m_max ln t2`
/// around the best grid point. Points with `ln t1` above the cap are
/// infeasible.
pub fn derive_dual(seq: &WeightSequence, opts: &DualFitOptions) -> Result<DualSequence> {
    let alpha1 = validate_alpha1(seq);
    if let Some(index) = alpha1.first_violation {
        return Err(Error::NotLogConvex { index });
    }
    if !(opts.ln_floor > 0.0 && opts.ln_cap > opts.ln_floor && opts.grid_points >= 2) {
        return Err(Error::InvalidArgument("invalid sandwich search box"));
    }
    let m_max = seq.k_max();
    let points: Vec<f64> = (0..=m_max).map(|m| seq.log_factorial_ratio(m)).collect();
    let hull = convex_minorant(&points);
    let origin = hull[0];
    let log_terms: Vec<f64> = hull.iter().map(|h| h - origin).collect();
    let gaps: Vec<f64> = points.iter().zip(&log_terms).map(|(g, h)| (g - h).abs()).collect();

    let objective = |v: f64| {
        let u = min_ln_t1(&gaps, v, opts.ln_floor);
        if u > opts.ln_cap {
            f64::INFINITY
        } else {
            u + m_max as f64 * v
        }
    };
    let step = (opts.ln_cap - opts.ln_floor) / (opts.grid_points - 1) as f64;
    let grid = |i: usize| (opts.ln_floor + step * i as f64).min(opts.ln_cap);
    let best_i = (0..opts.grid_points)
        .map(|i| (i, objective(grid(i))))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
        .0;
    let (mut lo, mut hi) = (grid(best_i.saturating_sub(1)), grid((best_i + 1).min(opts.grid_points - 1)));
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        let (f1, f2) = (objective(m1), objective(m2));
        if f1.is_finite() && f1 <= f2 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let mut ln_t2 = hi;
    if objective(grid(best_i)) < objective(ln_t2) {
        ln_t2 = grid(best_i);
    }
    let ln_t1 = min_ln_t1(&gaps, ln_t2, opts.ln_floor);
    if ln_t1 > opts.ln_cap {
        return Err(Error::NoSandwichConstants { ln_t1, ln_t2 });
    }
    let dual = DualSequence::new(log_terms, ln_t1, ln_t2)?;
    if dual.sandwich_violation(seq).is_some() {
        return Err(Error::NoSandwichConstants { ln_t1, ln_t2 });
    }
    Ok(dual)
}

/// `K_{p+q} <= t1^3 (e t2^2)^{p+q} K_p K_q` for all `p, q <= p_max`.
pub fn check_k_submultiplicative(dual: &DualSequence, p_max: usize) -> Result<PairCheckReport> {
    if 2 * p_max > dual.m_max() {
        return Err(Error::IndexOutOfRange { index: 2 * p_max, max: dual.m_max() });
    }
    let l = dual.log_terms();
    let (u, v) = (dual.ln_t1(), dual.ln_t2());
    Ok(pair_check(p_max, |p, q| 3.0 * u + (p + q) as f64 * (1.0 + 2.0 * v) + l[p] + l[q] - l[p + q]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::ln_factorial;

    fn gevrey(s: f64) -> WeightSequence {
        WeightSequence::gevrey(s, 120).unwrap()
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(WeightSequence::from_log_terms(alloc::vec![0.0; 5]).is_err());
        let mut v = alloc::vec![0.0; 10];
        v[0] = 0.1;
        assert!(WeightSequence::from_log_terms(v).is_err());
        let mut v = alloc::vec![0.0; 10];
        v[3] = f64::NAN;
        assert!(WeightSequence::from_log_terms(v).is_err());
        assert!(WeightSequence::geometric_gevrey(0.0, 0.5, 20).is_err());
    }

    #[test]
    fn alpha1_examples() {
        let gev = WeightSequence::gevrey(2.0 / 3.0, 50).unwrap();
        // independent check against directly summed ln k!
        for k in 1..50 {
            let lhs = 2.0 * (2.0 / 3.0) * ln_factorial(k);
            let rhs = (2.0 / 3.0) * (ln_factorial(k - 1) + ln_factorial(k + 1));
            assert!(lhs <= rhs);
        }
        assert!(validate_alpha1(&gev).pass);

        let linear: Vec<f64> = (0..20).map(|k| ln((k + 1) as f64)).collect();
        let r = validate_alpha1(&WeightSequence::from_log_terms(linear).unwrap());
        assert!(!r.pass);
        assert_eq!(r.first_violation, Some(1));

        let ones = WeightSequence::from_log_terms(alloc::vec![0.0; 20]).unwrap();
        assert!(validate_alpha1(&ones).pass);
    }

    #[test]
    fn growth_examples() {
        let r = validate_growth(&gevrey(2.0 / 3.0), &GrowthOptions::default());
        assert!(r.pass);
        // Stirling: d/dk [(2/3)(ln k - 1)] = 2/(3k), averaged over k in [60, 120]
        let expected = (2.0 / 3.0) * ln(2.0) / 60.0;
        assert!((r.tail_slope - expected).abs() < 0.1 * expected);

        let geo = WeightSequence::geometric_gevrey(2.0, 0.0, 120).unwrap();
        assert!(!validate_growth(&geo, &GrowthOptions::default()).pass);
        let ones = WeightSequence::from_log_terms(alloc::vec![0.0; 121]).unwrap();
        assert!(!validate_growth(&ones, &GrowthOptions::default()).pass);
    }

    #[test]
    fn alpha2_examples() {
        let seq = WeightSequence::gevrey(2.0 / 3.0, 40).unwrap();
        let cert = &validate_alpha2(&seq, &[0.5]).unwrap()[0];
        let oracle = (0..=40usize).map(|k| exp(k as f64 * ln(2.0) - ln_factorial(k) / 3.0)).fold(0.0, f64::max);
        assert!((cert.a_eps - oracle).abs() < 1e-12 * oracle);
        // k ln 2 - (ln k!)/3 has equal values at k = 7 and k = 8
        assert!(cert.argmax_k == 7 || cert.argmax_k == 8);
        assert!(cert.trend_decreasing);
        for k in 0..=40usize {
            let lhs = (2.0 / 3.0) * ln_factorial(k);
            let rhs = cert.ln_a_eps + k as f64 * ln(0.5) + ln_factorial(k);
            assert!(lhs <= rhs + 1e-12);
        }

        let fact = WeightSequence::gevrey(1.0, 40).unwrap();
        assert!(!validate_alpha2(&fact, &[0.5]).unwrap()[0].trend_decreasing);

        let ones = WeightSequence::from_log_terms(alloc::vec![0.0; 41]).unwrap();
        for eps in [1.0, 3.0] {
            let c = &validate_alpha2(&ones, &[eps]).unwrap()[0];
            assert_eq!(c.a_eps, 1.0);
            assert_eq!(c.argmax_k, 0);
        }
        assert!(validate_alpha2(&ones, &[0.0]).is_err());
    }

    #[test]
    fn dual_of_gevrey_two_thirds() {
        let dual = derive_dual(&gevrey(2.0 / 3.0), &DualFitOptions::default()).unwrap();
        for m in 0..=120 {
            assert!((dual.log_term(m) - ln_factorial(m) / 3.0).abs() < 1e-11, "m = {m}");
        }
        assert!((dual.ln_t1() - 1e-6).abs() < 1e-15);
        assert!((dual.ln_t2() - 1e-6).abs() < 1e-15);
    }

    #[test]
    fn dual_of_factorial_is_constant() {
        let dual = derive_dual(&gevrey(1.0), &DualFitOptions::default()).unwrap();
        assert!(dual.log_terms().iter().all(|&v| v == 0.0));
        assert!((dual.t1() - (1.0 + 1e-6)).abs() < 1e-11);
    }

    #[test]
    fn dual_of_geometric_gevrey_is_exact() {
        let seq = WeightSequence::geometric_gevrey(2.0, 0.5, 120).unwrap();
        let dual = derive_dual(&seq, &DualFitOptions::default()).unwrap();
        for m in 0..=120 {
            let expected = 0.5 * ln_factorial(m) - m as f64 * ln(2.0);
            assert!((dual.log_term(m) - expected).abs() < 1e-11);
        }
        assert!(dual.sandwich_violation(&seq).is_none());
    }

    #[test]
    fn dual_fits_positive_constants_for_nonconvex_ratio() {
        // a convex kink in ln M at k = 10 puts a concave kink into ln(m!/M_m)
        let terms: Vec<f64> = (0..=40).map(|k| 0.6 * ln_factorial(k) + 2.0 * (k as f64 - 10.0).max(0.0)).collect();
        let seq = WeightSequence::from_log_terms(terms).unwrap();
        assert!(validate_alpha1(&seq).pass);
        let dual = derive_dual(&seq, &DualFitOptions::default()).unwrap();
        assert!(dual.sandwich_violation(&seq).is_none());
        assert!(dual.ln_t1() + dual.ln_t2() > 1e-2);
        assert!(dual.log_term(10) < seq.log_factorial_ratio(10));
    }

    #[test]
    fn convex_minorant_of_a_dent() {
        let values = [0.0, 1.0, 0.0, 1.0, 4.0];
        let h = convex_minorant(&values);
        assert_eq!(h[0], 0.0);
        assert!((h[1] - 0.0).abs() < 1e-15);
        assert_eq!(h[2], 0.0);
        assert!(h[3] <= 1.0);
        assert_eq!(h[4], 4.0);
        assert!(first_convexity_violation(&h).is_none());
    }

    #[test]
    fn derive_dual_rejects_non_log_convex_m() {
        let linear: Vec<f64> = (0..20).map(|k| ln((k + 1) as f64)).collect();
        let seq = WeightSequence::from_log_terms(linear).unwrap();
        assert_eq!(derive_dual(&seq, &DualFitOptions::default()), Err(Error::NotLogConvex { index: 1 }));
    }

    #[test]
    fn supermultiplicative_examples() {
        let seq = gevrey(2.0 / 3.0);
        let r = check_supermultiplicative(&seq, 20).unwrap();
        assert!(r.pass);
        // M_2 = 2^{2/3} >= M_1^2 = 1
        assert!((exp(seq.log_term(2)) - 1.587_401_051_968_199_4).abs() < 1e-12);
        assert!(seq.log_term(2) >= 2.0 * seq.log_term(1));
        for q in 0..=20 {
            assert_eq!(seq.log_term(q), seq.log_term(0) + seq.log_term(q));
        }
        assert!(check_supermultiplicative(&seq, 61).is_err());
    }

    #[test]
    fn k_submultiplicative_examples() {
        let dual = derive_dual(&gevrey(2.0 / 3.0), &DualFitOptions::default()).unwrap();
        let r = check_k_submultiplicative(&dual, 15).unwrap();
        assert!(r.pass);
        // p = q = 2: (4!)^{1/3} <= e^4 (2^{1/3})^2 (t's ~ 1)
        let lhs = exp(dual.log_term(4));
        assert!((lhs - 2.884_499_140_614_817).abs() < 1e-9);
        assert!(lhs <= exp(4.0) * exp(2.0 * dual.log_term(2)));
        let r0 = check_k_submultiplicative(&dual, 0).unwrap();
        assert!((r0.min_margin - 3.0 * dual.ln_t1()).abs() < 1e-18);
    }

    #[test]
    fn dual_sequence_constructor_rejects_dent() {
        let terms = alloc::vec![0.0, 1.0, 0.5, 3.0];
        assert_eq!(DualSequence::new(terms, 1e-6, 1e-6), Err(Error::NotLogConvex { index: 1 }));
        assert!(DualSequence::new(alloc::vec![0.0, 0.0, 0.0], 0.0, 1e-6).is_err());
    }
}
