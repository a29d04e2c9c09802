//! Entire extension of a smooth function by its Taylor series around
//! `Re z` in powers of `i Im z`:
//! `F(x + iy) = sum_alpha D^alpha f(x) / alpha! (iy)^alpha`.
//!
//! Truncation error is certified from the seminorm bound
//! `|D^alpha f(x)| <= p eps^|alpha| M_|alpha| e^{phi_m(x)}`: grade `k` then
//! contributes at most `t_k = p e^{phi_m(x)} (eps n |y|)^k M_k / k!`, and the
//! tail past `N` is majorised geometrically once the term ratio is below 1/2.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::math::{exp, ln, norm, CompensatedSum, ComplexSum};
use crate::models::{EntireModel, Model, SmoothModel, TaylorTable};
use crate::multi_index::compositions;
pub use crate::multi_index::multinomial_sum;
use crate::phi::PhiFamily;
use crate::seminorms::{p_upper, AnalyticBound};
use crate::sequences::WeightSequence;
use crate::weight::AssociatedWeight;

/// Largest admissible ratio between consecutive tail terms.
pub const MAX_TAIL_RATIO: f64 = 0.5;

/// Ratios within this relative distance of [`MAX_TAIL_RATIO`] count as
/// reaching it.
const RATIO_SLACK: f64 = 1e-12;

fn ratio_too_large(ratio: f64) -> bool {
    ratio >= MAX_TAIL_RATIO * (1.0 - RATIO_SLACK)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExtensionFlags {
    /// `Im z = 0`: the value is `f(x)` itself.
    pub real_point: bool,
    /// Fixed-order evaluation without a tail certificate.
    pub uncertified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionResult {
    pub value: Complex64,
    pub n_used: usize,
    /// Bound on the discarded tail; `+inf` when uncertified.
    pub tail_bound: f64,
    pub flags: ExtensionFlags,
}

fn split(z: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    (z.iter().map(|v| v.re).collect(), z.iter().map(|v| v.im).collect())
}

/// `jet[k] * y^k` without forming an overflowing power.
fn scaled_jet(jet: &[f64], y: f64) -> Vec<f64> {
    let ln_y = ln(y.abs());
    let mut power: f64 = 1.0;
    jet.iter()
        .enumerate()
        .map(|(k, &c)| {
            let v = if c == 0.0 {
                0.0
            } else if power.is_finite() && power != 0.0 {
                c * power
            } else {
                let sign = if y < 0.0 && k % 2 == 1 { -c.signum() } else { c.signum() };
                sign * exp(ln(c.abs()) + k as f64 * ln_y)
            };
            power *= y;
            v
        })
        .collect()
}

/// Sum of the Taylor series through grade `order` with imaginary increment `y`.
fn sum_series(table: &TaylorTable, y: &[f64], order: usize) -> Complex64 {
    let n = y.len();
    let scaled: Vec<Vec<f64>> = (0..n).map(|j| scaled_jet(&table.jet(j)[..=order], y[j])).collect();
    let mut total = ComplexSum::new();
    // highest grade first, so the large low-grade terms enter last
    for grade in (0..=order).rev() {
        let mut acc = CompensatedSum::new();
        if n == 1 {
            acc.add(scaled[0][grade]);
        } else {
            for alpha in compositions(n, grade) {
                acc.add(alpha.iter().zip(&scaled).map(|(&a, s)| s[a]).product());
            }
        }
        let s = table.scale() * acc.value();
        let term = match grade % 4 {
            0 => Complex64::new(s, 0.0),
            1 => Complex64::new(0.0, s),
            2 => Complex64::new(-s, 0.0),
            _ => Complex64::new(0.0, -s),
        };
        total.add(term);
    }
    total.value()
}

/// Taylor polynomial of degree `order` around `Re z`, evaluated at `z`.
pub fn extend(model: &dyn SmoothModel, z: &[Complex64], order: usize) -> Result<ExtensionResult> {
    if z.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: z.len() });
    }
    let (x, y) = split(z);
    if y.iter().all(|&v| v == 0.0) {
        let table = model.taylor_table(&x, 0)?;
        return Ok(ExtensionResult {
            value: Complex64::new(table.coefficient(&alloc::vec![0; x.len()]), 0.0),
            n_used: 0,
            tail_bound: 0.0,
            flags: ExtensionFlags { real_point: true, uncertified: false },
        });
    }
    let table = model.taylor_table(&x, order)?;
    Ok(ExtensionResult {
        value: sum_series(&table, &y, order),
        n_used: order,
        tail_bound: f64::INFINITY,
        flags: ExtensionFlags { real_point: false, uncertified: true },
    })
}

/// Log tail terms `L_k = k ln(eps n |y|) + ln M_k - ln k!` for one `|y|`,
/// with suffix maxima of the consecutive ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct TailProfile {
    ln_terms: Vec<f64>,
    /// `ln_ratio_sup[k] = max_{j >= k} (L_{j+1} - L_j)` over the stored range.
    ln_ratio_sup: Vec<f64>,
}

impl TailProfile {
    pub fn new(seq: &WeightSequence, eps: f64, n: usize, y_norm: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument("eps must be positive"));
        }
        if !(y_norm >= 0.0 && y_norm.is_finite()) {
            return Err(Error::InvalidArgument("|y| must be finite and nonnegative"));
        }
        let k_max = seq.k_max();
        let ln_base = ln(eps * n as f64 * y_norm);
        let ln_terms: Vec<f64> =
            (0..=k_max).map(|k| if k == 0 { 0.0 } else { k as f64 * ln_base - seq.log_factorial_ratio(k) }).collect();
        let mut ln_ratio_sup = alloc::vec![f64::NEG_INFINITY; k_max];
        let mut running = f64::NEG_INFINITY;
        for k in (0..k_max).rev() {
            let r = ln_terms[k + 1] - ln_terms[k];
            if r > running || r.is_nan() {
                running = r;
            }
            ln_ratio_sup[k] = running;
        }
        Ok(TailProfile { ln_terms, ln_ratio_sup })
    }

    pub fn k_max(&self) -> usize {
        self.ln_terms.len() - 1
    }

    /// Largest consecutive ratio `t_{k+1}/t_k` over `k >= order`.
    pub fn ratio_from(&self, order: usize) -> f64 {
        let v = self.ln_ratio_sup[order];
        if v.is_nan() {
            0.0
        } else {
            exp(v)
        }
    }

    /// Bound `t_{N+1} / (1 - ratio)` on `sum_{k > N} t_k`, where
    /// `t_k = exp(ln_prefactor + L_k)`.
    pub fn bound(&self, ln_prefactor: f64, order: usize) -> Result<f64> {
        if order >= self.k_max() {
            return Err(Error::IndexOutOfRange { index: order + 1, max: self.k_max() });
        }
        if ln_prefactor == f64::NEG_INFINITY || self.ln_terms[order + 1] == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let ratio = self.ratio_from(order);
        if ratio_too_large(ratio) {
            return Err(Error::IncreaseOrder { grade: order, ratio });
        }
        Ok(exp(ln_prefactor + self.ln_terms[order + 1]) / (1.0 - ratio))
    }

    /// Smallest `N <= max_order` whose tail bound is at most `tol`.
    pub fn smallest_order(&self, ln_prefactor: f64, tol: f64, max_order: usize) -> Result<(usize, f64)> {
        let last = max_order.min(self.k_max() - 1);
        for order in 0..=last {
            if ratio_too_large(self.ratio_from(order)) {
                continue;
            }
            let b = self.bound(ln_prefactor, order)?;
            if b <= tol {
                return Ok((order, b));
            }
        }
        Err(Error::ToleranceNotReached { tol, order: last })
    }
}

/// Geometric-majorant bound on the Taylor tail past grade `order`.
///
/// Fails with [`Error::IncreaseOrder`] unless every stored term ratio from
/// `order` on is below 1/2.
#[allow(clippy::too_many_arguments)]
pub fn tail_bound(
    p_bound: f64,
    eps: f64,
    seq: &WeightSequence,
    phi_val: f64,
    y_norm: f64,
    order: usize,
    n: usize,
) -> Result<f64> {
    if !(p_bound >= 0.0) {
        return Err(Error::InvalidArgument("p bound must be nonnegative"));
    }
    if y_norm == 0.0 {
        return Ok(0.0);
    }
    TailProfile::new(seq, eps, n, y_norm)?.bound(ln(p_bound) + phi_val, order)
}

/// Seminorm data certifying extension tails.
#[derive(Clone, Copy)]
pub struct ExtensionContext<'a> {
    pub seq: &'a WeightSequence,
    pub phi: &'a dyn PhiFamily,
    pub m: usize,
    pub eps: f64,
    /// Upper bound on `p_{m,eps}(f)`.
    pub p_bound: f64,
}

impl ExtensionContext<'_> {
    fn ln_prefactor(&self, x: &[f64]) -> f64 {
        ln(self.p_bound) + self.phi.eval(self.m, x)
    }
}

/// Extension at `z` with the smallest order whose certified tail is `<= tol`.
pub fn adaptive_extend(
    model: &dyn SmoothModel,
    z: &[Complex64],
    tol: f64,
    ctx: &ExtensionContext<'_>,
) -> Result<ExtensionResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }
    let (x, y) = split(z);
    let y_norm = norm(&y);
    if y_norm == 0.0 {
        return extend(model, z, 0);
    }
    let profile = TailProfile::new(ctx.seq, ctx.eps, model.dim(), y_norm)?;
    extend_with_profile(model, &x, &y, &profile, ctx.ln_prefactor(&x), tol)
}

fn extend_with_profile(
    model: &dyn SmoothModel,
    x: &[f64],
    y: &[f64],
    profile: &TailProfile,
    ln_prefactor: f64,
    tol: f64,
) -> Result<ExtensionResult> {
    let (order, bound) = profile.smallest_order(ln_prefactor, tol, model.max_order())?;
    let table = model.taylor_table(x, order)?;
    Ok(ExtensionResult {
        value: sum_series(&table, y, order),
        n_used: order,
        tail_bound: bound,
        flags: ExtensionFlags::default(),
    })
}

/// The extension as an entire function, evaluated adaptively.
pub struct Extended<'a> {
    pub model: &'a dyn SmoothModel,
    pub ctx: ExtensionContext<'a>,
    pub tol: f64,
}

impl EntireModel for Extended<'_> {
    fn name(&self) -> &str {
        self.model.name()
    }

    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        adaptive_extend(self.model, z, self.tol, &self.ctx).map(|r| r.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub m: usize,
    pub eps: f64,
    /// `max_z (|F(z)| + tail) e^{-phi_m(x) - w_K(2 eps n t2 |y|)}`.
    pub max_ratio: f64,
    pub arg_x: Vec<f64>,
    pub arg_y: Vec<f64>,
    pub p_upper: AnalyticBound,
    /// `2 t1 p_upper`.
    pub bound: f64,
    /// `bound / max_ratio`.
    pub slack: f64,
    pub pass: bool,
    /// Some `w_K` evaluation was truncated (ratios are then over-estimates).
    pub truncated: bool,
    pub max_order_used: usize,
    pub points: usize,
}

/// Sweep `x_grid + i y_grid` and compare the weighted modulus of the
/// extension with `2 t1 p_upper`.
#[allow(clippy::too_many_arguments)]
pub fn growth_ratio(
    model: &Model,
    seq: &WeightSequence,
    weight: &AssociatedWeight,
    phi: &dyn PhiFamily,
    m: usize,
    eps: f64,
    x_grid: &Grid,
    y_grid: &Grid,
    tol: f64,
) -> Result<GrowthReport> {
    let n = model.dim();
    if x_grid.dim() != n || y_grid.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x_grid.dim().min(y_grid.dim()) });
    }
    let p_up = p_upper(model, seq, phi, m, eps)?;
    let dual = weight.dual();
    let bound = 2.0 * dual.t1() * p_up.value;
    let scale = 2.0 * eps * n as f64 * dual.t2();

    struct Column {
        y: Vec<f64>,
        profile: Option<TailProfile>,
        w: f64,
    }
    let mut columns = Vec::with_capacity(y_grid.len());
    let mut truncated = false;
    let mut failure = None;
    y_grid.for_each(|_, y| {
        let y_norm = norm(y);
        let profile = if y_norm == 0.0 { None } else { Some(TailProfile::new(seq, eps, n, y_norm)) };
        let profile = match profile.transpose() {
            Ok(p) => p,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        match weight.eval(scale * y_norm) {
            Ok(w) => {
                truncated |= w.truncated;
                columns.push(Column { y: y.to_vec(), profile, w: w.value });
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }

    let ln_p = ln(p_up.value);
    let mut best = f64::NEG_INFINITY;
    let mut arg_x = Vec::new();
    let mut arg_y = Vec::new();
    let mut max_order_used = 0;
    x_grid.for_each(|_, x| {
        if failure.is_some() {
            return;
        }
        let phi_x = phi.eval(m, x);
        let ln_prefactor = ln_p + phi.eval(m, x);
        // one table per x, deep enough for every y in the column
        let mut orders = Vec::with_capacity(columns.len());
        let mut deepest = 0;
        for col in &columns {
            let entry = match &col.profile {
                None => Ok((0, 0.0)),
                Some(p) => p.smallest_order(ln_prefactor, tol, model.max_order()),
            };
            match entry {
                Ok(e) => {
                    deepest = deepest.max(e.0);
                    orders.push(e);
                }
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            }
        }
        let table = match model.taylor_table(x, deepest) {
            Ok(t) => t,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        max_order_used = max_order_used.max(deepest);
        for (col, &(order, tail)) in columns.iter().zip(&orders) {
            let value = sum_series(&table, &col.y, order);
            let ln_ratio = ln(value.norm() + tail) - phi_x - col.w;
            if ln_ratio > best {
                best = ln_ratio;
                arg_x = x.to_vec();
                arg_y.clone_from(&col.y);
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let max_ratio = exp(best);
    let slack = if max_ratio > 0.0 { bound / max_ratio } else { f64::INFINITY };
    Ok(GrowthReport {
        m,
        eps,
        max_ratio,
        arg_x,
        arg_y,
        p_upper: p_up,
        bound,
        slack,
        pass: max_ratio <= bound && p_up.certified,
        truncated,
        max_order_used,
        points: x_grid.len() * y_grid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::cosh;
    use crate::models::ModelKind;
    use crate::phi::PowerFamily;
    use crate::sequences::{derive_dual, DualFitOptions};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn seq() -> WeightSequence {
        WeightSequence::gevrey(2.0 / 3.0, 2000).unwrap()
    }

    #[test]
    fn real_points_are_exact() {
        let g = Model::gaussian(1.0, 1).unwrap();
        for order in [0, 5, 40] {
            let r = extend(&g, &[c(0.7, 0.0)], order).unwrap();
            assert_eq!(r.value, c(exp(-0.49), 0.0));
            assert_eq!(r.tail_bound, 0.0);
            assert_eq!(r.n_used, 0);
        }
    }

    #[test]
    fn gaussian_at_i_matches_closed_form() {
        let g = Model::gaussian(1.0, 1).unwrap();
        let r = extend(&g, &[c(0.0, 1.0)], 40).unwrap();
        assert!((r.value - c(1.0f64.exp(), 0.0)).norm() < 1e-12);
        assert!(r.flags.uncertified);
    }

    #[test]
    fn tail_bound_examples() {
        let s = seq();
        assert_eq!(tail_bound(1.0, 1.0, &s, 0.0, 0.0, 3, 1).unwrap(), 0.0);
        let b = tail_bound(1.0, 1.0, &s, 0.0, 1.0, 40, 1).unwrap();
        assert!(b > 0.0 && b < 1e-12, "{b}");
        // y = 1, eps = 1: ratio at N is (N+1)^{-1/3}, which is 1/2 exactly at N = 7
        match tail_bound(1.0, 1.0, &s, 0.0, 1.0, 7, 1) {
            Err(Error::IncreaseOrder { ratio, .. }) => assert!((ratio - 0.5).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(tail_bound(1.0, 1.0, &s, 0.0, 1.0, 8, 1).is_ok());
    }

    #[test]
    fn adaptive_examples() {
        let s = seq();
        let phi = PowerFamily::quadratic(1);
        let g = Model::gaussian(1.0, 1).unwrap();
        let p = p_upper(&g, &s, &phi, 1, 1.0).unwrap().value;
        let ctx = ExtensionContext { seq: &s, phi: &phi, m: 1, eps: 1.0, p_bound: p };
        let r = adaptive_extend(&g, &[c(0.3, 0.0)], 1e-10, &ctx).unwrap();
        assert_eq!(r.n_used, 0);
        let z = c(0.5, 1.0);
        let r = adaptive_extend(&g, &[z], 1e-10, &ctx).unwrap();
        assert!((r.value - (-z * z).exp()).norm() <= 1e-10);
        assert!(r.tail_bound <= 1e-10);

        let cosine = Model::cosine(1).unwrap();
        let p = p_upper(&cosine, &s, &phi, 1, 1.0).unwrap().value;
        let ctx = ExtensionContext { p_bound: p, ..ctx };
        let r = adaptive_extend(&cosine, &[c(0.0, 2.0)], 1e-8, &ctx).unwrap();
        assert!((r.value - c(cosh(2.0), 0.0)).norm() <= 1e-8);
    }

    #[test]
    fn error_within_tail_bound() {
        let s = seq();
        let phi = PowerFamily::quadratic(1);
        let mut sampler = crate::math::DirectionSampler::new(5);
        for model in [Model::gaussian(1.0, 1).unwrap(), Model::cosine(1).unwrap()] {
            let p = p_upper(&model, &s, &phi, 1, 1.0).unwrap().value;
            let ctx = ExtensionContext { seq: &s, phi: &phi, m: 1, eps: 1.0, p_bound: p };
            for _ in 0..20 {
                let v = sampler.unit_vector(2);
                let z = c(3.0 * v[0], 3.0 * v[1]);
                let r = adaptive_extend(&model, &[z], 1e-6, &ctx).unwrap();
                let exact = EntireModel::eval(&model, &[z]).unwrap();
                assert!((r.value - exact).norm() <= r.tail_bound + 1e-12 * (1.0 + exact.norm()));
            }
        }
    }

    #[test]
    fn two_dimensional_extension() {
        let model = Model::new(ModelKind::PolyGaussian { c: 0.5, degree: 1 }, 2, 1.0).unwrap();
        let z = [c(0.2, 0.4), c(-0.3, 0.1)];
        let r = extend(&model, &z, 40).unwrap();
        let exact = EntireModel::eval(&model, &z).unwrap();
        assert!((r.value - exact).norm() < 1e-13);
    }

    #[test]
    fn forward_growth_passes_for_gaussian() {
        let s = seq();
        let w = AssociatedWeight::new(derive_dual(&s, &DualFitOptions::default()).unwrap()).unwrap();
        let phi = PowerFamily::quadratic(1);
        let g = Model::gaussian(1.0, 1).unwrap();
        let x = Grid::uniform(-5.0, 5.0, 21, 1).unwrap();
        let rep = growth_ratio(&g, &s, &w, &phi, 1, 1.0, &x, &x, 1e-10).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.slack >= 1.0);
    }
}
