//! Grid estimators for the seminorms
//! `p_{m,eps}(f) = sup_{x, alpha} |D^alpha f(x)| / (eps^|alpha| M_|alpha| e^{phi_m(x)})` and
//! `q_{m,eps}(F) = sup_z |F(z)| / e^{phi_m(x) + w_K(eps |y|)}`,
//! plus closed-form upper bounds for the built-in models.
//!
//! Grid estimates are lower bounds of the true suprema. The analytic
//! bounds are upper bounds, so a check of the form `estimate <= bound`
//! is meaningful.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::math::{exp, ln, ln_factorial, norm};
use crate::models::{EntireModel, Model, SmoothModel};
use crate::multi_index::{graded, order};
use crate::phi::PhiFamily;
use crate::sequences::WeightSequence;
use crate::weight::AssociatedWeight;

#[derive(Debug, Clone, PartialEq)]
pub struct SeminormEstimate {
    pub value: f64,
    pub ln_value: f64,
    /// Real part of the maximiser.
    pub arg_x: Vec<f64>,
    /// Imaginary part of the maximiser (`q` estimates only).
    pub arg_y: Option<Vec<f64>>,
    /// Multi-index of the maximiser (`p` estimates only).
    pub arg_alpha: Option<Vec<usize>>,
    /// The maximiser sits on the outer face of the grid.
    pub at_boundary: bool,
    /// The maximiser has the largest sampled order.
    pub at_max_order: bool,
    /// Some `w_K` evaluation was truncated.
    pub truncated: bool,
    pub points: usize,
    pub alpha_max: Option<usize>,
}

impl SeminormEstimate {
    /// The supremum may lie outside the sampled range.
    pub fn blow_up(&self) -> bool {
        self.at_boundary || self.at_max_order
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("eps must be positive"))
    }
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Grid estimate of `p_{m,eps}(f)` over `x_grid` and `|alpha| <= alpha_max`.
pub fn p_estimate(
    model: &dyn SmoothModel,
    seq: &WeightSequence,
    phi: &dyn PhiFamily,
    m: usize,
    eps: f64,
    x_grid: &Grid,
    alpha_max: usize,
) -> Result<SeminormEstimate> {
    check_dims(model.dim(), x_grid.dim())?;
    let alphas = graded(model.dim(), alpha_max);
    let ln_alpha_fact: Vec<f64> = alphas.iter().map(|a| a.iter().map(|&k| ln_factorial(k)).sum()).collect();
    p_estimate_with(
        |x, out| {
            let table = model.taylor_table(x, alpha_max)?;
            out.clear();
            out.extend(alphas.iter().zip(&ln_alpha_fact).map(|(a, &lf)| table.coefficient(a) * exp(lf)));
            Ok(())
        },
        seq,
        phi,
        m,
        eps,
        x_grid,
        alpha_max,
    )
}

/// [`p_estimate`] with derivatives supplied by `derivatives(x, out)`, which
/// fills `out` with `D^alpha f(x)` for every `alpha` of
/// [`graded`]`(n, alpha_max)` in order.
pub fn p_estimate_with(
    mut derivatives: impl FnMut(&[f64], &mut Vec<f64>) -> Result<()>,
    seq: &WeightSequence,
    phi: &dyn PhiFamily,
    m: usize,
    eps: f64,
    x_grid: &Grid,
    alpha_max: usize,
) -> Result<SeminormEstimate> {
    check_eps(eps)?;
    check_dims(phi.dim(), x_grid.dim())?;
    if alpha_max > seq.k_max() {
        return Err(Error::IndexOutOfRange { index: alpha_max, max: seq.k_max() });
    }
    let n = x_grid.dim();
    let alphas = graded(n, alpha_max);
    // ln(eps^k M_k)
    let ln_weight: Vec<f64> = (0..=alpha_max).map(|k| k as f64 * ln(eps) + seq.log_term(k)).collect();

    let mut best = 0.0f64;
    let mut arg_x = x_grid.axes().iter().map(|a| a[0]).collect::<Vec<_>>();
    let mut arg_alpha = alphas[0].clone();
    let mut at_boundary = false;
    let mut values = Vec::with_capacity(alphas.len());
    let mut failure = None;
    x_grid.for_each(|idx, x| {
        if failure.is_some() {
            return;
        }
        if let Err(e) = derivatives(x, &mut values) {
            failure = Some(e);
            return;
        }
        let phi_x = phi.eval(m, x);
        for (alpha, &d) in alphas.iter().zip(&values) {
            let v = d.abs() * exp(-(ln_weight[order(alpha)] + phi_x));
            if v > best {
                best = v;
                arg_x.copy_from_slice(x);
                arg_alpha.clone_from(alpha);
                at_boundary = x_grid.is_boundary(idx);
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if !best.is_finite() {
        return Err(Error::InvalidArgument("seminorm estimate overflowed"));
    }
    Ok(SeminormEstimate {
        value: best,
        ln_value: ln(best),
        at_max_order: best > 0.0 && alpha_max > 0 && order(&arg_alpha) == alpha_max,
        arg_x,
        arg_y: None,
        arg_alpha: Some(arg_alpha),
        at_boundary: best > 0.0 && at_boundary,
        truncated: false,
        points: x_grid.len(),
        alpha_max: Some(alpha_max),
    })
}

/// Grid estimate of `q_{m,eps}(F)` over `x_grid + i y_grid`.
pub fn q_estimate(
    entire: &dyn EntireModel,
    weight: &AssociatedWeight,
    phi: &dyn PhiFamily,
    m: usize,
    eps: f64,
    x_grid: &Grid,
    y_grid: &Grid,
) -> Result<SeminormEstimate> {
    check_eps(eps)?;
    let n = entire.dim();
    check_dims(n, x_grid.dim())?;
    check_dims(n, y_grid.dim())?;
    check_dims(n, phi.dim())?;

    // weight factor per y node, in enumeration order
    let mut y_nodes = Vec::with_capacity(y_grid.len());
    let mut truncated = false;
    let mut failure = None;
    y_grid.for_each(|idx, y| match weight.eval(eps * norm(y)) {
        Ok(w) => {
            truncated |= w.truncated;
            y_nodes.push((y.to_vec(), y_grid.is_boundary(idx), w.value));
        }
        Err(e) => failure = Some(e),
    });
    if let Some(e) = failure {
        return Err(e);
    }

    let mut best = 0.0f64;
    let mut arg_x = x_grid.axes().iter().map(|a| a[0]).collect::<Vec<_>>();
    let mut arg_y = y_nodes[0].0.clone();
    let mut at_boundary = false;
    let mut z = alloc::vec![Complex64::new(0.0, 0.0); n];
    x_grid.for_each(|idx, x| {
        if failure.is_some() {
            return;
        }
        let phi_x = phi.eval(m, x);
        let x_boundary = x_grid.is_boundary(idx);
        for (y, y_boundary, w) in &y_nodes {
            for j in 0..n {
                z[j] = Complex64::new(x[j], y[j]);
            }
            let value = match entire.eval(&z) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            };
            let v = value.norm() * exp(-(phi_x + w));
            if v > best {
                best = v;
                arg_x.copy_from_slice(x);
                arg_y.clone_from(y);
                at_boundary = x_boundary || *y_boundary;
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if !best.is_finite() {
        return Err(Error::InvalidArgument("seminorm estimate overflowed"));
    }
    Ok(SeminormEstimate {
        value: best,
        ln_value: ln(best),
        arg_x,
        arg_y: Some(arg_y),
        arg_alpha: None,
        at_boundary: best > 0.0 && at_boundary,
        at_max_order: false,
        truncated,
        points: x_grid.len() * y_grid.len(),
        alpha_max: None,
    })
}

/// A closed-form upper bound on a seminorm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticBound {
    pub value: f64,
    pub ln_value: f64,
    /// Order (for `p`) or weight index (for `q`) attaining the bound.
    pub argmax: usize,
    /// The supremum was attained strictly inside the stored range.
    pub certified: bool,
}

fn phi_floor(phi: &dyn PhiFamily, m: usize) -> Result<f64> {
    phi.lower_bound(m).ok_or(Error::InvalidArgument("phi family has no known lower bound"))
}

/// Upper bound on `p_{m,eps}(f)` from the per-coordinate derivative
/// envelope `|g^{(k)}| <= B(k)`:
/// `|s| e^{-inf phi_m} sup_k max_{|alpha|=k} prod_j B(alpha_j) / (eps^k M_k)`.
///
/// The supremum over `k` is taken over the stored range of `M`; the bound
/// is certified when it is attained before the last order and the terms
/// are decreasing there.
pub fn p_upper(model: &Model, seq: &WeightSequence, phi: &dyn PhiFamily, m: usize, eps: f64) -> Result<AnalyticBound> {
    check_eps(eps)?;
    check_dims(model.dim(), phi.dim())?;
    let k_max = seq.k_max();
    let ln_b: Vec<f64> = (0..=k_max)
        .map(|k| model.ln_derivative_envelope(k))
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::InvalidArgument("model has no derivative envelope"))?;
    if ln_b[0] == f64::NEG_INFINITY {
        return Ok(AnalyticBound { value: 0.0, ln_value: f64::NEG_INFINITY, argmax: 0, certified: true });
    }
    // max-plus convolution over coordinates: g[k] = max_{|alpha|=k} sum ln B(alpha_j)
    let mut g = ln_b.clone();
    for _ in 1..model.dim() {
        let mut next = alloc::vec![f64::NEG_INFINITY; k_max + 1];
        for (k, slot) in next.iter_mut().enumerate() {
            for a in 0..=k {
                let v = g[k - a] + ln_b[a];
                if v > *slot {
                    *slot = v;
                }
            }
        }
        g = next;
    }
    let ln_eps = ln(eps);
    let terms: Vec<f64> = (0..=k_max).map(|k| g[k] - k as f64 * ln_eps - seq.log_term(k)).collect();
    let (argmax, top) =
        terms
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
    let certified = argmax < k_max && terms[k_max] < terms[k_max - 1];
    let ln_value = crate::math::ln_abs(model.scale()) + top - phi_floor(phi, m)?;
    Ok(AnalyticBound { value: exp(ln_value), ln_value, argmax, certified })
}

/// Upper bound on `q_{m,eps}(F)` from the growth envelope
/// `ln |F(x+iy)| <= c0 + c1 |y| + c2 |y|^2`:
/// `exp(c0 - inf phi_m + sup_rho (c1 rho + c2 rho^2 - w_K(eps rho)))`.
///
/// On each linear piece of `w_K` in `ln rho` the bracket is convex in
/// `ln rho`, so the supremum is attained at a breakpoint
/// `rho_j = exp(ratio_j) / eps` or at `rho = 0`. Certified when the
/// maximising breakpoint is not the last stored one.
pub fn q_upper(
    model: &Model,
    weight: &AssociatedWeight,
    phi: &dyn PhiFamily,
    m: usize,
    eps: f64,
) -> Result<AnalyticBound> {
    check_eps(eps)?;
    check_dims(model.dim(), phi.dim())?;
    let env = model.growth_envelope().ok_or(Error::InvalidArgument("model has no growth envelope"))?;
    if env.ln_const == f64::NEG_INFINITY {
        return Ok(AnalyticBound { value: 0.0, ln_value: f64::NEG_INFINITY, argmax: 0, certified: true });
    }
    let m_max = weight.m_max();
    let mut best = 0.0;
    let mut argmax = 0;
    for j in 1..=m_max {
        let ln_r = weight.ratio(j);
        let rho = exp(ln_r) / eps;
        let v = env.linear * rho + env.quadratic * rho * rho - weight.eval_log(ln_r).value;
        if v > best {
            best = v;
            argmax = j;
        }
    }
    let ln_value = env.ln_const - phi_floor(phi, m)? + best;
    Ok(AnalyticBound { value: exp(ln_value), ln_value, argmax, certified: argmax < m_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::powf;
    use crate::models::ModelKind;
    use crate::phi::PowerFamily;
    use crate::sequences::{derive_dual, DualFitOptions};

    fn setup(k_max: usize) -> (WeightSequence, AssociatedWeight) {
        let seq = WeightSequence::gevrey(2.0 / 3.0, k_max).unwrap();
        let dual = derive_dual(&seq, &DualFitOptions::default()).unwrap();
        (seq, AssociatedWeight::new(dual).unwrap())
    }

    #[test]
    fn zero_model_has_zero_seminorms() {
        let (seq, w) = setup(200);
        let phi = PowerFamily::quadratic(1);
        let zero = Model::new(ModelKind::Zero, 1, 1.0).unwrap();
        let x = Grid::uniform(-2.0, 2.0, 21, 1).unwrap();
        let p = p_estimate(&zero, &seq, &phi, 1, 1.0, &x, 6).unwrap();
        assert_eq!(p.value, 0.0);
        assert!(!p.blow_up());
        let q = q_estimate(&zero, &w, &phi, 1, 1.0, &x, &x).unwrap();
        assert_eq!(q.value, 0.0);
        assert_eq!(p_upper(&zero, &seq, &phi, 1, 1.0).unwrap().value, 0.0);
        assert_eq!(q_upper(&zero, &w, &phi, 1, 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn gaussian_p_estimate_is_finite_and_interior() {
        let (seq, _) = setup(200);
        let phi = PowerFamily::quadratic(1);
        let g = Model::gaussian(1.0, 1).unwrap();
        let x = Grid::uniform(-6.0, 6.0, 121, 1).unwrap();
        let p = p_estimate(&g, &seq, &phi, 1, 1.0, &x, 10).unwrap();
        assert!(p.value.is_finite() && p.value > 0.0);
        assert!(!p.blow_up(), "{p:?}");
        assert!(order(p.arg_alpha.as_ref().unwrap()) < 10);
        let up = p_upper(&g, &seq, &phi, 1, 1.0).unwrap();
        assert!(up.certified);
        assert!(p.value <= up.value);
    }

    #[test]
    fn p_estimate_is_homogeneous() {
        let (seq, w) = setup(200);
        let phi = PowerFamily::quadratic(1);
        let g = Model::gaussian(1.0, 1).unwrap();
        let g2 = g.scaled(2.0);
        let x = Grid::uniform(-3.0, 3.0, 31, 1).unwrap();
        let p1 = p_estimate(&g, &seq, &phi, 1, 1.0, &x, 8).unwrap();
        let p2 = p_estimate(&g2, &seq, &phi, 1, 1.0, &x, 8).unwrap();
        assert_eq!(p2.value, 2.0 * p1.value);
        let q1 = q_estimate(&g, &w, &phi, 1, 1.0, &x, &x).unwrap();
        let q3 = q_estimate(&g.scaled(-3.0), &w, &phi, 1, 1.0, &x, &x).unwrap();
        assert!((q3.value - 3.0 * q1.value).abs() <= 1e-15 * q3.value);
    }

    #[test]
    fn refinement_never_decreases() {
        let (seq, w) = setup(200);
        let phi = PowerFamily::quadratic(1);
        let c = Model::cosine(1).unwrap();
        let x = Grid::uniform(-4.0, 4.0, 17, 1).unwrap();
        let coarse = p_estimate(&c, &seq, &phi, 2, 0.5, &x, 6).unwrap();
        let fine = p_estimate(&c, &seq, &phi, 2, 0.5, &x.refined(), 8).unwrap();
        assert!(fine.value >= coarse.value);
        let qc = q_estimate(&c, &w, &phi, 2, 0.5, &x, &x).unwrap();
        let qf = q_estimate(&c, &w, &phi, 2, 0.5, &x.refined(), &x.refined()).unwrap();
        assert!(qf.value >= qc.value);
    }

    #[test]
    fn gaussian_q_estimate_against_closed_form() {
        // |e^{-z^2}| = e^{-x^2 + y^2}; with phi_1 = x^2 the x-sup is at x = 0
        let (_, w) = setup(2000);
        let phi = PowerFamily::quadratic(1);
        let g = Model::gaussian(1.0, 1).unwrap();
        let x = Grid::uniform(-6.0, 6.0, 121, 1).unwrap();
        let y = x.refined().refined();
        let est = q_estimate(&g, &w, &phi, 1, 1.0, &x, &y).unwrap();
        let up = q_upper(&g, &w, &phi, 1, 1.0).unwrap();
        assert!(up.certified);
        assert!(est.value <= up.value * (1.0 + 1e-12));
        // the closed form reduces to sup_y e^{y^2 - w(y)}, attained at a breakpoint
        assert!(up.value / est.value < 1.05, "{} vs {}", est.value, up.value);
    }

    #[test]
    fn cosine_q_upper_bounds_modulus() {
        let (_, w) = setup(2000);
        let phi = PowerFamily::new(2.0, 1, crate::phi::ShiftConstants::Scalar(1.0)).unwrap();
        let c = Model::cosine(1).unwrap();
        let x = Grid::uniform(-6.0, 6.0, 61, 1).unwrap();
        for eps in [0.5, 1.0] {
            let est = q_estimate(&c, &w, &phi, 1, eps, &x, &x).unwrap();
            let up = q_upper(&c, &w, &phi, 1, eps).unwrap();
            assert!(est.value <= up.value);
            // e^{|y| - w(eps |y|)} at y = 0 already gives cosh 0 = 1
            assert!(est.value >= 1.0 - 1e-15);
            assert!(powf(up.value, 1.0).is_finite());
        }
    }

    #[test]
    fn two_dimensional_p_upper_dominates() {
        let (seq, _) = setup(200);
        let phi = PowerFamily::quadratic(2);
        let g = Model::gaussian(1.0, 2).unwrap();
        let x = Grid::uniform(-2.0, 2.0, 9, 2).unwrap();
        let p = p_estimate(&g, &seq, &phi, 1, 1.0, &x, 6).unwrap();
        let up = p_upper(&g, &seq, &phi, 1, 1.0).unwrap();
        assert!(p.value <= up.value && up.certified);
    }
}
