//! Recovery of derivatives from an entire function through the iterated
//! Cauchy formula on the distinguished boundary
//! `L_R(x) = { |zeta_j - x_j| = R for all j }`, and the chain of bounds
//! turning `q_{m+1,eps}(F)` into a bound on `|D^alpha f(x)|`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{
    axis_and_diagonal_directions, cos, exp, ln, ln_factorial, ln_multi_factorial, sin, sqrt, ComplexSum,
    DirectionSampler, E, PI,
};
use crate::models::EntireModel;
use crate::multi_index::order;
use crate::phi::{PhiFamily, RANDOM_DIRECTIONS};
use crate::sequences::{DualSequence, WeightSequence};
use crate::weight::AssociatedWeight;

pub const DEFAULT_NODES: usize = 64;
pub const MIN_NODES: usize = 4;

/// The torus `L_R(x)` with `Q` trapezoid nodes per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct PolydiscContour {
    center: Vec<f64>,
    radius: f64,
    nodes: usize,
}

impl PolydiscContour {
    pub fn new(center: Vec<f64>, radius: f64, nodes: usize) -> Result<Self> {
        if center.is_empty() || center.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("contour center must be finite"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument("contour radius must be positive"));
        }
        if nodes < MIN_NODES {
            return Err(Error::InvalidArgument("at least 4 nodes per coordinate"));
        }
        Ok(PolydiscContour { center, radius, nodes })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CauchyEstimate {
    pub alpha: Vec<usize>,
    /// Trapezoid value with `Q` nodes per coordinate.
    pub value: Complex64,
    /// `|value(Q) - value(2Q)|`.
    pub discrepancy: f64,
}

/// `F` sampled on the `2Q`-node torus, last coordinate fastest.
struct TorusSamples {
    fine: usize,
    n: usize,
    /// `roots[k] = exp(i pi k / Q)`.
    roots: Vec<Complex64>,
    values: Vec<Complex64>,
}

impl TorusSamples {
    fn new(entire: &dyn EntireModel, contour: &PolydiscContour) -> Result<Self> {
        let n = contour.dim();
        if entire.dim() != n {
            return Err(Error::DimensionMismatch { expected: entire.dim(), got: n });
        }
        let fine = 2 * contour.nodes;
        let roots: Vec<Complex64> = (0..fine)
            .map(|k| {
                let theta = 2.0 * PI * k as f64 / fine as f64;
                Complex64::new(cos(theta), sin(theta))
            })
            .collect();
        let total = fine.checked_pow(n as u32).ok_or(Error::InvalidArgument("too many quadrature nodes"))?;
        let mut values = Vec::with_capacity(total);
        let mut idx = alloc::vec![0usize; n];
        let mut zeta: Vec<Complex64> = (0..n).map(|j| contour.center[j] + contour.radius * roots[0]).collect();
        for _ in 0..total {
            values.push(entire.eval(&zeta)?);
            for j in (0..n).rev() {
                idx[j] += 1;
                if idx[j] < fine {
                    zeta[j] = contour.center[j] + contour.radius * roots[idx[j]];
                    break;
                }
                idx[j] = 0;
                zeta[j] = contour.center[j] + contour.radius * roots[0];
            }
        }
        Ok(TorusSamples { fine, n, roots, values })
    }

    /// Means of `F(zeta) prod e^{-i alpha_j theta_j}` over all `2Q` nodes
    /// and over the even (`Q`-grid) nodes.
    fn means(&self, alpha: &[usize]) -> (Complex64, Complex64) {
        let mut all = ComplexSum::new();
        let mut even = ComplexSum::new();
        let mut idx = alloc::vec![0usize; self.n];
        let mut phase = 0usize;
        let mut odd_count = 0usize;
        let step: Vec<usize> = alpha.iter().map(|&a| a % self.fine).collect();
        for &v in &self.values {
            let term = v * self.roots[phase].conj();
            all.add(term);
            if odd_count == 0 {
                even.add(term);
            }
            for j in (0..self.n).rev() {
                idx[j] += 1;
                phase = (phase + step[j]) % self.fine;
                if idx[j] % 2 == 1 {
                    odd_count += 1;
                } else {
                    odd_count -= 1;
                }
                if idx[j] < self.fine {
                    break;
                }
                // wrapped: idx[j] == fine is even again and the phase has
                // advanced by a multiple of the period
                idx[j] = 0;
            }
        }
        let total = self.values.len() as f64;
        let coarse_total = total / (1u64 << self.n) as f64;
        (all.value() / total, even.value() / coarse_total)
    }
}

fn estimate(samples: &TorusSamples, contour: &PolydiscContour, alpha: &[usize]) -> CauchyEstimate {
    let factor = exp(ln_multi_factorial(alpha) - order(alpha) as f64 * ln(contour.radius));
    let (fine, coarse) = samples.means(alpha);
    let value = coarse * factor;
    CauchyEstimate { alpha: alpha.to_vec(), value, discrepancy: (value - fine * factor).norm() }
}

/// `D^alpha f(x)` as `alpha! R^{-|alpha|}` times the trapezoid mean of
/// `F(zeta) prod e^{-i alpha_j theta_j}` over `L_R(x)`.
pub fn cauchy_derivative(
    entire: &dyn EntireModel,
    contour: &PolydiscContour,
    alpha: &[usize],
) -> Result<CauchyEstimate> {
    Ok(cauchy_jet(entire, contour, &[alpha.to_vec()])?.remove(0))
}

/// [`cauchy_derivative`] for several multi-indices from one sampling.
pub fn cauchy_jet(
    entire: &dyn EntireModel,
    contour: &PolydiscContour,
    alphas: &[Vec<usize>],
) -> Result<Vec<CauchyEstimate>> {
    if let Some(a) = alphas.iter().find(|a| a.len() != contour.dim()) {
        return Err(Error::DimensionMismatch { expected: contour.dim(), got: a.len() });
    }
    let samples = TorusSamples::new(entire, contour)?;
    Ok(alphas.iter().map(|a| estimate(&samples, contour, a)).collect())
}

/// Max of `phi_m` over the closed ball of `radius` around `x`, sampled on
/// the radii `{0, 1/4, 1/2, 3/4, 1} radius` along axis, diagonal, `x/|x|`
/// and [`RANDOM_DIRECTIONS`] random directions.
pub fn sampled_ball_max(phi: &dyn PhiFamily, m: usize, x: &[f64], radius: f64, seed: u64) -> f64 {
    let n = x.len();
    let mut dirs = axis_and_diagonal_directions(n);
    dirs.extend(DirectionSampler::new(seed).unit_vectors(n, RANDOM_DIRECTIONS));
    let xn = crate::math::norm(x);
    if xn > 0.0 {
        dirs.push(x.iter().map(|v| v / xn).collect());
    }
    let mut best = phi.eval(m, x);
    let mut p = alloc::vec![0.0; n];
    for step in 1..=4 {
        let r = radius * step as f64 / 4.0;
        for e in &dirs {
            for j in 0..n {
                p[j] = x[j] + r * e[j];
            }
            best = best.max(phi.eval(m, &p));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupBound {
    pub value: f64,
    pub ln_value: f64,
    /// The ball maximum came from the closed form rather than sampling.
    pub closed_form: bool,
    /// `w_K` was truncated, so the bound may be too small.
    pub truncated: bool,
}

/// `alpha! R^{-|alpha|} q e^{max_{|xi| <= sqrt(n) R} phi_{m+1}(x + xi) + w_K(eps sqrt(n) R)}`.
#[allow(clippy::too_many_arguments)]
pub fn derivative_sup_bound(
    q_bound: f64,
    m: usize,
    eps: f64,
    alpha: &[usize],
    radius: f64,
    x: &[f64],
    phi: &dyn PhiFamily,
    weight: &AssociatedWeight,
    seed: u64,
) -> Result<SupBound> {
    if alpha.len() != x.len() || phi.dim() != x.len() {
        return Err(Error::DimensionMismatch { expected: phi.dim(), got: x.len() });
    }
    if !(q_bound >= 0.0) || !(radius > 0.0) || !(eps > 0.0) {
        return Err(Error::InvalidArgument("q bound, radius and eps must be positive"));
    }
    let ball = sqrt(x.len() as f64) * radius;
    let (phi_max, closed_form) = match phi.ball_max(m + 1, x, ball) {
        Some(v) => (v, true),
        None => (sampled_ball_max(phi, m + 1, x, ball, seed), false),
    };
    let w = weight.eval(eps * ball)?;
    let ln_value = ln_multi_factorial(alpha) - order(alpha) as f64 * ln(radius) + ln(q_bound) + phi_max + w.value;
    Ok(SupBound { value: exp(ln_value), ln_value, closed_form, truncated: w.truncated })
}

/// Constants `c_m = e t2^2 a_m sqrt(n)` and `d = b + 3 ln t1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConstants {
    pub m: usize,
    pub eps: f64,
    pub a_m: f64,
    pub t1: f64,
    pub t2: f64,
    pub n: usize,
    pub b: f64,
    pub c_m: f64,
    pub d: f64,
}

pub fn chain_constants(m: usize, eps: f64, a_m: f64, t1: f64, t2: f64, n: usize, b: f64) -> Result<ChainConstants> {
    if !(a_m >= 1.0) || !(t1 >= 1.0) || !(t2 >= 1.0) {
        return Err(Error::InvalidArgument("a_m, t1 and t2 must be at least 1"));
    }
    if !(b >= 0.0 && b.is_finite()) || n == 0 || !(eps > 0.0) {
        return Err(Error::InvalidArgument("b must be finite and nonnegative"));
    }
    Ok(ChainConstants { m, eps, a_m, t1, t2, n, b, c_m: E * t2 * t2 * a_m * sqrt(n as f64), d: b + 3.0 * ln(t1) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfOverR {
    /// `(c_m eps)^N / K_N`.
    pub value: f64,
    pub ln_value: f64,
    /// Minimising radius `K_N / K_{N-1} / (c_m eps)`; `None` for `N = 0`,
    /// where the infimum is approached as `R -> 0`.
    pub r_star: Option<f64>,
}

/// `inf_{R>0} e^{w_K(c_m eps R)} / R^N = (c_m eps)^N / K_N`.
pub fn inf_over_r_bound(weight: &AssociatedWeight, c_m: f64, eps: f64, alpha_abs: usize) -> Result<InfOverR> {
    if alpha_abs >= weight.m_max() {
        return Err(Error::IndexOutOfRange { index: alpha_abs, max: weight.m_max() - 1 });
    }
    let ln_ce = ln(c_m * eps);
    let ln_value = alpha_abs as f64 * ln_ce - weight.dual().log_term(alpha_abs);
    let r_star = if alpha_abs == 0 { None } else { Some(weight.optimal_radius(alpha_abs)? / (c_m * eps)) };
    Ok(InfOverR { value: exp(ln_value), ln_value, r_star })
}

/// `ln(e^{w_K(c_m eps R)} / R^N)`, the `R`-dependent factor of the chain.
pub fn chain_radius_profile(
    weight: &AssociatedWeight,
    c_m: f64,
    eps: f64,
    alpha_abs: usize,
    radius: f64,
) -> Result<f64> {
    Ok(weight.eval(c_m * eps * radius)?.value - alpha_abs as f64 * ln(radius))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictionBound {
    /// `ln(alpha! (c_m eps)^N / K_N q e^{phi_m(x) + d})`.
    pub ln_sharp: f64,
    /// `ln(t1 e^d q (c_m t2 eps)^N M_N e^{phi_m(x)})`.
    pub ln_certified: f64,
    pub value: f64,
}

/// Certified bound on `|D^alpha f(x)|` from `q_bound >= q_{m+1,eps}(F)`.
pub fn restriction_bound(
    q_bound: f64,
    constants: &ChainConstants,
    dual: &DualSequence,
    seq: &WeightSequence,
    alpha: &[usize],
    phi_val_x: f64,
) -> Result<RestrictionBound> {
    let big_n = order(alpha);
    if big_n > dual.m_max() || big_n > seq.k_max() {
        return Err(Error::IndexOutOfRange { index: big_n, max: dual.m_max().min(seq.k_max()) });
    }
    let ln_q = ln(q_bound);
    let ln_ce = ln(constants.c_m * constants.eps);
    let ln_sharp =
        ln_multi_factorial(alpha) + big_n as f64 * ln_ce - dual.log_term(big_n) + ln_q + phi_val_x + constants.d;
    let ln_certified = ln(constants.t1)
        + constants.d
        + ln_q
        + big_n as f64 * (ln_ce + ln(constants.t2))
        + seq.log_term(big_n)
        + phi_val_x;
    Ok(RestrictionBound { ln_sharp, ln_certified, value: exp(ln_certified) })
}

/// `ln |alpha|!`, the bound used for `alpha!` in the chain.
pub fn ln_order_factorial(alpha: &[usize]) -> f64 {
    ln_factorial(order(alpha))
}
