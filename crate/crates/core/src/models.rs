//! Test functions with exact jets on `R^n` and exact entire extensions.
//!
//! Every built-in is a scaled product `s * prod_j g(x_j)` of one coordinate
//! factor `g`, so mixed partials factor as `prod_j g^{(alpha_j)}(x_j)` and
//! are symmetric by construction.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{cos, exp, ln, ln_abs, ln_factorial, sin, sqrt, LnFactorial, E};
use crate::multi_index::order;
use crate::phi::PhiFamily;
use crate::seminorms::{p_estimate, SeminormEstimate};
use crate::sequences::WeightSequence;

/// Depth cap of the raw Hermite-recurrence derivative oracle.
pub const GAUSSIAN_DERIVATIVE_MAX_ORDER: usize = 60;

/// Depth cap for Taylor-coefficient jets (computed in normalised form).
pub const JET_MAX_ORDER: usize = 4096;

/// Constant in `|H_k(t)| e^{-t^2/2} <= C 2^{k/2} sqrt(k!)` (Cramer's
/// inequality for physicists' Hermite polynomials).
pub const CRAMER_CONSTANT: f64 = 1.086_435;

/// A smooth function on `R^n` with an exact derivative oracle.
pub trait SmoothModel {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    /// Largest order available from [`taylor_table`](Self::taylor_table).
    fn max_order(&self) -> usize;

    /// `D^alpha f(x)`.
    fn derivative(&self, alpha: &[usize], x: &[f64]) -> Result<f64>;

    /// Taylor coefficients `D^alpha f(x) / alpha!` for `|alpha| <= order`.
    fn taylor_table(&self, x: &[f64], order: usize) -> Result<TaylorTable>;
}

/// An entire function on `C^n`.
pub trait EntireModel {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn eval(&self, z: &[Complex64]) -> Result<Complex64>;
}

/// Taylor coefficients of a product model at a base point:
/// `c_alpha = scale * prod_j jets[j][alpha_j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorTable {
    scale: f64,
    jets: Vec<Vec<f64>>,
}

impl TaylorTable {
    pub fn new(scale: f64, jets: Vec<Vec<f64>>) -> Self {
        TaylorTable { scale, jets }
    }

    pub fn order(&self) -> usize {
        self.jets.iter().map(|j| j.len()).min().unwrap_or(1) - 1
    }

    pub fn dim(&self) -> usize {
        self.jets.len()
    }

    pub fn coefficient(&self, alpha: &[usize]) -> f64 {
        alpha.iter().zip(&self.jets).fold(self.scale, |acc, (&a, jet)| acc * jet[a])
    }

    /// One-dimensional jet of coordinate `j`.
    pub fn jet(&self, j: usize) -> &[f64] {
        &self.jets[j]
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

/// Coordinate factor of a built-in model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// `exp(-c t^2)`, `c > 0`.
    Gaussian { c: f64 },
    /// `cos t`.
    Cosine,
    /// `t^degree exp(-c t^2)`, `c > 0`.
    PolyGaussian { c: f64, degree: usize },
    /// `exp(c t^2)`, `c > 0`; not in any of the smooth classes considered.
    ExpSquare { c: f64 },
    /// The zero function.
    Zero,
}

/// Built-in product model `scale * prod_j g(x_j)` in `n` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    kind: ModelKind,
    n: usize,
    scale: f64,
    name: String,
}

impl Model {
    pub fn new(kind: ModelKind, n: usize, scale: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1"));
        }
        if !scale.is_finite() {
            return Err(Error::InvalidArgument("scale must be finite"));
        }
        match kind {
            ModelKind::Gaussian { c } | ModelKind::PolyGaussian { c, .. } | ModelKind::ExpSquare { c }
                if !(c > 0.0 && c.is_finite()) =>
            {
                return Err(Error::InvalidArgument("Gaussian rate c must be positive"));
            }
            _ => {}
        }
        let name = match kind {
            ModelKind::Gaussian { .. } => "gaussian",
            ModelKind::Cosine => "cosine",
            ModelKind::PolyGaussian { .. } => "poly-gaussian",
            ModelKind::ExpSquare { .. } => "exp-square",
            ModelKind::Zero => "zero",
        };
        Ok(Model { kind, n, scale, name: String::from(name) })
    }

    pub fn gaussian(c: f64, n: usize) -> Result<Self> {
        Self::new(ModelKind::Gaussian { c }, n, 1.0)
    }

    pub fn cosine(n: usize) -> Result<Self> {
        Self::new(ModelKind::Cosine, n, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The same model multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Model { scale: self.scale * factor, ..self.clone() }
    }

    fn factor_derivative(&self, k: usize, t: f64) -> Result<f64> {
        match self.kind {
            ModelKind::Gaussian { c } => gaussian_factor_derivative(k, t, c),
            ModelKind::ExpSquare { c } => gaussian_factor_derivative(k, t, -c),
            ModelKind::Cosine => Ok(cos_shift(t, k)),
            ModelKind::PolyGaussian { c, degree } => {
                // Leibniz: sum_i C(k,i) d!/(d-i)! t^{d-i} g^{(k-i)}(t)
                let mut acc = 0.0;
                for i in 0..=k.min(degree) {
                    let ln_coeff = ln_factorial(k) - ln_factorial(i) - ln_factorial(k - i) + ln_factorial(degree)
                        - ln_factorial(degree - i);
                    acc += exp(ln_coeff) * t.powi((degree - i) as i32) * gaussian_factor_derivative(k - i, t, c)?;
                }
                Ok(acc)
            }
            ModelKind::Zero => Ok(0.0),
        }
    }

    fn factor_jet(&self, t: f64, order: usize, table: &LnFactorial) -> Vec<f64> {
        match self.kind {
            ModelKind::Gaussian { c } => gaussian_jet(t, c, order, table),
            ModelKind::ExpSquare { c } => gaussian_jet(t, -c, order, table),
            ModelKind::Cosine => (0..=order).map(|k| cos_shift(t, k) * exp(-table.get(k))).collect(),
            ModelKind::PolyGaussian { c, degree } => {
                let g = gaussian_jet(t, c, order, table);
                // (t + h)^d = sum_i C(d,i) t^{d-i} h^i
                let poly: Vec<f64> = (0..=degree)
                    .map(|i| {
                        exp(ln_factorial(degree) - ln_factorial(i) - ln_factorial(degree - i))
                            * t.powi((degree - i) as i32)
                    })
                    .collect();
                (0..=order).map(|k| (0..=k.min(degree)).map(|i| poly[i] * g[k - i]).sum()).collect()
            }
            ModelKind::Zero => alloc::vec![0.0; order + 1],
        }
    }

    fn check_point(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.n, got: len })
        }
    }

    /// `ln B(k)` with `|g^{(k)}(t)| <= B(k)` for every real `t`, if such a
    /// bound is known in closed form.
    pub fn ln_derivative_envelope(&self, k: usize) -> Option<f64> {
        match self.kind {
            ModelKind::Gaussian { c } => Some(ln_gaussian_envelope(k, c)),
            ModelKind::Cosine => Some(0.0),
            ModelKind::PolyGaussian { c, degree } => {
                let terms: Vec<f64> = (0..=k.min(degree))
                    .map(|i| {
                        let j = degree - i;
                        let ln_power_sup = if j == 0 { 0.0 } else { 0.5 * j as f64 * ln(j as f64 / (c * E)) };
                        ln_factorial(k) - ln_factorial(i) - ln_factorial(k - i) + ln_factorial(degree)
                            - ln_factorial(degree - i)
                            + ln_power_sup
                            + ln_gaussian_envelope(k - i, c)
                    })
                    .collect();
                Some(log_sum_exp(&terms))
            }
            ModelKind::ExpSquare { .. } => None,
            ModelKind::Zero => Some(f64::NEG_INFINITY),
        }
    }

    /// Bound `ln |F(x + iy)| <= ln_const + linear |y| + quadratic |y|^2`
    /// valid for all `x`, if known.
    pub fn growth_envelope(&self) -> Option<GrowthEnvelope> {
        let ln_scale = ln_abs(self.scale);
        let n = self.n as f64;
        let env = match self.kind {
            ModelKind::Gaussian { c } => GrowthEnvelope { ln_const: 0.0, linear: 0.0, quadratic: c },
            ModelKind::Cosine => GrowthEnvelope { ln_const: 0.0, linear: sqrt(n), quadratic: 0.0 },
            ModelKind::PolyGaussian { c, degree } => {
                let per_coordinate = if degree == 0 {
                    0.0
                } else {
                    let d = degree as f64;
                    let a_d = exp(0.5 * d * ln(d / (2.0 * c * E)));
                    (d - 1.0) * ln(2.0) + ln(a_d + exp(ln_factorial(degree)))
                };
                GrowthEnvelope { ln_const: n * per_coordinate, linear: sqrt(n), quadratic: c }
            }
            ModelKind::ExpSquare { .. } => return None,
            ModelKind::Zero => GrowthEnvelope { ln_const: f64::NEG_INFINITY, linear: 0.0, quadratic: 0.0 },
        };
        Some(GrowthEnvelope { ln_const: env.ln_const + ln_scale, ..env })
    }
}

/// `ln |F(x+iy)| <= ln_const + linear |y| + quadratic |y|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthEnvelope {
    pub ln_const: f64,
    pub linear: f64,
    pub quadratic: f64,
}

impl GrowthEnvelope {
    pub fn exponent(&self, y_norm: f64) -> f64 {
        self.ln_const + self.linear * y_norm + self.quadratic * y_norm * y_norm
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + ln(terms.iter().map(|t| exp(t - top)).sum::<f64>())
}

fn ln_gaussian_envelope(k: usize, c: f64) -> f64 {
    ln(CRAMER_CONSTANT) + 0.5 * k as f64 * ln(2.0 * c) + 0.5 * ln_factorial(k)
}

/// `cos(t + k pi / 2)`, i.e. the `k`-th derivative of `cos` at `t`.
fn cos_shift(t: f64, k: usize) -> f64 {
    match k % 4 {
        0 => cos(t),
        1 => -sin(t),
        2 => -cos(t),
        _ => sin(t),
    }
}

/// `d^k/dt^k exp(-c t^2)` via `h_{k+1} = -2ct h_k - 2ck h_{k-1}`; any
/// nonzero `c`.
fn gaussian_factor_derivative(k: usize, t: f64, c: f64) -> Result<f64> {
    if k > GAUSSIAN_DERIVATIVE_MAX_ORDER {
        return Err(Error::DepthExceeded { order: k, max: GAUSSIAN_DERIVATIVE_MAX_ORDER });
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for j in 0..k {
        let next = -2.0 * c * t * cur - 2.0 * c * j as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur * exp(-c * t * t))
}

/// Taylor coefficients `g^{(k)}(t)/k!` of `exp(-c t^2)` for `k <= order`,
/// through the normalised recurrence
/// `u_{k+1} = -sgn(c) (sqrt(2|c|) t u_k + sqrt(k) u_{k-1}) / sqrt(k+1)`
/// with `h_k = u_k (2|c|)^{k/2} sqrt(k!)`.
fn gaussian_jet(t: f64, c: f64, order: usize, table: &LnFactorial) -> Vec<f64> {
    let sign = if c > 0.0 { -1.0 } else { 1.0 };
    let ln_two_c = ln(2.0 * c.abs());
    let root = sqrt(2.0 * c.abs());
    let mut jet = Vec::with_capacity(order + 1);
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..=order {
        let ln_mag = 0.5 * k as f64 * ln_two_c - 0.5 * table.get(k) - c * t * t;
        jet.push(cur * exp(ln_mag));
        let next = sign * (root * t * cur + sqrt(k as f64) * prev) / sqrt((k + 1) as f64);
        prev = cur;
        cur = next;
    }
    jet
}

/// `D^alpha exp(-c |x|^2)` by the Hermite three-term recurrence in each
/// coordinate. `|alpha| <= 60`.
pub fn gaussian_derivative(alpha: &[usize], x: &[f64], c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument("Gaussian rate c must be positive"));
    }
    if alpha.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: alpha.len() });
    }
    let total = order(alpha);
    if total > GAUSSIAN_DERIVATIVE_MAX_ORDER {
        return Err(Error::DepthExceeded { order: total, max: GAUSSIAN_DERIVATIVE_MAX_ORDER });
    }
    alpha.iter().zip(x).try_fold(1.0, |acc, (&a, &t)| Ok(acc * gaussian_factor_derivative(a, t, c)?))
}

impl SmoothModel for Model {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn max_order(&self) -> usize {
        JET_MAX_ORDER
    }

    fn derivative(&self, alpha: &[usize], x: &[f64]) -> Result<f64> {
        self.check_point(x.len())?;
        self.check_point(alpha.len())?;
        if matches!(
            self.kind,
            ModelKind::Gaussian { .. } | ModelKind::PolyGaussian { .. } | ModelKind::ExpSquare { .. }
        ) && order(alpha) > GAUSSIAN_DERIVATIVE_MAX_ORDER
        {
            return Err(Error::DepthExceeded { order: order(alpha), max: GAUSSIAN_DERIVATIVE_MAX_ORDER });
        }
        alpha.iter().zip(x).try_fold(self.scale, |acc, (&a, &t)| Ok(acc * self.factor_derivative(a, t)?))
    }

    fn taylor_table(&self, x: &[f64], order: usize) -> Result<TaylorTable> {
        self.check_point(x.len())?;
        if order > JET_MAX_ORDER {
            return Err(Error::DepthExceeded { order, max: JET_MAX_ORDER });
        }
        let table = LnFactorial::new(order);
        let jets = x.iter().map(|&t| self.factor_jet(t, order, &table)).collect();
        Ok(TaylorTable::new(self.scale, jets))
    }
}

impl EntireModel for Model {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        self.check_point(z.len())?;
        let square_sum: Complex64 = z.iter().map(|v| v * v).sum();
        let value = match self.kind {
            ModelKind::Gaussian { c } => (-square_sum * c).exp(),
            ModelKind::ExpSquare { c } => (square_sum * c).exp(),
            ModelKind::Cosine => z.iter().map(|v| v.cos()).product(),
            ModelKind::PolyGaussian { c, degree } => {
                z.iter().map(|v| v.powu(degree as u32)).product::<Complex64>() * (-square_sum * c).exp()
            }
            ModelKind::Zero => Complex64::new(0.0, 0.0),
        };
        Ok(value * self.scale)
    }
}

/// Grid estimate of `p_{m,eps}(f)`; the blow-up flag is raised when the
/// running supremum is still attained at the largest order or on the
/// boundary of the grid.
pub fn membership_estimate(
    model: &dyn SmoothModel,
    seq: &WeightSequence,
    phi: &dyn PhiFamily,
    m: usize,
    eps: f64,
    x_grid: &crate::grid::Grid,
    alpha_max: usize,
) -> Result<SeminormEstimate> {
    p_estimate(model, seq, phi, m, eps, x_grid, alpha_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_derivative_examples() {
        assert_eq!(gaussian_derivative(&[0], &[0.0], 1.0).unwrap(), 1.0);
        assert_eq!(gaussian_derivative(&[2], &[0.0], 1.0).unwrap(), -2.0);
        assert_eq!(gaussian_derivative(&[4], &[0.0], 1.0).unwrap(), 12.0);
        assert!(matches!(gaussian_derivative(&[61], &[0.0], 1.0), Err(Error::DepthExceeded { .. })));
        assert!(gaussian_derivative(&[1], &[0.0], 0.0).is_err());
    }

    fn central_difference(f: impl Fn(f64) -> f64, x: f64, k: usize, h: f64) -> f64 {
        // k-th central difference / h^k
        let mut acc = 0.0;
        for j in 0..=k {
            let binom = exp(ln_factorial(k) - ln_factorial(j) - ln_factorial(k - j));
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * f(x + (k as f64 / 2.0 - j as f64) * h);
        }
        acc / h.powi(k as i32)
    }

    #[test]
    fn gaussian_oracle_matches_finite_differences() {
        let f = |t: f64| exp(-t * t);
        for &x in &[-1.0, 0.0, 0.7] {
            for k in 1..=4usize {
                // Richardson extrapolation on two step sizes
                let h = 0.02;
                let d1 = central_difference(f, x, k, h);
                let d2 = central_difference(f, x, k, h / 2.0);
                let fd = (4.0 * d2 - d1) / 3.0;
                let exact = gaussian_derivative(&[k], &[x], 1.0).unwrap();
                let rel = (fd - exact).abs() / exact.abs().max(1e-3);
                assert!(rel <= 1e-6, "x = {x}, k = {k}, rel = {rel}");
            }
        }
    }

    #[test]
    fn normalised_jet_agrees_with_raw_recurrence() {
        let table = LnFactorial::new(60);
        for &c in &[1.0, 0.5, -1.0] {
            for &t in &[-2.0, 0.0, 0.3, 1.5] {
                let jet = gaussian_jet(t, c, 60, &table);
                for (k, &v) in jet.iter().enumerate().take(41) {
                    let raw = gaussian_factor_derivative(k, t, c).unwrap() * exp(-table.get(k));
                    assert!((v - raw).abs() <= 1e-11 * raw.abs().max(1e-300) + 1e-300, "{c} {t} {k}");
                }
            }
        }
    }

    #[test]
    fn cramer_constant_bounds_hermite_functions() {
        let table = LnFactorial::new(200);
        let mut worst: f64 = 0.0;
        for i in 0..=800 {
            let t = -20.0 + 0.05 * i as f64;
            // jet * k! = h_k e^{-t^2}; compare |h_k| e^{-t^2/2} with 2^{k/2} sqrt(k!)
            let jet = gaussian_jet(t, 1.0, 200, &table);
            for (k, v) in jet.iter().enumerate() {
                let normalised =
                    v.abs() * exp(table.get(k) - 0.5 * k as f64 * ln(2.0) - 0.5 * table.get(k) + 0.5 * t * t);
                worst = worst.max(normalised);
            }
        }
        assert!(worst <= CRAMER_CONSTANT);
        // the sharp constant for this normalisation is 1, attained at k = 0, t = 0
        assert!((worst - 1.0).abs() < 1e-12, "{worst}");
    }

    #[test]
    fn envelope_bounds_derivatives() {
        let models = [
            Model::gaussian(1.0, 1).unwrap(),
            Model::gaussian(0.3, 1).unwrap(),
            Model::cosine(1).unwrap(),
            Model::new(ModelKind::PolyGaussian { c: 1.0, degree: 2 }, 1, 1.0).unwrap(),
        ];
        for model in &models {
            for k in 0..=20 {
                let bound = exp(model.ln_derivative_envelope(k).unwrap());
                for i in 0..=240 {
                    let t = -6.0 + 0.05 * i as f64;
                    let d = model.derivative(&[k], &[t]).unwrap();
                    assert!(d.abs() <= bound * (1.0 + 1e-12), "{} k={k} t={t}", SmoothModel::name(model));
                }
            }
        }
    }

    #[test]
    fn growth_envelope_bounds_modulus() {
        let models = [
            Model::gaussian(1.0, 2).unwrap(),
            Model::cosine(2).unwrap(),
            Model::new(ModelKind::PolyGaussian { c: 0.5, degree: 3 }, 2, -2.0).unwrap(),
        ];
        for model in &models {
            let env = model.growth_envelope().unwrap();
            for i in 0..15 {
                for j in 0..15 {
                    let z = [
                        Complex64::new(-3.5 + 0.5 * i as f64, 0.3 * j as f64),
                        Complex64::new(1.0 - 0.2 * j as f64, -2.0 + 0.25 * i as f64),
                    ];
                    let y = sqrt(z[0].im * z[0].im + z[1].im * z[1].im);
                    let lhs = ln(model.eval(&z).unwrap().norm());
                    assert!(lhs <= env.exponent(y) + 1e-12);
                }
            }
        }
        assert!(Model::new(ModelKind::ExpSquare { c: 1.0 }, 1, 1.0).unwrap().growth_envelope().is_none());
    }

    #[test]
    fn entire_and_smooth_agree_on_real_points() {
        let models = [
            Model::gaussian(1.0, 2).unwrap(),
            Model::cosine(2).unwrap(),
            Model::new(ModelKind::PolyGaussian { c: 0.5, degree: 2 }, 2, 3.0).unwrap(),
        ];
        let mut s = crate::math::DirectionSampler::new(11);
        for model in &models {
            for _ in 0..100 {
                let x: Vec<f64> = s.unit_vector(2).iter().map(|v| 3.0 * v).collect();
                let z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                let f = model.derivative(&[0, 0], &x).unwrap();
                let fz = model.eval(&z).unwrap();
                assert!(
                    (fz.re - f).abs() <= 16.0 * f64::EPSILON * f.abs().max(1e-300),
                    "{} {fz} {f}",
                    SmoothModel::name(model)
                );
                assert_eq!(fz.im, 0.0);
            }
        }
    }

    #[test]
    fn mixed_partials_and_table_are_consistent() {
        let model = Model::new(ModelKind::PolyGaussian { c: 1.0, degree: 1 }, 2, 1.0).unwrap();
        let x = [0.4, -1.1];
        let table = model.taylor_table(&x, 8).unwrap();
        for a in 0..=4usize {
            for b in 0..=4usize {
                let d = model.derivative(&[a, b], &x).unwrap();
                let c = table.coefficient(&[a, b]) * exp(ln_factorial(a) + ln_factorial(b));
                assert!((d - c).abs() <= 1e-12 * d.abs().max(1.0));
            }
        }
    }

    #[test]
    fn dimension_is_checked() {
        let model = Model::gaussian(1.0, 2).unwrap();
        assert!(matches!(model.derivative(&[0], &[0.0]), Err(Error::DimensionMismatch { .. })));
        assert!(model.eval(&[Complex64::new(0.0, 0.0)]).is_err());
        assert!(Model::gaussian(-1.0, 1).is_err());
    }
}
