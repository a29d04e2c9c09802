//! Weight families `phi_m` on `R^n` and the shift inequality
//! `phi_{m+1}(x + xi) <= phi_m(x) + w_K(a_m delta R) + b_{m,delta}` for
//! `|xi| <= R`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{axis_and_diagonal_directions, norm, powf, DirectionSampler};
use crate::weight::AssociatedWeight;

/// A family `{phi_m}` of continuous weights indexed by `m >= 1`.
pub trait PhiFamily {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn eval(&self, m: usize, x: &[f64]) -> f64;

    /// The declared constant `a_m` of the shift inequality.
    fn shift_constant(&self, m: usize) -> f64;

    /// Exact `max_{|xi| <= radius} phi_m(x + xi)` when the family admits a
    /// closed form (radial and nondecreasing in `|x|`).
    fn ball_max(&self, _m: usize, _x: &[f64], _radius: f64) -> Option<f64> {
        None
    }

    /// A lower bound for `phi_m` on all of `R^n`, if known.
    fn lower_bound(&self, _m: usize) -> Option<f64> {
        None
    }
}

/// Shift constants `a_m`, either one value for every `m` or a table
/// (the last entry repeats past the end).
#[derive(Debug, Clone, PartialEq)]
pub enum ShiftConstants {
    Scalar(f64),
    Table(Vec<f64>),
}

impl ShiftConstants {
    pub fn get(&self, m: usize) -> f64 {
        match self {
            ShiftConstants::Scalar(a) => *a,
            ShiftConstants::Table(t) => t[(m.max(1) - 1).min(t.len() - 1)],
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            ShiftConstants::Scalar(a) => *a >= 1.0 && a.is_finite(),
            ShiftConstants::Table(t) => !t.is_empty() && t.iter().all(|a| *a >= 1.0 && a.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("shift constants a_m must be finite and >= 1"))
        }
    }
}

/// `phi_m(x) = |x|^p / m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerFamily {
    p: f64,
    n: usize,
    shift: ShiftConstants,
}

impl PowerFamily {
    pub fn new(p: f64, n: usize, shift: ShiftConstants) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidArgument("power exponent p must be positive"));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1"));
        }
        shift.validate()?;
        Ok(PowerFamily { p, n, shift })
    }

    /// `|x|^2 / m` with `a_m = 1`.
    pub fn quadratic(n: usize) -> Self {
        PowerFamily { p: 2.0, n, shift: ShiftConstants::Scalar(1.0) }
    }

    pub fn exponent(&self) -> f64 {
        self.p
    }

    fn profile(&self, m: usize, radius: f64) -> f64 {
        let r = if self.p == 2.0 { radius * radius } else { powf(radius, self.p) };
        r / m as f64
    }
}

impl PhiFamily for PowerFamily {
    fn name(&self) -> &str {
        "power"
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, m: usize, x: &[f64]) -> f64 {
        if self.p == 2.0 {
            x.iter().map(|v| v * v).sum::<f64>() / m as f64
        } else {
            self.profile(m, norm(x))
        }
    }

    fn shift_constant(&self, m: usize) -> f64 {
        self.shift.get(m)
    }

    fn ball_max(&self, m: usize, x: &[f64], radius: f64) -> Option<f64> {
        Some(self.profile(m, norm(x) + radius))
    }

    fn lower_bound(&self, _m: usize) -> Option<f64> {
        Some(0.0)
    }
}

/// Outcome of a sampled radial condition on `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub pass: bool,
    pub m: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub directions: usize,
    /// Smallest value of the monitored quantity at the largest radius.
    pub value_at_r_max: f64,
    pub failing_direction: Option<usize>,
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.len() < 2 {
        return Err(Error::InvalidArgument("need at least two radii"));
    }
    if radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("radii must be positive and increasing"));
    }
    Ok(())
}

fn increasing_with_margin(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] - w[0] > 1e-12 * w[0].abs().max(w[1].abs()))
}

fn radial_condition(
    phi: &dyn PhiFamily,
    m: usize,
    radii: &[f64],
    quantity: impl Fn(&[f64], f64) -> f64,
    threshold: Option<f64>,
) -> Result<ConditionReport> {
    check_radii(radii)?;
    if m == 0 {
        return Err(Error::InvalidArgument("family index m starts at 1"));
    }
    let dirs = axis_and_diagonal_directions(phi.dim());
    let tail = &radii[radii.len() / 2..];
    let mut failing_direction = None;
    let mut value_at_r_max = f64::INFINITY;
    for (d, e) in dirs.iter().enumerate() {
        let values: Vec<f64> = tail
            .iter()
            .map(|&r| {
                let x: Vec<f64> = e.iter().map(|c| c * r).collect();
                quantity(&x, r)
            })
            .collect();
        let last = values[values.len() - 1];
        value_at_r_max = value_at_r_max.min(last);
        let ok = increasing_with_margin(&values) && threshold.is_none_or(|t| last > t);
        if !ok && failing_direction.is_none() {
            failing_direction = Some(d);
        }
    }
    Ok(ConditionReport {
        pass: failing_direction.is_none(),
        m,
        r_min: radii[0],
        r_max: radii[radii.len() - 1],
        directions: dirs.len(),
        value_at_r_max,
        failing_direction,
    })
}

/// Proxy for `phi_m(x) / |x| -> +inf`: the ratio strictly increases over the
/// upper half of `radii` along axis and diagonal directions.
pub fn check_superlinear(phi: &dyn PhiFamily, m: usize, radii: &[f64]) -> Result<ConditionReport> {
    radial_condition(phi, m, radii, |x, r| phi.eval(m, x) / r, None)
}

/// Proxy for `phi_m - phi_{m+1} -> +inf`: the difference increases over the
/// upper half of `radii` and exceeds `threshold` at the largest radius.
pub fn check_separation(phi: &dyn PhiFamily, m: usize, radii: &[f64], threshold: f64) -> Result<ConditionReport> {
    radial_condition(phi, m, radii, |x, _| phi.eval(m, x) - phi.eval(m + 1, x), Some(threshold))
}

/// Sampled constant `b_{m,delta}` of the shift inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftBound {
    pub m: usize,
    pub delta: f64,
    pub a_m: f64,
    pub b: f64,
    /// Unclamped maximum for each radius of the grid.
    pub per_radius: Vec<f64>,
    pub argmax_x: Vec<f64>,
    pub argmax_radius: f64,
    pub radius_points: usize,
    pub x_points: usize,
    pub directions_per_point: usize,
    /// The maximum is still growing at the largest radius.
    pub diverging: bool,
    /// Some `w_K` evaluation was truncated (the sampled `b` is then an
    /// over-estimate, which keeps it admissible).
    pub truncated: bool,
}

pub const RANDOM_DIRECTIONS: usize = 32;

/// Sample `b_{m,delta} = max phi_{m+1}(x + xi) - phi_m(x) - w_K(a_m delta R)`
/// over `x` in `x_grid`, `R` in `r_grid`, and `xi = R e` for axis, diagonal,
/// `x/|x|` and [`RANDOM_DIRECTIONS`] random unit directions `e`.
pub fn shift_bound(
    phi: &dyn PhiFamily,
    weight: &AssociatedWeight,
    m: usize,
    delta: f64,
    r_grid: &[f64],
    x_grid: &[Vec<f64>],
    seed: u64,
) -> Result<ShiftBound> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument("delta must be positive"));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("family index m starts at 1"));
    }
    check_radii(r_grid)?;
    if x_grid.is_empty() {
        return Err(Error::InvalidArgument("x grid must be nonempty"));
    }
    let n = phi.dim();
    if let Some(x) = x_grid.iter().find(|x| x.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let a_m = phi.shift_constant(m);
    let fixed_dirs = axis_and_diagonal_directions(n);
    let mut sampler = DirectionSampler::new(seed);
    let mut shifted = alloc::vec![0.0; n];

    let mut best = f64::NEG_INFINITY;
    let mut argmax_x = x_grid[0].clone();
    let mut argmax_radius = r_grid[0];
    let mut per_radius = Vec::with_capacity(r_grid.len());
    let mut truncated = false;
    let mut directions_per_point = 0;

    for &radius in r_grid {
        let wv = weight.eval(a_m * delta * radius)?;
        truncated |= wv.truncated;
        let mut radius_best = f64::NEG_INFINITY;
        for x in x_grid {
            let base = phi.eval(m, x) + wv.value;
            let random = sampler.unit_vectors(n, RANDOM_DIRECTIONS);
            let xn = norm(x);
            let aligned = (xn > 0.0).then(|| x.iter().map(|c| c / xn).collect::<Vec<f64>>());
            let dirs = fixed_dirs.iter().chain(random.iter()).chain(aligned.iter());
            let mut count = 0;
            for e in dirs {
                count += 1;
                for j in 0..n {
                    shifted[j] = x[j] + radius * e[j];
                }
                let v = phi.eval(m + 1, &shifted) - base;
                if v > radius_best {
                    radius_best = v;
                }
                if v > best {
                    best = v;
                    argmax_x.clone_from(x);
                    argmax_radius = radius;
                }
            }
            directions_per_point = directions_per_point.max(count);
        }
        per_radius.push(radius_best);
    }
    let k = per_radius.len();
    let diverging = per_radius[k - 1] >= best
        && per_radius[k - 1] > per_radius[k - 2] + 1e-12 * per_radius[k - 2].abs()
        && best > 0.0;
    Ok(ShiftBound {
        m,
        delta,
        a_m,
        b: best.max(0.0),
        per_radius,
        argmax_x,
        argmax_radius,
        radius_points: r_grid.len(),
        x_points: x_grid.len(),
        directions_per_point,
        diverging,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{lin_space, ln_factorial};
    use crate::sequences::DualSequence;

    struct Identical;

    impl PhiFamily for Identical {
        fn name(&self) -> &str {
            "identical"
        }
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, _m: usize, x: &[f64]) -> f64 {
            x[0] * x[0]
        }
        fn shift_constant(&self, _m: usize) -> f64 {
            1.0
        }
    }

    fn weight(power: f64, m_max: usize) -> AssociatedWeight {
        let terms = (0..=m_max).map(|m| power * ln_factorial(m)).collect();
        AssociatedWeight::new(DualSequence::new(terms, 1e-6, 1e-6).unwrap()).unwrap()
    }

    fn x_axis(lo: f64, hi: f64, count: usize) -> Vec<Vec<f64>> {
        lin_space(lo, hi, count).into_iter().map(|v| alloc::vec![v]).collect()
    }

    #[test]
    fn superlinear_examples() {
        let radii = lin_space(1.0, 100.0, 100);
        assert!(check_superlinear(&PowerFamily::quadratic(1), 1, &radii).unwrap().pass);
        let linear = PowerFamily::new(1.0, 1, ShiftConstants::Scalar(1.0)).unwrap();
        assert!(!check_superlinear(&linear, 1, &radii).unwrap().pass);
        assert!(check_superlinear(&PowerFamily::quadratic(3), 7, &radii).unwrap().pass);
    }

    #[test]
    fn separation_examples() {
        let radii = lin_space(1.0, 100.0, 100);
        let r = check_separation(&PowerFamily::quadratic(2), 1, &radii, 1.0).unwrap();
        assert!(r.pass);
        assert!((r.value_at_r_max - 100.0f64.powi(2) / 2.0).abs() < 1e-9);
        assert!(!check_separation(&Identical, 1, &radii, 1.0).unwrap().pass);
        let cubic = PowerFamily::new(3.0, 1, ShiftConstants::Scalar(1.0)).unwrap();
        assert!(check_separation(&cubic, 2, &radii, 1.0).unwrap().pass);
    }

    #[test]
    fn bad_radii_rejected() {
        let phi = PowerFamily::quadratic(1);
        assert!(check_superlinear(&phi, 1, &[1.0]).is_err());
        assert!(check_superlinear(&phi, 1, &[2.0, 1.0]).is_err());
        assert!(PowerFamily::new(2.0, 1, ShiftConstants::Scalar(0.5)).is_err());
    }

    #[test]
    fn quadratic_envelope_holds_on_random_samples() {
        let phi = PowerFamily::quadratic(3);
        let mut s = DirectionSampler::new(3);
        for i in 0..500 {
            let m = 1 + i % 5;
            let radius = 0.01 * (i % 300) as f64;
            let x: Vec<f64> = s.unit_vector(3).iter().map(|c| c * (i % 17) as f64).collect();
            let xi: Vec<f64> = s.unit_vector(3).iter().map(|c| c * radius * 0.9).collect();
            let moved: Vec<f64> = x.iter().zip(&xi).map(|(a, b)| a + b).collect();
            let lhs = phi.eval(m + 1, &moved);
            let rhs = phi.eval(m, &x) + radius * radius;
            assert!(lhs <= rhs * (1.0 + 1e-14) + 1e-14);
        }
    }

    #[test]
    fn shift_bound_quadratic_cubic_weight_is_finite() {
        let w = weight(1.0 / 3.0, 400);
        let phi = PowerFamily::quadratic(1);
        let r_grid = lin_space(0.05, 4.0, 80);
        let sb = shift_bound(&phi, &w, 1, 1.0, &r_grid, &x_axis(-6.0, 6.0, 241), 1).unwrap();
        assert!(!sb.diverging);
        assert!(!sb.truncated);
        // analytic envelope R^2 - w_K(R), maximised over the same R grid
        let envelope = r_grid.iter().map(|&r| r * r - w.eval(r).unwrap().value).fold(f64::NEG_INFINITY, f64::max);
        assert!(sb.b <= envelope + 1e-12);
        assert!(sb.b >= 0.99 * envelope);
        assert!(sb.b > 0.0);
    }

    #[test]
    fn shift_bound_at_origin_is_nonpositive() {
        let w = weight(1.0 / 3.0, 200);
        let phi = PowerFamily::quadratic(1);
        let sb = shift_bound(&phi, &w, 1, 1.0, &[1e-9, 2e-9], &[alloc::vec![0.0]], 1).unwrap();
        // only phi_2(xi) = R^2 / 2 remains
        assert!(sb.per_radius.iter().all(|&v| v <= 2.0e-18 * (1.0 + 1e-12)));
        assert!(sb.b >= 0.0);
    }

    #[test]
    fn shift_bound_quadratic_weight_diverges() {
        let w = weight(0.5, 400);
        let phi = PowerFamily::quadratic(1);
        let sb = shift_bound(&phi, &w, 1, 0.5, &lin_space(0.1, 10.0, 60), &x_axis(-10.0, 10.0, 201), 1).unwrap();
        assert!(sb.diverging);
    }

    #[test]
    fn shift_bound_nonincreasing_in_delta() {
        let w = weight(1.0 / 3.0, 400);
        let phi = PowerFamily::quadratic(2);
        let r_grid = lin_space(0.1, 4.0, 30);
        let xs: Vec<Vec<f64>> = lin_space(-4.0, 4.0, 9)
            .into_iter()
            .flat_map(|a| lin_space(-4.0, 4.0, 9).into_iter().map(move |b| alloc::vec![a, b]))
            .collect();
        let mut prev = f64::INFINITY;
        for delta in [0.5, 1.0, 1.5, 2.0] {
            let b = shift_bound(&phi, &w, 1, delta, &r_grid, &xs, 9).unwrap().b;
            assert!(b <= prev);
            prev = b;
        }
    }
}
