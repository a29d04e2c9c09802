//! The two continuity inequalities of the extension/restriction pair and
//! the round-trip identity `restrict(extend(f)) = f`.
//!
//! Each check pairs a grid lower bound on one side with a closed-form upper
//! bound on the other, so a pass is a genuine (sampled) verification.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extension::{adaptive_extend, growth_ratio, Extended, ExtensionContext};
use crate::grid::Grid;
use crate::math::exp;
use crate::models::{EntireModel, Model, SmoothModel};
use crate::multi_index::graded;
use crate::phi::{shift_bound, PhiFamily, ShiftBound};
use crate::restriction::{cauchy_jet, chain_constants, ChainConstants, PolydiscContour};
use crate::seminorms::{p_estimate_with, p_upper, q_upper, SeminormEstimate};
use crate::sequences::WeightSequence;
use crate::weight::AssociatedWeight;

/// Sequence, weight, family and sample grids shared by the checks.
#[derive(Clone, Copy)]
pub struct CheckSetup<'a> {
    pub seq: &'a WeightSequence,
    pub weight: &'a AssociatedWeight,
    pub phi: &'a dyn PhiFamily,
    pub x_grid: &'a Grid,
    pub y_grid: &'a Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CheckFlags {
    /// The grid maximum sits on the boundary of the grid.
    pub boundary: bool,
    /// The grid maximum sits at the largest sampled order.
    pub max_order: bool,
    /// A `w_K` evaluation was truncated.
    pub truncated: bool,
    /// The analytic bound was not certified over the stored range.
    pub uncertified: bool,
    /// The sampled shift constant was still growing at the largest radius.
    pub diverging: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityReport {
    pub model: String,
    pub m: usize,
    pub eps: f64,
    /// Grid estimate of the left-hand seminorm.
    pub lhs: f64,
    /// Constant times the analytic bound on the right-hand seminorm.
    pub rhs: f64,
    /// `rhs / lhs`.
    pub slack: f64,
    pub pass: bool,
    pub flags: CheckFlags,
    pub worst_x: Vec<f64>,
    pub worst_y: Option<Vec<f64>>,
    pub worst_alpha: Option<Vec<usize>>,
}

fn slack(lhs: f64, rhs: f64) -> f64 {
    if lhs > 0.0 {
        rhs / lhs
    } else {
        f64::INFINITY
    }
}

/// `q_{m, 2 eps n t2}(T f) <= 2 t1 p_{m,eps}(f)` on the grid `x + i y`.
pub fn forward_continuity_check(
    model: &Model,
    setup: &CheckSetup<'_>,
    m: usize,
    eps: f64,
    tail_tol: f64,
) -> Result<ContinuityReport> {
    let rep = growth_ratio(model, setup.seq, setup.weight, setup.phi, m, eps, setup.x_grid, setup.y_grid, tail_tol)?;
    Ok(ContinuityReport {
        model: String::from(SmoothModel::name(model)),
        m,
        eps,
        lhs: rep.max_ratio,
        rhs: rep.bound,
        slack: rep.slack,
        pass: rep.pass,
        flags: CheckFlags { truncated: rep.truncated, uncertified: !rep.p_upper.certified, ..CheckFlags::default() },
        worst_x: rep.arg_x,
        worst_y: Some(rep.arg_y),
        worst_alpha: None,
    })
}

/// Sampling of the shift constant `b_{m,eps}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSampling {
    pub r_grid: Vec<f64>,
    pub x_points: Vec<Vec<f64>>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackwardReport {
    pub report: ContinuityReport,
    pub constants: ChainConstants,
    pub shift: ShiftBound,
    pub estimate: SeminormEstimate,
    /// Largest Q-vs-2Q discrepancy among the recovered derivatives.
    pub max_discrepancy: f64,
}

/// Cauchy contour used to recover derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchySettings {
    pub radius: f64,
    pub nodes: usize,
}

/// `p_{m, c_m t2 eps}(F|R^n) <= t1 e^{d_{m,eps}} q_{m+1,eps}(F)` with the
/// left side computed from Cauchy-recovered derivatives.
pub fn backward_continuity_check(
    model: &Model,
    setup: &CheckSetup<'_>,
    m: usize,
    eps: f64,
    alpha_max: usize,
    cauchy: CauchySettings,
    sampling: &ShiftSampling,
) -> Result<BackwardReport> {
    let n = model.dim();
    let dual = setup.weight.dual();
    let shift = shift_bound(setup.phi, setup.weight, m, eps, &sampling.r_grid, &sampling.x_points, sampling.seed)?;
    let constants = chain_constants(m, eps, shift.a_m, dual.t1(), dual.t2(), n, shift.b)?;
    let alphas = graded(n, alpha_max);
    let mut max_discrepancy: f64 = 0.0;
    let estimate = p_estimate_with(
        |x, out| {
            let contour = PolydiscContour::new(x.to_vec(), cauchy.radius, cauchy.nodes)?;
            let jet = cauchy_jet(model, &contour, &alphas)?;
            out.clear();
            for e in jet {
                max_discrepancy = max_discrepancy.max(e.discrepancy);
                out.push(e.value.re);
            }
            Ok(())
        },
        setup.seq,
        setup.phi,
        m,
        constants.c_m * constants.t2 * eps,
        setup.x_grid,
        alpha_max,
    )?;
    let q_up = q_upper(model, setup.weight, setup.phi, m + 1, eps)?;
    let rhs = constants.t1 * exp(constants.d) * q_up.value;
    let flags = CheckFlags {
        boundary: estimate.at_boundary,
        max_order: estimate.at_max_order,
        truncated: shift.truncated,
        uncertified: !q_up.certified,
        diverging: shift.diverging,
    };
    let report = ContinuityReport {
        model: String::from(SmoothModel::name(model)),
        m,
        eps,
        lhs: estimate.value,
        rhs,
        slack: slack(estimate.value, rhs),
        pass: estimate.value <= rhs && q_up.certified && !shift.diverging,
        flags,
        worst_x: estimate.arg_x.clone(),
        worst_y: None,
        worst_alpha: estimate.arg_alpha.clone(),
    };
    Ok(BackwardReport { report, constants, shift, estimate, max_discrepancy })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripEntry {
    pub x: Vec<f64>,
    pub alpha: Vec<usize>,
    pub recovered: f64,
    pub oracle: f64,
    pub error: f64,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReverseEntry {
    pub z: Vec<Complex64>,
    pub extended: Complex64,
    pub exact: Complex64,
    pub error: f64,
    pub tail_bound: f64,
    pub n_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripReport {
    pub entries: Vec<RoundtripEntry>,
    pub reverse: Vec<ReverseEntry>,
    pub max_error: f64,
    pub worst: Option<(Vec<f64>, Vec<usize>)>,
    pub tol: f64,
    /// Every forward error is within `tol` and every reverse error within
    /// its tail bound plus rounding.
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundtripConfig {
    pub m: usize,
    pub eps: f64,
    pub alpha_max: usize,
    pub tol: f64,
    pub tail_tol: f64,
    pub cauchy: CauchySettings,
}

/// Rounding allowance added to tail bounds in the reverse comparison.
pub const REVERSE_SLACK: f64 = 1e-12;

/// Cauchy recovery from the adaptive extension at each real point, against
/// the derivative oracle; then the extension at complex points against the
/// closed-form entire model.
pub fn roundtrip(
    model: &Model,
    seq: &WeightSequence,
    phi: &dyn PhiFamily,
    points: &[Vec<f64>],
    complex_points: &[Vec<Complex64>],
    config: &RoundtripConfig,
) -> Result<RoundtripReport> {
    if !(config.tol > 0.0 && config.tail_tol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive"));
    }
    let p = p_upper(model, seq, phi, config.m, config.eps)?;
    let ctx = ExtensionContext { seq, phi, m: config.m, eps: config.eps, p_bound: p.value };
    let extended = Extended { model, ctx, tol: config.tail_tol };
    let alphas = graded(model.dim(), config.alpha_max);

    let mut entries = Vec::new();
    let mut max_error: f64 = 0.0;
    let mut worst = None;
    for x in points {
        let contour = PolydiscContour::new(x.clone(), config.cauchy.radius, config.cauchy.nodes)?;
        for est in cauchy_jet(&extended, &contour, &alphas)? {
            let oracle = model.derivative(&est.alpha, x)?;
            let error = (est.value - Complex64::new(oracle, 0.0)).norm();
            if error > max_error || worst.is_none() {
                max_error = max_error.max(error);
                worst = Some((x.clone(), est.alpha.clone()));
            }
            entries.push(RoundtripEntry {
                x: x.clone(),
                alpha: est.alpha,
                recovered: est.value.re,
                oracle,
                error,
                discrepancy: est.discrepancy,
            });
        }
    }

    let mut reverse = Vec::with_capacity(complex_points.len());
    let mut reverse_ok = true;
    for z in complex_points {
        let r = adaptive_extend(model, z, config.tail_tol, &ctx)?;
        let exact = EntireModel::eval(model, z)?;
        let error = (r.value - exact).norm();
        reverse_ok &= error <= r.tail_bound + REVERSE_SLACK * (1.0 + exact.norm());
        reverse.push(ReverseEntry {
            z: z.clone(),
            extended: r.value,
            exact,
            error,
            tail_bound: r.tail_bound,
            n_used: r.n_used,
        });
    }
    Ok(RoundtripReport {
        pass: max_error <= config.tol && reverse_ok,
        entries,
        reverse,
        max_error,
        worst,
        tol: config.tol,
    })
}
