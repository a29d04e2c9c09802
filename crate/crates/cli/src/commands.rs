//! Command runners. Each returns an [`Outcome`] or the first math error.

use holoext_core::extension::{adaptive_extend, growth_ratio, ExtensionContext};
use holoext_core::math::{lin_space, norm};
use holoext_core::models::{EntireModel, Model, SmoothModel};
use holoext_core::multi_index::{graded, order};
use holoext_core::phi::{check_separation, check_superlinear, shift_bound, PhiFamily, PowerFamily, ShiftBound};
use holoext_core::restriction::{cauchy_jet, chain_constants, inf_over_r_bound, restriction_bound, PolydiscContour};
use holoext_core::roundtrip::{
    backward_continuity_check, forward_continuity_check, roundtrip, CauchySettings, CheckFlags, CheckSetup,
    ContinuityReport, RoundtripConfig, ShiftSampling,
};
use holoext_core::seminorms::{p_upper, q_upper};
use holoext_core::sequences::{
    check_k_submultiplicative, check_supermultiplicative, derive_dual, validate_alpha1, validate_alpha2,
    validate_growth, DualFitOptions, DualSequence, GrowthOptions, WeightSequence,
};
use holoext_core::weight::{lemma_gap, AssociatedWeight};
use holoext_core::{Complex64, Result};
use rayon::prelude::*;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{Cell, Check, Outcome, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    VerifySequences,
    WeightTable,
    LemmaScan,
    PhiCheck,
    ExtendEval,
    CauchyRecover,
    Roundtrip,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifySequences => "verify-sequences",
            Command::WeightTable => "weight-table",
            Command::LemmaScan => "lemma-scan",
            Command::PhiCheck => "phi-check",
            Command::ExtendEval => "extend-eval",
            Command::CauchyRecover => "cauchy-recover",
            Command::Roundtrip => "roundtrip",
            Command::Report => "report",
        }
    }
}

/// Objects built once from a validated configuration.
pub struct Context<'a> {
    pub config: &'a RunConfig,
    pub seed: u64,
    pub seq: WeightSequence,
    pub weight: AssociatedWeight,
    pub phi: PowerFamily,
    pub models: Vec<Model>,
}

impl<'a> Context<'a> {
    pub fn new(config: &'a RunConfig, seed: u64) -> Result<Self> {
        let seq = config.sequence()?;
        let dual = match &config.dual {
            Some(d) => DualSequence::new(d.log_terms.clone(), d.ln_t1, d.ln_t2)?,
            None => derive_dual(&seq, &DualFitOptions::default())?,
        };
        if dual.sandwich_violation(&seq).is_some() {
            return Err(holoext_core::Error::NoSandwichConstants { ln_t1: dual.ln_t1(), ln_t2: dual.ln_t2() });
        }
        Ok(Context {
            config,
            seed,
            weight: AssociatedWeight::new(dual)?,
            seq,
            phi: config.phi()?,
            models: config.models()?,
        })
    }

    fn dual(&self) -> &DualSequence {
        self.weight.dual()
    }

    fn pairs(&self) -> Vec<(usize, f64)> {
        let p = &self.config.params;
        p.m.iter().flat_map(|&m| p.eps.iter().map(move |&e| (m, e))).collect()
    }

    fn sampling(&self) -> Result<ShiftSampling> {
        Ok(ShiftSampling {
            r_grid: self.config.grids.shift_radius.nodes(),
            x_points: self.config.shift_points()?,
            seed: self.seed,
        })
    }

    fn cauchy(&self) -> CauchySettings {
        CauchySettings { radius: self.config.cauchy.radius, nodes: self.config.cauchy.nodes }
    }

    fn alphas(&self) -> Vec<Vec<usize>> {
        if self.config.cauchy.alphas.is_empty() {
            graded(self.phi.dim(), self.config.params.alpha_max)
        } else {
            self.config.cauchy.alphas.clone()
        }
    }
}

pub fn run(command: Command, ctx: &Context<'_>) -> Result<Outcome> {
    match command {
        Command::VerifySequences => verify_sequences(ctx),
        Command::WeightTable => weight_table(ctx),
        Command::LemmaScan => lemma_scan(ctx),
        Command::PhiCheck => phi_check(ctx),
        Command::ExtendEval => extend_eval(ctx),
        Command::CauchyRecover => cauchy_recover(ctx),
        Command::Roundtrip => roundtrip_cmd(ctx),
        Command::Report => report(ctx),
    }
}

fn ratio_slack(bound: f64, observed: f64) -> f64 {
    if observed > 0.0 {
        bound / observed
    } else {
        f64::INFINITY
    }
}

fn coord_columns(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|j| format!("{prefix}{j}")).collect()
}

fn nums(v: &[f64]) -> Vec<Cell> {
    v.iter().map(|&x| Cell::Num(x)).collect()
}

fn ints(v: &[usize]) -> Vec<Cell> {
    v.iter().map(|&x| Cell::from(x)).collect()
}

pub fn verify_sequences(ctx: &Context<'_>) -> Result<Outcome> {
    let p = &ctx.config.params;
    let mut out = Outcome::new("verify-sequences");

    let a1 = validate_alpha1(&ctx.seq);
    out.checks.push(
        Check::new("log-convexity", a1.pass)
            .worst(json!({ "first_violation": a1.first_violation }))
            .detail(json!({ "checked_up_to": a1.checked_up_to })),
    );

    let g = validate_growth(&ctx.seq, &GrowthOptions { threshold: p.growth_threshold });
    out.checks.push(Check::new("superlinear-growth", g.pass).slack(g.final_ratio / g.threshold).detail(json!({
        "tail_from": g.tail_from,
        "final_ratio": g.final_ratio,
        "tail_slope": g.tail_slope,
        "eventually_increasing": g.eventually_increasing,
    })));

    let certs = validate_alpha2(&ctx.seq, &p.eps)?;
    for c in &certs {
        out.checks.push(
            Check::new(format!("factorial-domination eps={}", c.epsilon), c.a_eps.is_finite() && c.trend_decreasing)
                .worst(json!({ "argmax_k": c.argmax_k }))
                .detail(json!({ "a_eps": c.a_eps, "k_checked": c.k_checked })),
        );
    }

    let dual = ctx.dual();
    let violation = dual.sandwich_violation(&ctx.seq);
    out.checks.push(
        Check::new("dual-sandwich", violation.is_none())
            .worst(json!({ "first_violation": violation }))
            .detail(json!({ "t1": dual.t1(), "t2": dual.t2(), "ln_t1": dual.ln_t1(), "ln_t2": dual.ln_t2() })),
    );

    let sup = check_supermultiplicative(&ctx.seq, p.pair_max)?;
    out.checks.push(
        Check::new("supermultiplicative", sup.pass)
            .worst(json!({ "first_violation": sup.first_violation }))
            .detail(json!({ "p_max": sup.p_max, "min_margin": sup.min_margin })),
    );
    let sub = check_k_submultiplicative(dual, p.pair_max)?;
    out.checks.push(
        Check::new("dual-submultiplicative", sub.pass)
            .worst(json!({ "first_violation": sub.first_violation }))
            .detail(json!({ "p_max": sub.p_max, "min_margin": sub.min_margin })),
    );

    let mut t = Table::new("sequence", ["k", "ln_m", "ln_k", "ln_k_factorial_over_m"]);
    for k in 0..=ctx.seq.k_max().min(dual.m_max()) {
        t.push(vec![
            k.into(),
            ctx.seq.log_term(k).into(),
            dual.log_term(k).into(),
            ctx.seq.log_factorial_ratio(k).into(),
        ]);
    }
    out.tables.push(t);
    let mut t = Table::new("alpha2", ["eps", "a_eps", "argmax_k", "k_checked", "trend_decreasing"]);
    for c in &certs {
        t.push(vec![
            c.epsilon.into(),
            c.a_eps.into(),
            c.argmax_k.into(),
            c.k_checked.into(),
            c.trend_decreasing.into(),
        ]);
    }
    out.tables.push(t);
    Ok(out)
}

pub fn weight_table(ctx: &Context<'_>) -> Result<Outcome> {
    let mut out = Outcome::new("weight-table");
    let mut t = Table::new("weight", ["r", "m_star", "w", "lemma_gap", "truncated"]);
    let mut truncated = 0usize;
    for r in ctx.config.grids.r.nodes() {
        let v = ctx.weight.eval(r)?;
        let gap = lemma_gap(&ctx.weight, r)?;
        truncated += v.truncated as usize;
        t.push(vec![r.into(), v.index.into(), v.value.into(), gap.gap.into(), (v.truncated || gap.truncated).into()]);
    }
    out.tables.push(t);
    out.checks.push(
        Check::new("weight-evaluation", true)
            .flag(truncated > 0, "truncated")
            .detail(json!({ "truncated_points": truncated, "m_max": ctx.weight.m_max() })),
    );

    let tol = ctx.config.tolerances.legendre;
    let max_n = ctx.config.params.legendre_max.min(ctx.weight.m_max() - 1);
    let mut t = Table::new("legendre", ["n", "ln_k", "recovered", "abs_error", "optimal_radius"]);
    let mut worst = (0usize, 0.0f64);
    for n in 0..=max_n {
        let exact = ctx.dual().log_term(n);
        let rec = ctx.weight.legendre_recover(n)?;
        let err = (rec - exact).abs();
        if err > worst.1 {
            worst = (n, err);
        }
        let radius = if n == 0 { 0.0 } else { ctx.weight.optimal_radius(n)? };
        t.push(vec![n.into(), exact.into(), rec.into(), err.into(), radius.into()]);
    }
    out.tables.push(t);
    out.checks.push(
        Check::new("legendre-recovery", worst.1 <= tol)
            .slack(ratio_slack(tol, worst.1))
            .worst(json!({ "n": worst.0, "abs_error": worst.1 }))
            .detail(json!({ "n_max": max_n, "tol": tol })),
    );
    Ok(out)
}

pub fn lemma_scan(ctx: &Context<'_>) -> Result<Outcome> {
    let mut out = Outcome::new("lemma-scan");
    let mut t = Table::new("lemma", ["r", "gap", "truncated"]);
    let mut worst: Option<(f64, f64)> = None;
    let mut truncated = 0usize;
    for r in ctx.config.grids.r.nodes() {
        let g = lemma_gap(&ctx.weight, r)?;
        t.push(vec![r.into(), g.gap.into(), g.truncated.into()]);
        if g.truncated {
            truncated += 1;
            continue;
        }
        if worst.is_none_or(|(_, v)| g.gap < v) {
            worst = Some((r, g.gap));
        }
    }
    out.tables.push(t);
    let (r, gap) = worst.unwrap_or((f64::NAN, f64::INFINITY));
    out.checks.push(
        Check::new("doubling-inequality", gap >= -holoext_core::weight::LEMMA_GAP_TOL)
            .flag(truncated > 0, "truncated")
            .worst(json!({ "r": r.is_finite().then_some(r), "gap": gap.is_finite().then_some(gap) }))
            .detail(json!({ "truncated_points": truncated })),
    );
    Ok(out)
}

fn shift_row(s: &ShiftBound) -> Vec<Cell> {
    vec![
        s.m.into(),
        s.delta.into(),
        s.a_m.into(),
        s.b.into(),
        norm(&s.argmax_x).into(),
        s.argmax_radius.into(),
        s.diverging.into(),
        s.truncated.into(),
    ]
}

pub fn phi_check(ctx: &Context<'_>) -> Result<Outcome> {
    let p = &ctx.config.params;
    let mut out = Outcome::new("phi-check");
    let radii = lin_space(1.0, ctx.config.grids.shift_radius.hi.max(2.0), 64);
    for &m in &p.m {
        let s = check_superlinear(&ctx.phi, m, &radii)?;
        out.checks.push(
            Check::new(format!("superlinear m={m}"), s.pass)
                .worst(json!({ "failing_direction": s.failing_direction }))
                .detail(json!({ "r_max": s.r_max, "value_at_r_max": s.value_at_r_max })),
        );
        let s = check_separation(&ctx.phi, m, &radii, p.separation_threshold)?;
        out.checks.push(
            Check::new(format!("separation m={m}"), s.pass)
                .worst(json!({ "failing_direction": s.failing_direction }))
                .detail(json!({ "r_max": s.r_max, "value_at_r_max": s.value_at_r_max })),
        );
    }
    let sampling = ctx.sampling()?;
    let mut t =
        Table::new("shift", ["m", "delta", "a_m", "b", "argmax_norm_x", "argmax_radius", "diverging", "truncated"]);
    for (m, eps) in ctx.pairs() {
        let s = shift_bound(&ctx.phi, &ctx.weight, m, eps, &sampling.r_grid, &sampling.x_points, ctx.seed)?;
        out.checks.push(
            Check::new(format!("shift-bound m={m} eps={eps}"), !s.diverging)
                .flag(s.truncated, "truncated")
                .worst(json!({ "x": s.argmax_x, "radius": s.argmax_radius }))
                .detail(json!({ "b": s.b, "a_m": s.a_m })),
        );
        t.push(shift_row(&s));
    }
    out.tables.push(t);
    Ok(out)
}

fn first_pair(ctx: &Context<'_>) -> (usize, f64) {
    (ctx.config.params.m[0], ctx.config.params.eps[0])
}

pub fn extend_eval(ctx: &Context<'_>) -> Result<Outcome> {
    let (m, eps) = first_pair(ctx);
    let n = ctx.phi.dim();
    let tol = ctx.config.tolerances.extend;
    let mut out = Outcome::new("extend-eval");
    let mut columns = vec!["model".to_string()];
    columns.extend(coord_columns("re_", n));
    columns.extend(coord_columns("im_", n));
    columns.extend(
        ["value_re", "value_im", "exact_re", "exact_im", "abs_error", "tail_bound", "n_used", "growth_ratio"]
            .map(String::from),
    );
    let mut t = Table::new("extend", columns);
    let points: Vec<Vec<Complex64>> = ctx.config.extend.points.iter().map(|p| p.to_complex()).collect();
    for model in &ctx.models {
        let p = p_upper(model, &ctx.seq, &ctx.phi, m, eps)?;
        let ectx = ExtensionContext { seq: &ctx.seq, phi: &ctx.phi, m, eps, p_bound: p.value };
        let mut worst = (0usize, f64::INFINITY);
        for (i, z) in points.iter().enumerate() {
            let r = adaptive_extend(model, z, tol, &ectx)?;
            let exact = EntireModel::eval(model, z)?;
            let err = (r.value - exact).norm();
            let allowed = r.tail_bound + 1e-12 * (1.0 + exact.norm());
            let s = ratio_slack(allowed, err);
            if s < worst.1 {
                worst = (i, s);
            }
            let mut row = vec![Cell::from(SmoothModel::name(model))];
            row.extend(z.iter().map(|c| Cell::Num(c.re)));
            row.extend(z.iter().map(|c| Cell::Num(c.im)));
            row.extend(nums(&[r.value.re, r.value.im, exact.re, exact.im, err, r.tail_bound]));
            row.push(r.n_used.into());
            row.push(growth_ratio_at(ctx, z, r.value.norm() + r.tail_bound, m, eps, p.value)?.into());
            t.push(row);
        }
        out.checks.push(
            Check::new(format!("extension-error {}", SmoothModel::name(model)), worst.1 >= 1.0)
                .slack(worst.1)
                .flag(!p.certified, "uncertified")
                .worst(json!({ "point": worst.0 }))
                .detail(json!({ "p_upper": p.value, "m": m, "eps": eps, "tol": tol })),
        );
    }
    out.tables.push(t);
    Ok(out)
}

/// `(|F(z)| + tail) e^{-phi_m(x) - w_K(2 eps n t2 |y|)} / (2 t1 p)`; at most 1
/// when the growth bound holds at `z`.
fn growth_ratio_at(ctx: &Context<'_>, z: &[Complex64], modulus: f64, m: usize, eps: f64, p: f64) -> Result<f64> {
    if modulus == 0.0 {
        return Ok(0.0);
    }
    let x: Vec<f64> = z.iter().map(|c| c.re).collect();
    let y: Vec<f64> = z.iter().map(|c| c.im).collect();
    let dual = ctx.dual();
    let w = ctx.weight.eval(2.0 * eps * z.len() as f64 * dual.t2() * norm(&y))?.value;
    Ok((modulus.ln() - ctx.phi.eval(m, &x) - w - (2.0 * dual.t1() * p).ln()).exp())
}

pub fn cauchy_recover(ctx: &Context<'_>) -> Result<Outcome> {
    let (m, eps) = first_pair(ctx);
    let n = ctx.phi.dim();
    let tol = ctx.config.tolerances.roundtrip;
    let alphas = ctx.alphas();
    let sampling = ctx.sampling()?;
    let shift = shift_bound(&ctx.phi, &ctx.weight, m, eps, &sampling.r_grid, &sampling.x_points, ctx.seed)?;
    let consts = chain_constants(m, eps, shift.a_m, ctx.dual().t1(), ctx.dual().t2(), n, shift.b)?;
    let mut out = Outcome::new("cauchy-recover");
    let mut columns = vec!["model".to_string()];
    columns.extend(coord_columns("x_", n));
    columns.extend(coord_columns("alpha_", n));
    columns
        .extend(["recovered", "oracle", "abs_error", "discrepancy", "bound", "ln_sharp", "r_star"].map(String::from));
    let mut t = Table::new("cauchy", columns);
    for model in &ctx.models {
        let q = q_upper(model, &ctx.weight, &ctx.phi, m + 1, eps)?;
        let mut worst_err = (Vec::new(), Vec::new(), 0.0f64);
        let mut bound_ok = true;
        for x in &ctx.config.cauchy.points {
            let contour = PolydiscContour::new(x.clone(), ctx.config.cauchy.radius, ctx.config.cauchy.nodes)?;
            let phi_x = ctx.phi.eval(m, x);
            for est in cauchy_jet(model, &contour, &alphas)? {
                let oracle = model.derivative(&est.alpha, x)?;
                let err = (est.value - Complex64::new(oracle, 0.0)).norm();
                if err > worst_err.2 {
                    worst_err = (x.clone(), est.alpha.clone(), err);
                }
                let rb = restriction_bound(q.value, &consts, ctx.dual(), &ctx.seq, &est.alpha, phi_x)?;
                bound_ok &= est.value.norm() <= rb.value;
                let r_star = inf_over_r_bound(&ctx.weight, consts.c_m, eps, order(&est.alpha))?.r_star.unwrap_or(0.0);
                let mut row = vec![Cell::from(SmoothModel::name(model))];
                row.extend(nums(x));
                row.extend(ints(&est.alpha));
                row.extend(nums(&[est.value.re, oracle, err, est.discrepancy, rb.value, rb.ln_sharp, r_star]));
                t.push(row);
            }
        }
        let name = SmoothModel::name(model);
        out.checks.push(
            Check::new(format!("cauchy-accuracy {name}"), worst_err.2 <= tol)
                .slack(ratio_slack(tol, worst_err.2))
                .worst(json!({ "x": worst_err.0, "alpha": worst_err.1, "abs_error": worst_err.2 })),
        );
        out.checks.push(
            Check::new(format!("restriction-bound {name}"), bound_ok && q.certified)
                .flag(!q.certified, "uncertified")
                .flag(shift.diverging, "diverging")
                .detail(json!({ "q_upper": q.value, "b": shift.b, "c_m": consts.c_m, "d": consts.d })),
        );
    }
    out.tables.push(t);
    Ok(out)
}

pub fn roundtrip_cmd(ctx: &Context<'_>) -> Result<Outcome> {
    let (m, eps) = first_pair(ctx);
    let n = ctx.phi.dim();
    let config = RoundtripConfig {
        m,
        eps,
        alpha_max: ctx.config.params.alpha_max,
        tol: ctx.config.tolerances.roundtrip,
        tail_tol: ctx.config.tolerances.extend,
        cauchy: ctx.cauchy(),
    };
    let points: Vec<Vec<Complex64>> = ctx.config.extend.points.iter().map(|p| p.to_complex()).collect();
    let mut out = Outcome::new("roundtrip");

    let mut columns = vec!["model".to_string()];
    columns.extend(coord_columns("x_", n));
    columns.extend(coord_columns("alpha_", n));
    columns.extend(["recovered", "oracle", "abs_error", "discrepancy"].map(String::from));
    let mut fwd = Table::new("roundtrip", columns);
    let mut columns = vec!["model".to_string()];
    columns.extend(coord_columns("re_", n));
    columns.extend(coord_columns("im_", n));
    columns.extend(
        ["value_re", "value_im", "exact_re", "exact_im", "abs_error", "tail_bound", "n_used"].map(String::from),
    );
    let mut rev = Table::new("roundtrip_reverse", columns);

    for model in &ctx.models {
        let name = SmoothModel::name(model);
        let r = roundtrip(model, &ctx.seq, &ctx.phi, &ctx.config.cauchy.points, &points, &config)?;
        for e in &r.entries {
            let mut row = vec![Cell::from(name)];
            row.extend(nums(&e.x));
            row.extend(ints(&e.alpha));
            row.extend(nums(&[e.recovered, e.oracle, e.error, e.discrepancy]));
            fwd.push(row);
        }
        for e in &r.reverse {
            let mut row = vec![Cell::from(name)];
            row.extend(e.z.iter().map(|c| Cell::Num(c.re)));
            row.extend(e.z.iter().map(|c| Cell::Num(c.im)));
            row.extend(nums(&[e.extended.re, e.extended.im, e.exact.re, e.exact.im, e.error, e.tail_bound]));
            row.push(e.n_used.into());
            rev.push(row);
        }
        let (wx, wa) = r.worst.clone().unwrap_or_default();
        out.checks.push(
            Check::new(format!("roundtrip {name}"), r.pass)
                .slack(ratio_slack(r.tol, r.max_error))
                .worst(json!({ "x": wx, "alpha": wa, "abs_error": r.max_error }))
                .detail(json!({ "tol": r.tol, "m": m, "eps": eps })),
        );
    }
    out.tables.push(fwd);
    out.tables.push(rev);
    Ok(out)
}

fn flag_check(check: Check, f: &CheckFlags) -> Check {
    check
        .flag(f.boundary, "boundary")
        .flag(f.max_order, "max_order")
        .flag(f.truncated, "truncated")
        .flag(f.uncertified, "uncertified")
        .flag(f.diverging, "diverging")
}

fn continuity_check(kind: &str, r: &ContinuityReport) -> Check {
    flag_check(
        Check::new(format!("{kind} {} m={} eps={}", r.model, r.m, r.eps), r.pass)
            .slack(r.slack)
            .worst(json!({ "x": r.worst_x, "y": r.worst_y, "alpha": r.worst_alpha }))
            .detail(json!({ "lhs": r.lhs, "rhs": r.rhs })),
        &r.flags,
    )
}

fn continuity_row(r: &ContinuityReport) -> Vec<Cell> {
    vec![
        Cell::from(r.model.as_str()),
        r.m.into(),
        r.eps.into(),
        r.lhs.into(),
        r.rhs.into(),
        r.slack.into(),
        r.pass.into(),
    ]
}

/// Relative change of `b` when both sampling grids are refined.
pub fn shift_stability(ctx: &Context<'_>, m: usize, eps: f64) -> Result<(f64, f64, f64)> {
    let sampling = ctx.sampling()?;
    let coarse = shift_bound(&ctx.phi, &ctx.weight, m, eps, &sampling.r_grid, &sampling.x_points, ctx.seed)?;
    let r_fine = refine(&sampling.r_grid, true);
    let axis = refine(&ctx.config.grids.shift_x.nodes(), false);
    let x_fine = holoext_core::grid::Grid::from_axes(vec![axis; ctx.phi.dim()])?.points();
    let fine = shift_bound(&ctx.phi, &ctx.weight, m, eps, &r_fine, &x_fine, ctx.seed)?;
    let rel = if fine.b > 0.0 { (fine.b - coarse.b).abs() / fine.b } else { (fine.b - coarse.b).abs() };
    Ok((coarse.b, fine.b, rel))
}

/// Insert a midpoint (geometric when `log`) between neighbouring nodes.
fn refine(nodes: &[f64], log: bool) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * nodes.len());
    for w in nodes.windows(2) {
        out.push(w[0]);
        out.push(if log { (w[0] * w[1]).sqrt() } else { 0.5 * (w[0] + w[1]) });
    }
    out.extend(nodes.last());
    out
}

pub fn continuity(ctx: &Context<'_>) -> Result<Outcome> {
    let x_grid = ctx.config.x_grid()?;
    let y_grid = ctx.config.y_grid()?;
    let sampling = ctx.sampling()?;
    let tail_tol = ctx.config.tolerances.extend;
    let alpha_max = ctx.config.params.alpha_max;
    let jobs: Vec<(&Model, usize, f64)> =
        ctx.models.iter().flat_map(|model| ctx.pairs().into_iter().map(move |(m, e)| (model, m, e))).collect();

    // growth_ratio reports the sampled maximum and the points used
    let results = jobs
        .par_iter()
        .map(|&(model, m, eps)| {
            let setup =
                CheckSetup { seq: &ctx.seq, weight: &ctx.weight, phi: &ctx.phi, x_grid: &x_grid, y_grid: &y_grid };
            let fwd = forward_continuity_check(model, &setup, m, eps, tail_tol)?;
            let growth = growth_ratio(model, &ctx.seq, &ctx.weight, &ctx.phi, m, eps, &x_grid, &y_grid, tail_tol)?;
            let bwd = backward_continuity_check(model, &setup, m, eps, alpha_max, ctx.cauchy(), &sampling)?;
            Ok((fwd, growth, bwd))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = Outcome::new("report");
    let cols = ["model", "m", "eps", "lhs", "rhs", "slack", "pass"];
    let mut fwd_t = Table::new("forward", cols.iter().copied().chain(["max_order_used", "points"]));
    let mut bwd_t = Table::new("backward", cols.iter().copied().chain(["b", "c_m", "d", "max_discrepancy"]));
    for (fwd, growth, bwd) in &results {
        out.checks.push(continuity_check("forward", fwd));
        let mut row = continuity_row(fwd);
        row.extend([growth.max_order_used.into(), growth.points.into()]);
        fwd_t.push(row);
        out.checks.push(continuity_check("backward", &bwd.report));
        let mut row = continuity_row(&bwd.report);
        row.extend(nums(&[bwd.constants.b, bwd.constants.c_m, bwd.constants.d, bwd.max_discrepancy]));
        bwd_t.push(row);
    }
    out.tables.push(fwd_t);
    out.tables.push(bwd_t);

    let mut stab_t = Table::new("shift_stability", ["m", "eps", "b", "b_refined", "rel_change"]);
    for (m, eps) in ctx.pairs() {
        let (b, b_fine, rel) = shift_stability(ctx, m, eps)?;
        out.checks.push(
            Check::new(format!("shift-stability m={m} eps={eps}"), rel < 0.01)
                .slack(ratio_slack(0.01, rel))
                .detail(json!({ "b": b, "b_refined": b_fine, "rel_change": rel })),
        );
        stab_t.push(nums(&[m as f64, eps, b, b_fine, rel]));
    }
    out.tables.push(stab_t);
    Ok(out)
}

/// Every check of the pipeline in one document.
pub fn report(ctx: &Context<'_>) -> Result<Outcome> {
    let mut out = Outcome::new("report");
    for part in
        [verify_sequences, weight_table, lemma_scan, phi_check, extend_eval, cauchy_recover, roundtrip_cmd, continuity]
    {
        out.merge(part(ctx)?);
    }
    Ok(out)
}
