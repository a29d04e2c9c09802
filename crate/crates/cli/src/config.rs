//! Run configuration: one TOML document per run.
//!
//! Every section is optional except `[sequence]`, `[phi]` and at least one
//! `[[models]]` entry; unknown keys are rejected.

use holoext_core::grid::Grid;
use holoext_core::math::{lin_space, log_space};
use holoext_core::models::{Model, ModelKind};
use holoext_core::phi::{PowerFamily, ShiftConstants};
use holoext_core::sequences::WeightSequence;
use holoext_core::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const DEFAULT_K_MAX: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub sequence: SequenceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<DualSpec>,
    pub phi: PhiSpec,
    pub models: Vec<ModelSpec>,
    #[serde(default)]
    pub grids: GridsSpec,
    #[serde(default)]
    pub params: ParamsSpec,
    #[serde(default)]
    pub tolerances: TolerancesSpec,
    #[serde(default)]
    pub cauchy: CauchySpec,
    #[serde(default)]
    pub extend: ExtendSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    Gevrey,
    GeometricGevrey,
    LogTerms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    pub kind: SequenceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_terms: Option<Vec<f64>>,
}

fn default_k_max() -> usize {
    DEFAULT_K_MAX
}

/// Explicit `ln K_m` with sandwich constants, replacing the derived dual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualSpec {
    pub log_terms: Vec<f64>,
    pub ln_t1: f64,
    pub ln_t2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiKind {
    Power,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSpec {
    pub kind: PhiKind,
    #[serde(default = "default_power")]
    pub p: f64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift_table: Option<Vec<f64>>,
}

fn default_power() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    Gaussian,
    Cosine,
    PolyGaussian,
    ExpSquare,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelName,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl AxisSpec {
    const fn linear(lo: f64, hi: f64, count: usize) -> Self {
        AxisSpec { lo, hi, count, spacing: Spacing::Linear }
    }

    const fn log(lo: f64, hi: f64, count: usize) -> Self {
        AxisSpec { lo, hi, count, spacing: Spacing::Log }
    }

    pub fn nodes(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Linear => lin_space(self.lo, self.hi, self.count),
            Spacing::Log => log_space(self.lo, self.hi, self.count),
        }
    }

    fn validate(&self, path: &str) -> Result<(), CliError> {
        if self.count == 0 {
            return Err(CliError::semantic(path, "count must be positive"));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(CliError::semantic(path, "need finite lo <= hi"));
        }
        if self.spacing == Spacing::Log && self.lo <= 0.0 {
            return Err(CliError::semantic(path, "log spacing needs lo > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridsSpec {
    /// Radii for weight tables and the doubling scan.
    #[serde(default = "default_r")]
    pub r: AxisSpec,
    /// Real parts, per coordinate.
    #[serde(default = "default_xy")]
    pub x: AxisSpec,
    /// Imaginary parts, per coordinate.
    #[serde(default = "default_xy")]
    pub y: AxisSpec,
    /// Shift radii `R` for the shift constant.
    #[serde(default = "default_shift_radius")]
    pub shift_radius: AxisSpec,
    /// Base points (per coordinate) for the shift constant.
    #[serde(default = "default_shift_x")]
    pub shift_x: AxisSpec,
}

fn default_r() -> AxisSpec {
    AxisSpec::log(1e-6, 1e3, 500)
}

fn default_xy() -> AxisSpec {
    AxisSpec::linear(-6.0, 6.0, 121)
}

fn default_shift_radius() -> AxisSpec {
    AxisSpec::log(1e-2, 20.0, 160)
}

fn default_shift_x() -> AxisSpec {
    AxisSpec::linear(-6.0, 6.0, 49)
}

impl Default for GridsSpec {
    fn default() -> Self {
        GridsSpec {
            r: default_r(),
            x: default_xy(),
            y: default_xy(),
            shift_radius: default_shift_radius(),
            shift_x: default_shift_x(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(default = "default_m")]
    pub m: Vec<usize>,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default = "default_alpha_max")]
    pub alpha_max: usize,
    #[serde(default = "default_pair_max")]
    pub pair_max: usize,
    #[serde(default = "default_legendre_max")]
    pub legendre_max: usize,
    #[serde(default = "one")]
    pub growth_threshold: f64,
    /// Threshold for the separation proxy of `phi_m - phi_{m+1}`.
    #[serde(default = "one")]
    pub separation_threshold: f64,
}

fn default_m() -> Vec<usize> {
    vec![1]
}

fn default_eps() -> Vec<f64> {
    vec![1.0]
}

fn default_alpha_max() -> usize {
    10
}

fn default_pair_max() -> usize {
    20
}

fn default_legendre_max() -> usize {
    25
}

impl Default for ParamsSpec {
    fn default() -> Self {
        ParamsSpec {
            m: default_m(),
            eps: default_eps(),
            alpha_max: default_alpha_max(),
            pair_max: default_pair_max(),
            legendre_max: default_legendre_max(),
            growth_threshold: 1.0,
            separation_threshold: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesSpec {
    /// Certified tail of the adaptive extension.
    #[serde(default = "default_extend_tol")]
    pub extend: f64,
    /// Recovered derivatives against the oracle.
    #[serde(default = "default_roundtrip_tol")]
    pub roundtrip: f64,
    /// Legendre recovery against `ln K_N`.
    #[serde(default = "default_legendre_tol")]
    pub legendre: f64,
}

fn default_extend_tol() -> f64 {
    1e-10
}

fn default_roundtrip_tol() -> f64 {
    1e-8
}

fn default_legendre_tol() -> f64 {
    1e-9
}

impl Default for TolerancesSpec {
    fn default() -> Self {
        TolerancesSpec {
            extend: default_extend_tol(),
            roundtrip: default_roundtrip_tol(),
            legendre: default_legendre_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CauchySpec {
    #[serde(default = "one")]
    pub radius: f64,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    /// Real base points.
    #[serde(default = "default_cauchy_points")]
    pub points: Vec<Vec<f64>>,
    /// Multi-indices for `cauchy-recover`; all `|alpha| <= alpha_max` when empty.
    #[serde(default)]
    pub alphas: Vec<Vec<usize>>,
}

fn default_nodes() -> usize {
    64
}

fn default_cauchy_points() -> Vec<Vec<f64>> {
    vec![vec![-2.0], vec![0.0], vec![1.5]]
}

impl Default for CauchySpec {
    fn default() -> Self {
        CauchySpec { radius: 1.0, nodes: default_nodes(), points: default_cauchy_points(), alphas: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexPoint {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexPoint {
    pub fn to_complex(&self) -> Vec<Complex64> {
        self.re.iter().zip(&self.im).map(|(&a, &b)| Complex64::new(a, b)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendSpec {
    #[serde(default = "default_extend_points")]
    pub points: Vec<ComplexPoint>,
}

fn default_extend_points() -> Vec<ComplexPoint> {
    [(0.0, 1.0), (0.5, 1.0), (-1.0, -2.0), (2.0, 0.5), (0.0, 2.0)]
        .into_iter()
        .map(|(re, im)| ComplexPoint { re: vec![re], im: vec![im] })
        .collect()
}

impl Default for ExtendSpec {
    fn default() -> Self {
        ExtendSpec { points: default_extend_points() }
    }
}

fn positive(path: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::semantic(path, "must be positive and finite"))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let seq = &self.sequence;
        if seq.k_max < WeightSequence::MIN_K_MAX {
            return Err(CliError::semantic("sequence.k_max", "too small"));
        }
        match seq.kind {
            SequenceKind::Gevrey | SequenceKind::GeometricGevrey => {
                let s = seq.s.ok_or_else(|| CliError::semantic("sequence.s", "required for this kind"))?;
                positive("sequence.s", s)?;
                if seq.kind == SequenceKind::GeometricGevrey {
                    positive(
                        "sequence.c",
                        seq.c.ok_or_else(|| CliError::semantic("sequence.c", "required for this kind"))?,
                    )?;
                }
                if seq.log_terms.is_some() {
                    return Err(CliError::semantic("sequence.log_terms", "only allowed with kind = \"log-terms\""));
                }
            }
            SequenceKind::LogTerms => {
                let terms =
                    seq.log_terms.as_ref().ok_or_else(|| CliError::semantic("sequence.log_terms", "required"))?;
                if terms.len() <= WeightSequence::MIN_K_MAX {
                    return Err(CliError::semantic("sequence.log_terms", "too few terms"));
                }
            }
        }
        if let Some(dual) = &self.dual {
            if dual.log_terms.len() < 2 || dual.log_terms.iter().any(|v| !v.is_finite()) {
                return Err(CliError::semantic("dual.log_terms", "need at least two finite terms"));
            }
        }

        let n = self.phi.n;
        if n == 0 {
            return Err(CliError::semantic("phi.n", "must be at least 1"));
        }
        positive("phi.p", self.phi.p)?;
        if self.phi.shift.is_some() && self.phi.shift_table.is_some() {
            return Err(CliError::semantic("phi.shift_table", "give either shift or shift_table"));
        }
        if self.models.is_empty() {
            return Err(CliError::semantic("models", "at least one model is required"));
        }
        for (i, model) in self.models.iter().enumerate() {
            if model.n != n {
                return Err(CliError::semantic(
                    &format!("models[{i}].n"),
                    &format!("dimension {} does not match phi.n = {n}", model.n),
                ));
            }
            if !model.scale.is_finite() {
                return Err(CliError::semantic(&format!("models[{i}].scale"), "must be finite"));
            }
            if matches!(model.kind, ModelName::Gaussian | ModelName::PolyGaussian | ModelName::ExpSquare) {
                positive(&format!("models[{i}].c"), model.c.unwrap_or(1.0))?;
            }
        }

        let g = &self.grids;
        g.r.validate("grids.r")?;
        g.x.validate("grids.x")?;
        g.y.validate("grids.y")?;
        g.shift_radius.validate("grids.shift_radius")?;
        g.shift_x.validate("grids.shift_x")?;
        if g.r.lo < 0.0 || g.shift_radius.lo <= 0.0 {
            return Err(CliError::semantic("grids.r", "radii must be nonnegative"));
        }
        if g.shift_radius.count < 2 {
            return Err(CliError::semantic("grids.shift_radius", "need at least two radii"));
        }

        let p = &self.params;
        if p.m.is_empty() || p.m.contains(&0) {
            return Err(CliError::semantic("params.m", "need a nonempty list of indices >= 1"));
        }
        if p.eps.is_empty() {
            return Err(CliError::semantic("params.eps", "must be nonempty"));
        }
        for (i, &e) in p.eps.iter().enumerate() {
            positive(&format!("params.eps[{i}]"), e)?;
        }
        if p.alpha_max > seq.k_max {
            return Err(CliError::semantic("params.alpha_max", "exceeds sequence.k_max"));
        }
        if 2 * p.pair_max > seq.k_max {
            return Err(CliError::semantic("params.pair_max", "2 * pair_max exceeds sequence.k_max"));
        }
        if p.legendre_max + 1 >= seq.k_max {
            return Err(CliError::semantic("params.legendre_max", "exceeds sequence.k_max"));
        }
        positive("params.growth_threshold", p.growth_threshold)?;
        positive("params.separation_threshold", p.separation_threshold)?;

        positive("tolerances.extend", self.tolerances.extend)?;
        positive("tolerances.roundtrip", self.tolerances.roundtrip)?;
        positive("tolerances.legendre", self.tolerances.legendre)?;

        positive("cauchy.radius", self.cauchy.radius)?;
        if self.cauchy.nodes < 4 {
            return Err(CliError::semantic("cauchy.nodes", "must be at least 4"));
        }
        for (i, x) in self.cauchy.points.iter().enumerate() {
            if x.len() != n || x.iter().any(|v| !v.is_finite()) {
                return Err(CliError::semantic(&format!("cauchy.points[{i}]"), "wrong dimension or non-finite"));
            }
        }
        for (i, a) in self.cauchy.alphas.iter().enumerate() {
            if a.len() != n {
                return Err(CliError::semantic(&format!("cauchy.alphas[{i}]"), "wrong dimension"));
            }
        }
        for (i, z) in self.extend.points.iter().enumerate() {
            if z.re.len() != n || z.im.len() != n || z.re.iter().chain(&z.im).any(|v| !v.is_finite()) {
                return Err(CliError::semantic(&format!("extend.points[{i}]"), "wrong dimension or non-finite"));
            }
        }
        Ok(())
    }

    /// Canonical TOML of the effective configuration.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }

    /// `sha256:<hex>` of [`canonical`](Self::canonical).
    pub fn digest(&self) -> String {
        format!("sha256:{}", hex::encode(Sha256::digest(self.canonical().as_bytes())))
    }

    pub fn sequence(&self) -> holoext_core::Result<WeightSequence> {
        let s = &self.sequence;
        match s.kind {
            SequenceKind::Gevrey => WeightSequence::gevrey(s.s.unwrap_or(0.0), s.k_max),
            SequenceKind::GeometricGevrey => {
                WeightSequence::geometric_gevrey(s.c.unwrap_or(0.0), s.s.unwrap_or(0.0), s.k_max)
            }
            SequenceKind::LogTerms => WeightSequence::from_log_terms(s.log_terms.clone().unwrap_or_default()),
        }
    }

    pub fn phi(&self) -> holoext_core::Result<PowerFamily> {
        let shift = match (&self.phi.shift_table, self.phi.shift) {
            (Some(t), _) => ShiftConstants::Table(t.clone()),
            (None, Some(a)) => ShiftConstants::Scalar(a),
            (None, None) => ShiftConstants::Scalar(1.0),
        };
        PowerFamily::new(self.phi.p, self.phi.n, shift)
    }

    pub fn models(&self) -> holoext_core::Result<Vec<Model>> {
        self.models
            .iter()
            .map(|spec| {
                let c = spec.c.unwrap_or(1.0);
                let kind = match spec.kind {
                    ModelName::Gaussian => ModelKind::Gaussian { c },
                    ModelName::Cosine => ModelKind::Cosine,
                    ModelName::PolyGaussian => ModelKind::PolyGaussian { c, degree: spec.degree.unwrap_or(1) },
                    ModelName::ExpSquare => ModelKind::ExpSquare { c },
                    ModelName::Zero => ModelKind::Zero,
                };
                Model::new(kind, spec.n, spec.scale)
            })
            .collect()
    }

    pub fn x_grid(&self) -> holoext_core::Result<Grid> {
        Grid::from_axes(vec![self.grids.x.nodes(); self.phi.n])
    }

    pub fn y_grid(&self) -> holoext_core::Result<Grid> {
        Grid::from_axes(vec![self.grids.y.nodes(); self.phi.n])
    }

    pub fn shift_points(&self) -> holoext_core::Result<Vec<Vec<f64>>> {
        Ok(Grid::from_axes(vec![self.grids.shift_x.nodes(); self.phi.n])?.points())
    }
}
