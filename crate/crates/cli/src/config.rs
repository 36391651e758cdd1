//! Run configuration: a TOML document layered over a scenario preset.
//!
//! Every table is optional. Keys that are absent take the preset value of
//! the chosen scenario, and unknown keys are rejected.
//!
//! | key | default (wire / filter / custom) |
//! |-----|----------------------------------|
//! | `beam.sigma_x` | 0.85 mm |
//! | `beam.sigma_2` | 2.0 (σ_t) / 0.5 (σ_ω) / 2.0 (σ_t) |
//! | `beam.chirp` | −0.3927 rad/mm² / −0.3927 / 0 |
//! | `beam.omega0` | 0 |
//! | `beam.domain` | `time` / `frequency` / `time` |
//! | `mask` | [−0.3, 0.3] position / [−0.1, 0.1] frequency / none |
//! | `lo` | ideal LO derived from the grid |
//! | `grid.n`, `grid.n_x`, `grid.n_2` | 256 |
//! | `grid.span_x` | 8 mm |
//! | `grid.span_2` | 16 (time) / 12 (frequency) |
//! | `scan.f_over_k` | 1 mm²/rad |
//! | `outputs` | csv, manifest on; heatmap off; signed palette |
//! | `slices` | a standard set per scenario |

use std::fmt;

use serde::{Deserialize, Serialize};

use opstft::scenes::{
    GaussianBeamSpec, LOSpec, MaskAxis, MaskSpec, SecondDomain, SPATIAL_SPAN_MM, SPECTRAL_SPAN,
    TEMPORAL_SPAN,
};
use opstft::phasespace::Coord;

pub const DEFAULT_POINTS: usize = 256;
pub const DEFAULT_F_OVER_K: f64 = 1.0;
const DEFAULT_CHIRP_NOTE: &str = "default, λ=800nm";

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// Malformed document or unknown key.
    Parse {
        line: Option<usize>,
        key: Option<String>,
        message: String,
    },
    /// A well-formed document that breaks an invariant.
    Validation(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { line, key, message } => {
                write!(f, "parse error")?;
                if let Some(l) = line {
                    write!(f, " at line {l}")?;
                }
                if let Some(k) = key {
                    write!(f, " (key `{k}`)")?;
                }
                write!(f, ": {message}")
            }
            ConfigError::Validation(msg) => write!(f, "validation error: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Validation(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Wire,
    Filter,
    Custom,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Wire => "wire",
            ScenarioKind::Filter => "filter",
            ScenarioKind::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeamDomain {
    Time,
    Frequency,
}

impl From<BeamDomain> for SecondDomain {
    fn from(d: BeamDomain) -> Self {
        match d {
            BeamDomain::Time => SecondDomain::Time,
            BeamDomain::Frequency => SecondDomain::Frequency,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaskRole {
    Position,
    Frequency,
}

impl From<MaskRole> for MaskAxis {
    fn from(r: MaskRole) -> Self {
        match r {
            MaskRole::Position => MaskAxis::Position,
            MaskRole::Frequency => MaskAxis::Frequency,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Palette {
    Signed,
    Magnitude,
}

/// Which distribution a slice is cut from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Wigner,
    Kirkwood,
    /// Kirkwood-Rihaczek distribution sampled by the simulated scan.
    MeasuredKirkwood,
    /// Wigner distribution inverted from the simulated scan.
    MeasuredWigner,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Wigner => "wigner",
            Source::Kirkwood => "kirkwood",
            Source::MeasuredKirkwood => "measured_kirkwood",
            Source::MeasuredWigner => "measured_wigner",
        }
    }

    pub fn is_measured(self) -> bool {
        matches!(self, Source::MeasuredKirkwood | Source::MeasuredWigner)
    }

    fn measured(self) -> Source {
        match self {
            Source::Wigner | Source::MeasuredWigner => Source::MeasuredWigner,
            Source::Kirkwood | Source::MeasuredKirkwood => Source::MeasuredKirkwood,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamConfig {
    pub sigma_x: f64,
    pub sigma_2: f64,
    pub chirp: f64,
    pub omega0: f64,
    pub domain: BeamDomain,
}

impl BeamConfig {
    pub fn spec(&self) -> GaussianBeamSpec {
        GaussianBeamSpec {
            sigma_x: self.sigma_x,
            sigma_2: self.sigma_2,
            chirp: self.chirp,
            omega0: self.omega0,
            second_domain: self.domain.into(),
        }
    }

    fn from_spec(s: &GaussianBeamSpec) -> Self {
        Self {
            sigma_x: s.sigma_x,
            sigma_2: s.sigma_2,
            chirp: s.chirp,
            omega0: s.omega0,
            domain: match s.second_domain {
                SecondDomain::Time => BeamDomain::Time,
                SecondDomain::Frequency => BeamDomain::Frequency,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaskConfig {
    pub lo: f64,
    pub hi: f64,
    pub axis: MaskRole,
    pub inverted: bool,
}

impl MaskConfig {
    pub fn spec(&self) -> MaskSpec {
        MaskSpec { lo: self.lo, hi: self.hi, axis_role: self.axis.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoConfig {
    pub a: f64,
    #[serde(rename = "A")]
    pub big_a: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default)]
    pub phi: f64,
}

fn one() -> f64 {
    1.0
}

impl LoConfig {
    pub fn spec(&self) -> LOSpec {
        LOSpec {
            a: self.a,
            big_a: self.big_a,
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            phi: self.phi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n_x: usize,
    pub n_2: usize,
    pub span_x: f64,
    pub span_2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub csv: bool,
    pub heatmap: bool,
    pub manifest: bool,
    pub palette: Palette,
}

/// A slice request: exactly two of the four coordinates are fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceConfig {
    pub source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

impl SliceConfig {
    fn new(source: Source, c1: Coord, v1: f64, c2: Coord, v2: f64) -> Self {
        let mut s = Self { source, x: None, p: None, omega: None, t: None };
        for (c, v) in [(c1, v1), (c2, v2)] {
            *s.slot(c) = Some(v);
        }
        s
    }

    fn slot(&mut self, c: Coord) -> &mut Option<f64> {
        match c {
            Coord::X => &mut self.x,
            Coord::P => &mut self.p,
            Coord::Omega => &mut self.omega,
            Coord::T => &mut self.t,
        }
    }

    /// The fixed coordinates in `[x, p, ω, t]` order.
    pub fn fixed(&self) -> Vec<(Coord, f64)> {
        [(Coord::X, self.x), (Coord::P, self.p), (Coord::Omega, self.omega), (Coord::T, self.t)]
            .into_iter()
            .filter_map(|(c, v)| v.map(|v| (c, v)))
            .collect()
    }

    /// File stem such as `wigner_x_p__omega=0_t=0`.
    pub fn stem(&self) -> String {
        let fixed = self.fixed();
        let free: Vec<&str> = Coord::ALL
            .iter()
            .filter(|c| fixed.iter().all(|(f, _)| f != *c))
            .map(|c| c.name())
            .collect();
        let at: Vec<String> = fixed.iter().map(|(c, v)| format!("{}={}", c.name(), v)).collect();
        format!("{}_{}__{}", self.source.name(), free.join("_"), at.join("_"))
    }
}

/// Fully resolved, validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    pub beam: BeamConfig,
    /// Provenance of the chirp value.
    pub chirp_source: String,
    pub mask: Option<MaskConfig>,
    pub renormalize_mask: bool,
    /// Explicit LO; the ideal LO for the grid is used when absent.
    pub lo: Option<LoConfig>,
    pub grid: GridConfig,
    pub with_scan: bool,
    pub f_over_k: f64,
    pub outputs: OutputConfig,
    pub slices: Vec<SliceConfig>,
}

/// Command-line settings that take precedence over the document.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub grid: Option<usize>,
    pub with_scan: bool,
    pub renormalize_mask: bool,
    pub heatmaps: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<ScenarioKind>,
    beam: Option<RawBeam>,
    mask: Option<RawMask>,
    lo: Option<LoConfig>,
    grid: Option<RawGrid>,
    scan: Option<RawScan>,
    outputs: Option<RawOutputs>,
    slices: Option<Vec<SliceConfig>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBeam {
    sigma_x: Option<f64>,
    sigma_2: Option<f64>,
    chirp: Option<f64>,
    omega0: Option<f64>,
    domain: Option<BeamDomain>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMask {
    enabled: Option<bool>,
    lo: Option<f64>,
    hi: Option<f64>,
    axis: Option<MaskRole>,
    inverted: Option<bool>,
    renormalize: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n: Option<usize>,
    n_x: Option<usize>,
    n_2: Option<usize>,
    span_x: Option<f64>,
    span_2: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    enabled: Option<bool>,
    f_over_k: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutputs {
    csv: Option<bool>,
    heatmap: Option<bool>,
    manifest: Option<bool>,
    palette: Option<Palette>,
}

fn parse_error(text: &str, e: toml::de::Error) -> ConfigError {
    let message = e.message().to_string();
    let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
    let key = ["unknown field `", "missing field `", "duplicate key `"]
        .iter()
        .find_map(|p| message.split_once(p))
        .and_then(|(_, rest)| rest.split_once('`'))
        .map(|(k, _)| k.to_string());
    ConfigError::Parse { line, key, message }
}

fn preset_beam(kind: ScenarioKind) -> GaussianBeamSpec {
    match kind {
        ScenarioKind::Wire => GaussianBeamSpec::wire(),
        ScenarioKind::Filter => GaussianBeamSpec::filter(),
        ScenarioKind::Custom => GaussianBeamSpec { chirp: 0.0, ..GaussianBeamSpec::wire() },
    }
}

fn preset_mask(kind: ScenarioKind) -> Option<MaskSpec> {
    match kind {
        ScenarioKind::Wire => Some(MaskSpec::wire()),
        ScenarioKind::Filter => Some(MaskSpec::filter()),
        ScenarioKind::Custom => None,
    }
}

fn default_slices(kind: ScenarioKind) -> Vec<SliceConfig> {
    use Coord::{Omega, T, P, X};
    use Source::{Kirkwood as K, Wigner as W};
    let s = SliceConfig::new;
    match kind {
        ScenarioKind::Wire => vec![
            s(K, Omega, 0.0, T, 0.0),
            s(K, X, 0.4, P, 0.0),
            s(W, Omega, 0.0, T, 0.0),
            s(W, X, 0.0, P, 0.0),
            s(W, X, 0.0, P, 2.0),
            s(W, X, 0.0, Omega, 0.0),
            s(W, X, 0.0, T, 0.0),
            s(W, P, 0.0, Omega, 0.0),
            s(W, P, 0.0, T, 0.0),
        ],
        ScenarioKind::Filter => vec![
            s(K, X, 0.0, P, 0.0),
            s(K, Omega, 0.2, T, 0.0),
            s(W, X, 0.0, P, 0.0),
            s(W, Omega, 0.0, T, 0.0),
            s(W, Omega, 0.0, T, 3.0),
            s(W, X, 0.0, Omega, 0.0),
            s(W, X, 0.0, T, 0.0),
            s(W, P, 0.0, Omega, 0.0),
            s(W, P, 0.0, T, 0.0),
        ],
        ScenarioKind::Custom => vec![
            s(K, Omega, 0.0, T, 0.0),
            s(K, X, 0.0, P, 0.0),
            s(W, Omega, 0.0, T, 0.0),
            s(W, X, 0.0, P, 0.0),
        ],
    }
}

/// Parses a document that names its own `scenario`.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    resolve(None, text, &Overrides::default())
}

/// Parses a document for scenario `kind`, then applies command-line
/// overrides. A `scenario` key in the document must agree with `kind`.
pub fn resolve(kind: Option<ScenarioKind>, text: &str, over: &Overrides) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| parse_error(text, e))?;
    let kind = match (kind, raw.scenario) {
        (Some(a), Some(b)) if a != b => {
            return Err(invalid(format!(
                "document scenario `{}` contradicts the requested `{}`",
                b.name(),
                a.name()
            )))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(invalid("no scenario given")),
    };

    let preset = preset_beam(kind);
    let rb = raw.beam.unwrap_or_default();
    let chirp_source = match (rb.chirp, kind) {
        (Some(_), _) => "config",
        (None, ScenarioKind::Custom) => "default",
        (None, _) => DEFAULT_CHIRP_NOTE,
    };
    let base = BeamConfig::from_spec(&preset);
    let beam = BeamConfig {
        sigma_x: rb.sigma_x.unwrap_or(base.sigma_x),
        sigma_2: rb.sigma_2.unwrap_or(base.sigma_2),
        chirp: rb.chirp.unwrap_or(base.chirp),
        omega0: rb.omega0.unwrap_or(base.omega0),
        domain: rb.domain.unwrap_or(base.domain),
    };

    let rm = raw.mask.unwrap_or_default();
    let mask = match (rm.enabled, preset_mask(kind)) {
        (Some(false), _) => None,
        (_, Some(m)) => Some(MaskConfig {
            lo: rm.lo.unwrap_or(m.lo),
            hi: rm.hi.unwrap_or(m.hi),
            axis: rm.axis.unwrap_or(match m.axis_role {
                MaskAxis::Position => MaskRole::Position,
                MaskAxis::Frequency => MaskRole::Frequency,
            }),
            inverted: rm.inverted.unwrap_or(false),
        }),
        (enabled, None) => match (rm.lo, rm.hi, rm.axis) {
            (Some(lo), Some(hi), Some(axis)) => {
                Some(MaskConfig { lo, hi, axis, inverted: rm.inverted.unwrap_or(false) })
            }
            (None, None, None) if enabled.is_none() => None,
            _ => return Err(invalid("a custom mask needs lo, hi and axis")),
        },
    };

    let rg = raw.grid.unwrap_or_default();
    let n = over.grid.or(rg.n).unwrap_or(DEFAULT_POINTS);
    let rg_n = |v: Option<usize>| if over.grid.is_some() { n } else { v.unwrap_or(n) };
    let grid = GridConfig {
        n_x: rg_n(rg.n_x),
        n_2: rg_n(rg.n_2),
        span_x: rg.span_x.unwrap_or(SPATIAL_SPAN_MM),
        span_2: rg.span_2.unwrap_or(match beam.domain {
            BeamDomain::Time => TEMPORAL_SPAN,
            BeamDomain::Frequency => SPECTRAL_SPAN,
        }),
    };

    let rs = raw.scan.unwrap_or_default();
    let with_scan = over.with_scan || rs.enabled.unwrap_or(false);
    let ro = raw.outputs.unwrap_or_default();
    let outputs = OutputConfig {
        csv: ro.csv.unwrap_or(true),
        heatmap: over.heatmaps || ro.heatmap.unwrap_or(false),
        manifest: ro.manifest.unwrap_or(true),
        palette: ro.palette.unwrap_or(Palette::Signed),
    };

    let slices = match raw.slices {
        Some(s) => s,
        None => {
            let mut s = default_slices(kind);
            if with_scan {
                let measured: Vec<SliceConfig> =
                    s.iter().map(|c| SliceConfig { source: c.source.measured(), ..*c }).collect();
                s.extend(measured);
            }
            s
        }
    };

    let cfg = RunConfig {
        scenario: kind,
        beam,
        chirp_source: chirp_source.to_string(),
        mask,
        renormalize_mask: over.renormalize_mask || rm.renormalize.unwrap_or(false),
        lo: raw.lo,
        grid,
        with_scan,
        f_over_k: rs.f_over_k.unwrap_or(DEFAULT_F_OVER_K),
        outputs,
        slices,
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    /// Checks every invariant a run relies on.
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.scenario {
            ScenarioKind::Wire => {
                if self.beam.domain != BeamDomain::Time {
                    return Err(invalid("scenario wire requires beam.domain = time"));
                }
                if self.mask.is_some_and(|m| m.axis != MaskRole::Position) {
                    return Err(invalid("scenario wire requires mask.axis = position"));
                }
            }
            ScenarioKind::Filter => {
                if self.beam.domain != BeamDomain::Frequency {
                    return Err(invalid("scenario filter requires beam.domain = frequency"));
                }
                if self.mask.is_some_and(|m| m.axis != MaskRole::Frequency) {
                    return Err(invalid("scenario filter requires mask.axis = frequency"));
                }
            }
            ScenarioKind::Custom => {}
        }
        if let Some(m) = &self.mask {
            if m.axis == MaskRole::Frequency && self.beam.domain != BeamDomain::Frequency {
                return Err(invalid("a frequency mask requires beam.domain = frequency"));
            }
            m.spec().validate().map_err(|e| invalid(e.to_string()))?;
        }
        self.beam.spec().validate().map_err(|e| invalid(e.to_string()))?;
        if let Some(lo) = &self.lo {
            lo.spec().validate().map_err(|e| invalid(e.to_string()))?;
        }
        let g = &self.grid;
        if g.n_x < 2 || g.n_2 < 2 {
            return Err(invalid(format!("grid needs at least 2 points per axis, got {} x {}", g.n_x, g.n_2)));
        }
        for (name, v) in [("grid.span_x", g.span_x), ("grid.span_2", g.span_2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.f_over_k > 0.0 && self.f_over_k.is_finite()) {
            return Err(invalid(format!("scan.f_over_k must be positive, got {}", self.f_over_k)));
        }
        let mut stems = Vec::with_capacity(self.slices.len());
        for s in &self.slices {
            let fixed = s.fixed();
            if fixed.len() != 2 {
                return Err(invalid(format!(
                    "a slice fixes exactly two coordinates, `{}` fixes {}",
                    s.source.name(),
                    fixed.len()
                )));
            }
            if fixed.iter().any(|(_, v)| !v.is_finite()) {
                return Err(invalid("slice coordinates must be finite"));
            }
            if s.source.is_measured() && !self.with_scan {
                return Err(invalid(format!("slice source `{}` requires the scan", s.source.name())));
            }
            let stem = s.stem();
            if stems.contains(&stem) {
                return Err(invalid(format!("slice `{stem}` is requested twice")));
            }
            stems.push(stem);
        }
        Ok(())
    }
}
