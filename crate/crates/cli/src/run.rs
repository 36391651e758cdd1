//! The scenario pipeline: build, mask, distributions, optional scan, slices
//! and files.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use opstft::fourier::{edge_energy_fraction, ALIASING_THRESHOLD};
use opstft::heterodyne::{ideal_lo, run_scan_separable, ScanGrid};
use opstft::phasespace::{
    conjugate_factors, invert_k_to_w, kirkwood_4d_with, marginal, native_factors, slice,
    wigner_4d_with, Combine, Coord, Dist2D, Dist4D, DistKind, Representation, SliceSpec,
};
use opstft::scenes::{apply_mask, build_beam, lo_components, renormalize};
use opstft::{make_axis, AliasPolicy, Complex64, SampledAxis, SeparableField, Unit};

use crate::config::{ConfigError, LoConfig, Palette, RunConfig, SliceConfig, Source};
use crate::export::{heatmap_pgm, slice_csv, slice_stats, Part, Scaling, SliceStats};

/// Largest marginal residual a run may report and still succeed.
pub const MARGINAL_THRESHOLD: f64 = 1e-4;
/// Largest 4D array compared point by point when a distribution is not
/// separable.
const DENSE_COMPARE_LIMIT: usize = 1 << 24;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numeric error: {0}")]
    Numeric(#[from] opstft::Error),
    #[error("i/o error on {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("manifest serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisRecord {
    pub coord: &'static str,
    pub unit: &'static str,
    pub n: usize,
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl AxisRecord {
    fn new(a: &SampledAxis) -> Self {
        Self {
            coord: a.unit().coordinate(),
            unit: a.unit().symbol(),
            n: a.len(),
            start: a.start(),
            end: a.end(),
            step: a.step(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedRecord {
    pub coord: &'static str,
    pub requested: f64,
    pub actual: f64,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapRecord {
    pub file: String,
    pub part: Part,
    pub palette: Palette,
    pub scaling: Scaling,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceRecord {
    pub name: String,
    pub source: Source,
    pub free: [&'static str; 2],
    pub fixed: Vec<FixedRecord>,
    pub shape: [usize; 2],
    #[serde(flatten)]
    pub stats: SliceStats,
    pub csv: Option<String>,
    pub heatmaps: Vec<HeatmapRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Invariants {
    pub marginal_threshold: f64,
    /// Relative L2 of `∫dp dt W` against `|E(x, ω)|²`.
    pub marginal_residual_native: f64,
    /// Relative L2 of `∫dx dω W` against `|Ẽ(p, t)|²`.
    pub marginal_residual_conjugate: f64,
    pub energy: f64,
    /// `|∫W − energy|`.
    pub energy_residual: f64,
    pub wigner_min: f64,
    pub wigner_max: f64,
    /// `min W / max W` over the whole grid.
    pub wigner_min_over_max: f64,
    /// Largest `max|Im|/max|Re|` of the Wigner factors.
    pub wigner_realness_residual: f64,
    /// Relative L2 of the Kirkwood-to-Wigner inversion against `W`, both
    /// scaled to unit total integral.
    pub inversion_residual: Option<f64>,
    /// Relative L2 of the scanned Kirkwood distribution against the model,
    /// both scaled to unit total integral.
    pub scan_kirkwood_residual: Option<f64>,
    pub scan_wigner_residual: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    /// The LO used by the scan, explicit or derived from the grid.
    pub lo: Option<LoConfig>,
    pub axes: Vec<AxisRecord>,
    pub slices: Vec<SliceRecord>,
    pub invariants: Invariants,
    pub warnings: Vec<String>,
    /// Wall-clock milliseconds per stage; the only nondeterministic block.
    pub timings_ms: BTreeMap<&'static str, f64>,
}

/// Files written so far, removed again if the run fails.
struct Outputs {
    dir: PathBuf,
    created_dir: bool,
    files: Vec<PathBuf>,
}

impl Outputs {
    fn open(dir: &Path) -> Result<Self, RunError> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.to_path_buf(), source })?;
        Ok(Self { dir: dir.to_path_buf(), created_dir, files: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), RunError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|source| RunError::Io { path: path.clone(), source })?;
        self.files.push(path);
        Ok(())
    }

    fn discard(self) {
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

/// Runs `cfg`, writing into `out_dir`. On error every file this run wrote
/// is removed.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunManifest, RunError> {
    cfg.validate()?;
    let mut out = Outputs::open(out_dir)?;
    match execute(cfg, &mut out) {
        Ok(m) => Ok(m),
        Err(e) => {
            out.discard();
            Err(e)
        }
    }
}

fn stopwatch<T>(timings: &mut BTreeMap<&'static str, f64>, stage: &'static str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let v = f();
    timings.insert(stage, start.elapsed().as_secs_f64() * 1e3);
    v
}

/// The masked (and optionally renormalized) signal field.
pub fn build_field(cfg: &RunConfig) -> Result<SeparableField, RunError> {
    let spec = cfg.beam.spec();
    let x = make_axis(0.0, cfg.grid.span_x, cfg.grid.n_x, Unit::Position)?;
    let second = make_axis(0.0, cfg.grid.span_2, cfg.grid.n_2, spec.second_domain.unit())?;
    let mut f = build_beam(&spec, x, second)?;
    if let Some(m) = &cfg.mask {
        f = apply_mask(&f, &m.spec(), m.inverted)?;
        if cfg.renormalize_mask {
            f = renormalize(&f);
        }
    }
    Ok(f)
}

fn aliasing_warnings(f: &SeparableField) -> Result<Vec<String>, RunError> {
    let (x, w) = native_factors(f, AliasPolicy::Warn)?;
    let (p, t) = conjugate_factors(f, AliasPolicy::Warn)?;
    Ok([("x", &x), ("omega", &w), ("p", &p), ("t", &t)]
        .into_iter()
        .filter_map(|(name, g)| {
            let e = edge_energy_fraction(g.values());
            (e > ALIASING_THRESHOLD).then(|| {
                format!("aliasing risk: edge energy fraction {e:.3e} along {name} exceeds {ALIASING_THRESHOLD:.1e}")
            })
        })
        .collect())
}

fn relative_l2(got: &[f64], want: &[f64]) -> f64 {
    let num: f64 = got.iter().zip(want).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = want.iter().map(|b| b * b).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

fn outer_intensity(a: &[Complex64], b: &[Complex64]) -> Vec<f64> {
    a.iter().flat_map(|u| b.iter().map(move |v| u.norm_sqr() * v.norm_sqr())).collect()
}

fn product_factors(d: &Dist4D) -> Option<(&Dist2D, &Dist2D, Complex64)> {
    match d.representation() {
        Representation::Separable { xp, wt, combine: Combine::Product, scale } => Some((xp, wt, *scale)),
        _ => None,
    }
}

/// A separable 4D array as a sum of `c · A ⊗ B` terms. `Re(s·A⊗B)` splits
/// into `(s·A⊗B + s̄·Ā⊗B̄)/2`.
fn terms(d: &Dist4D) -> Option<Vec<(Complex64, Vec<Complex64>, Vec<Complex64>)>> {
    let Representation::Separable { xp, wt, combine, scale } = d.representation() else {
        return None;
    };
    let (a, b) = (xp.values().to_vec(), wt.values().to_vec());
    Some(match combine {
        Combine::Product => vec![(*scale, a, b)],
        Combine::RealPart => {
            let conj = |v: &[Complex64]| v.iter().map(|z| z.conj()).collect::<Vec<_>>();
            let (ca, cb) = (conj(&a), conj(&b));
            vec![(scale * 0.5, a, b), (scale.conj() * 0.5, ca, cb)]
        }
    })
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(u, v)| u.conj() * v).sum()
}

/// Relative L2 distance after scaling both to unit total integral,
/// factorized for separable inputs and materialized only for small dense
/// arrays.
fn unit_integral_l2(a: &Dist4D, b: &Dist4D) -> Option<f64> {
    let axes = a.axes();
    if axes.iter().zip(b.axes()).any(|(x, y)| !x.same_grid(&y)) {
        return None;
    }
    if let (Some(ta), Some(tb)) = (terms(a), terms(b)) {
        let total = |t: &[(Complex64, Vec<Complex64>, Vec<Complex64>)]| -> Complex64 {
            t.iter().map(|(c, x, y)| c * x.iter().sum::<Complex64>() * y.iter().sum::<Complex64>()).sum()
        };
        let inner = |t: &[(Complex64, Vec<Complex64>, Vec<Complex64>)], u: &[(Complex64, Vec<Complex64>, Vec<Complex64>)]| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, x, y) in t {
                for (d, z, w) in u {
                    acc += c.conj() * d * dot(x, z) * dot(y, w);
                }
            }
            acc
        };
        let (sa, sb) = (total(&ta), total(&tb));
        if sa.norm() == 0.0 || sb.norm() == 0.0 {
            return None;
        }
        let aa = inner(&ta, &ta).re / sa.norm_sqr();
        let bb = inner(&tb, &tb).re / sb.norm_sqr();
        let ab = (inner(&ta, &tb) / (sa.conj() * sb)).re;
        return Some(((aa + bb - 2.0 * ab).max(0.0) / bb).sqrt());
    }
    if a.len() > DENSE_COMPARE_LIMIT {
        return None;
    }
    let (va, vb) = (a.dense_values(usize::MAX).ok()?, b.dense_values(usize::MAX).ok()?);
    let (sa, sb) = (va.iter().sum::<Complex64>(), vb.iter().sum::<Complex64>());
    if sa.norm() == 0.0 || sb.norm() == 0.0 {
        return None;
    }
    let num: f64 = va.iter().zip(&vb).map(|(x, y)| (x / sa - y / sb).norm_sqr()).sum();
    let den: f64 = vb.iter().map(|y| (y / sb).norm_sqr()).sum();
    Some((num / den).sqrt())
}

/// Extremes of a separable Wigner product over the whole grid.
fn wigner_extremes(w: &Dist4D) -> (f64, f64) {
    let Some((a, b, s)) = product_factors(w) else {
        return (f64::NAN, f64::NAN);
    };
    let range = |d: &Dist2D| {
        d.values().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v.re), hi.max(v.re)))
    };
    let ((a0, a1), (b0, b1)) = (range(a), range(b));
    let corners = [a0 * b0, a0 * b1, a1 * b0, a1 * b1].map(|v| v * s.re);
    let min = corners.iter().copied().fold(f64::INFINITY, f64::min);
    let max = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

fn invariants(f: &SeparableField, w: &Dist4D, k: &Dist4D) -> Result<Invariants, RunError> {
    let (x, v) = native_factors(f, AliasPolicy::Warn)?;
    let (p, t) = conjugate_factors(f, AliasPolicy::Warn)?;
    let native = marginal(w, &[Coord::P, Coord::T])?;
    let conj = marginal(w, &[Coord::X, Coord::Omega])?;
    let marginal_residual_native = relative_l2(&native.values, &outer_intensity(x.values(), v.values()));
    let marginal_residual_conjugate = relative_l2(&conj.values, &outer_intensity(p.values(), t.values()));
    let total = marginal(w, &Coord::ALL)?.values[0];
    let energy = f.energy();
    let (wigner_min, wigner_max) = wigner_extremes(w);
    let wigner_realness_residual = match w.representation() {
        Representation::Separable { xp, wt, .. } => xp.realness_residual().max(wt.realness_residual()),
        Representation::Dense { .. } => f64::NAN,
    };
    let inversion_residual = unit_integral_l2(&invert_k_to_w(k)?, w);
    let worst = marginal_residual_native.max(marginal_residual_conjugate);
    Ok(Invariants {
        marginal_threshold: MARGINAL_THRESHOLD,
        marginal_residual_native,
        marginal_residual_conjugate,
        energy,
        energy_residual: (total - energy).abs(),
        wigner_min,
        wigner_max,
        wigner_min_over_max: if wigner_max > 0.0 { wigner_min / wigner_max } else { f64::NAN },
        wigner_realness_residual,
        inversion_residual,
        scan_kirkwood_residual: None,
        scan_wigner_residual: None,
        passed: worst <= MARGINAL_THRESHOLD,
    })
}

struct Distributions {
    wigner: Dist4D,
    kirkwood: Dist4D,
    measured: Option<(Dist4D, Dist4D)>,
}

impl Distributions {
    fn pick(&self, s: Source) -> &Dist4D {
        match (s, &self.measured) {
            (Source::Wigner, _) => &self.wigner,
            (Source::Kirkwood, _) => &self.kirkwood,
            (Source::MeasuredKirkwood, Some((k, _))) => k,
            (Source::MeasuredWigner, Some((_, w))) => w,
            // Validation guarantees the scan ran for measured sources.
            (_, None) => unreachable!("measured slice without a scan"),
        }
    }
}

fn scan(cfg: &RunConfig, f: &SeparableField, warnings: &mut Vec<String>) -> Result<(LoConfig, Dist4D, Dist4D), RunError> {
    let (x, v) = native_factors(f, AliasPolicy::Warn)?;
    let (x, v) = (*x.axis(), *v.axis());
    let lo = cfg.lo.unwrap_or_else(|| {
        let s = ideal_lo(&x, &v);
        LoConfig { a: s.a, big_a: s.big_a, alpha: s.alpha, beta: s.beta, gamma: s.gamma, phi: s.phi }
    });
    if let Err(e) = lo.spec().check_regime() {
        warnings.push(e.to_string());
    }
    if cfg.lo.is_none() && (x.len() % 2 == 0 || v.len() % 2 == 0) {
        warnings.push(
            "even grid: the ideal LO focus falls between samples, so the scan only approximates K; use an odd grid for an exact match"
                .into(),
        );
    }
    let parts = lo_components(&lo.spec(), x, v)?;
    let grid = ScanGrid::matching(&x, &v, cfg.f_over_k)?;
    let s = run_scan_separable(&parts, f, &grid)?;
    Ok((lo, s.to_kirkwood()?, s.to_wigner()?))
}

fn export_slice(
    cfg: &RunConfig,
    s: &SliceConfig,
    d: &Dist4D,
    out: &mut Outputs,
) -> Result<SliceRecord, RunError> {
    let fixed = s.fixed();
    let spec = SliceSpec::new(fixed[0].0, fixed[0].1, fixed[1].0, fixed[1].1)?;
    let (plane, snaps) = slice(d, &spec)?;
    let name = s.stem();
    let csv = if cfg.outputs.csv {
        let file = format!("{name}.csv");
        out.write(&file, slice_csv(&plane).as_bytes())?;
        Some(file)
    } else {
        None
    };
    let mut heatmaps = Vec::new();
    if cfg.outputs.heatmap {
        let parts: &[Part] = match (cfg.outputs.palette, plane.kind()) {
            (Palette::Signed, DistKind::Kirkwood | DistKind::Cross) => &[Part::Re, Part::Im],
            _ => &[Part::Re],
        };
        for &part in parts {
            let file = match (parts.len(), part) {
                (1, _) => format!("{name}.pgm"),
                (_, Part::Re) => format!("{name}_re.pgm"),
                (_, Part::Im) => format!("{name}_im.pgm"),
            };
            let (bytes, scaling) = heatmap_pgm(&plane, part, cfg.outputs.palette);
            out.write(&file, &bytes)?;
            heatmaps.push(HeatmapRecord { file, part, palette: cfg.outputs.palette, scaling });
        }
    }
    let [f1, f2] = spec.free();
    Ok(SliceRecord {
        name,
        source: s.source,
        free: [f1.name(), f2.name()],
        fixed: snaps
            .iter()
            .map(|sn| FixedRecord { coord: sn.coord.name(), requested: sn.requested, actual: sn.actual, index: sn.index })
            .collect(),
        shape: [plane.shape().0, plane.shape().1],
        stats: slice_stats(&plane),
        csv,
        heatmaps,
    })
}

fn execute(cfg: &RunConfig, out: &mut Outputs) -> Result<RunManifest, RunError> {
    let mut timings = BTreeMap::new();
    let f = stopwatch(&mut timings, "build", || build_field(cfg))?;
    let mut warnings = aliasing_warnings(&f)?;
    if f.energy() == 0.0 {
        warnings.push("the mask removes the whole field".into());
    }
    let (wigner, kirkwood) = stopwatch(&mut timings, "distributions", || -> Result<_, RunError> {
        Ok((wigner_4d_with(&f, AliasPolicy::Warn)?, kirkwood_4d_with(&f, AliasPolicy::Warn)?))
    })?;
    let mut inv = stopwatch(&mut timings, "invariants", || invariants(&f, &wigner, &kirkwood))?;
    let mut lo = None;
    let mut dists = Distributions { wigner, kirkwood, measured: None };
    if cfg.with_scan {
        let (used, mk, mw) = stopwatch(&mut timings, "scan", || scan(cfg, &f, &mut warnings))?;
        inv.scan_kirkwood_residual = unit_integral_l2(&mk, &dists.kirkwood);
        inv.scan_wigner_residual = unit_integral_l2(&mw, &dists.wigner);
        lo = Some(used);
        dists.measured = Some((mk, mw));
    }
    if !inv.passed {
        warnings.push(format!(
            "marginal residual {:.3e} exceeds {MARGINAL_THRESHOLD:.0e}",
            inv.marginal_residual_native.max(inv.marginal_residual_conjugate)
        ));
    }
    let start = Instant::now();
    let mut slices = Vec::with_capacity(cfg.slices.len());
    for s in &cfg.slices {
        slices.push(export_slice(cfg, s, dists.pick(s.source), out)?);
    }
    timings.insert("export", start.elapsed().as_secs_f64() * 1e3);
    let axes = dists.wigner.axes().iter().map(AxisRecord::new).collect();
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        lo,
        axes,
        slices,
        invariants: inv,
        warnings,
        timings_ms: timings,
    };
    if cfg.outputs.manifest {
        out.write(MANIFEST_FILE, &manifest_json(&manifest)?)?;
    }
    Ok(manifest)
}

/// Pretty-printed manifest with a trailing newline.
pub fn manifest_json(m: &RunManifest) -> Result<Vec<u8>, RunError> {
    let mut bytes = serde_json::to_vec_pretty(m)?;
    bytes.push(b'\n');
    Ok(bytes)
}
