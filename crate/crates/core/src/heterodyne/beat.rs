use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ComplexField1D, ComplexField2D, Domain};
use crate::fourier::{fourier_eval, shift_bandlimited, AliasPolicy, Sign};
use crate::grid::{SampledAxis, Unit};
use crate::phasespace::to_native_dense;

/// Offsets of one measurement point. `dp` is the lens translation in mm; the
/// momentum offset it produces is `dp / f_over_k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Offsets {
    pub dx: f64,
    pub dp: f64,
    pub dw: f64,
    pub tau: f64,
}

impl Offsets {
    pub fn new(dx: f64, dp: f64, dw: f64, tau: f64) -> Self {
        Self { dx, dp, dw, tau }
    }

    pub fn momentum(&self, f_over_k: f64) -> f64 {
        self.dp / f_over_k
    }
}

/// A shifted LO that no longer fits inside the sampled window.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetClipping {
    pub coord: &'static str,
    pub offset: f64,
    pub limit: f64,
}

impl fmt::Display for OffsetClipping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "offset {} = {} exceeds half the axis span ({}); the shifted LO is clipped",
            self.coord, self.offset, self.limit
        )
    }
}

/// Offsets along `x` or `ω` larger than half the corresponding span.
pub fn check_offsets(x: &SampledAxis, w: &SampledAxis, dx: f64, dw: f64) -> Vec<OffsetClipping> {
    let mut out = Vec::new();
    for (coord, axis, d) in [("dx", x, dx), ("dw", w, dw)] {
        let limit = 0.5 * axis.span();
        if d.abs() > limit * (1.0 + 1e-12) {
            out.push(OffsetClipping { coord, offset: d, limit });
        }
    }
    out
}

pub(crate) fn check_f_over_k(f_over_k: f64) -> Result<()> {
    if f_over_k > 0.0 && f_over_k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("f_over_k must be positive, got {f_over_k}")))
    }
}

fn require_native(f: &ComplexField2D, what: &str) -> Result<()> {
    if f.axis1().unit() != Unit::Position || f.axis2().unit() != Unit::Frequency {
        return Err(Error::UnitMismatch(format!("{what} must be sampled on (x, omega)")));
    }
    Ok(())
}

/// Band-limited 2D translation of a row-major field by `(s1, s2)` samples.
pub(crate) fn shift_2d(values: &[Complex64], rows: usize, cols: usize, s1: f64, s2: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = values
        .chunks(cols)
        .flat_map(|r| shift_bandlimited(r, s2))
        .collect();
    if s1 != 0.0 {
        let mut column = vec![Complex64::new(0.0, 0.0); rows];
        for j in 0..cols {
            for i in 0..rows {
                column[i] = out[i * cols + j];
            }
            for (i, v) in shift_bandlimited(&column, s1).into_iter().enumerate() {
                out[i * cols + j] = v;
            }
        }
    }
    out
}

/// `V_B = ∫dx dω E*_LO(x−dx, ω−dω) E_S(x, ω) e^{−ix·dp/f_over_k} e^{−iωτ}`.
///
/// Both fields are brought to `(x, ω)` and must then share axes. The LO is
/// translated with a band-limited shift; offsets beyond half a span are
/// logged as clipping.
pub fn beat_amplitude(
    lo: &ComplexField2D,
    sig: &ComplexField2D,
    off: Offsets,
    f_over_k: f64,
) -> Result<Complex64> {
    check_f_over_k(f_over_k)?;
    // The LO is only translated, so a truncated collimated term is fine.
    let lo = match lo.domain() {
        Domain::XOmega => lo.clone(),
        _ => to_native_dense(lo, AliasPolicy::Warn)?,
    };
    let sig = to_native_dense(sig, AliasPolicy::Strict)?;
    require_native(&lo, "LO")?;
    lo.axis1().require_same(sig.axis1(), "beat amplitude x axis")?;
    lo.axis2().require_same(sig.axis2(), "beat amplitude omega axis")?;
    let (xa, wa) = (sig.axis1(), sig.axis2());
    for c in check_offsets(xa, wa, off.dx, off.dw) {
        log::warn!("{c}");
    }
    let (n1, n2) = sig.shape();
    let shifted = shift_2d(lo.values(), n1, n2, off.dx / xa.step(), off.dw / wa.step());
    let p = off.momentum(f_over_k);
    let xs = xa.samples();
    let ws = wa.samples();
    let wramp: Vec<Complex64> = ws.iter().map(|w| Complex64::from_polar(1.0, -w * off.tau)).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, x) in xs.iter().enumerate() {
        let row: Complex64 = (0..n2)
            .map(|k| shifted[i * n2 + k].conj() * sig.values()[i * n2 + k] * wramp[k])
            .sum();
        acc += row * Complex64::from_polar(1.0, -x * p);
    }
    Ok(acc * xa.step() * wa.step())
}

/// One-dimensional beat table `Σ_u g*(u − d) f(u) e^{−iuκ} Δ` over every
/// shift `d` of `shifts` (outer) and every `κ` of `mods` (inner).
pub(crate) fn line_beats(
    g: &ComplexField1D,
    f: &ComplexField1D,
    shifts: &SampledAxis,
    mods: &SampledAxis,
) -> Vec<Complex64> {
    let du = f.axis().step();
    let root = (2.0 * PI).sqrt();
    shifts
        .samples()
        .iter()
        .flat_map(|&d| {
            let gs = shift_bandlimited(g.values(), d / du);
            let prod: Vec<Complex64> = gs.iter().zip(f.values()).map(|(a, b)| a.conj() * b).collect();
            fourier_eval(&prod, f.axis(), mods, Sign::Minus)
                .into_iter()
                .map(move |v| v * root)
        })
        .collect()
}
