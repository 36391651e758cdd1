use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::beat::{check_f_over_k, check_offsets, line_beats};
use crate::error::{Error, Result};
use crate::field::{ComplexField2D, SeparableField};
use crate::fourier::{shift_bandlimited, AliasPolicy, Sign};
use crate::grid::{SampledAxis, Unit};
use crate::phasespace::{
    check_budget, invert_k_to_w, invert_plane, native_factors, to_native_dense, transform_axis, Combine,
    Dist2D, Dist4D, DistKind, DEFAULT_BUDGET_BYTES,
};
use crate::scenes::{LOSpec, LoComponents};

/// Offsets visited by a scan. `dp_axis` holds lens translations in mm;
/// [`ScanGrid::momentum_axis`] gives the momentum offsets they produce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    dx_axis: SampledAxis,
    dp_axis: SampledAxis,
    dw_axis: SampledAxis,
    tau_axis: SampledAxis,
    f_over_k: f64,
}

fn scaled_axis(a: &SampledAxis, factor: f64, unit: Unit) -> Result<SampledAxis> {
    SampledAxis::new(a.center() * factor, a.span() * factor, a.len(), unit)
}

impl ScanGrid {
    pub fn new(
        dx_axis: SampledAxis,
        dp_axis: SampledAxis,
        dw_axis: SampledAxis,
        tau_axis: SampledAxis,
        f_over_k: f64,
    ) -> Result<Self> {
        check_f_over_k(f_over_k)?;
        for (name, axis, unit) in [
            ("dx", &dx_axis, Unit::Position),
            ("dp", &dp_axis, Unit::Position),
            ("dw", &dw_axis, Unit::Frequency),
            ("tau", &tau_axis, Unit::Time),
        ] {
            if axis.unit() != unit {
                return Err(Error::UnitMismatch(format!("{name} axis must be in {unit}, got {}", axis.unit())));
            }
        }
        Ok(Self { dx_axis, dp_axis, dw_axis, tau_axis, f_over_k })
    }

    /// The grid whose offsets coincide with the distribution grid of a field
    /// sampled on `(x, ω)`: `dx` on `x`, momentum offsets on the conjugate of
    /// `x`, and likewise for `(ω, t)`.
    pub fn matching(x: &SampledAxis, w: &SampledAxis, f_over_k: f64) -> Result<Self> {
        check_f_over_k(f_over_k)?;
        let dp = scaled_axis(&x.conjugate(), f_over_k, Unit::Position)?;
        Self::new(*x, dp, *w, w.conjugate(), f_over_k)
    }

    pub fn dx_axis(&self) -> &SampledAxis {
        &self.dx_axis
    }

    pub fn dp_axis(&self) -> &SampledAxis {
        &self.dp_axis
    }

    pub fn dw_axis(&self) -> &SampledAxis {
        &self.dw_axis
    }

    pub fn tau_axis(&self) -> &SampledAxis {
        &self.tau_axis
    }

    pub fn f_over_k(&self) -> f64 {
        self.f_over_k
    }

    /// Momentum offsets `dp / f_over_k`.
    pub fn momentum_axis(&self) -> SampledAxis {
        scaled_axis(&self.dp_axis, 1.0 / self.f_over_k, Unit::Momentum)
            .expect("scaling a valid axis by a positive factor")
    }

    /// Distribution axes `[x, p, ω, t]` sampled by the scan.
    pub fn axes(&self) -> [SampledAxis; 4] {
        [self.dx_axis, self.momentum_axis(), self.dw_axis, self.tau_axis]
    }

    pub fn shape(&self) -> [usize; 4] {
        self.axes().map(|a| a.len())
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    /// Always false; every axis holds at least two samples.
    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
enum ScanData {
    Separable { xp: Vec<Complex64>, wt: Vec<Complex64> },
    Dense(Vec<Complex64>),
}

/// Quadratures `S_R + i·S_I` over a [`ScanGrid`], scaled to unit maximum
/// modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementScan {
    grid: ScanGrid,
    data: ScanData,
    peak: f64,
}

fn normalize(values: &mut [Complex64]) -> f64 {
    let m = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if m > 0.0 {
        values.iter_mut().for_each(|v| *v /= m);
    }
    m
}

impl MeasurementScan {
    fn separable(grid: ScanGrid, mut xp: Vec<Complex64>, mut wt: Vec<Complex64>) -> Self {
        let peak = normalize(&mut xp) * normalize(&mut wt);
        Self { grid, data: ScanData::Separable { xp, wt }, peak }
    }

    fn dense(grid: ScanGrid, mut values: Vec<Complex64>) -> Self {
        let peak = normalize(&mut values);
        Self { grid, data: ScanData::Dense(values), peak }
    }

    pub fn grid(&self) -> &ScanGrid {
        &self.grid
    }

    /// Maximum modulus before normalization.
    pub fn peak(&self) -> f64 {
        self.peak
    }

    pub fn is_separable(&self) -> bool {
        matches!(self.data, ScanData::Separable { .. })
    }

    /// `S_R + i·S_I` at `[idx, idp, idω, iτ]`.
    pub fn get(&self, idx: [usize; 4]) -> Complex64 {
        let [_, np, nw, nt] = self.grid.shape();
        match &self.data {
            ScanData::Separable { xp, wt } => xp[idx[0] * np + idx[1]] * wt[idx[2] * nt + idx[3]],
            ScanData::Dense(v) => v[((idx[0] * np + idx[1]) * nw + idx[2]) * nt + idx[3]],
        }
    }

    /// All values, row-major over `[dx, dp, dω, τ]`.
    pub fn values(&self) -> Vec<Complex64> {
        match &self.data {
            ScanData::Separable { xp, wt } => xp.iter().flat_map(|a| wt.iter().map(move |b| a * b)).collect(),
            ScanData::Dense(v) => v.clone(),
        }
    }

    /// In-phase quadrature `S_R`.
    pub fn s_real(&self) -> Vec<f64> {
        self.values().iter().map(|v| v.re).collect()
    }

    /// Out-of-phase quadrature `S_I`.
    pub fn s_imag(&self) -> Vec<f64> {
        self.values().iter().map(|v| v.im).collect()
    }

    /// The Kirkwood-Rihaczek distribution sampled by a separable scan,
    /// scaled to unit total weight.
    ///
    /// The scan measures `K_xp · conj(K_ωt)`, so the time-frequency factor is
    /// conjugated here.
    pub fn to_kirkwood(&self) -> Result<Dist4D> {
        let ScanData::Separable { xp, wt } = &self.data else {
            return Err(Error::NotSeparable);
        };
        let [ax, ap, aw, at] = self.grid.axes();
        let wt: Vec<Complex64> = wt.iter().map(|v| v.conj()).collect();
        let a = Dist2D::new(ax, ap, xp.clone(), DistKind::Kirkwood)?;
        let b = Dist2D::new(aw, at, wt, DistKind::Kirkwood)?;
        let total = a.integral() * b.integral();
        if !(total.norm() > 0.0) {
            return Err(Error::InvalidParameter("scan carries no net weight".into()));
        }
        Ok(Dist4D::separable(a, b, Combine::Product, 1.0 / total, DistKind::Kirkwood))
    }

    /// The Wigner distribution reconstructed from the scan, with unit total
    /// weight.
    ///
    /// Dense scans invert the `(x, p)` planes directly and the `(ω, t)`
    /// planes with the conjugated kernel.
    pub fn to_wigner(&self) -> Result<Dist4D> {
        self.to_wigner_with(DEFAULT_BUDGET_BYTES)
    }

    pub fn to_wigner_with(&self, budget: usize) -> Result<Dist4D> {
        let ScanData::Dense(raw) = &self.data else {
            return invert_k_to_w(&self.to_kirkwood()?);
        };
        check_budget(raw.len(), budget)?;
        let axes = self.grid.axes();
        let [n1, n2, n3, n4] = self.grid.shape();
        let weight: f64 = axes.iter().map(|a| a.step()).product();
        let total = raw.iter().sum::<Complex64>() * weight;
        if !(total.norm() > 0.0) {
            return Err(Error::InvalidParameter("scan carries no net weight".into()));
        }
        let mut values = raw.clone();
        let inner = n3 * n4;
        values.par_chunks_mut(inner).for_each(|plane| {
            let conj: Vec<Complex64> = plane.iter().map(|v| v.conj()).collect();
            for (dst, v) in plane.iter_mut().zip(invert_plane(&conj, &axes[2], &axes[3])) {
                *dst = v.conj();
            }
        });
        let planes: Vec<Vec<Complex64>> = (0..inner)
            .into_par_iter()
            .map(|kq| {
                let plane: Vec<Complex64> = (0..n1 * n2).map(|il| values[il * inner + kq]).collect();
                invert_plane(&plane, &axes[0], &axes[1])
            })
            .collect();
        for (kq, plane) in planes.iter().enumerate() {
            for (il, v) in plane.iter().enumerate() {
                values[il * inner + kq] = Complex64::new((v / total).re, 0.0);
            }
        }
        Dist4D::dense(axes, values, DistKind::Wigner)
    }
}

/// An LO for which the scan reproduces the Kirkwood-Rihaczek distribution on
/// the grid: focused and narrowband terms an eighth of a sample wide,
/// collimated and wideband terms a thousand spans wide.
pub fn ideal_lo(x: &SampledAxis, w: &SampledAxis) -> LOSpec {
    LOSpec {
        a: x.step() / 8.0,
        big_a: 1e3 * x.span(),
        alpha: 1e3 * w.span(),
        beta: w.step() / 8.0,
        gamma: 1.0,
        phi: 0.0,
    }
}

fn check_lo_grid(lo: &LoComponents, x: &SampledAxis, w: &SampledAxis, grid: &ScanGrid) -> Result<()> {
    lo.focused.spatial.axis().require_same(x, "LO and signal x axis")?;
    lo.focused.spectral.axis().require_same(w, "LO and signal omega axis")?;
    for a in [grid.dx_axis.start(), grid.dx_axis.end()] {
        for c in check_offsets(x, w, a, 0.0) {
            log::warn!("{c}");
        }
    }
    for a in [grid.dw_axis.start(), grid.dw_axis.end()] {
        for c in check_offsets(x, w, 0.0, a) {
            log::warn!("{c}");
        }
    }
    Ok(())
}

/// Forward model of the four-window measurement for a separable signal.
///
/// Each LO term gives a beat amplitude per grid point; the recorded value is
/// the lock-in product `V_focused* · V_collimated`.
pub fn run_scan_separable(lo: &LoComponents, sig: &SeparableField, grid: &ScanGrid) -> Result<MeasurementScan> {
    let (f, v) = native_factors(sig, AliasPolicy::Strict)?;
    check_lo_grid(lo, f.axis(), v.axis(), grid)?;
    let p = grid.momentum_axis();
    let fx = line_beats(&lo.focused.spatial, &f, &grid.dx_axis, &p);
    let cx = line_beats(&lo.collimated.spatial, &f, &grid.dx_axis, &p);
    let fw = line_beats(&lo.focused.spectral, &v, &grid.dw_axis, &grid.tau_axis);
    let cw = line_beats(&lo.collimated.spectral, &v, &grid.dw_axis, &grid.tau_axis);
    let xp = fx.iter().zip(&cx).map(|(a, b)| a.conj() * b).collect();
    let wt = fw.iter().zip(&cw).map(|(a, b)| a.conj() * b).collect();
    Ok(MeasurementScan::separable(*grid, xp, wt))
}

/// As [`run_scan_separable`] for an arbitrary field, using the default
/// memory budget.
pub fn run_scan(lo: &LoComponents, sig: &ComplexField2D, grid: &ScanGrid) -> Result<MeasurementScan> {
    run_scan_with(lo, sig, grid, DEFAULT_BUDGET_BYTES)
}

pub fn run_scan_with(
    lo: &LoComponents,
    sig: &ComplexField2D,
    grid: &ScanGrid,
    budget: usize,
) -> Result<MeasurementScan> {
    let e = to_native_dense(sig, AliasPolicy::Strict)?;
    let (xa, wa) = (*e.axis1(), *e.axis2());
    check_lo_grid(lo, &xa, &wa, grid)?;
    check_budget(grid.len(), budget)?;
    let (nx, nw) = e.shape();
    let p = grid.momentum_axis();
    let shifted = |g: &[Complex64], axis: &SampledAxis, step: f64| -> Vec<Vec<Complex64>> {
        axis.samples().iter().map(|d| shift_bandlimited(g, d / step)).collect()
    };
    let fs = shifted(lo.focused.spatial.values(), &grid.dx_axis, xa.step());
    let cs = shifted(lo.collimated.spatial.values(), &grid.dx_axis, xa.step());
    let gs = shifted(lo.focused.spectral.values(), &grid.dw_axis, wa.step());
    let bs = shifted(lo.collimated.spectral.values(), &grid.dw_axis, wa.step());
    let [ndx, np, ndw, nt] = grid.shape();
    let two_pi = 2.0 * PI;
    let beat = |a: &[Complex64], b: &[Complex64]| -> Vec<Complex64> {
        let prod: Vec<Complex64> = (0..nx * nw)
            .map(|k| (a[k / nw] * b[k % nw]).conj() * e.values()[k])
            .collect();
        let half = transform_axis(&prod, (nx, nw), true, &wa, &grid.tau_axis, Sign::Minus);
        transform_axis(&half, (nx, nt), false, &xa, &p, Sign::Minus)
    };
    let blocks: Vec<Vec<Complex64>> = (0..ndx * ndw)
        .into_par_iter()
        .map(|ik| {
            let (i, k) = (ik / ndw, ik % ndw);
            let vf = beat(&fs[i], &gs[k]);
            let vc = beat(&cs[i], &bs[k]);
            vf.iter().zip(&vc).map(|(a, b)| a.conj() * b * (two_pi * two_pi)).collect()
        })
        .collect();
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (ik, block) in blocks.iter().enumerate() {
        let (i, k) = (ik / ndw, ik % ndw);
        for l in 0..np {
            let dst = ((i * np + l) * ndw + k) * nt;
            values[dst..dst + nt].copy_from_slice(&block[l * nt..(l + 1) * nt]);
        }
    }
    Ok(MeasurementScan::dense(*grid, values))
}
