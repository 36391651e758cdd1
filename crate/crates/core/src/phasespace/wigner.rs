use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{check_budget, Combine, Dist2D, Dist4D, DistKind};
use crate::error::Result;
use crate::field::{ComplexField1D, ComplexField2D, SeparableField};
use crate::fourier::{
    check_aliasing, dft2_in_place, dft_in_place, fourier_1d_with, fourier_eval, refine2,
    refine2_2d, AliasPolicy, Sign,
};
use crate::grid::{SampledAxis, Unit};

/// Returns the spatial factor over `x` and the spectral factor over `ω`,
/// transforming whichever factor is stored in its conjugate domain.
pub fn native_factors(
    f: &SeparableField,
    policy: AliasPolicy,
) -> Result<(ComplexField1D, ComplexField1D)> {
    let spatial = match f.spatial.axis().unit() {
        Unit::Momentum => {
            fourier_1d_with(&f.spatial, Sign::Plus, &f.spatial.axis().conjugate(), policy)?
        }
        _ => f.spatial.clone(),
    };
    let spectral = match f.spectral.axis().unit() {
        Unit::Time => {
            fourier_1d_with(&f.spectral, Sign::Plus, &f.spectral.axis().conjugate(), policy)?
        }
        _ => f.spectral.clone(),
    };
    Ok((spatial, spectral))
}

/// Returns `f̃(p)` and `ṽ(t)` on the axes conjugate to the native ones.
pub fn conjugate_factors(
    f: &SeparableField,
    policy: AliasPolicy,
) -> Result<(ComplexField1D, ComplexField1D)> {
    let (x, w) = native_factors(f, policy)?;
    Ok((
        fourier_1d_with(&x, Sign::Minus, &x.axis().conjugate(), policy)?,
        fourier_1d_with(&w, Sign::Minus, &w.axis().conjugate(), policy)?,
    ))
}

/// Applies `fourier_eval` along one axis of a row-major array.
pub(crate) fn transform_axis(
    values: &[Complex64],
    shape: (usize, usize),
    along_rows: bool,
    source: &SampledAxis,
    target: &SampledAxis,
    sign: Sign,
) -> Vec<Complex64> {
    let (rows, cols) = shape;
    if along_rows {
        values
            .chunks(cols)
            .flat_map(|r| fourier_eval(r, source, target, sign))
            .collect()
    } else {
        let mut out = vec![Complex64::new(0.0, 0.0); target.len() * cols];
        let mut column = vec![Complex64::new(0.0, 0.0); rows];
        for j in 0..cols {
            for i in 0..rows {
                column[i] = values[i * cols + j];
            }
            for (i, v) in fourier_eval(&column, source, target, sign).into_iter().enumerate() {
                out[i * cols + j] = v;
            }
        }
        out
    }
}

fn check_aliasing_2d(f: &ComplexField2D, policy: AliasPolicy) -> Result<()> {
    let (n1, n2) = f.shape();
    let v = f.values();
    let rows: Vec<Complex64> = (0..n1)
        .map(|i| Complex64::new(v[i * n2..(i + 1) * n2].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), 0.0))
        .collect();
    let cols: Vec<Complex64> = (0..n2)
        .map(|j| Complex64::new((0..n1).map(|i| v[i * n2 + j].norm_sqr()).sum::<f64>().sqrt(), 0.0))
        .collect();
    check_aliasing(&rows, policy)?;
    check_aliasing(&cols, policy)
}

/// The dense field over `(x, ω)`, transforming axes stored in their
/// conjugate domain.
pub fn to_native_dense(f: &ComplexField2D, policy: AliasPolicy) -> Result<ComplexField2D> {
    check_aliasing_2d(f, policy)?;
    let mut a1 = *f.axis1();
    let mut a2 = *f.axis2();
    let mut values = f.values().to_vec();
    if a1.unit() == Unit::Momentum {
        let target = a1.conjugate();
        values = transform_axis(&values, (a1.len(), a2.len()), false, &a1, &target, Sign::Plus);
        a1 = target;
    }
    if a2.unit() == Unit::Time {
        let target = a2.conjugate();
        values = transform_axis(&values, (a1.len(), a2.len()), true, &a2, &target, Sign::Plus);
        a2 = target;
    }
    ComplexField2D::new(a1, a2, values)
}

/// `e^{i·m·Δ·κ0}` for `m ∈ [−2n, 2n)`, indexed by `m + 2n`.
fn lag_twiddles(n: usize, du: f64, kappa0: f64) -> Vec<Complex64> {
    let off = 2 * n as isize;
    (0..4 * n)
        .map(|q| Complex64::from_polar(1.0, (q as isize - off) as f64 * du * kappa0))
        .collect()
}

/// Core transform over lags for refined inputs `ga`, `gb` of length `2n`:
/// row `j` holds `(Δ/2π) Σ_m e^{imΔκ_l} ga*(2j+m) gb(2j−m)`.
fn lag_transform(ga: &[Complex64], gb: &[Complex64], axis: &SampledAxis) -> Vec<Complex64> {
    let n = axis.len();
    let du = axis.step();
    let kappa = axis.conjugate();
    let tw = lag_twiddles(n, du, kappa.start());
    let off = 2 * n as isize;
    let scale = du / (2.0 * PI);
    let last = 2 * n as isize - 1;
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let c = 2 * j as isize;
            let mmax = c.min(last - c);
            let mut h = vec![Complex64::new(0.0, 0.0); n];
            for m in -mmax..=mmax {
                let p = ga[(c + m) as usize].conj() * gb[(c - m) as usize];
                h[m.rem_euclid(n as isize) as usize] += p * tw[(m + off) as usize];
            }
            dft_in_place(&mut h, Sign::Plus);
            h.iter_mut().for_each(|v| *v *= scale);
            h
        })
        .collect();
    rows.concat()
}

/// Cross-Wigner `W[a,b](u,κ) = (1/2π) ∫ dε e^{iεκ} a*(u+ε/2) b(u−ε/2)`.
pub fn cross_wigner_1d(
    a: &ComplexField1D,
    b: &ComplexField1D,
    policy: AliasPolicy,
) -> Result<Dist2D> {
    a.axis().require_same(b.axis(), "cross-Wigner inputs")?;
    check_aliasing(a.values(), policy)?;
    check_aliasing(b.values(), policy)?;
    let ga = refine2(a.values());
    let gb = refine2(b.values());
    let values = lag_transform(&ga, &gb, a.axis());
    Dist2D::new(*a.axis(), a.axis().conjugate(), values, DistKind::Cross)
}

/// Wigner distribution of a 1D field on `(u, conjugate(u))`.
pub fn wigner_1d(f: &ComplexField1D) -> Result<Dist2D> {
    wigner_1d_with(f, AliasPolicy::Strict)
}

pub fn wigner_1d_with(f: &ComplexField1D, policy: AliasPolicy) -> Result<Dist2D> {
    check_aliasing(f.values(), policy)?;
    let g = refine2(f.values());
    let values = lag_transform(&g, &g, f.axis());
    Dist2D::new(*f.axis(), f.axis().conjugate(), values, DistKind::Wigner)
}

/// Separable 4D Wigner distribution: `W_xp(x,p) · W_ωt(ω,t)`.
pub fn wigner_4d(f: &SeparableField) -> Result<Dist4D> {
    wigner_4d_with(f, AliasPolicy::Strict)
}

pub fn wigner_4d_with(f: &SeparableField, policy: AliasPolicy) -> Result<Dist4D> {
    let (x, w) = native_factors(f, policy)?;
    Ok(Dist4D::separable(
        wigner_1d_with(&x, policy)?,
        wigner_1d_with(&w, policy)?,
        Combine::Product,
        Complex64::new(1.0, 0.0),
        DistKind::Wigner,
    ))
}

/// Dense 4D Wigner distribution of a non-separable field.
pub fn wigner_4d_dense(f: &ComplexField2D, budget: usize) -> Result<Dist4D> {
    wigner_4d_dense_with(f, budget, AliasPolicy::Strict)
}

/// As [`wigner_4d_dense`], with an explicit aliasing policy.
pub fn wigner_4d_dense_with(f: &ComplexField2D, budget: usize, policy: AliasPolicy) -> Result<Dist4D> {
    let e = to_native_dense(f, policy)?;
    let (n1, n2) = e.shape();
    check_budget(n1 * n1 * n2 * n2, budget)?;
    let ax = *e.axis1();
    let aw = *e.axis2();
    let (px, tw) = (ax.conjugate(), aw.conjugate());
    let r = refine2_2d(e.values(), n1, n2);
    let c2 = 2 * n2;
    let tx = lag_twiddles(n1, ax.step(), px.start());
    let tt = lag_twiddles(n2, aw.step(), tw.start());
    let scale = ax.step() * aw.step() / (4.0 * PI * PI);
    let (o1, o2) = (2 * n1 as isize, 2 * n2 as isize);
    let planes: Vec<Vec<Complex64>> = (0..n1 * n2)
        .into_par_iter()
        .map(|ik| {
            let (i, k) = ((ik / n2) as isize * 2, (ik % n2) as isize * 2);
            let m1max = i.min(o1 - 1 - i);
            let m2max = k.min(o2 - 1 - k);
            let mut h = vec![Complex64::new(0.0, 0.0); n1 * n2];
            for m1 in -m1max..=m1max {
                let row_a = (i + m1) as usize * c2;
                let row_b = (i - m1) as usize * c2;
                let hr = m1.rem_euclid(n1 as isize) as usize * n2;
                let t1 = tx[(m1 + o1) as usize];
                for m2 in -m2max..=m2max {
                    let p = r[row_a + (k + m2) as usize].conj() * r[row_b + (k - m2) as usize];
                    h[hr + m2.rem_euclid(n2 as isize) as usize] += p * t1 * tt[(m2 + o2) as usize];
                }
            }
            dft2_in_place(&mut h, n1, n2, Sign::Plus);
            h.iter_mut().for_each(|v| *v *= scale);
            h
        })
        .collect();
    let mut values = vec![Complex64::new(0.0, 0.0); n1 * n1 * n2 * n2];
    for (ik, plane) in planes.iter().enumerate() {
        let (i, k) = (ik / n2, ik % n2);
        for l in 0..n1 {
            for q in 0..n2 {
                values[((i * n1 + l) * n2 + k) * n2 + q] = plane[l * n2 + q];
            }
        }
    }
    Dist4D::dense([ax, px, aw, tw], values, DistKind::Wigner)
}
