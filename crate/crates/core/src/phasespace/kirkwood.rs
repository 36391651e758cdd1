use std::f64::consts::PI;

use num_complex::Complex64;

use super::wigner::{native_factors, to_native_dense, transform_axis};
use super::{check_budget, Combine, Dist2D, Dist4D, DistKind};
use crate::error::Result;
use crate::field::{ComplexField1D, ComplexField2D, SeparableField};
use crate::fourier::{fourier_1d_with, AliasPolicy, Sign};

/// `K(u, κ) = f*(u) f̃(κ) e^{iuκ} / √2π` on `(u, conjugate(u))`.
pub fn kirkwood_1d(f: &ComplexField1D, policy: AliasPolicy) -> Result<Dist2D> {
    let kappa = f.axis().conjugate();
    let ft = fourier_1d_with(f, Sign::Minus, &kappa, policy)?;
    let us = f.axis().samples();
    let ks = kappa.samples();
    let norm = 1.0 / (2.0 * PI).sqrt();
    let mut values = Vec::with_capacity(us.len() * ks.len());
    for (u, a) in us.iter().zip(f.values()) {
        let a = a.conj() * norm;
        for (k, b) in ks.iter().zip(ft.values()) {
            values.push(a * b * Complex64::from_polar(1.0, u * k));
        }
    }
    Dist2D::new(*f.axis(), kappa, values, DistKind::Kirkwood)
}

/// Separable 4D Kirkwood-Rihaczek distribution
/// `K(x,p,ω,t) = E*(x,ω) Ẽ(p,t) e^{i(xp + ωt)} / 2π`.
pub fn kirkwood_4d(f: &SeparableField) -> Result<Dist4D> {
    kirkwood_4d_with(f, AliasPolicy::Strict)
}

pub fn kirkwood_4d_with(f: &SeparableField, policy: AliasPolicy) -> Result<Dist4D> {
    let (x, w) = native_factors(f, policy)?;
    Ok(Dist4D::separable(
        kirkwood_1d(&x, policy)?,
        kirkwood_1d(&w, policy)?,
        Combine::Product,
        Complex64::new(1.0, 0.0),
        DistKind::Kirkwood,
    ))
}

/// Dense counterpart of [`kirkwood_4d`] for non-separable fields.
pub fn kirkwood_4d_dense(f: &ComplexField2D, budget: usize) -> Result<Dist4D> {
    let e = to_native_dense(f, AliasPolicy::Strict)?;
    let (n1, n2) = e.shape();
    check_budget(n1 * n1 * n2 * n2, budget)?;
    let (ax, aw) = (*e.axis1(), *e.axis2());
    let (px, tw) = (ax.conjugate(), aw.conjugate());
    let half = transform_axis(e.values(), (n1, n2), false, &ax, &px, Sign::Minus);
    let et = transform_axis(&half, (n1, n2), true, &aw, &tw, Sign::Minus);
    let (xs, ps, ws, ts) = (ax.samples(), px.samples(), aw.samples(), tw.samples());
    let norm = 1.0 / (2.0 * PI);
    let mut values = Vec::with_capacity(n1 * n1 * n2 * n2);
    for (i, x) in xs.iter().enumerate() {
        for (l, p) in ps.iter().enumerate() {
            for (k, w) in ws.iter().enumerate() {
                let a = e.get(i, k).conj() * norm;
                for (q, t) in ts.iter().enumerate() {
                    values.push(a * et[l * n2 + q] * Complex64::from_polar(1.0, x * p + w * t));
                }
            }
        }
    }
    Dist4D::dense([ax, px, aw, tw], values, DistKind::Kirkwood)
}
