use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::wigner::transform_axis;
use super::{check_budget, Combine, Dist2D, Dist4D, DistKind, Representation, DEFAULT_BUDGET_BYTES};
use crate::error::{Error, Result};
use crate::fourier::{refine2_2d, Sign};
use crate::grid::SampledAxis;

/// Evaluates `(1/π) ∫∫ dx₀ dp₀ e^{−2i(x−x₀)(p−p₀)} K(x₀, p₀)` on the grid of
/// `K` for one conjugate pair (`axis1 × axis2`, row-major).
///
/// The `p₀` integral is an exact discrete Fourier sum onto the `x` grid,
/// giving `Γ(x₀, y) = ∫ dp₀ e^{ip₀(y − x₀)} K(x₀, p₀)`. The `x₀` integral then
/// runs over the band-limited 2× refinement of `Γ` along the anti-diagonal
/// `y = 2x − x₀`.
pub fn invert_plane(values: &[Complex64], axis1: &SampledAxis, axis2: &SampledAxis) -> Vec<Complex64> {
    let (n1, n2) = (axis1.len(), axis2.len());
    let (xs, ps) = (axis1.samples(), axis2.samples());
    let detwisted: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(k, v)| v * Complex64::from_polar(1.0, -xs[k / n2] * ps[k % n2]))
        .collect();
    let root = (2.0 * PI).sqrt();
    let gamma: Vec<Complex64> = transform_axis(&detwisted, (n1, n2), true, axis2, axis1, Sign::Plus)
        .into_iter()
        .map(|v| v * root)
        .collect();
    let r = refine2_2d(&gamma, n1, n1);
    let width = 2 * n1;
    let du = axis1.step();
    let off = 2 * n1 as isize;
    let phases: Vec<Complex64> = ps
        .iter()
        .flat_map(|&p| (0..4 * n1).map(move |q| Complex64::from_polar(1.0, (q as isize - off) as f64 * du * p)))
        .collect();
    let scale = du / (2.0 * PI);
    let last = width as isize - 1;
    let rows: Vec<Vec<Complex64>> = (0..n1)
        .into_par_iter()
        .map(|j| {
            let c = 2 * j as isize;
            let mmax = c.min(last - c);
            let diag: Vec<Complex64> = (-mmax..=mmax)
                .map(|m| r[(c + m) as usize * width + (c - m) as usize])
                .collect();
            (0..n2)
                .map(|l| {
                    let row = &phases[l * 4 * n1..(l + 1) * 4 * n1];
                    let acc: Complex64 = diag
                        .iter()
                        .zip(-mmax..=mmax)
                        .map(|(d, m)| d * row[(m + off) as usize])
                        .sum();
                    acc * scale
                })
                .collect()
        })
        .collect();
    rows.concat()
}

/// Inverts a Kirkwood-Rihaczek distribution to the Wigner distribution.
pub fn invert_k_to_w(k: &Dist4D) -> Result<Dist4D> {
    invert_k_to_w_with(k, DEFAULT_BUDGET_BYTES)
}

/// As [`invert_k_to_w`], with an explicit budget for dense inputs.
///
/// Separable input gives `Re(scale · I_xp · I_ωt)` with complex factors;
/// anything else is inverted densely.
pub fn invert_k_to_w_with(k: &Dist4D, budget: usize) -> Result<Dist4D> {
    if k.kind() != DistKind::Kirkwood {
        return Err(Error::NotKirkwood);
    }
    if let Representation::Separable { xp, wt, combine: Combine::Product, scale } = k.representation() {
        let a = invert_plane(xp.values(), xp.axis1(), xp.axis2());
        let b = invert_plane(wt.values(), wt.axis1(), wt.axis2());
        return Ok(Dist4D::separable(
            Dist2D::new(*xp.axis1(), *xp.axis2(), a, DistKind::Cross)?,
            Dist2D::new(*wt.axis1(), *wt.axis2(), b, DistKind::Cross)?,
            Combine::RealPart,
            *scale,
            DistKind::Wigner,
        ));
    }
    check_budget(k.len(), budget)?;
    let axes = k.axes();
    let [n1, n2, n3, n4] = k.shape();
    let mut values = k.dense_values(budget)?;
    // Time-frequency planes are contiguous.
    values
        .par_chunks_mut(n3 * n4)
        .for_each(|plane| {
            let out = invert_plane(plane, &axes[2], &axes[3]);
            plane.copy_from_slice(&out);
        });
    let inner = n3 * n4;
    let planes: Vec<Vec<Complex64>> = (0..inner)
        .into_par_iter()
        .map(|kq| {
            let plane: Vec<Complex64> = (0..n1 * n2).map(|il| values[il * inner + kq]).collect();
            invert_plane(&plane, &axes[0], &axes[1])
        })
        .collect();
    for (kq, plane) in planes.iter().enumerate() {
        for (il, v) in plane.iter().enumerate() {
            values[il * inner + kq] = Complex64::new(v.re, 0.0);
        }
    }
    Dist4D::dense(axes, values, DistKind::Wigner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{densify, ComplexField1D, SeparableField};
    use crate::fourier::AliasPolicy;
    use crate::grid::{make_axis, Unit};
    use crate::phasespace::{kirkwood_1d, kirkwood_4d, kirkwood_4d_dense, relative_l2_4d, wigner_1d, wigner_4d};

    fn rel(a: &[Complex64], b: &[Complex64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        (num / b.iter().map(|y| y.norm_sqr()).sum::<f64>()).sqrt()
    }

    #[test]
    fn plane_inversion_recovers_wigner() {
        for n in [48usize, 49] {
            let x = make_axis(0.2, 12.0, n, Unit::Position).unwrap();
            let f = ComplexField1D::from_fn(x, |u| {
                Complex64::from_polar((-(u - 0.5).powi(2) / 1.2).exp(), 0.3 * u * u - 0.7 * u)
            })
            .unwrap();
            let k = kirkwood_1d(&f, AliasPolicy::Strict).unwrap();
            let w = wigner_1d(&f).unwrap();
            let back = invert_plane(k.values(), k.axis1(), k.axis2());
            assert!(rel(&back, w.values()) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn total_integral_is_energy() {
        let x = make_axis(0.0, 12.0, 40, Unit::Position).unwrap();
        let f = ComplexField1D::from_fn(x, |u| Complex64::new((-u * u).exp(), 0.0)).unwrap().normalized();
        let k = kirkwood_1d(&f, AliasPolicy::Strict).unwrap();
        let back = invert_plane(k.values(), k.axis1(), k.axis2());
        let total: Complex64 = back.iter().sum::<Complex64>() * x.step() * k.axis2().step();
        assert!((total.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_kirkwood_and_handles_zero() {
        let x = make_axis(0.0, 8.0, 16, Unit::Position).unwrap();
        let w = make_axis(0.0, 8.0, 16, Unit::Frequency).unwrap();
        let f = SeparableField::new(
            ComplexField1D::from_fn(x, |u| Complex64::new((-u * u).exp(), 0.0)).unwrap(),
            ComplexField1D::from_fn(w, |u| Complex64::new((-u * u).exp(), 0.0)).unwrap(),
        )
        .unwrap();
        assert!(matches!(invert_k_to_w(&wigner_4d(&f).unwrap()), Err(Error::NotKirkwood)));
        let zero = SeparableField::new(f.spatial.scaled(0.0), f.spectral.clone()).unwrap();
        let out = invert_k_to_w(&kirkwood_4d(&zero).unwrap()).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn dense_inversion_matches_separable() {
        let x = make_axis(0.0, 9.0, 12, Unit::Position).unwrap();
        let w = make_axis(0.0, 10.0, 12, Unit::Frequency).unwrap();
        let f = SeparableField::new(
            ComplexField1D::from_fn(x, |u| Complex64::from_polar((-u * u / 1.5).exp(), 0.2 * u)).unwrap(),
            ComplexField1D::from_fn(w, |u| Complex64::new((-u * u / 2.0).exp(), 0.0)).unwrap(),
        )
        .unwrap();
        let sep = invert_k_to_w(&kirkwood_4d(&f).unwrap()).unwrap();
        let kd = kirkwood_4d_dense(&densify(&f).unwrap(), DEFAULT_BUDGET_BYTES).unwrap();
        let dense = invert_k_to_w(&kd).unwrap();
        assert!(!dense.is_separable());
        assert!(relative_l2_4d(&dense, &sep).unwrap() < 1e-10);
        assert!(relative_l2_4d(&sep, &wigner_4d(&f).unwrap()).unwrap() < 1e-8);
        assert!(matches!(invert_k_to_w_with(&kd, 10), Err(Error::BudgetExceeded { .. })));
    }
}
