use std::f64::consts::PI;

use num_complex::Complex64;

use super::beat::{check_f_over_k, shift_2d, Offsets};
use crate::error::{Error, Result};
use crate::fourier::shift_bandlimited;
use crate::phasespace::{Combine, Dist2D, Dist4D, DistKind, Representation, DEFAULT_BUDGET_BYTES};

/// `|V_B|²` from the Wigner distributions of LO and signal:
/// `(2π)² ∫ W_LO(x−dx, p−dp/f_over_k, ω−dω, t−τ) W_S(x, p, ω, t)`.
///
/// The LO distribution is translated with band-limited shifts along each
/// axis and the integral is a Riemann sum over the shared grid.
pub fn mean_square_beat_conv(lo_w: &Dist4D, sig_w: &Dist4D, off: Offsets, f_over_k: f64) -> Result<f64> {
    check_f_over_k(f_over_k)?;
    if lo_w.kind() != DistKind::Wigner || sig_w.kind() != DistKind::Wigner {
        return Err(Error::NotWigner);
    }
    let axes = sig_w.axes();
    for (a, b) in lo_w.axes().iter().zip(&axes) {
        a.require_same(b, "Wigner convolution")?;
    }
    let shifts = [
        off.dx / axes[0].step(),
        off.momentum(f_over_k) / axes[1].step(),
        off.dw / axes[2].step(),
        off.tau / axes[3].step(),
    ];
    let weight: f64 = axes.iter().map(|a| a.step()).product::<f64>() * (2.0 * PI).powi(2);
    let sum = match (lo_w.representation(), sig_w.representation()) {
        (
            Representation::Separable { xp: lx, wt: lw, combine: Combine::Product, scale: ls },
            Representation::Separable { xp: sx, wt: sw, combine: Combine::Product, scale: ss },
        ) => {
            let a = overlap_2d(lx, sx, shifts[0], shifts[1]);
            let b = overlap_2d(lw, sw, shifts[2], shifts[3]);
            (ls * ss * a * b).re
        }
        _ => {
            let l = shift_4d(lo_w.dense_values(DEFAULT_BUDGET_BYTES)?, lo_w.shape(), shifts);
            let s = sig_w.dense_values(DEFAULT_BUDGET_BYTES)?;
            l.iter().zip(&s).map(|(a, b)| a.re * b.re).sum()
        }
    };
    Ok(sum * weight)
}

fn overlap_2d(lo: &Dist2D, sig: &Dist2D, s1: f64, s2: f64) -> Complex64 {
    let (n1, n2) = lo.shape();
    shift_2d(lo.values(), n1, n2, s1, s2)
        .iter()
        .zip(sig.values())
        .map(|(a, b)| a * b)
        .sum()
}

fn shift_4d(mut values: Vec<Complex64>, shape: [usize; 4], shifts: [f64; 4]) -> Vec<Complex64> {
    let mut line = Vec::new();
    for axis in 0..4 {
        if shifts[axis] == 0.0 {
            continue;
        }
        let stride: usize = shape[axis + 1..].iter().product();
        let n = shape[axis];
        let outer = values.len() / (n * stride);
        for o in 0..outer {
            for s in 0..stride {
                let base = o * n * stride + s;
                line.clear();
                line.extend((0..n).map(|k| values[base + k * stride]));
                for (k, v) in shift_bandlimited(&line, shifts[axis]).into_iter().enumerate() {
                    values[base + k * stride] = v;
                }
            }
        }
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{densify, ComplexField1D, SeparableField};
    use crate::grid::{make_axis, Unit};
    use crate::heterodyne::beat_amplitude;
    use crate::phasespace::wigner_4d;
    use proptest::prelude::*;

    fn gaussian(axis: crate::grid::SampledAxis, sigma: f64, center: f64, chirp: f64, tilt: f64) -> ComplexField1D {
        ComplexField1D::from_fn(axis, |u| {
            Complex64::from_polar(
                (-(u - center).powi(2) / (2.0 * sigma * sigma)).exp(),
                chirp * u * u + tilt * u,
            )
        })
        .unwrap()
        .normalized()
    }

    fn field(n: usize, p: [f64; 8]) -> SeparableField {
        let x = make_axis(0.0, 14.0, n, Unit::Position).unwrap();
        let w = make_axis(0.0, 14.0, n, Unit::Frequency).unwrap();
        SeparableField::new(gaussian(x, p[0], p[1], p[2], p[3]), gaussian(w, p[4], p[5], p[6], p[7])).unwrap()
    }

    #[test]
    fn matches_beat_amplitude_on_offset_grid() {
        let n = 48;
        let lo = field(n, [0.9, 0.2, 0.05, 0.3, 1.1, -0.1, 0.0, -0.2]);
        let sig = field(n, [0.7, -0.1, 0.1, -0.2, 0.8, 0.2, 0.08, 0.1]);
        let (lw, sw) = (wigner_4d(&lo).unwrap(), wigner_4d(&sig).unwrap());
        let (ld, sd) = (densify(&lo).unwrap(), densify(&sig).unwrap());
        let fk = 1.5;
        let grid = [-0.8, -0.4, 0.0, 0.4, 0.8];
        let mut worst: f64 = 0.0;
        for &dx in &grid {
            for &dp in &grid {
                for &dw in &grid {
                    for &tau in &grid {
                        let off = Offsets::new(dx, dp, dw, tau);
                        let direct = beat_amplitude(&ld, &sd, off, fk).unwrap().norm_sqr();
                        let conv = mean_square_beat_conv(&lw, &sw, off, fk).unwrap();
                        worst = worst.max((conv - direct).abs() / direct);
                    }
                }
            }
        }
        assert!(worst < 1e-4, "worst relative error {worst}");
    }

    #[test]
    fn dense_path_matches_separable() {
        let lo = field(16, [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let sig = field(16, [0.9, 0.3, 0.05, 0.0, 1.2, 0.0, 0.0, 0.4]);
        let (lw, sw) = (wigner_4d(&lo).unwrap(), wigner_4d(&sig).unwrap());
        let ld = lw.to_dense(DEFAULT_BUDGET_BYTES).unwrap();
        let off = Offsets::new(0.3, -0.2, 0.5, 0.1);
        let a = mean_square_beat_conv(&lw, &sw, off, 1.0).unwrap();
        let b = mean_square_beat_conv(&ld, &sw, off, 1.0).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn zero_signal_gives_zero() {
        let lo = field(16, [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let zero = SeparableField::new(lo.spatial.scaled(0.0), lo.spectral.clone()).unwrap();
        let v = mean_square_beat_conv(&wigner_4d(&lo).unwrap(), &wigner_4d(&zero).unwrap(), Offsets::new(0.2, 0.1, 0.0, 0.3), 1.0)
            .unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn rejects_kirkwood_input() {
        let lo = field(8, [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let k = crate::phasespace::kirkwood_4d(&lo).unwrap();
        let w = wigner_4d(&lo).unwrap();
        assert!(matches!(mean_square_beat_conv(&k, &w, Offsets::default(), 1.0), Err(Error::NotWigner)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn never_meaningfully_negative(
            s1 in 0.6f64..1.3, s2 in 0.6f64..1.3, c in -0.15f64..0.15,
            dx in -1.5f64..1.5, dp in -1.5f64..1.5, dw in -1.5f64..1.5, tau in -1.5f64..1.5,
        ) {
            let lo = field(24, [s1, 0.0, 0.0, 0.0, s2, 0.0, 0.0, 0.0]);
            let sig = field(24, [s2, 0.2, c, 0.1, s1, -0.1, -c, 0.0]);
            let v = mean_square_beat_conv(&wigner_4d(&lo).unwrap(), &wigner_4d(&sig).unwrap(), Offsets::new(dx, dp, dw, tau), 1.2)
                .unwrap();
            prop_assert!(v >= -1e-9);
        }
    }
}
