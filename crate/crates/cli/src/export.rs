//! Text and image encodings of 2D slices.

use std::fmt::Write as _;

use serde::Serialize;

use opstft::phasespace::Dist2D;

use crate::config::Palette;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_number(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// Header naming both axes with units, then `coord1,coord2,re,im` rows in
/// row-major order.
pub fn slice_csv(d: &Dist2D) -> String {
    let (a, b) = (d.axis1(), d.axis2());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} [{}],{} [{}],re,im",
        a.unit().coordinate(),
        a.unit().symbol(),
        b.unit().coordinate(),
        b.unit().symbol()
    );
    let (sa, sb) = (a.samples(), b.samples());
    for (i, u) in sa.iter().enumerate() {
        let u = format_number(*u);
        for (j, v) in sb.iter().enumerate() {
            let z = d.get(i, j);
            let _ = writeln!(out, "{u},{},{},{}", format_number(*v), format_number(z.re), format_number(z.im));
        }
    }
    out
}

/// Which part of a complex slice an image shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Re,
    Im,
}

/// Linear map from data to gray levels, recorded alongside each image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scaling {
    /// Value drawn as black.
    pub black: f64,
    /// Value drawn as white.
    pub white: f64,
}

/// Binary PGM of one part of `d`: rows follow the first axis, columns the
/// second. The signed palette is symmetric about zero so that 0 lands on
/// mid-gray (128); the magnitude palette maps `[0, max|v|]` to black..white.
pub fn heatmap_pgm(d: &Dist2D, part: Part, palette: Palette) -> (Vec<u8>, Scaling) {
    let (rows, cols) = d.shape();
    let values: Vec<f64> = d
        .values()
        .iter()
        .map(|z| match (palette, part) {
            (Palette::Magnitude, _) => z.norm(),
            (Palette::Signed, Part::Re) => z.re,
            (Palette::Signed, Part::Im) => z.im,
        })
        .collect();
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (scaling, level): (Scaling, Box<dyn Fn(f64) -> u8>) = match palette {
        Palette::Signed => (
            Scaling { black: -peak, white: peak },
            Box::new(move |v| {
                let r = if peak > 0.0 { v / peak } else { 0.0 };
                (128.0 + (127.0 * r).round()).clamp(1.0, 255.0) as u8
            }),
        ),
        Palette::Magnitude => (
            Scaling { black: 0.0, white: peak },
            Box::new(move |v| if peak > 0.0 { (255.0 * v / peak).round() as u8 } else { 0 }),
        ),
    };
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.extend(values.iter().map(|&v| level(v)));
    (out, scaling)
}

/// Extrema of the real part of a slice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceStats {
    pub min: f64,
    pub max: f64,
    /// Coordinates of the minimum along the two free axes.
    pub argmin: [f64; 2],
    pub argmax: [f64; 2],
    pub max_abs: f64,
    /// `max|im| / max|re|`.
    pub realness_residual: f64,
}

pub fn slice_stats(d: &Dist2D) -> SliceStats {
    let (_, cols) = d.shape();
    let (mut imin, mut imax) = (0, 0);
    let re = d.re();
    for (k, v) in re.iter().enumerate() {
        if *v < re[imin] {
            imin = k;
        }
        if *v > re[imax] {
            imax = k;
        }
    }
    let at = |k: usize| [d.axis1().sample(k / cols), d.axis2().sample(k % cols)];
    SliceStats {
        min: re[imin],
        max: re[imax],
        argmin: at(imin),
        argmax: at(imax),
        max_abs: d.max_abs(),
        realness_residual: d.realness_residual(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use opstft::phasespace::DistKind;
    use opstft::{make_axis, Complex64, Unit};

    fn dist(n1: usize, n2: usize, kind: DistKind, f: impl Fn(usize) -> Complex64) -> Dist2D {
        Dist2D::new(
            make_axis(0.0, 2.0, n1, Unit::Position).unwrap(),
            make_axis(0.0, 2.0, n2, Unit::Momentum).unwrap(),
            (0..n1 * n2).map(f).collect(),
            kind,
        )
        .unwrap()
    }

    #[test]
    fn two_by_two_csv() {
        let d = dist(2, 2, DistKind::Wigner, |k| Complex64::new(k as f64, 0.0));
        let text = slice_csv(&d);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "x [mm],p [rad/mm],re,im");
        assert_eq!(
            lines[2],
            "-1.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0"
        );
        let fields: Vec<f64> = lines[4].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(fields, vec![1.0, 1.0, 3.0, 0.0]);
        assert_eq!(slice_csv(&d), text);
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_number(-0.0), format_number(0.0));
    }

    #[test]
    fn constant_slice_is_uniform() {
        let d = dist(3, 4, DistKind::Wigner, |_| Complex64::new(2.5, 0.0));
        let (img, s) = heatmap_pgm(&d, Part::Re, Palette::Signed);
        let body = &img[img.len() - 12..];
        assert!(body.iter().all(|&g| g == body[0]));
        assert_eq!(s.white, 2.5);
        assert!(img.starts_with(b"P5\n4 3\n255\n"));
    }

    #[test]
    fn signed_palette_centres_zero() {
        let d = dist(2, 3, DistKind::Wigner, |k| Complex64::new((k % 3) as f64 - 1.0, 0.0));
        let (img, _) = heatmap_pgm(&d, Part::Re, Palette::Signed);
        assert_eq!(&img[img.len() - 3..], &[1, 128, 255]);
        let (mag, _) = heatmap_pgm(&d, Part::Re, Palette::Magnitude);
        assert_eq!(&mag[mag.len() - 3..], &[255, 0, 255]);
    }

    #[test]
    fn stats_locate_extrema() {
        let d = dist(3, 3, DistKind::Kirkwood, |k| Complex64::new(if k == 7 { -4.0 } else { k as f64 }, 0.5));
        let s = slice_stats(&d);
        assert_eq!((s.min, s.max), (-4.0, 8.0));
        assert_eq!(s.argmin, [1.0, 0.0]);
        assert_eq!(s.argmax, [1.0, 1.0]);
    }
}
