use num_complex::Complex64;

use super::{Coord, Dist2D, Dist4D, DistKind, Representation};
use crate::error::{Error, Result};
use crate::grid::SampledAxis;

/// Two fixed coordinates; the other two are free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceSpec {
    fixed: [(Coord, f64); 2],
}

impl SliceSpec {
    pub fn new(c1: Coord, v1: f64, c2: Coord, v2: f64) -> Result<Self> {
        if c1 == c2 {
            return Err(Error::InvalidParameter(format!(
                "slice fixes {} twice",
                c1.name()
            )));
        }
        if !v1.is_finite() || !v2.is_finite() {
            return Err(Error::InvalidParameter("slice values must be finite".into()));
        }
        Ok(Self { fixed: [(c1, v1), (c2, v2)] })
    }

    pub fn fixed(&self) -> [(Coord, f64); 2] {
        self.fixed
    }

    /// The two free coordinates in `[x, p, ω, t]` order.
    pub fn free(&self) -> [Coord; 2] {
        let mut it = Coord::ALL
            .into_iter()
            .filter(|c| *c != self.fixed[0].0 && *c != self.fixed[1].0);
        [it.next().unwrap(), it.next().unwrap()]
    }
}

/// Where a fixed coordinate landed after snapping to the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snap {
    pub coord: Coord,
    pub requested: f64,
    pub actual: f64,
    pub index: usize,
}

impl Snap {
    pub fn distance(&self) -> f64 {
        (self.actual - self.requested).abs()
    }
}

/// 2D section of `d` with the fixed coordinates snapped to the nearest grid
/// points.
pub fn slice(d: &Dist4D, s: &SliceSpec) -> Result<(Dist2D, [Snap; 2])> {
    let axes = d.axes();
    let mut snaps = [Snap { coord: Coord::X, requested: 0.0, actual: 0.0, index: 0 }; 2];
    for (slot, &(c, v)) in snaps.iter_mut().zip(&s.fixed) {
        let ax = &axes[c.index()];
        let (index, actual) = ax.nearest(v, c.name())?;
        *slot = Snap { coord: c, requested: v, actual, index };
    }
    let [fa, fb] = s.free();
    let (na, nb) = (axes[fa.index()].len(), axes[fb.index()].len());
    let mut idx = [0usize; 4];
    for sn in &snaps {
        idx[sn.coord.index()] = sn.index;
    }
    let mut values = Vec::with_capacity(na * nb);
    for i in 0..na {
        idx[fa.index()] = i;
        for j in 0..nb {
            idx[fb.index()] = j;
            values.push(d.get(idx));
        }
    }
    Ok((Dist2D::new(axes[fa.index()], axes[fb.index()], values, d.kind())?, snaps))
}

/// Result of integrating a Wigner distribution over some coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal {
    /// Remaining axes in `[x, p, ω, t]` order (0, 1 or 2 of them).
    pub axes: Vec<SampledAxis>,
    /// Row-major over `axes`; a single value when `axes` is empty.
    pub values: Vec<f64>,
}

impl Marginal {
    /// As a 2D distribution, when two axes remain.
    pub fn to_dist2d(&self) -> Option<Dist2D> {
        match self.axes.as_slice() {
            [a, b] => Dist2D::new(
                *a,
                *b,
                self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
                DistKind::Wigner,
            )
            .ok(),
            _ => None,
        }
    }
}

/// Sums a factor over the dropped axes, returning the kept axes and values.
fn reduce_factor(d: &Dist2D, drop1: bool, drop2: bool) -> (Vec<SampledAxis>, Vec<Complex64>) {
    let (n1, n2) = d.shape();
    let (s1, s2) = (d.axis1().step(), d.axis2().step());
    match (drop1, drop2) {
        (false, false) => (vec![*d.axis1(), *d.axis2()], d.values().to_vec()),
        (true, false) => (
            vec![*d.axis2()],
            (0..n2).map(|j| (0..n1).map(|i| d.get(i, j)).sum::<Complex64>() * s1).collect(),
        ),
        (false, true) => (
            vec![*d.axis1()],
            (0..n1).map(|i| (0..n2).map(|j| d.get(i, j)).sum::<Complex64>() * s2).collect(),
        ),
        (true, true) => (vec![], vec![d.values().iter().sum::<Complex64>() * s1 * s2]),
    }
}

/// Riemann-sum integral of a Wigner distribution over `over` (2 to 4
/// distinct coordinates).
pub fn marginal(d: &Dist4D, over: &[Coord]) -> Result<Marginal> {
    if d.kind() != DistKind::Wigner {
        return Err(Error::NotWigner);
    }
    let mut drop = [false; 4];
    for c in over {
        if drop[c.index()] {
            return Err(Error::InvalidParameter(format!("{} listed twice", c.name())));
        }
        drop[c.index()] = true;
    }
    if over.len() < 2 {
        return Err(Error::InvalidParameter(
            "marginal needs at least two coordinates".into(),
        ));
    }
    let axes = d.axes();
    match d.representation() {
        // Both combine rules reduce to the real part: the sums are linear.
        Representation::Separable { xp, wt, scale, .. } => {
            let (mut ka, va) = reduce_factor(xp, drop[0], drop[1]);
            let (kb, vb) = reduce_factor(wt, drop[2], drop[3]);
            ka.extend(kb);
            let values = va
                .iter()
                .flat_map(|a| {
                    vb.iter().map(move |b| (scale * a * b).re)
                })
                .collect();
            Ok(Marginal { axes: ka, values })
        }
        Representation::Dense { values, .. } => {
            let shape = axes.map(|a| a.len());
            let kept: Vec<usize> = (0..4).filter(|&k| !drop[k]).collect();
            let out_len: usize = kept.iter().map(|&k| shape[k]).product();
            let weight: f64 = (0..4).filter(|&k| drop[k]).map(|k| axes[k].step()).product();
            let mut out = vec![0.0; out_len];
            let mut idx = [0usize; 4];
            for v in values {
                let mut o = 0;
                for &k in &kept {
                    o = o * shape[k] + idx[k];
                }
                out[o] += v.re * weight;
                for k in (0..4).rev() {
                    idx[k] += 1;
                    if idx[k] < shape[k] {
                        break;
                    }
                    idx[k] = 0;
                }
            }
            Ok(Marginal { axes: kept.iter().map(|&k| axes[k]).collect(), values: out })
        }
    }
}
