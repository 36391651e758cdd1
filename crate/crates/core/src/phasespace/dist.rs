use num_complex::Complex64;

use super::check_budget;
use crate::error::{Error, Result};
use crate::grid::SampledAxis;

/// What a distribution array holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistKind {
    /// Real-valued Wigner distribution (imaginary parts are rounding noise).
    Wigner,
    /// Complex Kirkwood-Rihaczek distribution.
    Kirkwood,
    /// Complex bilinear factor with no realness guarantee, such as a
    /// cross-Wigner or an inversion integral.
    Cross,
}

/// A distribution sampled on `axis1 × axis2`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist2D {
    axis1: SampledAxis,
    axis2: SampledAxis,
    values: Vec<Complex64>,
    kind: DistKind,
}

impl Dist2D {
    pub fn new(
        axis1: SampledAxis,
        axis2: SampledAxis,
        values: Vec<Complex64>,
        kind: DistKind,
    ) -> Result<Self> {
        let expected = axis1.len() * axis2.len();
        if values.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: values.len() });
        }
        Ok(Self { axis1, axis2, values, kind })
    }

    pub fn axis1(&self) -> &SampledAxis {
        &self.axis1
    }

    pub fn axis2(&self) -> &SampledAxis {
        &self.axis2
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn kind(&self) -> DistKind {
        self.kind
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.axis1.len(), self.axis2.len())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.axis2.len() + j]
    }

    /// Real parts, row-major.
    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// `max|Im| / max|Re|`, zero for an all-zero array.
    pub fn realness_residual(&self) -> f64 {
        let re = self.values.iter().map(|v| v.re.abs()).fold(0.0, f64::max);
        let im = self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        if re == 0.0 {
            if im == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            im / re
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Riemann sum over both axes.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.axis1.step() * self.axis2.step()
    }
}

/// How the two factors of a separable 4D distribution combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    /// `scale · A(x,p) · B(ω,t)`.
    Product,
    /// `Re(scale · A(x,p) · B(ω,t))`.
    RealPart,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    Separable {
        xp: Dist2D,
        wt: Dist2D,
        combine: Combine,
        scale: Complex64,
    },
    /// Row-major over `[x, p, ω, t]`.
    Dense {
        axes: [SampledAxis; 4],
        values: Vec<Complex64>,
    },
}

/// A distribution over `(x, p, ω, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist4D {
    repr: Representation,
    kind: DistKind,
}

impl Dist4D {
    pub fn separable(xp: Dist2D, wt: Dist2D, combine: Combine, scale: Complex64, kind: DistKind) -> Self {
        Self {
            repr: Representation::Separable { xp, wt, combine, scale },
            kind,
        }
    }

    pub fn dense(axes: [SampledAxis; 4], values: Vec<Complex64>, kind: DistKind) -> Result<Self> {
        let expected: usize = axes.iter().map(|a| a.len()).product();
        if values.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: values.len() });
        }
        Ok(Self {
            repr: Representation::Dense { axes, values },
            kind,
        })
    }

    pub fn kind(&self) -> DistKind {
        self.kind
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn is_separable(&self) -> bool {
        matches!(self.repr, Representation::Separable { .. })
    }

    pub fn axes(&self) -> [SampledAxis; 4] {
        match &self.repr {
            Representation::Separable { xp, wt, .. } => {
                [xp.axis1, xp.axis2, wt.axis1, wt.axis2]
            }
            Representation::Dense { axes, .. } => *axes,
        }
    }

    pub fn shape(&self) -> [usize; 4] {
        self.axes().map(|a| a.len())
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Value at `[ix, ip, iω, it]`.
    pub fn get(&self, idx: [usize; 4]) -> Complex64 {
        match &self.repr {
            Representation::Separable { xp, wt, combine, scale } => {
                let v = scale * xp.get(idx[0], idx[1]) * wt.get(idx[2], idx[3]);
                match combine {
                    Combine::Product => v,
                    Combine::RealPart => Complex64::new(v.re, 0.0),
                }
            }
            Representation::Dense { axes, values } => {
                let s = axes.map(|a| a.len());
                values[((idx[0] * s[1] + idx[1]) * s[2] + idx[2]) * s[3] + idx[3]]
            }
        }
    }

    /// All values, row-major over `[x, p, ω, t]`, if they fit `budget` bytes.
    pub fn dense_values(&self, budget: usize) -> Result<Vec<Complex64>> {
        match &self.repr {
            Representation::Dense { values, .. } => Ok(values.clone()),
            Representation::Separable { xp, wt, combine, scale } => {
                check_budget(self.len(), budget)?;
                let b = wt.values();
                let mut out = Vec::with_capacity(self.len());
                let (nx, np) = xp.shape();
                for i in 0..nx {
                    for l in 0..np {
                        let a = scale * xp.get(i, l);
                        out.extend(b.iter().map(|v| {
                            let z = a * v;
                            match combine {
                                Combine::Product => z,
                                Combine::RealPart => Complex64::new(z.re, 0.0),
                            }
                        }));
                    }
                }
                Ok(out)
            }
        }
    }

    /// The dense equivalent of this distribution.
    pub fn to_dense(&self, budget: usize) -> Result<Dist4D> {
        Dist4D::dense(self.axes(), self.dense_values(budget)?, self.kind)
    }

    /// `max|v|` over the whole distribution.
    pub fn max_abs(&self) -> f64 {
        match &self.repr {
            Representation::Separable { xp, wt, combine: Combine::Product, scale } => {
                scale.norm() * xp.max_abs() * wt.max_abs()
            }
            Representation::Dense { values, .. } => {
                values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
            Representation::Separable { .. } => {
                let s = self.shape();
                let mut m: f64 = 0.0;
                for i in 0..s[0] {
                    for l in 0..s[1] {
                        for k in 0..s[2] {
                            for q in 0..s[3] {
                                m = m.max(self.get([i, l, k, q]).norm());
                            }
                        }
                    }
                }
                m
            }
        }
    }
}

/// Relative L2 distance `‖a − b‖ / ‖b‖` between two equally shaped 4D
/// distributions, evaluated without materializing either.
pub fn relative_l2_4d(a: &Dist4D, b: &Dist4D) -> Result<f64> {
    let sa = a.axes();
    let sb = b.axes();
    for (x, y) in sa.iter().zip(&sb) {
        x.require_same(y, "4D axis")?;
    }
    let s = a.shape();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..s[0] {
        for l in 0..s[1] {
            for k in 0..s[2] {
                for q in 0..s[3] {
                    let u = a.get([i, l, k, q]);
                    let v = b.get([i, l, k, q]);
                    num += (u - v).norm_sqr();
                    den += v.norm_sqr();
                }
            }
        }
    }
    Ok(if den == 0.0 { num.sqrt() } else { (num / den).sqrt() })
}
