//! Sampled complex fields over one axis or an axis pair.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{SampledAxis, Unit};

/// Which representation a 2D field lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    XT,
    XOmega,
    PT,
    POmega,
}

impl Domain {
    /// Domain tag for a (spatial, spectral) unit pair.
    pub fn from_units(spatial: Unit, spectral: Unit) -> Result<Domain> {
        match (spatial, spectral) {
            (Unit::Position, Unit::Time) => Ok(Domain::XT),
            (Unit::Position, Unit::Frequency) => Ok(Domain::XOmega),
            (Unit::Momentum, Unit::Time) => Ok(Domain::PT),
            (Unit::Momentum, Unit::Frequency) => Ok(Domain::POmega),
            (a, b) => Err(Error::InconsistentUnits(format!(
                "first axis must be position or momentum and second frequency or time, got {a:?} and {b:?}"
            ))),
        }
    }

    pub fn units(self) -> (Unit, Unit) {
        match self {
            Domain::XT => (Unit::Position, Unit::Time),
            Domain::XOmega => (Unit::Position, Unit::Frequency),
            Domain::PT => (Unit::Momentum, Unit::Time),
            Domain::POmega => (Unit::Momentum, Unit::Frequency),
        }
    }
}

fn check_finite(values: &[Complex64]) -> Result<()> {
    match values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

/// Complex samples over one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField1D {
    axis: SampledAxis,
    values: Vec<Complex64>,
}

impl ComplexField1D {
    pub fn new(axis: SampledAxis, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != axis.len() {
            return Err(Error::LengthMismatch {
                expected: axis.len(),
                actual: values.len(),
            });
        }
        check_finite(&values)?;
        Ok(Self { axis, values })
    }

    /// Samples `f` at every axis point.
    pub fn from_fn(axis: SampledAxis, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = axis.samples().into_iter().map(f).collect();
        Self::new(axis, values)
    }

    pub fn zeros(axis: SampledAxis) -> Self {
        Self {
            axis,
            values: vec![Complex64::new(0.0, 0.0); axis.len()],
        }
    }

    pub fn axis(&self) -> &SampledAxis {
        &self.axis
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `Σ |f|² Δ`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.axis.step()
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            axis: self.axis,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Rescales to unit L2 norm; an all-zero field is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.scaled(1.0 / n)
        } else {
            self.clone()
        }
    }

    /// Returns a copy with every value mapped through `f(coordinate, value)`.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| f(self.axis.sample(k), *v))
            .collect();
        Self {
            axis: self.axis,
            values,
        }
    }
}

/// Complex samples over an axis pair, row-major (`axis1` outer).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    axis1: SampledAxis,
    axis2: SampledAxis,
    values: Vec<Complex64>,
    domain: Domain,
}

impl ComplexField2D {
    pub fn new(axis1: SampledAxis, axis2: SampledAxis, values: Vec<Complex64>) -> Result<Self> {
        let domain = Domain::from_units(axis1.unit(), axis2.unit())?;
        let expected = axis1.len() * axis2.len();
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: values.len(),
            });
        }
        check_finite(&values)?;
        Ok(Self {
            axis1,
            axis2,
            values,
            domain,
        })
    }

    pub fn from_fn(
        axis1: SampledAxis,
        axis2: SampledAxis,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let s1 = axis1.samples();
        let s2 = axis2.samples();
        let values = s1
            .iter()
            .flat_map(|&u| s2.iter().map(move |&v| (u, v)))
            .map(|(u, v)| f(u, v))
            .collect();
        Self::new(axis1, axis2, values)
    }

    pub fn axis1(&self) -> &SampledAxis {
        &self.axis1
    }

    pub fn axis2(&self) -> &SampledAxis {
        &self.axis2
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.axis1.len(), self.axis2.len())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.axis2.len() + j]
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
            * self.axis1.step()
            * self.axis2.step()
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.scaled(Complex64::new(1.0 / n, 0.0))
        } else {
            self.clone()
        }
    }

    /// Entrywise sum; both fields must share axes.
    pub fn add(&self, other: &ComplexField2D) -> Result<Self> {
        self.axis1.require_same(&other.axis1, "first axis")?;
        self.axis2.require_same(&other.axis2, "second axis")?;
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        })
    }
}

/// A 2D field stored as the outer product of a spatial and a spectral factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableField {
    pub spatial: ComplexField1D,
    pub spectral: ComplexField1D,
}

impl SeparableField {
    pub fn new(spatial: ComplexField1D, spectral: ComplexField1D) -> Result<Self> {
        Domain::from_units(spatial.axis().unit(), spectral.axis().unit())?;
        Ok(Self { spatial, spectral })
    }

    pub fn domain(&self) -> Domain {
        Domain::from_units(self.spatial.axis().unit(), self.spectral.axis().unit())
            .expect("validated at construction")
    }

    pub fn energy(&self) -> f64 {
        self.spatial.energy() * self.spectral.energy()
    }
}

/// Outer product `spatial ⊗ spectral`.
pub fn densify(s: &SeparableField) -> Result<ComplexField2D> {
    let a = s.spatial.values();
    let b = s.spectral.values();
    let values = a
        .iter()
        .flat_map(|u| b.iter().map(move |v| u * v))
        .collect();
    ComplexField2D::new(*s.spatial.axis(), *s.spectral.axis(), values)
}

/// Riemann approximation of `∫∫ conj(f)·g`.
pub fn inner_product(f: &ComplexField2D, g: &ComplexField2D) -> Result<Complex64> {
    f.axis1.require_same(&g.axis1, "first axis")?;
    f.axis2.require_same(&g.axis2, "second axis")?;
    let sum: Complex64 = f.values.iter().zip(&g.values).map(|(a, b)| a.conj() * b).sum();
    Ok(sum * f.axis1.step() * f.axis2.step())
}

/// One-dimensional analogue of [`inner_product`].
pub fn inner_product_1d(f: &ComplexField1D, g: &ComplexField1D) -> Result<Complex64> {
    f.axis.require_same(&g.axis, "axis")?;
    let sum: Complex64 = f.values.iter().zip(&g.values).map(|(a, b)| a.conj() * b).sum();
    Ok(sum * f.axis.step())
}
