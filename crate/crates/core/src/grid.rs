//! Uniformly sampled coordinate axes.
//!
//! Working units are chosen so that `x·p` and `ω·t` are plain radians:
//! position in mm, momentum in rad/mm, angular frequency in 10¹³ rad/s and
//! time in 10⁻¹³ s.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Physical unit (and therefore role) of a sampled axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    /// Transverse position, mm.
    Position,
    /// Transverse momentum, rad/mm.
    Momentum,
    /// Angular frequency, 10¹³ rad/s.
    Frequency,
    /// Time (path delay), 10⁻¹³ s.
    Time,
}

impl Unit {
    /// The DFT partner of this unit.
    pub fn partner(self) -> Unit {
        match self {
            Unit::Position => Unit::Momentum,
            Unit::Momentum => Unit::Position,
            Unit::Frequency => Unit::Time,
            Unit::Time => Unit::Frequency,
        }
    }

    /// True for position and momentum.
    pub fn is_spatial(self) -> bool {
        matches!(self, Unit::Position | Unit::Momentum)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Position => "mm",
            Unit::Momentum => "rad/mm",
            Unit::Frequency => "1e13 rad/s",
            Unit::Time => "1e-13 s",
        }
    }

    /// Short coordinate name used in headers: `x`, `p`, `omega`, `t`.
    pub fn coordinate(self) -> &'static str {
        match self {
            Unit::Position => "x",
            Unit::Momentum => "p",
            Unit::Frequency => "omega",
            Unit::Time => "t",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `n` uniform samples spanning `[center - span/2, center + span/2]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledAxis {
    center: f64,
    span: f64,
    n: usize,
    unit: Unit,
}

/// Relative tolerance used when deciding whether two axes describe the same grid.
const GRID_RTOL: f64 = 1e-10;

impl SampledAxis {
    pub fn new(center: f64, span: f64, n: usize, unit: Unit) -> Result<Self> {
        if !(span > 0.0) || !span.is_finite() {
            return Err(Error::NonPositiveSpan(span));
        }
        if n < 2 {
            return Err(Error::TooFewSamples(n));
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter(format!("axis center {center}")));
        }
        Ok(Self { center, span, n, unit })
    }

    /// Axis centred on `center` with the given sample spacing.
    pub fn with_step(center: f64, step: f64, n: usize, unit: Unit) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewSamples(n));
        }
        Self::new(center, step * (n - 1) as f64, n, unit)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false; an axis holds at least two samples.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn step(&self) -> f64 {
        self.span / (self.n - 1) as f64
    }

    pub fn start(&self) -> f64 {
        self.center - 0.5 * self.span
    }

    pub fn end(&self) -> f64 {
        self.center + 0.5 * self.span
    }

    pub fn sample(&self, k: usize) -> f64 {
        self.start() + k as f64 * self.step()
    }

    pub fn samples(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.sample(k)).collect()
    }

    /// The frequency-domain axis induced by a DFT of this axis: same sample
    /// count, step `2π/(n·Δ)`, centred at zero, partner unit.
    pub fn conjugate(&self) -> SampledAxis {
        let step = 2.0 * PI / (self.n as f64 * self.step());
        SampledAxis {
            center: 0.0,
            span: step * (self.n - 1) as f64,
            n: self.n,
            unit: self.unit.partner(),
        }
    }

    /// Same axis with a different unit tag.
    pub fn relabel(&self, unit: Unit) -> SampledAxis {
        SampledAxis { unit, ..*self }
    }

    /// True when `value` lies inside the sampled interval (inclusive).
    pub fn contains(&self, value: f64) -> bool {
        let tol = 1e-9 * self.step();
        value >= self.start() - tol && value <= self.end() + tol
    }

    /// Nearest sample index to `value` and the signed snap distance
    /// `sample(index) - value`. Values outside the axis are an error.
    pub fn nearest(&self, value: f64, coord: &'static str) -> Result<(usize, f64)> {
        if !self.contains(value) {
            return Err(Error::OutOfRange {
                coord,
                value,
                lo: self.start(),
                hi: self.end(),
            });
        }
        let k = ((value - self.start()) / self.step()).round();
        let k = (k.max(0.0) as usize).min(self.n - 1);
        Ok((k, self.sample(k) - value))
    }

    /// Whether two axes share unit, sample count and sample positions.
    pub fn same_grid(&self, other: &SampledAxis) -> bool {
        let scale = self.span.abs().max(other.span.abs());
        self.unit == other.unit
            && self.n == other.n
            && (self.span - other.span).abs() <= GRID_RTOL * scale
            && (self.center - other.center).abs() <= GRID_RTOL * scale
    }

    pub(crate) fn require_same(&self, other: &SampledAxis, what: &str) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::AxisMismatch(format!(
                "{what}: {} samples of {} over [{}, {}] vs {} samples of {} over [{}, {}]",
                self.n,
                self.unit,
                self.start(),
                self.end(),
                other.n,
                other.unit,
                other.start(),
                other.end()
            )))
        }
    }

    /// 2×-refined axis: `2n` samples at step `Δ/2` from the same start, so
    /// the last sample sits half a step past the original end.
    pub fn refined(&self) -> SampledAxis {
        let step = self.step();
        SampledAxis {
            center: self.center + step / 4.0,
            span: self.span + step / 2.0,
            n: 2 * self.n,
            unit: self.unit,
        }
    }
}

/// Convenience constructor mirroring [`SampledAxis::new`].
pub fn make_axis(center: f64, span: f64, n: usize, unit: Unit) -> Result<SampledAxis> {
    SampledAxis::new(center, span, n, unit)
}

/// Convenience wrapper for [`SampledAxis::conjugate`].
pub fn conjugate_axis(axis: &SampledAxis) -> SampledAxis {
    axis.conjugate()
}
