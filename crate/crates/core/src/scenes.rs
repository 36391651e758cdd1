//! Signal and local-oscillator fields: chirped Gaussian beams, hard-edged
//! masks, the two-component LO and the two reference scenarios.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{inner_product_1d, ComplexField1D, ComplexField2D, SeparableField};
use crate::grid::{make_axis, SampledAxis, Unit};

/// Default optical wavelength used to turn a wavefront radius into a chirp.
pub const WAVELENGTH_MM: f64 = 8.0e-4;
/// Wavefront radius of curvature of both scenario beams.
pub const WIRE_CURVATURE_MM: f64 = -10_000.0;

/// `k/(2R)` for wavelength `lambda_mm` and radius `radius_mm`.
pub fn chirp_from_curvature(lambda_mm: f64, radius_mm: f64) -> f64 {
    PI / (lambda_mm * radius_mm)
}

/// Domain of the second (non-spatial) beam factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondDomain {
    Time,
    Frequency,
}

impl SecondDomain {
    pub fn unit(self) -> Unit {
        match self {
            SecondDomain::Time => Unit::Time,
            SecondDomain::Frequency => Unit::Frequency,
        }
    }
}

/// Separable Gaussian beam `exp(−x²/2σx² + i·chirp·x²)` times a Gaussian in
/// time or frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBeamSpec {
    pub sigma_x: f64,
    /// `σ_t` for a time-domain beam, `σ_ω` for a frequency-domain beam.
    pub sigma_2: f64,
    pub chirp: f64,
    /// Spectral centre. Only used by frequency-domain beams; in the time
    /// domain it would contribute a constant phase.
    pub omega0: f64,
    pub second_domain: SecondDomain,
}

impl GaussianBeamSpec {
    /// Input beam of the wire scenario.
    pub fn wire() -> Self {
        Self {
            sigma_x: 0.85,
            sigma_2: 2.0,
            chirp: chirp_from_curvature(WAVELENGTH_MM, WIRE_CURVATURE_MM),
            omega0: 0.0,
            second_domain: SecondDomain::Time,
        }
    }

    /// Input beam of the absorption-filter scenario.
    pub fn filter() -> Self {
        Self {
            sigma_x: 0.85,
            sigma_2: 0.5,
            chirp: chirp_from_curvature(WAVELENGTH_MM, WIRE_CURVATURE_MM),
            omega0: 0.0,
            second_domain: SecondDomain::Frequency,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("sigma_x", self.sigma_x), ("sigma_2", self.sigma_2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("chirp", self.chirp), ("omega0", self.omega0)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// Builds the unit-norm beam on `(ax1, ax2)`.
pub fn build_beam(
    spec: &GaussianBeamSpec,
    ax1: SampledAxis,
    ax2: SampledAxis,
) -> Result<SeparableField> {
    spec.validate()?;
    if ax1.unit() != Unit::Position {
        return Err(Error::UnitMismatch(format!(
            "beam needs a position axis first, got {}",
            ax1.unit()
        )));
    }
    if ax2.unit() != spec.second_domain.unit() {
        return Err(Error::UnitMismatch(format!(
            "beam second axis must be {}, got {}",
            spec.second_domain.unit(),
            ax2.unit()
        )));
    }
    let sx2 = 2.0 * spec.sigma_x * spec.sigma_x;
    let spatial = ComplexField1D::from_fn(ax1, |x| {
        Complex64::from_polar((-x * x / sx2).exp(), spec.chirp * x * x)
    })?;
    let s2 = 2.0 * spec.sigma_2 * spec.sigma_2;
    let spectral = match spec.second_domain {
        SecondDomain::Time => ComplexField1D::from_fn(ax2, |t| Complex64::new((-t * t / s2).exp(), 0.0))?,
        SecondDomain::Frequency => ComplexField1D::from_fn(ax2, |w| {
            let d = w - spec.omega0;
            Complex64::new((-d * d / s2).exp(), 0.0)
        })?,
    };
    SeparableField::new(spatial.normalized(), spectral.normalized())
}

/// Which coordinate a mask acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskAxis {
    Position,
    Frequency,
}

/// Binary stop band `[lo, hi]` on one coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskSpec {
    pub lo: f64,
    pub hi: f64,
    pub axis_role: MaskAxis,
}

impl MaskSpec {
    /// The 0.6 mm wire centred on the beam.
    pub fn wire() -> Self {
        Self { lo: -0.3, hi: 0.3, axis_role: MaskAxis::Position }
    }

    /// The 2-unit absorption notch centred on the carrier.
    pub fn filter() -> Self {
        Self { lo: -0.1, hi: 0.1, axis_role: MaskAxis::Frequency }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mask needs lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// Zeroes the matching factor inside `[lo, hi]`, or outside it when
/// `inverted`. The result is not renormalized.
pub fn apply_mask(f: &SeparableField, m: &MaskSpec, inverted: bool) -> Result<SeparableField> {
    m.validate()?;
    let gate = |u: f64, v: Complex64| {
        let inside = u >= m.lo && u <= m.hi;
        if inside != inverted {
            Complex64::new(0.0, 0.0)
        } else {
            v
        }
    };
    match m.axis_role {
        MaskAxis::Position => {
            if f.spatial.axis().unit() != Unit::Position {
                return Err(Error::UnitMismatch(format!(
                    "position mask on a {} factor",
                    f.spatial.axis().unit()
                )));
            }
            SeparableField::new(f.spatial.map(gate), f.spectral.clone())
        }
        MaskAxis::Frequency => {
            if f.spectral.axis().unit() != Unit::Frequency {
                return Err(Error::UnitMismatch(format!(
                    "frequency mask on a {} factor",
                    f.spectral.axis().unit()
                )));
            }
            SeparableField::new(f.spatial.clone(), f.spectral.map(gate))
        }
    }
}

/// Rescales both factors so the product has unit norm. All-zero fields are
/// returned unchanged.
pub fn renormalize(f: &SeparableField) -> SeparableField {
    SeparableField {
        spatial: f.spatial.normalized(),
        spectral: f.spectral.normalized(),
    }
}

/// Two-component local oscillator: a focused broadband Gaussian plus a
/// collimated narrowband one weighted by `γ·e^{iφ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LOSpec {
    /// Focused spatial width.
    pub a: f64,
    /// Collimated spatial width `A`.
    pub big_a: f64,
    /// Broad bandwidth of the focused term.
    pub alpha: f64,
    /// Narrow bandwidth of the collimated term.
    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
}

/// Minimum `A/a` and `α/β` for the cross-term approximation.
pub const REGIME_RATIO: f64 = 10.0;

impl LOSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("A", self.big_a), ("alpha", self.alpha), ("beta", self.beta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("LO {name} must be positive, got {v}")));
            }
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "LO gamma must be non-negative, got {}",
                self.gamma
            )));
        }
        if !self.phi.is_finite() {
            return Err(Error::InvalidParameter("LO phi must be finite".into()));
        }
        Ok(())
    }

    /// Checks `A/a ≥ 10` and `α/β ≥ 10`.
    pub fn check_regime(&self) -> Result<()> {
        self.validate()?;
        let rx = self.big_a / self.a;
        let rw = self.alpha / self.beta;
        if rx < REGIME_RATIO || rw < REGIME_RATIO {
            return Err(Error::RegimeViolation(format!(
                "need A/a >= {REGIME_RATIO} and alpha/beta >= {REGIME_RATIO}, got {rx:.3} and {rw:.3}"
            )));
        }
        Ok(())
    }
}

/// Both LO terms as separable fields, already carrying the overall
/// normalization and (for the collimated term) the `γ·e^{iφ}` weight, so the
/// normalized LO is `focused + collimated`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoComponents {
    pub focused: SeparableField,
    pub collimated: SeparableField,
    /// `1/√E` of the unnormalized two-term sum.
    pub scale: f64,
}

fn gaussian_1d(axis: SampledAxis, width: f64) -> Result<ComplexField1D> {
    let w2 = 2.0 * width * width;
    ComplexField1D::from_fn(axis, |u| Complex64::new((-u * u / w2).exp(), 0.0))
}

fn scale_1d(f: &ComplexField1D, c: Complex64) -> ComplexField1D {
    f.map(|_, v| v * c)
}

fn check_lo_axes(x_axis: &SampledAxis, w_axis: &SampledAxis) -> Result<()> {
    if x_axis.unit() != Unit::Position || w_axis.unit() != Unit::Frequency {
        return Err(Error::UnitMismatch(format!(
            "LO lives on (position, frequency), got ({}, {})",
            x_axis.unit(),
            w_axis.unit()
        )));
    }
    Ok(())
}

/// Splits the normalized LO into its two separable terms.
pub fn lo_components(
    spec: &LOSpec,
    x_axis: SampledAxis,
    w_axis: SampledAxis,
) -> Result<LoComponents> {
    spec.validate()?;
    check_lo_axes(&x_axis, &w_axis)?;
    let fx = gaussian_1d(x_axis, spec.a)?;
    let fw = gaussian_1d(w_axis, spec.alpha)?;
    let cx = gaussian_1d(x_axis, spec.big_a)?;
    let cw = gaussian_1d(w_axis, spec.beta)?;
    let weight = Complex64::from_polar(spec.gamma, spec.phi);
    let overlap = inner_product_1d(&fx, &cx)? * inner_product_1d(&fw, &cw)?;
    let energy = fx.energy() * fw.energy()
        + weight.norm_sqr() * cx.energy() * cw.energy()
        + 2.0 * (weight * overlap).re;
    let inv = 1.0 / energy.sqrt();
    Ok(LoComponents {
        focused: SeparableField::new(scale_1d(&fx, inv.into()), fw)?,
        collimated: SeparableField::new(scale_1d(&cx, weight * inv), cw)?,
        scale: inv,
    })
}

/// The normalized two-component LO on a dense `(x, ω)` grid.
pub fn build_lo(spec: &LOSpec, x_axis: SampledAxis, w_axis: SampledAxis) -> Result<ComplexField2D> {
    let parts = lo_components(spec, x_axis, w_axis)?;
    let (f, c) = (&parts.focused, &parts.collimated);
    let n2 = w_axis.len();
    let values = (0..x_axis.len() * n2)
        .map(|k| {
            let (i, j) = (k / n2, k % n2);
            f.spatial.values()[i] * f.spectral.values()[j]
                + c.spatial.values()[i] * c.spectral.values()[j]
        })
        .collect();
    ComplexField2D::new(x_axis, w_axis, values)
}

/// Default spans of the scenario grids.
pub const SPATIAL_SPAN_MM: f64 = 8.0;
pub const TEMPORAL_SPAN: f64 = 16.0;
/// Spectral span of the filter scenario, fine enough to resolve the notch.
pub const SPECTRAL_SPAN: f64 = 12.0;

/// A named beam, optional mask and the native grid they are sampled on.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub beam: GaussianBeamSpec,
    pub mask: Option<MaskSpec>,
    pub spatial: SampledAxis,
    pub second: SampledAxis,
}

impl Scenario {
    /// Chirped beam with a 0.6 mm wire, sampled on `(x, t)`.
    pub fn wire(n: usize) -> Result<Self> {
        Ok(Self {
            beam: GaussianBeamSpec::wire(),
            mask: Some(MaskSpec::wire()),
            spatial: make_axis(0.0, SPATIAL_SPAN_MM, n, Unit::Position)?,
            second: make_axis(0.0, TEMPORAL_SPAN, n, Unit::Time)?,
        })
    }

    /// Chirped beam through a spectral notch, sampled on `(x, ω)`.
    pub fn filter(n: usize) -> Result<Self> {
        Ok(Self {
            beam: GaussianBeamSpec::filter(),
            mask: Some(MaskSpec::filter()),
            spatial: make_axis(0.0, SPATIAL_SPAN_MM, n, Unit::Position)?,
            second: make_axis(0.0, SPECTRAL_SPAN, n, Unit::Frequency)?,
        })
    }

    /// The wire beam without chirp or mask.
    pub fn gaussian(n: usize) -> Result<Self> {
        Ok(Self {
            beam: GaussianBeamSpec { chirp: 0.0, ..GaussianBeamSpec::wire() },
            mask: None,
            spatial: make_axis(0.0, SPATIAL_SPAN_MM, n, Unit::Position)?,
            second: make_axis(0.0, TEMPORAL_SPAN, n, Unit::Time)?,
        })
    }

    /// The masked (not renormalized) field.
    pub fn field(&self) -> Result<SeparableField> {
        let beam = build_beam(&self.beam, self.spatial, self.second)?;
        match &self.mask {
            Some(m) => apply_mask(&beam, m, false),
            None => Ok(beam),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::densify;

    fn axes(n: usize) -> (SampledAxis, SampledAxis) {
        (
            make_axis(0.0, 8.0, n, Unit::Position).unwrap(),
            make_axis(0.0, 12.0, n, Unit::Frequency).unwrap(),
        )
    }

    #[test]
    fn default_chirp_value() {
        assert!((GaussianBeamSpec::wire().chirp + 0.392_699).abs() < 1e-6);
    }

    #[test]
    fn beams_have_unit_norm() {
        for s in [Scenario::gaussian(128).unwrap(), Scenario::wire(128).unwrap()] {
            let f = build_beam(&s.beam, s.spatial, s.second).unwrap();
            assert!((f.energy().sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unchirped_beam_is_real_and_even() {
        let (x, _) = axes(65);
        let t = make_axis(0.0, 16.0, 65, Unit::Time).unwrap();
        let spec = GaussianBeamSpec { chirp: 0.0, ..GaussianBeamSpec::wire() };
        let f = build_beam(&spec, x, t).unwrap();
        for g in [&f.spatial, &f.spectral] {
            let v = g.values();
            assert!(v.iter().all(|z| z.im == 0.0));
            for k in 0..v.len() {
                assert!((v[k] - v[v.len() - 1 - k]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn beam_rejects_wrong_units() {
        let (x, w) = axes(16);
        let spec = GaussianBeamSpec::wire();
        assert!(matches!(build_beam(&spec, x, w), Err(Error::UnitMismatch(_))));
        assert!(matches!(build_beam(&spec, w, x), Err(Error::UnitMismatch(_))));
        let bad = GaussianBeamSpec { sigma_x: 0.0, ..spec };
        assert!(matches!(build_beam(&bad, x, w), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn wire_mask_zeroes_centre() {
        let f = Scenario::wire(257).unwrap().field().unwrap();
        let x = f.spatial.axis().samples();
        for (u, v) in x.iter().zip(f.spatial.values()) {
            if u.abs() <= 0.3 {
                assert_eq!(*v, Complex64::new(0.0, 0.0));
            } else {
                assert!(v.norm() > 0.0);
            }
        }
        assert_eq!(f.spatial.values()[128], Complex64::new(0.0, 0.0));
        assert!(f.energy() < 1.0);
    }

    #[test]
    fn filter_mask_zeroes_notch() {
        let f = Scenario::filter(256).unwrap().field().unwrap();
        let w = f.spectral.axis().samples();
        let zeros = w.iter().filter(|u| u.abs() <= 0.1).count();
        assert!(zeros >= 4);
        for (u, v) in w.iter().zip(f.spectral.values()) {
            assert_eq!(u.abs() <= 0.1, v.norm() == 0.0);
        }
    }

    #[test]
    fn mask_is_idempotent_and_never_adds_energy() {
        let f = Scenario::gaussian(64).unwrap().field().unwrap();
        let m = MaskSpec { lo: -0.5, hi: 1.2, axis_role: MaskAxis::Position };
        for inv in [false, true] {
            let once = apply_mask(&f, &m, inv).unwrap();
            let twice = apply_mask(&once, &m, inv).unwrap();
            assert_eq!(once, twice);
            assert!(once.energy() <= f.energy());
        }
    }

    #[test]
    fn mask_outside_grid_is_noop_and_units_checked() {
        let f = Scenario::gaussian(64).unwrap().field().unwrap();
        let m = MaskSpec { lo: 10.0, hi: 11.0, axis_role: MaskAxis::Position };
        assert_eq!(apply_mask(&f, &m, false).unwrap(), f);
        assert!(matches!(
            apply_mask(&f, &MaskSpec::filter(), false),
            Err(Error::UnitMismatch(_))
        ));
        let bad = MaskSpec { lo: 1.0, hi: 0.0, axis_role: MaskAxis::Position };
        assert!(apply_mask(&f, &bad, false).is_err());
    }

    fn lo(gamma: f64) -> LOSpec {
        LOSpec { a: 0.05, big_a: 1.0, alpha: 2.0, beta: 0.05, gamma, phi: 0.0 }
    }

    #[test]
    fn lo_single_term_limit() {
        let (x, w) = axes(48);
        let dense = build_lo(&lo(0.0), x, w).unwrap();
        let parts = lo_components(&lo(0.0), x, w).unwrap();
        let single = densify(&parts.focused).unwrap();
        let err = dense
            .values()
            .iter()
            .zip(single.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-14);
        assert!((dense.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lo_equal_widths_collapse_to_one_gaussian() {
        let (x, w) = axes(40);
        let spec = LOSpec { a: 0.7, big_a: 0.7, alpha: 1.3, beta: 1.3, gamma: 1.0, phi: 0.0 };
        let two = build_lo(&spec, x, w).unwrap();
        let one = build_lo(&LOSpec { gamma: 0.0, ..spec }, x, w).unwrap();
        let err = two
            .values()
            .iter()
            .zip(one.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-13);
    }

    #[test]
    fn lo_components_sum_to_normalized_lo() {
        let (x, w) = axes(64);
        let spec = LOSpec { phi: 0.8, ..lo(0.6) };
        let parts = lo_components(&spec, x, w).unwrap();
        let sum = densify(&parts.focused).unwrap().add(&densify(&parts.collimated).unwrap()).unwrap();
        assert!((sum.norm() - 1.0).abs() < 1e-12);
        assert_eq!(sum, build_lo(&spec, x, w).unwrap());
    }

    #[test]
    fn regime_gate() {
        assert!(lo(1.0).check_regime().is_ok());
        let narrow = LOSpec { big_a: 0.3, ..lo(1.0) };
        assert!(matches!(narrow.check_regime(), Err(Error::RegimeViolation(_))));
        let (x, w) = axes(16);
        assert!(matches!(build_lo(&lo(1.0), w, x), Err(Error::UnitMismatch(_))));
    }
}
