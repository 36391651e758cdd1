use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{SampledAxis, Unit};
use crate::phasespace::{Combine, Dist2D, Dist4D, DistKind};
use crate::scenes::{lo_components, LOSpec};

/// Envelope level above which the cross term reduces to a pure cosine.
pub const FLAT_ENVELOPE: f64 = 0.99;

/// Phase-sensitive part of the two-component LO Wigner distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct LoWignerApprox {
    /// `2γ·W₀·envelope·cos(2ωt − 2xp + φ)`, with `W₀` the focused/collimated
    /// cross-Wigner peak of the normalized LO.
    pub cross: Dist4D,
    /// `exp(−2x²/A² − 2a²p² − 2ω²/α² − 2β²t²)`.
    pub envelope: Dist4D,
    /// `cos(2ωt − 2xp + φ)`, the limit form valid where the envelope is flat.
    pub kernel: Dist4D,
}

impl LoWignerApprox {
    /// The regime-limit value at `idx`, if the envelope there exceeds
    /// [`FLAT_ENVELOPE`].
    pub fn regime_limit(&self, idx: [usize; 4]) -> Option<f64> {
        (self.envelope.get(idx).re > FLAT_ENVELOPE).then(|| self.kernel.get(idx).re)
    }
}

fn pair_factor(u: &SampledAxis, k: &SampledAxis, wu: f64, wk: f64, twist: f64) -> Result<(Dist2D, Dist2D)> {
    let (us, ks) = (u.samples(), k.samples());
    let mut env = Vec::with_capacity(us.len() * ks.len());
    let mut phase = Vec::with_capacity(us.len() * ks.len());
    for &a in &us {
        for &b in &ks {
            let e = (-2.0 * a * a / (wu * wu) - 2.0 * wk * wk * b * b).exp();
            env.push(Complex64::new(e, 0.0));
            phase.push(Complex64::from_polar(e, twist * 2.0 * a * b));
        }
    }
    Ok((
        Dist2D::new(*u, *k, env, DistKind::Wigner)?,
        Dist2D::new(*u, *k, phase, DistKind::Cross)?,
    ))
}

fn unit_phase(d: &Dist2D) -> Result<Dist2D> {
    let values = d.values().iter().map(|v| if v.norm() > 0.0 { v / v.norm() } else { Complex64::new(1.0, 0.0) }).collect();
    Dist2D::new(*d.axis1(), *d.axis2(), values, DistKind::Cross)
}

/// Closed-form cross term of the LO Wigner distribution in the four-window
/// regime, on `(x, p, ω, t)` with `p` and `t` the conjugate axes.
pub fn lo_wigner_approx(spec: &LOSpec, x_axis: SampledAxis, w_axis: SampledAxis) -> Result<LoWignerApprox> {
    spec.check_regime()?;
    if x_axis.unit() != Unit::Position || w_axis.unit() != Unit::Frequency {
        return Err(Error::UnitMismatch("LO approximation needs (x, omega) axes".into()));
    }
    let scale = lo_components(spec, x_axis, w_axis)?.scale;
    let (p_axis, t_axis) = (x_axis.conjugate(), w_axis.conjugate());
    let peak = |n: f64, m: f64| (8.0 * PI * n * n * m * m / (n * n + m * m)).sqrt() / (2.0 * PI);
    let w0 = scale * scale * peak(spec.a, spec.big_a) * peak(spec.alpha, spec.beta);
    let (ex, px) = pair_factor(&x_axis, &p_axis, spec.big_a, spec.a, -1.0)?;
    let (ew, pw) = pair_factor(&w_axis, &t_axis, spec.alpha, spec.beta, 1.0)?;
    let one = Complex64::new(1.0, 0.0);
    let rot = Complex64::from_polar(1.0, spec.phi);
    Ok(LoWignerApprox {
        kernel: Dist4D::separable(unit_phase(&px)?, unit_phase(&pw)?, Combine::RealPart, rot, DistKind::Wigner),
        cross: Dist4D::separable(px, pw, Combine::RealPart, rot * (2.0 * spec.gamma * w0), DistKind::Wigner),
        envelope: Dist4D::separable(ex, ew, Combine::Product, one, DistKind::Wigner),
    })
}
