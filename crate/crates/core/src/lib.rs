//! Phase-space and time-frequency tomography of sampled optical fields.
//!
//! The crate computes 4D Wigner and Kirkwood-Rihaczek distributions of
//! complex fields `E(x, ω)`, forward-models a four-window balanced
//! heterodyne measurement of the Kirkwood-Rihaczek distribution, and inverts
//! it back to the Wigner distribution.
//!
//! Modules, bottom-up:
//! - [`grid`], [`field`], [`fourier`]: axes, sampled fields and transforms.
//! - [`scenes`]: Gaussian beams, hard-edged masks and the two-component LO.
//! - [`phasespace`]: Wigner / Kirkwood-Rihaczek distributions, marginals,
//!   inversion and slicing.
//! - [`heterodyne`]: beat amplitudes, the Wigner convolution form, the LO
//!   cross-term approximation and measurement scans.

pub mod error;
pub mod field;
pub mod fourier;
pub mod grid;
pub mod heterodyne;
pub mod phasespace;
pub mod scenes;

pub use error::{Error, Result};
pub use field::{densify, inner_product, ComplexField1D, ComplexField2D, Domain, SeparableField};
pub use fourier::{fourier_1d, AliasPolicy, Sign};
pub use grid::{conjugate_axis, make_axis, SampledAxis, Unit};

pub use num_complex::Complex64;
