//! Wigner and Kirkwood-Rihaczek distributions over `(x, p, ω, t)`.
//!
//! Conventions used throughout:
//!
//! - `W(u, κ) = (1/2π) ∫ dε e^{iεκ} f*(u + ε/2) f(u − ε/2)` for both pairs,
//!   with `f` the spatial factor in `x` or the spectral factor in `ω`.
//! - `f̃(p) = (1/√2π) ∫ f(x) e^{−ipx} dx` and `ṽ(t) = (1/√2π) ∫ v(ω) e^{−iωt} dω`.
//! - `K(u, κ) = f*(u) f̃(κ) e^{iuκ} / √2π`, so `∫ dκ K = |f(u)|²`.
//!
//! 4D objects index their axes in the order `[x, p, ω, t]`.

mod dist;
mod inversion;
mod kirkwood;
mod slice;
mod wigner;

pub use dist::{relative_l2_4d, Combine, Dist2D, Dist4D, DistKind, Representation};
pub use inversion::{invert_k_to_w, invert_k_to_w_with, invert_plane};
pub use kirkwood::{kirkwood_1d, kirkwood_4d, kirkwood_4d_dense, kirkwood_4d_with};
pub(crate) use wigner::transform_axis;
pub use slice::{marginal, slice, Marginal, Snap, SliceSpec};
pub use wigner::{
    conjugate_factors, cross_wigner_1d, native_factors, to_native_dense, wigner_1d,
    wigner_1d_with, wigner_4d, wigner_4d_dense, wigner_4d_dense_with, wigner_4d_with,
};

use crate::error::{Error, Result};
use crate::grid::Unit;

/// Default memory ceiling for dense 4D arrays.
pub const DEFAULT_BUDGET_BYTES: usize = 512 * 1024 * 1024;

/// Fails with [`Error::BudgetExceeded`] when `count` complex values exceed
/// `budget` bytes.
pub fn check_budget(count: usize, budget: usize) -> Result<()> {
    let required = count.saturating_mul(std::mem::size_of::<num_complex::Complex64>());
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// One of the four phase-space coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    X,
    P,
    Omega,
    T,
}

impl Coord {
    pub const ALL: [Coord; 4] = [Coord::X, Coord::P, Coord::Omega, Coord::T];

    /// Position in the `[x, p, ω, t]` ordering.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn unit(self) -> Unit {
        match self {
            Coord::X => Unit::Position,
            Coord::P => Unit::Momentum,
            Coord::Omega => Unit::Frequency,
            Coord::T => Unit::Time,
        }
    }

    pub fn name(self) -> &'static str {
        self.unit().coordinate()
    }

    pub fn parse(s: &str) -> Option<Coord> {
        match s {
            "x" => Some(Coord::X),
            "p" => Some(Coord::P),
            "omega" | "w" | "ω" => Some(Coord::Omega),
            "t" => Some(Coord::T),
            _ => None,
        }
    }
}
