//! Forward model of four-window balanced heterodyne detection.
//!
//! A two-component LO (a focused spot with broad bandwidth and a collimated
//! beam with narrow bandwidth) is translated by `(dx, dω)`, tilted by a lens
//! translation `dp` and delayed by `τ`. The beat of each LO term with the
//! signal is a complex overlap; their lock-in product samples the
//! Kirkwood-Rihaczek distribution of the signal.

mod beat;
mod conv;
mod lo_approx;
mod scan;

pub use beat::{beat_amplitude, check_offsets, OffsetClipping, Offsets};
pub use conv::mean_square_beat_conv;
pub use lo_approx::{lo_wigner_approx, LoWignerApprox, FLAT_ENVELOPE};
pub use scan::{ideal_lo, run_scan, run_scan_separable, run_scan_with, MeasurementScan, ScanGrid};
