//! Gate-list builders for the propagator's circuit primitives.
//!
//! Every builder is a pure function returning a `Vec<Gate>` that can be fed
//! to [`StateVector::apply_all`](crate::statevec::StateVector::apply_all).
//! Registers are ordered little-endian: `register[0]` holds the least
//! significant bit of the encoded integer.

mod comparator;
mod layout;
mod piecewise;
mod qft;
mod quadratic;
pub mod text;

pub use comparator::{build_comparator, comparator_work_qubits};
pub use layout::RegisterLayout;
pub use piecewise::{build_piecewise_rx, PiecewiseLinearFn};
pub use qft::{build_cqft, build_cqft_inverse, build_qft, build_qft_inverse};
pub use quadratic::{build_quadratic_phase, QuadraticPhaseSpec};
