//! Gate-level simulation of non-adiabatic wavepacket dynamics on two coupled
//! harmonic surfaces, with the analysis and state-preparation tools around it.
// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod circuits;
pub mod dynamics;
pub mod error;
pub mod statevec;
pub mod validate;
pub mod vqe;

pub use error::{Error, Result};
