//! Truncated bosonic operators, the rotating-frame Hamiltonian, the reduced
//! two-mode models and the Lindblad generator.
//!
//! Basis ordering is cavity1 ⊗ cavity2 ⊗ mechanics with the mechanical
//! index running fastest.

mod hamiltonian;
mod liouvillian;
mod operators;
mod params;

pub use hamiltonian::{build_h1, build_h_reduced, ReducedVariant};
pub use liouvillian::{make_liouvillian, GainModel, JumpChannel, Liouvillian};
pub use operators::{build_annihilation, build_operator_set, OperatorSet};
pub use params::{thermal_occupation, SystemParams, TruncationSpec, BOLTZMANN, HBAR};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}
