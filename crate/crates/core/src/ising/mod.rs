//! Spin models for assignment problems.
//!
//! Conventions used throughout the crate:
//!
//! - A spin is `+1` when the corresponding cell is occupied (rook placed,
//!   association made) and `-1` otherwise, i.e. `x = (1 + σ) / 2`.
//! - Energies use the double-counted pair sum
//!   `E = Σ_{i≠j} Q_ij σ_i σ_j + Σ_i q_i σ_i + offset`.
//! - Configurations are indexed by an integer `j` whose most significant bit
//!   is spin 0 (matrix entry `S_00`), so boards and association matrices
//!   vectorize row-major.

mod assignment;
mod build;
mod model;
mod spectrum;

pub use assignment::{decode, encode, is_feasible, AssignmentMatrix, ProblemKind};
pub use build::{build_krooks, build_mtda, BiasKind, BiasSpec, CostMatrix, MTDA_TIE_BREAK};
pub use model::{binary_to_spin, spin_energy, BinaryQuadraticModel, SpinConfiguration, SpinModel};
pub use spectrum::{brute_force_spectrum, SpectrumEntry, SPECTRUM_SPIN_LIMIT};
