//! Annealing dynamics under `H(s) = A(s) H_B + B(s) H_P` with `ħ = 1`.
//!
//! `H_B = −Σ_i σx_i` is the transverse-field driver and `H_P` is the
//! diagonal operator whose entry at basis index `j` is the spin-model
//! energy of configuration `j` (see [`crate::ising`] for the encoding).

mod evolve;
mod krylov;
mod operators;
mod path;
mod schedule;
mod state;

pub use evolve::{
    evolve_gksl, evolve_schrodinger, evolve_schrodinger_converged, ConvergedEvolution, LindbladConfig,
    DEFAULT_STEP_TOLERANCE, GKSL_SPIN_LIMIT,
};
pub use krylov::expm_apply;
pub use operators::{build_driver, build_problem_operator, Hamiltonian, ProblemOperator, TransverseField, STATEVECTOR_SPIN_LIMIT};
pub use path::{adiabaticity_metric, spectrum_along_path, AdiabaticityReport, PathSpectrum, DEGENERATE_GAP};
pub use schedule::{forward_schedule, reverse_pause_quench_schedule, AnnealSchedule, Coefficients};
pub use state::{outcome_distribution, DensityMatrix, MeasurableState, QuantumState};

pub type C64 = num_complex::Complex64;
