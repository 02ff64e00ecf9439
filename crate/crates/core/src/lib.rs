//! Ising-encoded data association, diabatic annealing simulation, and a
//! JPDA tracking filter driven by sampled assignments.
//!
//! The crate is organized bottom-up:
//!
//! - [`ising`] builds spin models for the k-rooks and multi-target data
//!   association (MTDA) problems and solves small ones exhaustively.
//! - [`anneal`] evolves quantum states under `A(s) H_B + B(s) H_P`, both
//!   closed (Schrödinger) and with dephasing (GKSL).
//! - [`sampler`] turns a spin model into shots via exact dynamics, a
//!   parallel-tempering surrogate, or exhaustive enumeration.
//! - [`jpda`] is the Gaussian tracker that weights sampled assignments.
//! - [`scenario`] generates ground truth and cluttered scans.
//! - [`experiments`] wires everything into config-driven runs that emit
//!   plot-ready CSV and JSON.

pub mod anneal;
pub mod error;
pub mod experiments;
pub mod ising;
pub mod jpda;
pub mod rng;
pub mod sampler;
pub mod scenario;

pub use error::{Error, Result};
