//! Q-score: an application-level benchmark for gate-based quantum backends.
//!
//! The score of a backend is the largest MaxCut instance size `n` at which
//! QAOA run on that backend beats uniform random sampling by a calibrated
//! margin. The crate contains everything needed to compute it end to end:
//!
//! - [`graphs`]: random instance families, exact MaxCut and the scaling
//!   constants used to normalize scores.
//! - [`circuit`]: the QAOA ansatz in the native gate set, plus a SWAP router
//!   for constrained connectivity.
//! - [`sim`]: statevector execution, perfect or with depolarizing noise
//!   trajectories, and a density-matrix reference.
//! - [`optim`]: derivative-free parameter optimization on sampled energies.
//! - [`bench`]: the per-size score, the pass test and the search for `n*`.
//! - [`backend`] and [`plugin`]: the execution boundary, including
//!   external backends driven over a subprocess protocol.

pub mod backend;
pub mod bench;
pub mod circuit;
pub mod config;
pub mod graphs;
pub mod optim;
pub mod plot;
pub mod plugin;
pub mod rng;
pub mod sim;

mod error;

pub use error::{Error, Result};
