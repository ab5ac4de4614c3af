//! Stabilizer code construction by contracting small "lego" tensors, exact
//! weight enumerators, and a deterministic construction game with search
//! agents.
//!
//! The main entry points:
//!
//! - [`gf2`]: symplectic Pauli strings and check matrices.
//! - [`lego`]: legos, tensor networks and contraction.
//! - [`enumerator`]: weight enumerators, distances, logical error rates.
//! - [`codelib`]: built-in codes and the check-matrix text format.
//! - [`game`], [`search`]: the construction game and agents.
//! - [`mcsim`]: Pauli-frame Monte Carlo estimates.
//! - [`envproto`]: newline-delimited JSON protocol for external trainers.

pub mod code;
pub mod codelib;
pub mod enumerator;
pub mod envproto;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod gf2;
pub mod lego;
pub mod mcsim;
pub mod parallel;
pub mod reference;
pub mod report;
pub mod script;
pub mod search;

pub use code::{Provenance, StabilizerCode};
pub use error::{Error, Result};
pub use gf2::{CheckMatrix, Pauli, PauliString};
pub use lego::{Lego, TensorNetwork};
pub use game::{Game, GameConfig, GameState};
