//! A desk-scale laboratory for the resource theory of quantum uncomplexity.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: dense states, density operators, two-qubit gates, Pauli strings,
//!   distances and Haar sampling.
//! - [`fuzz`]: samplers for ε-fuzzy gates and fuzzy-circuit application.
//! - [`circuits`]: architectures, brickwork layouts, contraction and light cones.
//! - [`centropy`]: hypothesis-testing entropy and the gate-restricted complexity entropy.
//! - [`protocols`]: uncomplexity extraction and expenditure with their error budgets.
//! - [`geometry`]: Jacobian-rank (accessible-dimension) experiments.
//! - [`cli`]: the reproducible experiment runner behind the `unclab` binary.

pub mod centropy;
pub mod circuits;
pub mod cli;
pub mod error;
pub mod fuzz;
pub mod geometry;
pub mod protocols;
pub mod qcore;
pub mod seed;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
