//! Gate layouts and the circuits built from them.

mod architecture;
mod circuit;

pub use architecture::{brickwork, enumerate_architectures, has_light_cone, random_architecture, Architecture, Slot};
pub use circuit::{contract, Circuit};

/// Largest gate budget [`enumerate_architectures`] accepts.
pub const MAX_ENUMERATION_GATES: usize = 4;
/// Largest number of raw slot sequences [`enumerate_architectures`] will scan.
pub const MAX_ENUMERATION_SEQUENCES: usize = 2_000_000;
