//! Accessible dimension of circuit contraction maps.
//!
//! The dimension of the set of states an architecture reaches is the largest rank
//! of the contraction map's Jacobian. Ranks are measured numerically at sampled
//! gate assignments, with an explicit singular-value cutoff and the gap around it.

mod frame;
mod trials;

pub use frame::{finite_difference_frame, input_frame, numerical_rank, tangent_frame, RankInfo, TangentFrame};
pub use trials::{
    accessible_dimension, brickwork_monotone_trial, negentropy_dimension_trial, DimReport, DimRow, MonotoneTrial,
    NegentropyTrial,
};

/// Dimension of the unit sphere in C^{2^n} viewed as a real manifold.
pub fn state_cap(n: usize) -> usize {
    2 * (1usize << n) - 1
}
