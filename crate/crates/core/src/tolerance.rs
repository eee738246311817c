//! Numerical tolerances shared by every module.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Norm, Hermiticity, trace and PSD checks when constructing states.
    pub construction: f64,
    /// Allowed drift of u†u from the identity, and of det(u) from 1.
    pub unitarity: f64,
    /// Slack when comparing Tr(Qρ) against η.
    pub eta_slack: f64,
    /// Relative singular-value cutoff for numerical rank.
    pub rank: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances { construction: 1e-10, unitarity: 1e-8, eta_slack: 1e-9, rank: 1e-8 };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// η used when a caller asks for η = 1: exact-one constraints are brittle.
pub fn effective_eta(eta: f64) -> f64 {
    if eta >= 1.0 {
        1.0 - Tolerances::DEFAULT.eta_slack
    } else {
        eta
    }
}
