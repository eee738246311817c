use serde::{Deserialize, Serialize};

use super::check_eta;
use crate::qcore::DensityOp;
use crate::tolerance::effective_eta;
use crate::Result;

/// Optimal test for the hypothesis-testing entropy, expressed in ρ's eigenbasis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisEntropy {
    /// log₂ of the optimal Tr(Q).
    pub value: f64,
    /// Optimal Tr(Q).
    pub size: f64,
    /// Tr(Qρ) achieved by the optimal Q.
    pub achieved_prob: f64,
    /// Eigenvalues of ρ, largest first.
    pub eigenvalues: Vec<f64>,
    /// Weight of Q on each eigenvector, aligned with `eigenvalues`.
    pub weights: Vec<f64>,
}

/// min log₂ Tr(Q) subject to Tr(Qρ) ≥ η and 0 ≤ Q ≤ I.
///
/// The optimum is diagonal in ρ's eigenbasis: fill eigenvectors by decreasing
/// eigenvalue and put a fractional weight on the one that reaches η.
/// `eta = 1` is evaluated at `1 − 1e-9`.
pub fn hypothesis_entropy(rho: &DensityOp, eta: f64) -> Result<HypothesisEntropy> {
    check_eta(eta)?;
    let target = effective_eta(eta);
    let mut eigenvalues: Vec<f64> = rho.eigenvalues().into_iter().rev().map(|l| l.max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();
    eigenvalues.iter_mut().for_each(|l| *l /= total);

    let mut weights = vec![0.0; eigenvalues.len()];
    let mut remaining = target;
    for (w, &l) in weights.iter_mut().zip(&eigenvalues) {
        if remaining <= 0.0 {
            break;
        }
        if l >= remaining {
            *w = remaining / l;
            remaining = 0.0;
        } else {
            *w = 1.0;
            remaining -= l;
        }
    }
    let size: f64 = weights.iter().sum();
    let achieved_prob = weights.iter().zip(&eigenvalues).map(|(w, l)| w * l).sum();
    Ok(HypothesisEntropy { value: size.log2(), size, achieved_prob, eigenvalues, weights })
}
