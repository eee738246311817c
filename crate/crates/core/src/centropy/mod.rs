//! Hypothesis-testing entropy and the gate-restricted complexity entropy.
//!
//! Both quantities minimize log₂ Tr(Q) over two-outcome tests `{Q, I − Q}` that
//! accept ρ with probability at least η. The hypothesis-testing entropy optimizes
//! over every `0 ≤ Q ≤ I`; the complexity entropy only over operators
//! `Q = U† Q₀ U` where `U` is a circuit of at most `r` two-qubit gates and `Q₀`
//! projects a subset of qubits onto |0⟩ (the tensor product of per-qubit factors
//! |0⟩⟨0| or I, so that Tr(Q) = 2^{n−w} for `w` projected qubits).

mod hypothesis;
mod measop;
mod optimize;
mod search;

pub use hypothesis::{hypothesis_entropy, HypothesisEntropy};
pub use measop::{eval_measop, Mask, MeasOp};
pub use optimize::{maximize_acceptance, polish, OptimizerConfig, OptimizerRun};
pub use search::{
    complexity_entropy, complexity_negentropy, verify_witness, ComplexityEntropy, ResultKind, SearchConfig, SearchMode,
};

use crate::{Error, Result};

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEta(eta))
    }
}
