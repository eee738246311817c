//! Dense linear-algebra substrate.
//!
//! Conventions: qubit 0 is the leftmost tensor factor, so for an `n`-qubit register
//! qubit `q` is bit `n - 1 - q` of the amplitude index and a ket label such as
//! `|01⟩` reads directly as the binary index. A two-qubit gate on targets `(j, k)`
//! acts on the local index `2·b_j + b_k`.

mod density;
mod gate;
mod haar;
mod linalg;
mod pauli;
mod state;

pub use density::{pure_overlap, trace_distance, DensityOp};
pub(crate) use gate::unitarity_deviation as gate_unitarity_deviation;
pub use gate::{apply_4x4, Gate2Q, Mat4};
pub use haar::{haar_state, haar_su4};
pub use linalg::{expm_i_hermitian, hermitian_eigen, opnorm_dist, singular_values};
pub use pauli::{two_qubit_paulis, Pauli, PauliString};
pub use state::{apply_gate, PureState};

/// Bit mask of qubit `q` in an `n`-qubit amplitude index.
#[inline]
pub fn qubit_bit(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}
