use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::gate::{apply_4x4, check_pair, Gate2Q, Mat4};
use super::DensityOp;
use crate::{Error, Result, Tolerances, C64};

/// Unit-norm amplitude vector over `n` qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    n: usize,
    amps: Vec<C64>,
}

impl PureState {
    /// Wraps an amplitude vector, checking length and normalization.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n = qubits_for_len(amps.len())?;
        let norm = norm_sqr(&amps).sqrt();
        if (norm - 1.0).abs() > Tolerances::DEFAULT.construction {
            return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(Self { n, amps })
    }

    /// Wraps and rescales an amplitude vector to unit norm.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let n = qubits_for_len(amps.len())?;
        let norm = norm_sqr(&amps).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n, amps })
    }

    /// Computational basis state with the given index.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        Self { n, amps }
    }

    /// |0^n⟩.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    /// |+⟩^{⊗n}.
    pub fn plus(n: usize) -> Self {
        let a = C64::new((1.0 / (1u64 << n) as f64).sqrt(), 0.0);
        Self { n, amps: vec![a; 1 << n] }
    }

    /// (|0^n⟩ + |1^n⟩)/√2.
    pub fn ghz(n: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] = C64::new(h, 0.0);
        amps[(1 << n) - 1] = C64::new(h, 0.0);
        Self { n, amps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Returns the state with `gate` applied at its targets.
    pub fn apply_gate(&self, gate: &Gate2Q) -> Result<PureState> {
        let mut out = self.clone();
        out.apply_gate_mut(gate)?;
        Ok(out)
    }

    pub fn apply_gate_mut(&mut self, gate: &Gate2Q) -> Result<()> {
        self.apply_matrix_mut(&gate.u, gate.targets)
    }

    /// Applies an arbitrary 4×4 matrix; used for gates and tangent directions alike.
    pub fn apply_matrix_mut(&mut self, u: &Mat4, targets: (usize, usize)) -> Result<()> {
        check_pair(targets, self.n)?;
        apply_4x4(&mut self.amps, self.n, u, targets.0, targets.1);
        Ok(())
    }

    /// Tensor product `self ⊗ other` (self on the leading qubits).
    pub fn tensor(&self, other: &PureState) -> PureState {
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        PureState { n: self.n + other.n, amps }
    }

    /// |ψ⟩⟨ψ|.
    pub fn to_density(&self) -> DensityOp {
        let d = self.dim();
        let mat = DMatrix::from_fn(d, d, |r, c| self.amps[r] * self.amps[c].conj());
        DensityOp::from_matrix_unchecked(self.n, mat)
    }

    pub(crate) fn from_parts_unchecked(n: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        Self { n, amps }
    }
}

/// Free-function form of [`PureState::apply_gate`].
pub fn apply_gate(state: &PureState, gate: &Gate2Q) -> Result<PureState> {
    state.apply_gate(gate)
}

pub(crate) fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

pub(crate) fn qubits_for_len(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::InvalidState(format!("length {len} is not a power of two")));
    }
    Ok(len.trailing_zeros() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{haar_state, haar_su4};
    use crate::seed::rng_from_seed;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn swap() -> Mat4 {
        let mut m = Mat4::zeros();
        for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            m[(r, col)] = c(1.0);
        }
        m
    }

    #[test]
    fn identity_gate_is_noop() {
        let mut rng = rng_from_seed(1);
        let psi = haar_state(3, &mut rng);
        let out = psi.apply_gate(&Gate2Q::identity((2, 0))).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn swap_exchanges_qubits() {
        // |01⟩ has index 1.
        let psi = PureState::basis(2, 0b01);
        let g = Gate2Q { u: swap(), targets: (0, 1) };
        assert_eq!(psi.apply_gate(&g).unwrap(), PureState::basis(2, 0b10));
    }

    #[test]
    fn hadamard_block_on_qubit_zero() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // H ⊗ I, with qubit 0 the first factor.
        let hi = Mat4::new(
            c(h),
            c(0.0),
            c(h),
            c(0.0),
            c(0.0),
            c(h),
            c(0.0),
            c(h),
            c(h),
            c(0.0),
            c(-h),
            c(0.0),
            c(0.0),
            c(h),
            c(0.0),
            c(-h),
        );
        // Oracle: direct 4×4 matrix-vector product on |00⟩ = e_0.
        let expect: Vec<C64> = (0..4).map(|r| hi[(r, 0)]).collect();
        let out = PureState::zero(2).apply_gate(&Gate2Q { u: hi, targets: (0, 1) }).unwrap();
        for (a, b) in out.amps().iter().zip(&expect) {
            assert!((a - b).norm() < 1e-15);
        }
        // (|00⟩ + |10⟩)/√2
        assert!((out.amps()[0b10] - c(h)).norm() < 1e-15);
    }

    #[test]
    fn reversed_targets_match_swapped_conjugation() {
        let mut rng = rng_from_seed(5);
        let u = haar_su4(&mut rng);
        let psi = haar_state(3, &mut rng);
        let a = psi.apply_gate(&Gate2Q { u, targets: (2, 0) }).unwrap();
        let s = swap();
        let b = psi.apply_gate(&Gate2Q { u: s * u * s, targets: (0, 2) }).unwrap();
        assert!(a.inner(&b).unwrap().norm() > 1.0 - 1e-12);
    }

    #[test]
    fn errors_on_bad_targets() {
        let psi = PureState::zero(2);
        assert!(matches!(psi.apply_gate(&Gate2Q::identity((0, 2))), Err(Error::QubitOutOfRange { .. })));
        let g = Gate2Q { u: Mat4::identity(), targets: (1, 1) };
        assert!(matches!(psi.apply_gate(&g), Err(Error::EqualTargets(1))));
    }

    #[test]
    fn construction_checks() {
        assert!(PureState::new(vec![c(1.0), c(0.0), c(0.0)]).is_err());
        assert!(PureState::new(vec![c(1.0), c(1.0)]).is_err());
        assert!(PureState::normalized(vec![c(1.0), c(1.0)]).is_ok());
    }
}
