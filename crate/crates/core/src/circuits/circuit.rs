use serde::{Deserialize, Serialize};

use super::Architecture;
use crate::qcore::{DensityOp, Gate2Q, Mat4, PureState};
use crate::{Error, Result, Tolerances};

/// An architecture with a concrete unitary slotted into every slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRepr", into = "CircuitRepr")]
pub struct Circuit {
    arch: Architecture,
    gates: Vec<Mat4>,
}

impl Circuit {
    pub fn new(arch: Architecture, gates: Vec<Mat4>) -> Result<Self> {
        if arch.len() != gates.len() {
            return Err(Error::DimensionMismatch { expected: arch.len(), found: gates.len() });
        }
        let tol = Tolerances::DEFAULT.unitarity;
        for u in &gates {
            let dev = crate::qcore::gate_unitarity_deviation(u);
            if dev > tol {
                return Err(Error::NotUnitary(dev));
            }
        }
        Ok(Self { arch, gates })
    }

    pub fn identity(arch: Architecture) -> Self {
        let gates = vec![Mat4::identity(); arch.len()];
        Self { arch, gates }
    }

    pub fn from_gates(n: usize, gates: &[Gate2Q]) -> Result<Self> {
        let arch = Architecture::from_gates(n, gates)?;
        Ok(Self { arch, gates: gates.iter().map(|g| g.u).collect() })
    }

    pub fn arch(&self) -> &Architecture {
        &self.arch
    }

    pub fn gates(&self) -> &[Mat4] {
        &self.gates
    }

    pub fn n(&self) -> usize {
        self.arch.n
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Gates paired with their slots, in execution order.
    pub fn gate_list(&self) -> Vec<Gate2Q> {
        self.arch.slots.iter().zip(&self.gates).map(|(&t, &u)| Gate2Q { u, targets: t }).collect()
    }

    /// The circuit implementing U†: reversed slots, adjoint gates.
    pub fn inverse(&self) -> Circuit {
        let slots = self.arch.slots.iter().rev().copied().collect();
        let gates = self.gates.iter().rev().map(|u| u.adjoint()).collect();
        Circuit { arch: Architecture { n: self.arch.n, slots }, gates }
    }

    pub fn apply_density(&self, rho: &DensityOp) -> Result<DensityOp> {
        if rho.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: rho.n() });
        }
        self.gate_list().iter().try_fold(rho.clone(), |acc, g| acc.apply_gate(g))
    }
}

/// Applies every gate of `circ` to `input` in slot order.
pub fn contract(circ: &Circuit, input: &PureState) -> Result<PureState> {
    if input.n() != circ.n() {
        return Err(Error::DimensionMismatch { expected: circ.n(), found: input.n() });
    }
    let mut out = input.clone();
    for (&t, u) in circ.arch.slots.iter().zip(&circ.gates) {
        out.apply_matrix_mut(u, t)?;
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    arch: Architecture,
    gates: Vec<Gate2Q>,
}

impl From<Circuit> for CircuitRepr {
    fn from(c: Circuit) -> Self {
        CircuitRepr { gates: c.gate_list(), arch: c.arch }
    }
}

impl TryFrom<CircuitRepr> for Circuit {
    type Error = Error;

    fn try_from(r: CircuitRepr) -> Result<Self> {
        Circuit::new(r.arch, r.gates.into_iter().map(|g| g.u).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{brickwork, random_architecture};
    use crate::qcore::{haar_state, haar_su4};
    use crate::seed::rng_from_seed;
    use crate::C64;
    use proptest::prelude::*;

    fn random_circuit(arch: Architecture, rng: &mut crate::seed::Rng) -> Circuit {
        let gates = (0..arch.len()).map(|_| haar_su4(rng)).collect();
        Circuit::new(arch, gates).unwrap()
    }

    #[test]
    fn identity_circuit_is_noop() {
        let mut rng = rng_from_seed(1);
        let psi = haar_state(4, &mut rng);
        let c = Circuit::identity(brickwork(4, 3, true).unwrap());
        assert_eq!(contract(&c, &psi).unwrap(), psi);
    }

    #[test]
    fn ghz_preparation() {
        let c = |x: f64| C64::new(x, 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0.0);
        // CNOT·(H⊗I) on (0,1), then CNOT on (1,2).
        let cnot_h = Mat4::new(c(h), z, c(h), z, z, c(h), z, c(h), z, c(h), z, c(-h), c(h), z, c(-h), z);
        let cnot = Mat4::new(c(1.0), z, z, z, z, c(1.0), z, z, z, z, z, c(1.0), z, z, c(1.0), z);
        let arch = Architecture::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let circ = Circuit::new(arch, vec![cnot_h, cnot]).unwrap();
        let out = contract(&circ, &PureState::zero(3)).unwrap();
        // Oracle: explicit matrix-product reasoning gives (|000⟩ + |111⟩)/√2.
        let overlap = out.inner(&PureState::ghz(3)).unwrap();
        assert!((overlap.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_restores_input() {
        let mut rng = rng_from_seed(3);
        let arch = random_architecture(4, 9, &mut rng).unwrap();
        let circ = random_circuit(arch, &mut rng);
        let psi = haar_state(4, &mut rng);
        let back = contract(&circ.inverse(), &contract(&circ, &psi).unwrap()).unwrap();
        assert!(back.inner(&psi).unwrap().norm() > 1.0 - 1e-9);
    }

    #[test]
    fn dimension_checks() {
        let circ = Circuit::identity(brickwork(3, 1, false).unwrap());
        assert!(contract(&circ, &PureState::zero(2)).is_err());
        assert!(Circuit::new(brickwork(3, 1, false).unwrap(), vec![]).is_err());
        assert!(Circuit::new(brickwork(2, 1, false).unwrap(), vec![Mat4::identity() * C64::new(2.0, 0.0)]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let mut rng = rng_from_seed(4);
        let circ = random_circuit(brickwork(3, 2, true).unwrap(), &mut rng);
        let s = serde_json::to_string(&circ).unwrap();
        assert_eq!(serde_json::from_str::<Circuit>(&s).unwrap(), circ);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn contraction_preserves_inner_products(seed in any::<u64>(), n in 2usize..5, len in 0usize..8) {
            let mut rng = rng_from_seed(seed);
            let circ = random_circuit(random_architecture(n, len, &mut rng).unwrap(), &mut rng);
            let a = haar_state(n, &mut rng);
            let b = haar_state(n, &mut rng);
            let before = a.inner(&b).unwrap();
            let after = contract(&circ, &a).unwrap().inner(&contract(&circ, &b).unwrap()).unwrap();
            prop_assert!((before - after).norm() < 1e-10);
        }
    }
}
