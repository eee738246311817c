//! ε-fuzzy gates.
//!
//! A fuzzy gate is the realization of a target two-qubit gate `U` drawn from a density
//! that is supported on an open neighbourhood of `U` and vanishes outside the
//! operator-norm ball ‖U − Ũ‖∞ ≤ ε. Two samplers are provided:
//!
//! - [`FuzzVariant::PauliHamiltonian`]: Ũ = e^{iH}U with H = Σ α_P P over the 15
//!   traceless two-qubit Paulis and α_P uniform in [−ε/15, ε/15]. Since
//!   ‖I − e^{iH}‖∞ ≤ ‖H‖∞ ≤ Σ|α_P| ≤ ε the cap holds without rejection, and
//!   det Ũ = det U because H is traceless.
//! - [`FuzzVariant::HaarBallRejection`]: Ũ = VU with V Haar-random, accepted iff
//!   ‖V − I‖∞ ≤ ε. Only practical when ε is of order one.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qcore::{expm_i_hermitian, haar_su4, opnorm_dist, two_qubit_paulis, Gate2Q, Mat4, PureState};
use crate::{Error, Result, C64};

/// Draw budget of the rejection sampler; exhausting it means the acceptance
/// rate is below 1e-4 with overwhelming probability.
const REJECTION_BUDGET: usize = 100_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FuzzVariant {
    #[default]
    PauliHamiltonian,
    HaarBallRejection,
}

impl std::str::FromStr for FuzzVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pauli-hamiltonian" | "pauli" => Ok(Self::PauliHamiltonian),
            "haar-ball-rejection" | "haar-ball" => Ok(Self::HaarBallRejection),
            other => Err(Error::InvalidArgument(format!("unknown fuzz variant {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzModel {
    pub epsilon: f64,
    pub variant: FuzzVariant,
}

impl FuzzModel {
    pub fn pauli(epsilon: f64) -> Self {
        Self { epsilon, variant: FuzzVariant::PauliHamiltonian }
    }

    pub fn haar_ball(epsilon: f64) -> Self {
        Self { epsilon, variant: FuzzVariant::HaarBallRejection }
    }

    /// ε = 0 is accepted for the Pauli-Hamiltonian sampler as the noiseless limit.
    pub fn validate(&self) -> Result<()> {
        let ok = match self.variant {
            FuzzVariant::PauliHamiltonian => self.epsilon >= 0.0,
            FuzzVariant::HaarBallRejection => self.epsilon > 0.0,
        };
        if ok && self.epsilon.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidEpsilon(self.epsilon))
        }
    }

    /// Perturbation e^{iH} for explicit Pauli coefficients.
    pub fn hamiltonian_kick(alphas: &[f64; 15]) -> Mat4 {
        let h = two_qubit_paulis().iter().zip(alphas).fold(Mat4::zeros(), |acc, (p, &a)| acc + p * C64::new(a, 0.0));
        expm_i_hermitian(&h)
    }
}

/// Samples a fuzzy realization of `target`.
pub fn sample_fuzzy_gate<R: Rng + ?Sized>(target: &Gate2Q, model: &FuzzModel, rng: &mut R) -> Result<Gate2Q> {
    model.validate()?;
    let u = match model.variant {
        FuzzVariant::PauliHamiltonian => {
            if model.epsilon == 0.0 {
                return Ok(target.clone());
            }
            let a = model.epsilon / 15.0;
            let alphas: [f64; 15] = std::array::from_fn(|_| rng.random_range(-a..=a));
            FuzzModel::hamiltonian_kick(&alphas) * target.u
        }
        FuzzVariant::HaarBallRejection => {
            let id = Mat4::identity();
            let v = (0..REJECTION_BUDGET)
                .map(|_| haar_su4(rng))
                .find(|v| opnorm_dist(v, &id) <= model.epsilon)
                .ok_or(Error::RejectionStalled { epsilon: model.epsilon, attempts: REJECTION_BUDGET, accepted: 0 })?;
            v * target.u
        }
    };
    Ok(Gate2Q { u, targets: target.targets })
}

/// Intended gates next to the gates that were actually applied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzyCircuitRecord {
    pub targets: Vec<Gate2Q>,
    pub realized: Vec<Gate2Q>,
    pub epsilon: f64,
}

impl FuzzyCircuitRecord {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Largest per-gate deviation ‖V_j − Ṽ_j‖∞.
    pub fn max_deviation(&self) -> f64 {
        self.targets.iter().zip(&self.realized).map(|(t, r)| opnorm_dist(&t.u, &r.u)).fold(0.0, f64::max)
    }
}

/// Draws one fuzzy realization of every target gate, in order.
pub fn realize_fuzzy<R: Rng + ?Sized>(
    targets: &[Gate2Q],
    model: &FuzzModel,
    rng: &mut R,
) -> Result<FuzzyCircuitRecord> {
    let realized = targets.iter().map(|g| sample_fuzzy_gate(g, model, rng)).collect::<Result<Vec<_>>>()?;
    Ok(FuzzyCircuitRecord { targets: targets.to_vec(), realized, epsilon: model.epsilon })
}

/// Applies freshly sampled fuzzy realizations of `targets` to `state`.
pub fn apply_fuzzy_circuit<R: Rng + ?Sized>(
    state: &PureState,
    targets: &[Gate2Q],
    model: &FuzzModel,
    rng: &mut R,
) -> Result<(PureState, FuzzyCircuitRecord)> {
    for g in targets {
        g.check_targets(state.n())?;
    }
    let record = realize_fuzzy(targets, model, rng)?;
    let mut out = state.clone();
    for g in &record.realized {
        out.apply_gate_mut(g)?;
    }
    Ok((out, record))
}
