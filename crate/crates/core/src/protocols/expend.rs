use rand::Rng;
use serde::{Deserialize, Serialize};

use super::check_delta;
use crate::centropy::{complexity_entropy, ComplexityEntropy, SearchConfig};
use crate::circuits::Circuit;
use crate::fuzz::{realize_fuzzy, FuzzModel, FuzzyCircuitRecord};
use crate::qcore::{haar_state, DensityOp, PureState};
use crate::{Error, Result};

const REGIME_SLACK: f64 = 1e-12;

/// Content of the agent's unconstrained qubits W̄.
#[derive(Clone, Debug, PartialEq)]
pub enum BankState {
    MaximallyMixed,
    /// A Haar-random pure state, drawn fresh for each trial.
    RandomPure,
    Given(DensityOp),
}

impl BankState {
    pub fn label(&self) -> &'static str {
        match self {
            BankState::MaximallyMixed => "maximally-mixed",
            BankState::RandomPure => "random-pure",
            BankState::Given(_) => "given",
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<DensityOp> {
        match self {
            BankState::MaximallyMixed => Ok(DensityOp::maximally_mixed(k)),
            BankState::RandomPure => Ok(haar_state(k, rng).to_density()),
            BankState::Given(s) if s.n() == k => Ok(s.clone()),
            BankState::Given(s) => Err(Error::DimensionMismatch { expected: k, found: s.n() }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpenditureResult {
    /// Number of qubits the referee projects onto |0⟩.
    pub w: usize,
    pub bank: String,
    /// Tr(Q̃ ρ̃): the referee's acceptance probability on the simulacrum.
    pub guess_prob: f64,
    /// 1 − 2rε.
    pub bound: f64,
    pub delta: f64,
    pub pass: bool,
    pub referee: FuzzyCircuitRecord,
    pub agent: FuzzyCircuitRecord,
}

/// The referee's test Q = U†Q₀U, found once; each trial realizes the circuit
/// independently for referee and agent.
#[derive(Clone, Debug)]
pub struct ExpenditurePlan {
    r: usize,
    delta: f64,
    referee: ComplexityEntropy,
}

impl ExpenditurePlan {
    pub fn new(rho: &DensityOp, r: usize, eta: f64, delta: f64, search: &SearchConfig) -> Result<Self> {
        check_delta(delta, true)?;
        let referee = complexity_entropy(rho, r, eta, search)?;
        Ok(Self { r, delta, referee })
    }

    pub fn referee(&self) -> &ComplexityEntropy {
        &self.referee
    }

    pub fn w(&self) -> usize {
        self.referee.negentropy()
    }

    pub fn bound(&self, epsilon: f64) -> f64 {
        1.0 - 2.0 * self.r as f64 * epsilon
    }

    /// Requires δ ≥ 2rε.
    pub fn check_regime(&self, model: &FuzzModel) -> Result<()> {
        model.validate()?;
        let two_r_eps = 2.0 * self.r as f64 * model.epsilon;
        if self.delta + REGIME_SLACK < two_r_eps {
            return Err(Error::Regime(format!(
                "expenditure requires delta >= 2*r*epsilon (delta = {}, 2*r*epsilon = {two_r_eps})",
                self.delta
            )));
        }
        Ok(())
    }

    /// Builds Ũ†(|0^w⟩⟨0^w| ⊗ σ)Ũ and scores it with an independently realized Q̃.
    pub fn trial<R: Rng + ?Sized>(
        &self,
        model: &FuzzModel,
        bank: &BankState,
        rng: &mut R,
    ) -> Result<ExpenditureResult> {
        self.check_regime(model)?;
        let witness = &self.referee.witness;
        let n = witness.n();
        let targets = witness.prep.gate_list();
        let zeros = witness.mask.projected();
        let free = witness.mask.untouched();

        let referee = realize_fuzzy(&targets, model, rng)?;
        let agent = realize_fuzzy(&targets, model, rng)?;

        let sigma = bank.sample(free.len(), rng)?;
        let prepared = if zeros.is_empty() {
            sigma
        } else if free.is_empty() {
            PureState::zero(n).to_density()
        } else {
            let perm: Vec<usize> = zeros.iter().chain(&free).copied().collect();
            PureState::zero(zeros.len()).to_density().tensor(&sigma).permute_qubits(&perm)?
        };
        let simulacrum = Circuit::from_gates(n, &agent.realized)?.inverse().apply_density(&prepared)?;
        let scored = Circuit::from_gates(n, &referee.realized)?.apply_density(&simulacrum)?;
        let guess_prob = scored.prob_zero_on(&zeros);

        Ok(ExpenditureResult {
            w: zeros.len(),
            bank: bank.label().to_string(),
            guess_prob,
            bound: self.bound(model.epsilon),
            delta: self.delta,
            pass: guess_prob >= 1.0 - self.delta,
            referee,
            agent,
        })
    }
}

/// One expenditure run: referee search plus a single fuzzy trial.
#[allow(clippy::too_many_arguments)]
pub fn expend<R: Rng + ?Sized>(
    rho: &DensityOp,
    r: usize,
    eta: f64,
    delta: f64,
    model: &FuzzModel,
    bank: &BankState,
    search: &SearchConfig,
    rng: &mut R,
) -> Result<ExpenditureResult> {
    ExpenditurePlan::new(rho, r, eta, delta, search)?.trial(model, bank, rng)
}
