use rand::Rng;
use serde::{Deserialize, Serialize};

use super::check_delta;
use crate::centropy::{complexity_entropy, ComplexityEntropy, SearchConfig};
use crate::circuits::Circuit;
use crate::fuzz::{realize_fuzzy, FuzzModel, FuzzyCircuitRecord};
use crate::qcore::{trace_distance, DensityOp, PureState};
use crate::tolerance::effective_eta;
use crate::{Error, Result, Tolerances};

/// Regime comparisons tolerate this much roundoff.
const REGIME_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    /// Number of qubits kept and compared with |0^w⟩.
    pub w: usize,
    pub keep_set: Vec<usize>,
    pub record: FuzzyCircuitRecord,
    /// T(kept state, |0^w⟩⟨0^w|).
    pub distance: f64,
    /// √(1−η) + rε.
    pub bound: f64,
    /// n − H_c^{r,1−δ}(ρ): no protocol may keep more qubits.
    pub converse_cap: usize,
    pub delta: f64,
    pub pass: bool,
}

/// Witness search done once; [`ExtractionPlan::trial`] then only samples fuzz.
#[derive(Clone, Debug)]
pub struct ExtractionPlan {
    rho: DensityOp,
    r: usize,
    eta: f64,
    delta: f64,
    witness: ComplexityEntropy,
    converse_cap: usize,
}

impl ExtractionPlan {
    pub fn new(rho: &DensityOp, r: usize, eta: f64, delta: f64, search: &SearchConfig) -> Result<Self> {
        check_delta(delta, true)?;
        let witness = complexity_entropy(rho, r, eta, search)?;
        let converse_cap = extraction_converse(rho, r, delta, search)?;
        Ok(Self { rho: rho.clone(), r, eta: witness.eta, delta, witness, converse_cap })
    }

    pub fn witness(&self) -> &ComplexityEntropy {
        &self.witness
    }

    pub fn converse_cap(&self) -> usize {
        self.converse_cap
    }

    /// w = n − H_c^{r,η}(ρ).
    pub fn w(&self) -> usize {
        self.witness.negentropy()
    }

    pub fn bound(&self, epsilon: f64) -> f64 {
        (1.0 - self.eta).max(0.0).sqrt() + self.r as f64 * epsilon
    }

    /// Requires δ ≥ rε and η ≥ 1 − (δ − rε)².
    pub fn check_regime(&self, model: &FuzzModel) -> Result<()> {
        model.validate()?;
        let r_eps = self.r as f64 * model.epsilon;
        if self.delta + REGIME_SLACK < r_eps {
            return Err(Error::Regime(format!(
                "extraction requires delta >= r*epsilon (delta = {}, r*epsilon = {r_eps})",
                self.delta
            )));
        }
        let eta_min = 1.0 - (self.delta - r_eps).powi(2);
        // η = 1 is stored as 1 − 1e-9, so the η side gets the same slack.
        if self.eta + Tolerances::DEFAULT.eta_slack + REGIME_SLACK < eta_min {
            return Err(Error::Regime(format!(
                "extraction requires eta >= 1 - (delta - r*epsilon)^2 = {eta_min} (eta = {})",
                self.eta
            )));
        }
        Ok(())
    }

    /// Runs the witness circuit once through fuzzy gates and measures how close
    /// the kept qubits are to |0^w⟩.
    pub fn trial<R: Rng + ?Sized>(&self, model: &FuzzModel, rng: &mut R) -> Result<ExtractionResult> {
        self.check_regime(model)?;
        let n = self.rho.n();
        let targets = self.witness.witness.prep.gate_list();
        let record = realize_fuzzy(&targets, model, rng)?;
        let evolved = Circuit::from_gates(n, &record.realized)?.apply_density(&self.rho)?;
        let keep_set = self.witness.witness.mask.projected();
        let w = keep_set.len();
        let distance = if w == 0 {
            0.0
        } else {
            let kept = evolved.partial_trace(&keep_set)?;
            trace_distance(&kept, &PureState::zero(w).to_density())?
        };
        Ok(ExtractionResult {
            w,
            keep_set,
            record,
            distance,
            bound: self.bound(model.epsilon),
            converse_cap: self.converse_cap,
            delta: self.delta,
            pass: distance <= self.delta,
        })
    }
}

/// One extraction run: witness search plus a single fuzzy trial.
pub fn extract<R: Rng + ?Sized>(
    rho: &DensityOp,
    r: usize,
    eta: f64,
    delta: f64,
    model: &FuzzModel,
    search: &SearchConfig,
    rng: &mut R,
) -> Result<ExtractionResult> {
    ExtractionPlan::new(rho, r, eta, delta, search)?.trial(model, rng)
}

/// n − H_c^{r,1−δ}(ρ), the most qubits any extraction protocol can deliver δ-close to |0^w⟩.
pub fn extraction_converse(rho: &DensityOp, r: usize, delta: f64, search: &SearchConfig) -> Result<usize> {
    check_delta(delta, true)?;
    let eta = effective_eta(1.0 - delta);
    Ok(complexity_entropy(rho, r, eta, search)?.negentropy())
}
