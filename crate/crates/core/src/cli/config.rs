use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::fuzz::{FuzzModel, FuzzVariant};
use crate::qcore::{haar_state, DensityOp, PureState};
use crate::tolerance::effective_eta;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    FuzzBound,
    Entropy,
    Extract,
    Expend,
    AccessibleDim,
    BwMonotone,
    NegentropyDim,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::FuzzBound,
        Experiment::Entropy,
        Experiment::Extract,
        Experiment::Expend,
        Experiment::AccessibleDim,
        Experiment::BwMonotone,
        Experiment::NegentropyDim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::FuzzBound => "fuzz-bound",
            Experiment::Entropy => "entropy",
            Experiment::Extract => "extract",
            Experiment::Expend => "expend",
            Experiment::AccessibleDim => "accessible-dim",
            Experiment::BwMonotone => "bw-monotone",
            Experiment::NegentropyDim => "negentropy-dim",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

/// Input state of the entropy and protocol experiments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateSpec {
    Zero,
    Plus,
    #[default]
    Ghz,
    MaximallyMixed,
    /// Haar-random pure state, drawn per trial.
    RandomPure,
    /// Uniformly weighted mixture of 2^n Haar-random pure states, drawn per trial.
    RandomMixed,
}

impl StateSpec {
    pub fn is_random(self) -> bool {
        matches!(self, StateSpec::RandomPure | StateSpec::RandomMixed)
    }

    pub fn name(self) -> &'static str {
        match self {
            StateSpec::Zero => "zero",
            StateSpec::Plus => "plus",
            StateSpec::Ghz => "ghz",
            StateSpec::MaximallyMixed => "maximally-mixed",
            StateSpec::RandomPure => "random-pure",
            StateSpec::RandomMixed => "random-mixed",
        }
    }

    pub fn build<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> Result<DensityOp> {
        Ok(match self {
            StateSpec::Zero => PureState::zero(n).to_density(),
            StateSpec::Plus => PureState::plus(n).to_density(),
            StateSpec::Ghz => PureState::ghz(n).to_density(),
            StateSpec::MaximallyMixed => DensityOp::maximally_mixed(n),
            StateSpec::RandomPure => haar_state(n, rng).to_density(),
            StateSpec::RandomMixed => {
                let parts: Vec<(f64, PureState)> =
                    (0..1usize << n).map(|_| (rng.random::<f64>(), haar_state(n, rng))).collect();
                let total: f64 = parts.iter().map(|(w, _)| w).sum();
                let parts: Vec<_> = parts.into_iter().map(|(w, s)| (w / total, s)).collect();
                DensityOp::mixture(&parts)?
            }
        })
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            StateSpec::Zero,
            StateSpec::Plus,
            StateSpec::Ghz,
            StateSpec::MaximallyMixed,
            StateSpec::RandomPure,
            StateSpec::RandomMixed,
        ]
        .into_iter()
        .find(|v| v.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown state {s:?}")))
    }
}

/// Bank state of the expenditure experiment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BankSpec {
    #[default]
    MaximallyMixed,
    RandomPure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub n: usize,
    pub r: usize,
    pub layers: usize,
    /// Input qubits of the negentropy-dimension experiment; defaults to n − 1.
    pub k: Option<usize>,
    pub eta: f64,
    /// Protocol tolerance; defaults to the achievable error budget.
    pub delta: Option<f64>,
    pub epsilon: f64,
    pub tol: f64,
    pub trials: usize,
    pub restarts: usize,
    pub points: usize,
    pub seed: u64,
    pub fuzz_variant: FuzzVariant,
    pub state: StateSpec,
    pub bank: BankSpec,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            n: 3,
            r: 2,
            layers: 1,
            k: None,
            eta: 1.0,
            delta: None,
            epsilon: 0.01,
            tol: 1e-8,
            trials: 100,
            restarts: 32,
            points: 3,
            seed: 0,
            fuzz_variant: FuzzVariant::PauliHamiltonian,
            state: StateSpec::Ghz,
            bank: BankSpec::MaximallyMixed,
            out_dir: PathBuf::from("unclab-out"),
        }
    }
}

/// Largest register the runner accepts.
pub const MAX_QUBITS: usize = 8;

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))
    }

    pub fn experiment(&self) -> Result<Experiment> {
        self.experiment.ok_or_else(|| Error::Config("no experiment given".into()))
    }

    pub fn fuzz(&self) -> FuzzModel {
        FuzzModel { epsilon: self.epsilon, variant: self.fuzz_variant }
    }

    pub fn k(&self) -> usize {
        self.k.unwrap_or(self.n.saturating_sub(1))
    }

    /// δ for extraction: given, or √(1−η) + rε.
    pub fn extract_delta(&self) -> f64 {
        self.delta.unwrap_or_else(|| (1.0 - effective_eta(self.eta)).sqrt() + self.r as f64 * self.epsilon)
    }

    /// δ for expenditure: given, or 2rε.
    pub fn expend_delta(&self) -> f64 {
        self.delta.unwrap_or(2.0 * self.r as f64 * self.epsilon)
    }

    /// Range and regime checks; every failure is a configuration error.
    pub fn validate(&self) -> Result<()> {
        let exp = self.experiment()?;
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n < 2 || self.n > MAX_QUBITS {
            return bad(format!("n = {} outside 2..={MAX_QUBITS}", self.n));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad(format!("eta = {} outside (0, 1]", self.eta));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("tol = {} outside (0, 1)", self.tol));
        }
        if self.restarts == 0 || self.points == 0 {
            return bad("restarts and points must be positive".into());
        }
        self.fuzz().validate().map_err(|e| Error::Config(e.to_string()))?;
        let r_eps = self.r as f64 * self.epsilon;
        match exp {
            Experiment::Extract => {
                let delta = self.extract_delta();
                if !(0.0..1.0).contains(&delta) {
                    return bad(format!("delta = {delta} outside [0, 1)"));
                }
                if delta + 1e-12 < r_eps {
                    return Err(Error::Regime(format!(
                        "extraction theorem needs delta >= r*epsilon, got delta = {delta} < r*epsilon = {r_eps}"
                    )));
                }
                let eta_min = 1.0 - (delta - r_eps).powi(2);
                if effective_eta(self.eta) + 1e-9 + 1e-12 < eta_min {
                    return Err(Error::Regime(format!(
                        "extraction theorem needs eta >= 1 - (delta - r*epsilon)^2 = {eta_min}, got eta = {}",
                        self.eta
                    )));
                }
            }
            Experiment::Expend => {
                let delta = self.expend_delta();
                if !(0.0..1.0).contains(&delta) {
                    return bad(format!("delta = {delta} outside [0, 1)"));
                }
                if delta + 1e-12 < 2.0 * r_eps {
                    return Err(Error::Regime(format!(
                        "expenditure theorem needs delta >= 2*r*epsilon, got delta = {delta} < 2*r*epsilon = {}",
                        2.0 * r_eps
                    )));
                }
            }
            Experiment::BwMonotone if self.n < 3 || self.n > 6 => {
                return bad(format!("bw-monotone needs 3 <= n <= 6, got {}", self.n));
            }
            Experiment::NegentropyDim => {
                let k = self.k();
                if k == 0 || k > self.n {
                    return bad(format!("k = {k} outside 1..=n"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}
