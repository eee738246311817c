use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::frame::{input_frame, tangent_frame};
use super::state_cap;
use crate::circuits::{brickwork, random_architecture, Architecture, Circuit};
use crate::fuzz::{realize_fuzzy, FuzzModel};
use crate::qcore::{haar_state, haar_su4, Gate2Q, PureState};
use crate::seed::rng_from_seed;
use crate::{Error, Result};

/// Largest gate count accepted by the negentropy-dimension experiment.
pub const MAX_TRIAL_GATES: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimReport {
    pub arch_id: String,
    pub n: usize,
    #[serde(rename = "R")]
    pub slots: usize,
    pub sampled_points: usize,
    pub ranks: Vec<usize>,
    pub gap_ratios: Vec<Option<f64>>,
    /// Largest sampled rank.
    pub dimension: usize,
    pub tol: f64,
    /// dimension = 2·2^n − 1.
    pub saturated: bool,
}

/// One line of the dimension-sweep CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimRow {
    pub arch_id: String,
    pub n: usize,
    #[serde(rename = "R")]
    pub slots: usize,
    pub point: usize,
    pub rank: usize,
    pub tol: f64,
    pub saturated: bool,
}

impl DimReport {
    pub fn rows(&self) -> Vec<DimRow> {
        self.ranks
            .iter()
            .enumerate()
            .map(|(point, &rank)| DimRow {
                arch_id: self.arch_id.clone(),
                n: self.n,
                slots: self.slots,
                point,
                rank,
                tol: self.tol,
                saturated: rank == state_cap(self.n),
            })
            .collect()
    }
}

fn haar_circuit<R: Rng + ?Sized>(arch: Architecture, rng: &mut R) -> Result<Circuit> {
    let gates = (0..arch.len()).map(|_| haar_su4(rng)).collect();
    Circuit::new(arch, gates)
}

/// Max Jacobian rank of the state-contraction map over `points` Haar-random gate
/// assignments, global-phase direction included.
pub fn accessible_dimension<R: Rng + ?Sized>(
    arch: &Architecture,
    input: &PureState,
    points: usize,
    tol: f64,
    rng: &mut R,
) -> Result<DimReport> {
    if points == 0 {
        return Err(Error::InvalidArgument("accessible dimension needs at least one point".into()));
    }
    if input.n() != arch.n {
        return Err(Error::DimensionMismatch { expected: arch.n, found: input.n() });
    }
    let seeds: Vec<u64> = (0..points).map(|_| rng.next_u64()).collect();
    let infos = seeds
        .par_iter()
        .map(|&s| {
            let circ = haar_circuit(arch.clone(), &mut rng_from_seed(s))?;
            Ok(tangent_frame(&circ, input)?.with_phase()?.rank(tol))
        })
        .collect::<Result<Vec<_>>>()?;
    let ranks: Vec<usize> = infos.iter().map(|i| i.rank).collect();
    let dimension = ranks.iter().copied().max().unwrap_or(0);
    Ok(DimReport {
        arch_id: arch.id(),
        n: arch.n,
        slots: arch.len(),
        sampled_points: points,
        gap_ratios: infos.iter().map(|i| i.gap_ratio).collect(),
        ranks,
        dimension,
        tol,
        saturated: dimension == state_cap(arch.n),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneTrial {
    pub n: usize,
    pub layers: usize,
    pub extended_layers: usize,
    pub short_rank: usize,
    pub long_rank: usize,
    pub cap: usize,
    /// The short circuit already reaches the cap; strictness is not tested.
    pub saturated: bool,
    pub strict_increase: bool,
    pub violation: bool,
}

/// Compares the state-space rank of a T-layer brickwork circuit with its
/// (T + n)-layer extension, at one fuzzy realization of Haar-random targets. The
/// short circuit is the prefix of the long one.
pub fn brickwork_monotone_trial<R: Rng + ?Sized>(
    n: usize,
    layers: usize,
    model: &FuzzModel,
    tol: f64,
    rng: &mut R,
) -> Result<MonotoneTrial> {
    if !(3..=6).contains(&n) {
        return Err(Error::InvalidArgument(format!("brickwork trials need 3 <= n <= 6, got {n}")));
    }
    let long_arch = brickwork(n, layers + n, false)?;
    let short_len = brickwork(n, layers, false)?.len();
    let targets: Vec<Gate2Q> = long_arch.slots.iter().map(|&t| Gate2Q { u: haar_su4(rng), targets: t }).collect();
    let record = realize_fuzzy(&targets, model, rng)?;
    let long = Circuit::from_gates(n, &record.realized)?;
    let short = Circuit::from_gates(n, &record.realized[..short_len])?;
    let input = PureState::zero(n);
    let short_rank = tangent_frame(&short, &input)?.with_phase()?.rank(tol).rank;
    let long_rank = tangent_frame(&long, &input)?.with_phase()?.rank(tol).rank;
    let cap = state_cap(n);
    let saturated = short_rank == cap;
    let strict_increase = long_rank > short_rank;
    Ok(MonotoneTrial {
        n,
        layers,
        extended_layers: layers + n,
        short_rank,
        long_rank,
        cap,
        saturated,
        strict_increase,
        violation: !saturated && !strict_increase,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegentropyTrial {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    /// k > log₂(15r), or r = 0.
    pub in_regime: bool,
    pub regime: String,
    /// Max sampled rank with k − 1 input qubits.
    pub lower_rank: usize,
    /// Max sampled rank with k input qubits.
    pub upper_rank: usize,
    pub strict_increase: bool,
    /// Only in-regime trials can violate.
    pub violation: bool,
}

fn in_regime(k: usize, r: usize) -> bool {
    r == 0 || k as f64 > (15.0 * r as f64).log2()
}

fn level_rank(n: usize, k: usize, r: usize, points: usize, tol: f64, seeds: &[u64]) -> Result<usize> {
    let ranks = seeds[..points]
        .par_iter()
        .map(|&s| {
            let mut rng = rng_from_seed(s);
            let mut placement = sample(&mut rng, n, k).into_vec();
            placement.sort_unstable();
            let phi = haar_state(k, &mut rng);
            let arch = random_architecture(n, r, &mut rng)?;
            let circ = haar_circuit(arch, &mut rng)?;
            Ok(input_frame(&circ, &phi, &placement)?.rank(tol).rank)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ranks.into_iter().max().unwrap_or(0))
}

/// Compares the dimension of the states reachable from k-qubit inputs (padded
/// with |0⟩ on random qubits) through a random r-gate architecture with the same
/// quantity for k − 1 input qubits.
pub fn negentropy_dimension_trial<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    r: usize,
    points: usize,
    tol: f64,
    rng: &mut R,
) -> Result<NegentropyTrial> {
    if n < 2 || k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= n and n >= 2, got n = {n}, k = {k}")));
    }
    if r > MAX_TRIAL_GATES {
        return Err(Error::SearchBudget { what: format!("r = {r} exceeds {MAX_TRIAL_GATES} gates") });
    }
    if points == 0 {
        return Err(Error::InvalidArgument("negentropy dimension needs at least one point".into()));
    }
    let lower_seeds: Vec<u64> = (0..points).map(|_| rng.next_u64()).collect();
    let upper_seeds: Vec<u64> = (0..points).map(|_| rng.next_u64()).collect();
    let lower_rank = level_rank(n, k - 1, r, points, tol, &lower_seeds)?;
    let upper_rank = level_rank(n, k, r, points, tol, &upper_seeds)?;
    let regime = in_regime(k, r);
    let strict_increase = upper_rank > lower_rank;
    Ok(NegentropyTrial {
        n,
        k,
        r,
        in_regime: regime,
        regime: if regime { "in-regime" } else { "out-of-regime" }.to_string(),
        lower_rank,
        upper_rank,
        strict_increase,
        violation: regime && !strict_increase,
    })
}
