use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::optimize::{maximize_acceptance, polish, OptimizerConfig};
use super::{check_eta, eval_measop, Mask, MeasOp};
use crate::circuits::{brickwork, enumerate_architectures, random_architecture, Architecture};
use crate::qcore::DensityOp;
use crate::seed::{derive_seed_path, rng_from_seed};
use crate::tolerance::effective_eta;
use crate::{Result, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SearchMode {
    /// Every architecture with at most `r` gates (up to commuting slots).
    Exhaustive,
    /// A brickwork prefix plus `architectures` random layouts of exactly `r` gates.
    /// The result is an upper bound on the entropy.
    Optimized { architectures: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub mode: SearchMode,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { mode: SearchMode::Exhaustive, optimizer: OptimizerConfig::default(), seed: 0 }
    }
}

impl SearchConfig {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.optimizer.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResultKind {
    Exhaustive,
    OptimizedUpperBound,
}

/// Complexity entropy together with a witness that can be re-checked independently.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEntropy {
    /// n − (projected qubits of the witness); an integer in [0, n].
    pub value: usize,
    pub witness: MeasOp,
    /// Tr(Qρ) of the witness.
    pub achieved_prob: f64,
    /// η actually enforced (η = 1 is replaced by 1 − 1e-9).
    pub eta: f64,
    pub kind: ResultKind,
}

impl ComplexityEntropy {
    pub fn negentropy(&self) -> usize {
        self.witness.n() - self.value
    }
}

/// min over Q ∈ M_r with Tr(Qρ) ≥ η of log₂ Tr(Q).
///
/// Masks are scanned from the most projected qubits down; the first (mask,
/// architecture) pair whose optimized acceptance clears η decides the value, with
/// ties going to the earliest mask and architecture. The witness is always
/// feasible; a missed optimum can only raise the reported entropy.
pub fn complexity_entropy(rho: &DensityOp, r: usize, eta: f64, search: &SearchConfig) -> Result<ComplexityEntropy> {
    check_eta(eta)?;
    let n = rho.n();
    let eta_used = effective_eta(eta);
    let threshold = eta_used - Tolerances::DEFAULT.eta_slack;
    let (archs, kind) = candidate_architectures(n, r, search)?;
    // Any Q with Tr(Q) = 2^{n−w} accepts ρ with probability at most the sum of the
    // 2^{n−w} largest eigenvalues.
    let mut eigenvalues = rho.eigenvalues();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));

    for w in (1..=n).rev() {
        let ceiling: f64 = eigenvalues.iter().take(1 << (n - w)).sum();
        if ceiling < threshold - Tolerances::DEFAULT.construction {
            continue;
        }
        let mut combos: Vec<(Mask, &Architecture)> = Vec::new();
        for mask in Mask::all_of_weight(n, w) {
            for arch in &archs {
                if kind == ResultKind::OptimizedUpperBound || all_gates_relevant(arch, &mask) {
                    combos.push((mask.clone(), arch));
                }
            }
        }
        let found = combos
            .par_iter()
            .map(|(mask, arch)| -> Result<Option<(MeasOp, f64)>> {
                let (circuit, prob) = if arch.is_empty() {
                    let q = MeasOp::bare(mask.clone());
                    let (p, _) = eval_measop(&q, rho)?;
                    (q.prep, p)
                } else {
                    let seed = derive_seed_path(search.seed, &[arch_key(arch), mask_key(mask)]);
                    let run = maximize_acceptance(rho, arch, mask, &search.optimizer, seed, Some(threshold))?;
                    (run.circuit, run.prob)
                };
                Ok((prob >= threshold).then(|| (MeasOp { mask: mask.clone(), prep: circuit }, prob)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .next();
        if let Some((witness, _)) = found {
            let refined = polish(rho, &witness.prep, &witness.mask, search.optimizer.max_iters)?;
            let witness = MeasOp { mask: witness.mask, prep: refined.circuit };
            return Ok(ComplexityEntropy { value: n - w, witness, achieved_prob: refined.prob, eta: eta_used, kind });
        }
    }
    Ok(ComplexityEntropy { value: n, witness: MeasOp::bare(Mask::none(n)), achieved_prob: 1.0, eta: eta_used, kind })
}

/// n − H_c^{r,η}(ρ).
pub fn complexity_negentropy(rho: &DensityOp, r: usize, eta: f64, search: &SearchConfig) -> Result<usize> {
    Ok(complexity_entropy(rho, r, eta, search)?.negentropy())
}

fn candidate_architectures(n: usize, r: usize, search: &SearchConfig) -> Result<(Vec<Architecture>, ResultKind)> {
    if n < 2 || r == 0 {
        return Ok((vec![Architecture::empty(n)], ResultKind::Exhaustive));
    }
    match search.mode {
        SearchMode::Exhaustive => Ok((enumerate_architectures(n, r)?, ResultKind::Exhaustive)),
        SearchMode::Optimized { architectures } => {
            let layers = r.div_ceil((n / 2).max(1));
            let mut bw = brickwork(n, layers, true)?;
            bw.slots.truncate(r);
            let mut out = vec![Architecture::empty(n), bw];
            let mut rng = rng_from_seed(derive_seed_path(search.seed, &[0xa4c8, r as u64]));
            for _ in 0..architectures {
                out.push(random_architecture(n, r, &mut rng)?);
            }
            Ok((out, ResultKind::OptimizedUpperBound))
        }
    }
}

/// False when some gate lies outside the backward light cone of the projected
/// qubits; dropping it gives a shorter architecture with the same reach, which the
/// exhaustive enumeration lists separately.
fn all_gates_relevant(arch: &Architecture, mask: &Mask) -> bool {
    let mut cone = mask.bits().to_vec();
    for &(a, b) in arch.slots.iter().rev() {
        if !(cone[a] || cone[b]) {
            return false;
        }
        cone[a] = true;
        cone[b] = true;
    }
    true
}

fn arch_key(arch: &Architecture) -> u64 {
    let flat: Vec<u64> = arch.slots.iter().flat_map(|&(j, k)| [j as u64, k as u64]).collect();
    derive_seed_path(arch.n as u64, &flat)
}

fn mask_key(mask: &Mask) -> u64 {
    mask.bits().iter().enumerate().fold(0, |acc, (q, &b)| if b { acc | 1 << q } else { acc })
}

/// Re-checks a witness: returns Tr(Qρ) and the entropy value it certifies.
pub fn verify_witness(witness: &MeasOp, rho: &DensityOp) -> Result<(f64, usize)> {
    let (prob, size) = eval_measop(witness, rho)?;
    Ok((prob, size.log2().round() as usize))
}
