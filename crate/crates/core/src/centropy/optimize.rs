//! Maximizing the acceptance probability Tr(Q₀ UρU†) over the gates of a fixed
//! architecture.
//!
//! With ρ = Σᵢ pᵢ|ψᵢ⟩⟨ψᵢ|, the rejection probability 1 − Tr(Q₀UρU†) equals
//! Σᵢ ‖(I − Q₀)U√pᵢ|ψᵢ⟩‖², a sum of squares. Gates are moved along
//! U_j ← exp(i Σ_P θ_{j,P} P) U_j over the 15 traceless two-qubit Paulis P, and
//! the squared residual is minimized by damped Gauss–Newton
//! (Levenberg–Marquardt) using the exact directional derivatives
//! (I − Q₀)U_{>j}(iP)U_{≤j}√pᵢ|ψᵢ⟩.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{eval_measop, Mask, MeasOp};
use crate::circuits::{Architecture, Circuit};
use crate::qcore::{apply_4x4, expm_i_hermitian, haar_su4, qubit_bit, two_qubit_paulis, DensityOp, Mat4};
use crate::seed::{derive_seed, rng_from_seed};
use crate::{Result, C64};

/// Eigen-components of ρ below this weight are dropped from the residual.
const SPECTRAL_CUTOFF: f64 = 1e-13;

/// With a target, starts stop early once this many of them end within
/// `AGREEMENT_TOL` of the best value found and that value still misses the target.
const AGREEMENT_STARTS: usize = 6;
const AGREEMENT_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Independent starts per (architecture, mask); the first starts from identity gates.
    pub restarts: usize,
    /// Damped Gauss–Newton iterations per start.
    pub max_iters: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 32, max_iters: 200 }
    }
}

/// Outcome of [`maximize_acceptance`].
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerRun {
    pub circuit: Circuit,
    /// Tr(Q₀UρU†) evaluated exactly on the returned circuit.
    pub prob: f64,
    /// Index of the start that produced `circuit`.
    pub restart: usize,
    pub iterations: usize,
}

/// Maximizes the acceptance probability of `mask` after a circuit with layout `arch`.
///
/// Starts run in order and stop at the first whose exact probability reaches
/// `target`, or once several starts agree on a best value below it; with no target
/// every start runs and the best is returned. A start's trajectory does not depend
/// on `target`, only where it stops.
pub fn maximize_acceptance(
    rho: &DensityOp,
    arch: &Architecture,
    mask: &Mask,
    cfg: &OptimizerConfig,
    seed: u64,
    target: Option<f64>,
) -> Result<OptimizerRun> {
    let objective = Objective::new(rho, arch, mask);
    let stop_cost = target.map(|t| 0.5 * (1.0 - t).max(0.0)).unwrap_or(0.0);
    let mut best: Option<OptimizerRun> = None;
    let mut finals: Vec<f64> = Vec::new();
    for restart in 0..cfg.restarts.max(1) {
        let init: Vec<Mat4> = if restart == 0 {
            vec![Mat4::identity(); arch.len()]
        } else {
            let mut rng = rng_from_seed(derive_seed(seed, restart as u64));
            (0..arch.len()).map(|_| haar_su4(&mut rng)).collect()
        };
        let (gates, iterations) = objective.descend(init, cfg.max_iters, stop_cost);
        let circuit = Circuit::new(arch.clone(), gates)?;
        let (prob, _) = eval_measop(&MeasOp::new(mask.clone(), circuit.clone())?, rho)?;
        let run = OptimizerRun { circuit, prob, restart, iterations };
        let reached = target.is_some_and(|t| prob >= t);
        if best.as_ref().is_none_or(|b| run.prob > b.prob) {
            best = Some(run);
        }
        if reached || objective.trivial() {
            break;
        }
        finals.push(prob);
        if let (Some(t), Some(b)) = (target, &best) {
            let agreeing = finals.iter().filter(|&&p| b.prob - p <= AGREEMENT_TOL).count();
            if b.prob < t && agreeing >= AGREEMENT_STARTS {
                break;
            }
        }
    }
    Ok(best.expect("at least one start runs"))
}

/// Runs damped Gauss–Newton from `start` until it stalls and returns the result if
/// it improves on `start`.
pub fn polish(rho: &DensityOp, start: &Circuit, mask: &Mask, max_iters: usize) -> Result<OptimizerRun> {
    let (start_prob, _) = eval_measop(&MeasOp::new(mask.clone(), start.clone())?, rho)?;
    let objective = Objective::new(rho, start.arch(), mask);
    let (gates, iterations) = objective.descend(start.gates().to_vec(), max_iters, 0.0);
    let circuit = Circuit::new(start.arch().clone(), gates)?;
    let (prob, _) = eval_measop(&MeasOp::new(mask.clone(), circuit.clone())?, rho)?;
    if prob > start_prob {
        Ok(OptimizerRun { circuit, prob, restart: 0, iterations })
    } else {
        Ok(OptimizerRun { circuit: start.clone(), prob: start_prob, restart: 0, iterations: 0 })
    }
}

struct Objective<'a> {
    n: usize,
    arch: &'a Architecture,
    /// √pᵢ|ψᵢ⟩.
    components: Vec<Vec<C64>>,
    /// Amplitude indices with at least one masked qubit in |1⟩.
    rejected: Vec<usize>,
    generators: Vec<Mat4>,
}

impl<'a> Objective<'a> {
    fn new(rho: &DensityOp, arch: &'a Architecture, mask: &Mask) -> Self {
        let n = rho.n();
        let bits = mask.projected().iter().fold(0usize, |acc, &q| acc | qubit_bit(n, q));
        let rejected = (0..rho.dim()).filter(|i| i & bits != 0).collect();
        let components = rho
            .spectral_states(SPECTRAL_CUTOFF)
            .into_iter()
            .map(|(p, psi)| psi.amps().iter().map(|a| a * p.sqrt()).collect())
            .collect();
        let i = C64::new(0.0, 1.0);
        let generators = two_qubit_paulis().iter().map(|p| p * i).collect();
        Self { n, arch, components, rejected, generators }
    }

    /// Nothing to optimize: no gates, or nothing is projected.
    fn trivial(&self) -> bool {
        self.arch.is_empty() || self.rejected.is_empty()
    }

    fn apply_from(&self, v: &mut [C64], gates: &[Mat4], from: usize) {
        for (&(j, k), u) in self.arch.slots[from..].iter().zip(&gates[from..]) {
            apply_4x4(v, self.n, u, j, k);
        }
    }

    fn residual(&self, gates: &[Mat4]) -> DVector<f64> {
        let mut out = Vec::with_capacity(2 * self.rejected.len() * self.components.len());
        for c in &self.components {
            let mut v = c.clone();
            self.apply_from(&mut v, gates, 0);
            for &i in &self.rejected {
                out.push(v[i].re);
                out.push(v[i].im);
            }
        }
        DVector::from_vec(out)
    }

    fn jacobian(&self, gates: &[Mat4]) -> DMatrix<f64> {
        let rows = 2 * self.rejected.len() * self.components.len();
        let mut jac = DMatrix::zeros(rows, 15 * gates.len());
        for (ci, c) in self.components.iter().enumerate() {
            let row0 = 2 * self.rejected.len() * ci;
            let mut forward = c.clone();
            for (g, (&(j, k), u)) in self.arch.slots.iter().zip(gates).enumerate() {
                apply_4x4(&mut forward, self.n, u, j, k);
                for (p, gen) in self.generators.iter().enumerate() {
                    let mut v = forward.clone();
                    apply_4x4(&mut v, self.n, gen, j, k);
                    self.apply_from(&mut v, gates, g + 1);
                    let col = 15 * g + p;
                    for (r, &i) in self.rejected.iter().enumerate() {
                        jac[(row0 + 2 * r, col)] = v[i].re;
                        jac[(row0 + 2 * r + 1, col)] = v[i].im;
                    }
                }
            }
        }
        jac
    }

    fn step(&self, gates: &[Mat4], theta: &DVector<f64>) -> Vec<Mat4> {
        gates
            .iter()
            .enumerate()
            .map(|(g, u)| {
                let h = two_qubit_paulis()
                    .iter()
                    .enumerate()
                    .fold(Mat4::zeros(), |acc, (p, pm)| acc + pm * C64::new(theta[15 * g + p], 0.0));
                expm_i_hermitian(&h) * u
            })
            .collect()
    }

    /// Levenberg–Marquardt from `gates`; returns the final gates and iteration count.
    fn descend(&self, mut gates: Vec<Mat4>, max_iters: usize, stop_cost: f64) -> (Vec<Mat4>, usize) {
        if self.trivial() {
            return (gates, 0);
        }
        let mut res = self.residual(&gates);
        let mut cost = res.norm_squared();
        let mut lambda = 1e-3;
        let mut stalls = 0;
        let mut iters = 0;
        while iters < max_iters && cost > stop_cost {
            iters += 1;
            let jac = self.jacobian(&gates);
            let grad = jac.transpose() * &res;
            if grad.norm() < 1e-14 {
                break;
            }
            let normal = jac.transpose() * &jac;
            let mut accepted = false;
            while lambda < 1e12 {
                let mut a = normal.clone();
                for d in 0..a.nrows() {
                    a[(d, d)] += lambda * (1.0 + normal[(d, d)]);
                }
                let Some(chol) = a.cholesky() else {
                    lambda *= 10.0;
                    continue;
                };
                let theta = -chol.solve(&grad);
                let trial = self.step(&gates, &theta);
                let trial_res = self.residual(&trial);
                let trial_cost = trial_res.norm_squared();
                if trial_cost < cost {
                    let gain = (cost - trial_cost) / cost.max(f64::MIN_POSITIVE);
                    stalls = if gain < 1e-9 { stalls + 1 } else { 0 };
                    gates = trial;
                    res = trial_res;
                    cost = trial_cost;
                    lambda = (lambda / 3.0).max(1e-12);
                    accepted = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !accepted || stalls >= 3 {
                break;
            }
        }
        (gates, iters)
    }
}
