use serde::{Deserialize, Serialize};

use crate::circuits::{Architecture, Circuit};
use crate::qcore::DensityOp;
use crate::{Error, Result};

/// Which qubits a restricted measurement projects onto |0⟩.
///
/// Masks of equal weight are ordered by their sorted list of projected qubits,
/// so `{0} < {1} < {2}` and `{0,1} < {0,2} < {1,2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mask(Vec<bool>);

impl Mask {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn none(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn full(n: usize) -> Self {
        Self(vec![true; n])
    }

    pub fn from_qubits(n: usize, qubits: &[usize]) -> Result<Self> {
        let mut bits = vec![false; n];
        for &q in qubits {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n });
            }
            bits[q] = true;
        }
        Ok(Self(bits))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Number of projected qubits.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn projected(&self) -> Vec<usize> {
        (0..self.n()).filter(|&q| self.0[q]).collect()
    }

    pub fn untouched(&self) -> Vec<usize> {
        (0..self.n()).filter(|&q| !self.0[q]).collect()
    }

    /// Every mask of weight `w` on `n` qubits, in the order documented on [`Mask`].
    pub fn all_of_weight(n: usize, w: usize) -> Vec<Mask> {
        fn rec(n: usize, start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Mask>) {
            if left == 0 {
                out.push(Mask::from_qubits(n, cur).expect("indices are in range"));
                return;
            }
            for q in start..=n - left {
                cur.push(q);
                rec(n, q + 1, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if w <= n {
            rec(n, 0, w, &mut Vec::new(), &mut out);
        }
        out
    }
}

/// Restricted measurement operator Q = U† Q₀ U, stored as the projection mask of
/// Q₀ and the circuit `prep` implementing U.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasOp {
    pub mask: Mask,
    pub prep: Circuit,
}

impl MeasOp {
    pub fn new(mask: Mask, prep: Circuit) -> Result<Self> {
        if mask.n() != prep.n() {
            return Err(Error::DimensionMismatch { expected: prep.n(), found: mask.n() });
        }
        Ok(Self { mask, prep })
    }

    /// Q₀ alone, with no gates.
    pub fn bare(mask: Mask) -> Self {
        let n = mask.n();
        Self { mask, prep: Circuit::identity(Architecture::empty(n)) }
    }

    pub fn n(&self) -> usize {
        self.mask.n()
    }

    /// Tr(Q) = 2^{n−w}.
    pub fn size(&self) -> f64 {
        (2.0f64).powi((self.n() - self.mask.weight()) as i32)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: MeasOp = serde_json::from_str(s)?;
        MeasOp::new(m.mask, m.prep)
    }
}

/// Returns (Tr(Qρ), Tr(Q)): the preparing circuit is applied to ρ and the masked
/// qubits are projected onto |0⟩.
pub fn eval_measop(q: &MeasOp, rho: &DensityOp) -> Result<(f64, f64)> {
    if q.n() != rho.n() {
        return Err(Error::DimensionMismatch { expected: q.n(), found: rho.n() });
    }
    let evolved = q.prep.apply_density(rho)?;
    let prob = evolved.prob_zero_on(&q.mask.projected()).clamp(0.0, 1.0);
    Ok((prob, q.size()))
}
