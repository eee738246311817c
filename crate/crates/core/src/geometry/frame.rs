use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::circuits::{contract, Circuit};
use crate::qcore::{apply_4x4, expm_i_hermitian, qubit_bit, two_qubit_paulis, Mat4, PureState};
use crate::{Error, Result, C64};

/// Real-embedded tangent vectors of a contraction map at one point.
#[derive(Clone, Debug)]
pub struct TangentFrame {
    pub point: Circuit,
    pub input: PureState,
    pub arch_id: String,
    /// (2·2^n) × columns; each column is [Re v; Im v].
    pub columns: DMatrix<f64>,
    /// How many leading columns are input-sphere directions.
    pub input_dirs: usize,
}

impl TangentFrame {
    pub fn rank(&self, tol: f64) -> RankInfo {
        numerical_rank(&self.columns, tol)
    }

    /// Adds the global-phase direction i·(output state).
    pub fn with_phase(mut self) -> Result<Self> {
        let out = contract(&self.point, &self.input)?;
        let phase: Vec<C64> = out.amps().iter().map(|a| a * C64::i()).collect();
        let col = embed(&phase);
        let c = self.columns.ncols();
        self.columns = self.columns.insert_column(c, 0.0);
        for (r, x) in col.into_iter().enumerate() {
            self.columns[(r, c)] = x;
        }
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankInfo {
    pub rank: usize,
    /// σ_rank / σ_{rank+1}; `None` when no singular value falls below the cutoff.
    pub gap_ratio: Option<f64>,
    pub singular_values: Vec<f64>,
}

/// Number of singular values above `tol·σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> RankInfo {
    if m.is_empty() {
        return RankInfo { rank: 0, gap_ratio: None, singular_values: Vec::new() };
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let cutoff = tol * sv[0];
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    let gap_ratio = match (rank, sv.get(rank)) {
        (0, _) | (_, None) => None,
        (r, Some(&next)) => Some(sv[r - 1] / next.max(f64::MIN_POSITIVE)),
    };
    RankInfo { rank, gap_ratio, singular_values: sv }
}

fn embed(v: &[C64]) -> Vec<f64> {
    v.iter().map(|a| a.re).chain(v.iter().map(|a| a.im)).collect()
}

fn frame_matrix(cols: &[Vec<f64>], rows: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r])
}

fn gate_columns(circ: &Circuit, input: &PureState) -> Result<Vec<Vec<f64>>> {
    if input.n() != circ.n() {
        return Err(Error::DimensionMismatch { expected: circ.n(), found: input.n() });
    }
    let n = circ.n();
    let slots = &circ.arch().slots;
    let paulis = two_qubit_paulis();
    let mut cols = Vec::with_capacity(15 * slots.len());
    let mut forward = input.amps().to_vec();
    for (j, (&(a, b), u)) in slots.iter().zip(circ.gates()).enumerate() {
        apply_4x4(&mut forward, n, u, a, b);
        for p in paulis.iter() {
            let ip: Mat4 = p * C64::i();
            let mut v = forward.clone();
            apply_4x4(&mut v, n, &ip, a, b);
            for (&(c, d), w) in slots.iter().zip(circ.gates()).skip(j + 1) {
                apply_4x4(&mut v, n, w, c, d);
            }
            cols.push(embed(&v));
        }
    }
    Ok(cols)
}

/// Columns (U_R…U_{j+1})(iP U_j…U_1)|input⟩ for every slot j and every
/// two-qubit Pauli P on that slot.
pub fn tangent_frame(circ: &Circuit, input: &PureState) -> Result<TangentFrame> {
    let cols = gate_columns(circ, input)?;
    Ok(TangentFrame {
        point: circ.clone(),
        input: input.clone(),
        arch_id: circ.arch().id(),
        columns: frame_matrix(&cols, 2 * input.dim()),
        input_dirs: 0,
    })
}

/// Frame of the map (φ, gates) ↦ U_R…U_1 (φ on `placement`, |0⟩ elsewhere), with φ
/// ranging over the unit sphere of k-qubit states: 2·2^k − 1 sphere directions
/// followed by the 15R gate directions.
pub fn input_frame(circ: &Circuit, phi: &PureState, placement: &[usize]) -> Result<TangentFrame> {
    let n = circ.n();
    let k = phi.n();
    if placement.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: placement.len() });
    }
    if let Some(&q) = placement.iter().find(|&&q| q >= n) {
        return Err(Error::QubitOutOfRange { qubit: q, n });
    }
    let place = |amps: &[C64]| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); 1 << n];
        for (a, &amp) in amps.iter().enumerate() {
            let idx = placement.iter().enumerate().fold(0, |acc, (pos, &q)| {
                if a & (1 << (k - 1 - pos)) != 0 {
                    acc | qubit_bit(n, q)
                } else {
                    acc
                }
            });
            out[idx] = amp;
        }
        out
    };
    let input = PureState::new(place(phi.amps()))?;
    let run = |v: Vec<C64>| -> Vec<C64> {
        let mut v = v;
        for (&(a, b), u) in circ.arch().slots.iter().zip(circ.gates()) {
            apply_4x4(&mut v, n, u, a, b);
        }
        v
    };

    let mut cols = Vec::new();
    for t in sphere_tangents(phi.amps()) {
        cols.push(embed(&run(place(&t))));
    }
    let input_dirs = cols.len();
    cols.extend(gate_columns(circ, &input)?);
    Ok(TangentFrame {
        point: circ.clone(),
        input,
        arch_id: circ.arch().id(),
        columns: frame_matrix(&cols, 2 << n),
        input_dirs,
    })
}

/// Orthonormal basis of the real tangent space of the unit sphere at `phi`,
/// from the Householder reflection sending phi to a coordinate axis.
fn sphere_tangents(phi: &[C64]) -> Vec<Vec<C64>> {
    let d = phi.len();
    let x: Vec<f64> = embed(phi);
    let mut v = x.clone();
    let s = if x[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += s;
    let vv: f64 = v.iter().map(|a| a * a).sum();
    (1..2 * d)
        .map(|j| {
            // H e_j = e_j − 2 v v_j / (vᵀv)
            let col: Vec<f64> = (0..2 * d).map(|i| f64::from(u8::from(i == j)) - 2.0 * v[i] * v[j] / vv).collect();
            (0..d).map(|i| C64::new(col[i], col[i + d])).collect()
        })
        .collect()
}

/// Central-difference estimate of the gate columns of [`tangent_frame`], moving
/// each gate along e^{itP}U_j.
pub fn finite_difference_frame(circ: &Circuit, input: &PureState, h: f64) -> Result<DMatrix<f64>> {
    let paulis = two_qubit_paulis();
    let mut cols = Vec::with_capacity(15 * circ.len());
    for j in 0..circ.len() {
        for p in paulis.iter() {
            let shifted = |t: f64| -> Result<Vec<f64>> {
                let mut gates = circ.gates().to_vec();
                gates[j] = expm_i_hermitian(&(p * C64::new(t, 0.0))) * gates[j];
                let c = Circuit::new(circ.arch().clone(), gates)?;
                Ok(embed(contract(&c, input)?.amps()))
            };
            let (plus, minus) = (shifted(h)?, shifted(-h)?);
            cols.push(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect());
        }
    }
    Ok(frame_matrix(&cols, 2 * input.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{brickwork, Architecture};
    use crate::qcore::{haar_state, haar_su4};
    use crate::seed::rng_from_seed;

    fn haar_circuit(arch: Architecture, seed: u64) -> Circuit {
        let mut rng = rng_from_seed(seed);
        let gates = (0..arch.len()).map(|_| haar_su4(&mut rng)).collect();
        Circuit::new(arch, gates).unwrap()
    }

    #[test]
    fn single_gate_rank_seven() {
        let circ = haar_circuit(Architecture::new(2, vec![(0, 1)]).unwrap(), 1);
        let frame = tangent_frame(&circ, &PureState::zero(2)).unwrap();
        assert_eq!(frame.columns.shape(), (8, 15));
        let info = frame.with_phase().unwrap().rank(1e-8);
        assert_eq!(info.rank, 7);
        assert!(info.gap_ratio.unwrap() > 1e3);
    }

    #[test]
    fn duplicate_identity_layer_keeps_rank() {
        let arch = Architecture::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let base = haar_circuit(arch, 2);
        let mut slots = base.arch().slots.clone();
        slots.push((1, 2));
        let mut gates = base.gates().to_vec();
        gates.push(Mat4::identity());
        let ext = Circuit::new(Architecture::new(3, slots).unwrap(), gates).unwrap();
        let input = PureState::zero(3);
        let r0 = tangent_frame(&base, &input).unwrap().rank(1e-8).rank;
        let r1 = tangent_frame(&ext, &input).unwrap().rank(1e-8).rank;
        assert_eq!(r0, r1);
    }

    #[test]
    fn finite_differences_match() {
        let circ = haar_circuit(brickwork(3, 2, false).unwrap(), 3);
        let input = PureState::zero(3);
        let analytic = tangent_frame(&circ, &input).unwrap().columns;
        for h in [1e-4, 1e-5] {
            let fd = finite_difference_frame(&circ, &input, h).unwrap();
            let err = (&analytic - fd).abs().max();
            assert!(err <= 10.0 * h, "h = {h}: {err}");
        }
    }

    #[test]
    fn sphere_tangents_are_orthonormal_and_tangent() {
        let phi = haar_state(2, &mut rng_from_seed(4));
        let t = sphere_tangents(phi.amps());
        assert_eq!(t.len(), 7);
        let x = embed(phi.amps());
        let e: Vec<Vec<f64>> = t.iter().map(|v| embed(v)).collect();
        for (i, a) in e.iter().enumerate() {
            let radial: f64 = a.iter().zip(&x).map(|(p, q)| p * q).sum();
            assert!(radial.abs() < 1e-12);
            for (j, b) in e.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
                assert!((dot - f64::from(u8::from(i == j))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn input_frame_without_gates_spans_sphere() {
        let phi = haar_state(2, &mut rng_from_seed(5));
        let circ = Circuit::identity(Architecture::empty(4));
        let frame = input_frame(&circ, &phi, &[1, 3]).unwrap();
        assert_eq!(frame.input_dirs, 7);
        assert_eq!(frame.rank(1e-8).rank, 7);
    }
}
