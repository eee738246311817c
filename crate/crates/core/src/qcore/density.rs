use nalgebra::DMatrix;

use super::gate::{apply_4x4, check_pair, Gate2Q, Mat4};
use super::linalg::hermitian_eigen;
use super::state::qubits_for_len;
use super::{qubit_bit, PureState};
use crate::{Error, Result, Tolerances, C64};

/// Hermitian, positive semidefinite, unit-trace operator on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOp {
    n: usize,
    mat: DMatrix<C64>,
}

impl DensityOp {
    /// Validates Hermiticity, trace and positivity within the construction tolerance.
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { expected: mat.nrows(), found: mat.ncols() });
        }
        let n = qubits_for_len(mat.nrows())?;
        let tol = Tolerances::DEFAULT.construction;
        let herm = (&mat - mat.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > tol {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = mat.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let (vals, _) = hermitian_eigen(&mat);
        if vals[0] < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {:.3e}", vals[0])));
        }
        Ok(Self { n, mat })
    }

    /// Mixture Σ p_i |ψ_i⟩⟨ψ_i|; weights are renormalized.
    pub fn mixture(parts: &[(f64, PureState)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let d = first.1.dim();
        let total: f64 = parts.iter().map(|(p, _)| p).sum();
        if total <= 0.0 || parts.iter().any(|(p, _)| *p < 0.0) {
            return Err(Error::InvalidArgument("mixture weights must be nonnegative".into()));
        }
        let mut mat = DMatrix::zeros(d, d);
        for (p, psi) in parts {
            if psi.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: psi.dim() });
            }
            let a = psi.amps();
            for c in 0..d {
                for r in 0..d {
                    mat[(r, c)] += a[r] * a[c].conj() * (p / total);
                }
            }
        }
        Ok(Self { n: first.1.n(), mat })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let d = 1usize << n;
        let mat = DMatrix::from_diagonal_element(d, d, C64::new(1.0 / d as f64, 0.0));
        Self { n, mat }
    }

    pub(crate) fn from_matrix_unchecked(n: usize, mat: DMatrix<C64>) -> Self {
        Self { n, mat }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.mat).0
    }

    /// Eigenpairs (weight, state) with weight above `cutoff`, largest first.
    pub fn spectral_states(&self, cutoff: f64) -> Vec<(f64, PureState)> {
        let (vals, vecs) = hermitian_eigen(&self.mat);
        (0..vals.len())
            .rev()
            .filter(|&i| vals[i] > cutoff)
            .map(|i| {
                let amps = vecs.column(i).iter().copied().collect();
                (vals[i], PureState::from_parts_unchecked(self.n, amps))
            })
            .collect()
    }

    /// U ρ U† with the gate embedded at its targets.
    pub fn apply_gate(&self, gate: &Gate2Q) -> Result<DensityOp> {
        self.conjugate_by(&gate.u, gate.targets)
    }

    pub(crate) fn conjugate_by(&self, u: &Mat4, targets: (usize, usize)) -> Result<DensityOp> {
        check_pair(targets, self.n)?;
        // (U (Uρ)†)† = U ρ U†
        let left = apply_columns(&self.mat, self.n, u, targets);
        let right = apply_columns(&left.adjoint(), self.n, u, targets);
        Ok(Self { n: self.n, mat: right.adjoint() })
    }

    /// Tr(Q₀ ρ) for Q₀ projecting every qubit in `mask` onto |0⟩.
    pub fn prob_zero_on(&self, mask: &[usize]) -> f64 {
        let bits = mask.iter().fold(0usize, |acc, &q| acc | qubit_bit(self.n, q));
        (0..self.dim()).filter(|i| i & bits == 0).map(|i| self.mat[(i, i)].re).sum()
    }

    /// Reduced state on `keep`, in ascending qubit order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOp> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&q) = keep.iter().find(|&&q| q >= self.n) {
            return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
        }
        let traced: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let k = keep.len();
        let spread = |sub: usize, qubits: &[usize]| -> usize {
            qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
                if sub & (1 << (qubits.len() - 1 - pos)) != 0 {
                    acc | qubit_bit(self.n, q)
                } else {
                    acc
                }
            })
        };
        let kept_idx: Vec<usize> = (0..1 << k).map(|a| spread(a, &keep)).collect();
        let traced_idx: Vec<usize> = (0..1 << traced.len()).map(|t| spread(t, &traced)).collect();
        let mat = DMatrix::from_fn(1 << k, 1 << k, |a, b| {
            traced_idx.iter().map(|&t| self.mat[(kept_idx[a] | t, kept_idx[b] | t)]).sum()
        });
        Ok(Self { n: k, mat })
    }

    /// `self ⊗ other`, self on the leading qubits.
    pub fn tensor(&self, other: &DensityOp) -> DensityOp {
        Self { n: self.n + other.n, mat: self.mat.kronecker(&other.mat) }
    }

    /// Relabels qubits: qubit `q` of `self` becomes qubit `perm[q]` of the result.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<DensityOp> {
        let n = self.n;
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: perm.len() });
        }
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        let map = |i: usize| -> usize {
            (0..n).fold(0, |acc, q| if i & qubit_bit(n, q) != 0 { acc | qubit_bit(n, perm[q]) } else { acc })
        };
        let idx: Vec<usize> = (0..self.dim()).map(map).collect();
        let mut mat = DMatrix::zeros(self.dim(), self.dim());
        for c in 0..self.dim() {
            for r in 0..self.dim() {
                mat[(idx[r], idx[c])] = self.mat[(r, c)];
            }
        }
        Ok(Self { n, mat })
    }

    pub fn trace_distance(&self, other: &DensityOp) -> Result<f64> {
        trace_distance(self, other)
    }
}

fn apply_columns(m: &DMatrix<C64>, n: usize, u: &Mat4, (j, k): (usize, usize)) -> DMatrix<C64> {
    let mut out = m.clone();
    for mut col in out.column_iter_mut() {
        apply_4x4(col.as_mut_slice(), n, u, j, k);
    }
    out
}

/// T(a, b) = ½‖a − b‖₁.
pub fn trace_distance(a: &DensityOp, b: &DensityOp) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let (vals, _) = hermitian_eigen(&(&a.mat - &b.mat));
    Ok((0.5 * vals.iter().map(|v| v.abs()).sum::<f64>()).clamp(0.0, 1.0))
}

/// ⟨ψ|ρ|ψ⟩.
pub fn pure_overlap(rho: &DensityOp, psi: &PureState) -> Result<f64> {
    if rho.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: psi.dim() });
    }
    let a = psi.amps();
    let v = &rho.mat * nalgebra::DVector::from_column_slice(a);
    let val: C64 = a.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
    Ok(val.re.clamp(0.0, 1.0))
}
