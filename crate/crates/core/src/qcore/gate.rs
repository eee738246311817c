use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use super::qubit_bit;
use crate::{Error, Result, Tolerances, C64};

pub type Mat4 = Matrix4<C64>;

/// A two-qubit special-unitary gate placed on an ordered qubit pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate2Q {
    #[serde(with = "mat4_serde")]
    pub u: Mat4,
    pub targets: (usize, usize),
}

impl Gate2Q {
    /// Builds a gate from an SU(4) matrix, rejecting non-unitary input or det ≠ 1.
    pub fn new(u: Mat4, targets: (usize, usize)) -> Result<Self> {
        if targets.0 == targets.1 {
            return Err(Error::EqualTargets(targets.0));
        }
        let tol = Tolerances::DEFAULT.unitarity;
        let dev = unitarity_deviation(&u);
        if dev > tol {
            return Err(Error::NotUnitary(dev));
        }
        let det_dev = (u.determinant() - C64::new(1.0, 0.0)).norm();
        if det_dev > tol {
            return Err(Error::InvalidArgument(format!("gate determinant deviates from 1 by {det_dev:.3e}")));
        }
        Ok(Self { u, targets })
    }

    /// Builds a gate from any unitary, removing the global phase so that det = 1.
    pub fn from_unitary(u: Mat4, targets: (usize, usize)) -> Result<Self> {
        Self::new(project_to_su4(&u), targets)
    }

    pub fn identity(targets: (usize, usize)) -> Self {
        Self { u: Mat4::identity(), targets }
    }

    pub fn dagger(&self) -> Self {
        Self { u: self.u.adjoint(), targets: self.targets }
    }

    /// Checks the targets against an `n`-qubit register.
    pub fn check_targets(&self, n: usize) -> Result<()> {
        check_pair(self.targets, n)
    }
}

pub(crate) fn check_pair((j, k): (usize, usize), n: usize) -> Result<()> {
    if j == k {
        return Err(Error::EqualTargets(j));
    }
    for q in [j, k] {
        if q >= n {
            return Err(Error::QubitOutOfRange { qubit: q, n });
        }
    }
    Ok(())
}

/// max |(u†u − I)_{ab}|.
pub(crate) fn unitarity_deviation(u: &Mat4) -> f64 {
    (u.adjoint() * u - Mat4::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Divides out a fourth root of the determinant.
pub(crate) fn project_to_su4(u: &Mat4) -> Mat4 {
    let det = u.determinant();
    let root = C64::from_polar(det.norm().powf(0.25), det.arg() / 4.0);
    u / root
}

/// Applies a 4×4 matrix to qubits `(j, k)` of an amplitude vector in place.
///
/// Targets are assumed valid; callers check them once per circuit.
pub fn apply_4x4(amps: &mut [C64], n: usize, u: &Mat4, j: usize, k: usize) {
    let bj = qubit_bit(n, j);
    let bk = qubit_bit(n, k);
    for base in 0..amps.len() {
        if base & (bj | bk) != 0 {
            continue;
        }
        let idx = [base, base | bk, base | bj, base | bj | bk];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &i) in idx.iter().enumerate() {
            amps[i] = u[(r, 0)] * v[0] + u[(r, 1)] * v[1] + u[(r, 2)] * v[2] + u[(r, 3)] * v[3];
        }
    }
}

/// Row-major `[re, im]` pairs.
pub(crate) mod mat4_serde {
    use super::Mat4;
    use crate::C64;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Mat4, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<[f64; 2]> =
            (0..4).flat_map(|r| (0..4).map(move |c| (r, c))).map(|(r, c)| [m[(r, c)].re, m[(r, c)].im]).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat4, D::Error> {
        let v: Vec<[f64; 2]> = Vec::deserialize(d)?;
        if v.len() != 16 {
            return Err(D::Error::custom(format!("expected 16 entries, found {}", v.len())));
        }
        Ok(Mat4::from_fn(|r, c| {
            let [re, im] = v[4 * r + c];
            C64::new(re, im)
        }))
    }
}
