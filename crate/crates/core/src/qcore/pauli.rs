use std::sync::OnceLock;

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use super::gate::Mat4;
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Matrix2<C64> {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::I => Matrix2::new(l, o, o, l),
            Pauli::X => Matrix2::new(o, l, l, o),
            Pauli::Y => Matrix2::new(o, -i, i, o),
            Pauli::Z => Matrix2::new(l, o, o, -l),
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidArgument(format!("not a Pauli letter: {other:?}"))),
        }
    }
}

/// Tensor product of single-qubit Paulis, letter `q` acting on qubit `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    pub letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { letters }
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars().map(Pauli::from_char).collect::<Result<Vec<_>>>().map(Self::new)
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    /// Dense 2^n × 2^n matrix.
    pub fn matrix(&self) -> DMatrix<C64> {
        self.letters.iter().fold(DMatrix::from_element(1, 1, C64::new(1.0, 0.0)), |acc, p| {
            let m = p.matrix();
            acc.kronecker(&DMatrix::from_fn(2, 2, |r, c| m[(r, c)]))
        })
    }
}

/// The 15 traceless two-qubit Pauli products P_a ⊗ P_b, (a, b) ≠ (I, I),
/// in the order (I,X), (I,Y), (I,Z), (X,I), …, (Z,Z).
pub fn two_qubit_paulis() -> &'static [Mat4; 15] {
    static BASIS: OnceLock<[Mat4; 15]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut out = [Mat4::zeros(); 15];
        let mut slot = 0;
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                if a == Pauli::I && b == Pauli::I {
                    continue;
                }
                let (ma, mb) = (a.matrix(), b.matrix());
                out[slot] = Mat4::from_fn(|r, c| ma[(r / 2, c / 2)] * mb[(r % 2, c % 2)]);
                slot += 1;
            }
        }
        out
    })
}
