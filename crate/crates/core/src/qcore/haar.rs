use nalgebra::Matrix4;
use rand::Rng;
use rand_distr::StandardNormal;

use super::gate::{project_to_su4, Mat4};
use super::PureState;
use crate::C64;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random element of SU(4).
///
/// QR of a complex Ginibre matrix, with the phases of R's diagonal moved into Q,
/// followed by division by a fourth root of the determinant.
pub fn haar_su4<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let g = Matrix4::from_fn(|_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for c in 0..4 {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for row in 0..4 {
            q[(row, c)] *= phase;
        }
    }
    project_to_su4(&q)
}

/// Haar-random pure state on `n` qubits.
pub fn haar_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState {
    let amps: Vec<C64> = (0..1usize << n).map(|_| gaussian(rng)).collect();
    PureState::normalized(amps).expect("gaussian vector is nonzero almost surely")
}
