use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use unclab::circuits::{contract, random_architecture, Circuit};
use unclab::fuzz::{realize_fuzzy, FuzzModel};
use unclab::qcore::{
    haar_state, haar_su4, hermitian_eigen, pure_overlap, trace_distance, DensityOp, Gate2Q, PureState,
};
use unclab::seed::{rng_from_seed, Rng as SeededRng};
use unclab::C64;

fn random_density(n: usize, rng: &mut SeededRng) -> DensityOp {
    let parts: Vec<(f64, PureState)> = (0..3).map(|_| (rng.random::<f64>() + 0.01, haar_state(n, rng))).collect();
    let total: f64 = parts.iter().map(|p| p.0).sum();
    DensityOp::mixture(&parts.into_iter().map(|(w, s)| (w / total, s)).collect::<Vec<_>>()).unwrap()
}

fn random_gate(n: usize, rng: &mut SeededRng) -> Gate2Q {
    let a = rng.random_range(0..n);
    let b = (a + rng.random_range(1..n)) % n;
    Gate2Q { u: haar_su4(rng), targets: (a, b) }
}

#[test]
fn gates_preserve_norm() {
    let mut rng = rng_from_seed(1);
    let mut state = haar_state(4, &mut rng);
    for _ in 0..10_000 {
        state = state.apply_gate(&random_gate(4, &mut rng)).unwrap();
    }
    assert!((state.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn trace_distance_is_a_metric() {
    let mut rng = rng_from_seed(2);
    for _ in 0..1000 {
        let (a, b, c) = (random_density(2, &mut rng), random_density(2, &mut rng), random_density(2, &mut rng));
        let (ab, bc, ac) =
            (trace_distance(&a, &b).unwrap(), trace_distance(&b, &c).unwrap(), trace_distance(&a, &c).unwrap());
        assert!(ac <= ab + bc + 1e-12);
        assert!((ab - trace_distance(&b, &a).unwrap()).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&ab));
    }
}

#[test]
fn trace_distance_is_unitarily_invariant() {
    let mut rng = rng_from_seed(3);
    for _ in 0..200 {
        let (a, b) = (random_density(3, &mut rng), random_density(3, &mut rng));
        let g = random_gate(3, &mut rng);
        let before = trace_distance(&a, &b).unwrap();
        let after = trace_distance(&a.apply_gate(&g).unwrap(), &b.apply_gate(&g).unwrap()).unwrap();
        assert!((before - after).abs() < 1e-10);
    }
}

/// T(σ, γ) ≥ Tr(Λγ) − Tr(Λσ) for every 0 ≤ Λ ≤ I.
#[test]
fn trace_distance_bounds_measurement_bias() {
    let mut rng = rng_from_seed(4);
    for _ in 0..500 {
        let (sigma, gamma) = (random_density(2, &mut rng), random_density(2, &mut rng));
        // Λ = V diag(λ) V† with λ ∈ [0, 1].
        let (_, v) = hermitian_eigen(random_density(2, &mut rng).matrix());
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(4, |_, _| C64::new(rng.random::<f64>(), 0.0)));
        let lambda = &v * diag * v.adjoint();
        let bias = (&lambda * gamma.matrix()).trace().re - (&lambda * sigma.matrix()).trace().re;
        assert!(trace_distance(&sigma, &gamma).unwrap() >= bias - 1e-12);
    }
}

#[test]
fn pure_distance_matches_fidelity() {
    let mut rng = rng_from_seed(5);
    for _ in 0..500 {
        let (a, b) = (haar_state(3, &mut rng), haar_state(3, &mut rng));
        let f = pure_overlap(&a.to_density(), &b).unwrap();
        let t = trace_distance(&a.to_density(), &b.to_density()).unwrap();
        assert!(t <= (1.0 - f).sqrt() + 1e-10);
        assert!((t - (1.0 - f).sqrt()).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// T(exact, fuzzy) ≤ rε for random circuits, inputs and either sampler. The
    /// rejection sampler only accepts at a usable rate for large ε.
    #[test]
    fn fuzzy_composition_bound(seed in any::<u64>(), r in 0usize..=10, eps in 0.001f64..0.2, haar_ball in any::<bool>()) {
        let eps = if haar_ball { 1.8 + eps } else { eps };
        let mut rng = rng_from_seed(seed);
        let n = 3;
        let arch = random_architecture(n, r, &mut rng).unwrap();
        let targets: Vec<Gate2Q> = arch.slots.iter().map(|&t| Gate2Q { u: haar_su4(&mut rng), targets: t }).collect();
        let model = if haar_ball { FuzzModel::haar_ball(eps) } else { FuzzModel::pauli(eps) };
        let omega = haar_state(n, &mut rng);
        let rec = realize_fuzzy(&targets, &model, &mut rng).unwrap();
        prop_assert!(rec.max_deviation() <= eps + 1e-10);
        let exact = contract(&Circuit::from_gates(n, &targets).unwrap(), &omega).unwrap().to_density();
        let fuzzy = contract(&Circuit::from_gates(n, &rec.realized).unwrap(), &omega).unwrap().to_density();
        prop_assert!(trace_distance(&exact, &fuzzy).unwrap() <= r as f64 * eps + 1e-10);
    }

    #[test]
    fn partial_trace_keeps_unit_trace(seed in any::<u64>(), keep in prop::sample::subsequence(vec![0usize, 1, 2, 3], 1..=4)) {
        let rho = random_density(4, &mut rng_from_seed(seed));
        let reduced = rho.partial_trace(&keep).unwrap();
        prop_assert_eq!(reduced.n(), keep.len());
        prop_assert!((reduced.matrix().trace().re - 1.0).abs() < 1e-10);
    }
}
