//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, Matrix4};
use rand::Rng;
use unclab::centropy::{complexity_entropy, hypothesis_entropy, verify_witness, Mask, MeasOp, SearchConfig};
use unclab::circuits::{brickwork, contract, random_architecture, Architecture, Circuit};
use unclab::cli::{run, Experiment, ExperimentConfig};
use unclab::fuzz::{realize_fuzzy, FuzzModel};
use unclab::geometry::{
    accessible_dimension, brickwork_monotone_trial, finite_difference_frame, negentropy_dimension_trial, tangent_frame,
};
use unclab::protocols::{BankState, ExpenditurePlan, ExtractionPlan};
use unclab::qcore::{haar_state, haar_su4, DensityOp, Gate2Q, PureState};
use unclab::seed::{derive_seed, rng_from_seed, Rng as SeededRng};
use unclab::C64;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_mixed(n: usize, rng: &mut SeededRng) -> DensityOp {
    let terms = rng.random_range(1..=1usize << n);
    let parts: Vec<(f64, PureState)> = (0..terms).map(|_| (rng.random::<f64>() + 1e-3, haar_state(n, rng))).collect();
    let total: f64 = parts.iter().map(|p| p.0).sum();
    let parts: Vec<_> = parts.into_iter().map(|(w, s)| (w / total, s)).collect();
    DensityOp::mixture(&parts).unwrap()
}

fn haar_circuit(arch: Architecture, rng: &mut SeededRng) -> Circuit {
    let gates = (0..arch.len()).map(|_| haar_su4(rng)).collect();
    Circuit::new(arch, gates).unwrap()
}

fn pure_distance(a: &PureState, b: &PureState) -> f64 {
    let overlap: f64 = a.amps().iter().zip(b.amps()).map(|(x, y)| x.conj() * y).sum::<C64>().norm_sqr();
    (1.0 - overlap.min(1.0)).sqrt()
}

fn fuzzy_composition() -> Outcome {
    let (n, r, eps, trials) = (4, 10, 0.05, 1000u64);
    let start = Instant::now();
    let model = FuzzModel::pauli(eps);
    let mut worst: f64 = 0.0;
    let mut fails = 0;
    for t in 0..trials {
        let mut rng = rng_from_seed(derive_seed(1, t));
        let arch = random_architecture(n, r, &mut rng).unwrap();
        let targets: Vec<Gate2Q> = arch.slots.iter().map(|&s| Gate2Q { u: haar_su4(&mut rng), targets: s }).collect();
        let omega = haar_state(n, &mut rng);
        let rec = realize_fuzzy(&targets, &model, &mut rng).unwrap();
        let exact = contract(&Circuit::from_gates(n, &targets).unwrap(), &omega).unwrap();
        let fuzzy = contract(&Circuit::from_gates(n, &rec.realized).unwrap(), &omega).unwrap();
        let d = pure_distance(&exact, &fuzzy);
        worst = worst.max(d);
        if d > r as f64 * eps {
            fails += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(fails == 0, || format!("{fails}/{trials} trials exceed rε"))?;
    ensure(secs < 30.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{trials}/{trials} trials within rε = 0.5, worst {worst:.4}, {secs:.1}s"))
}

/// Eigenvalues from the real symmetric embedding [[A, −B], [B, A]], where each
/// eigenvalue appears twice.
fn oracle_eigenvalues(rho: &DensityOp) -> Vec<f64> {
    let m = rho.matrix();
    let d = m.nrows();
    let emb = DMatrix::from_fn(2 * d, 2 * d, |i, j| {
        let (a, b) = (m[(i % d, j % d)].re, m[(i % d, j % d)].im);
        match (i < d, j < d) {
            (true, true) | (false, false) => a,
            (true, false) => -b,
            (false, true) => b,
        }
    });
    let mut ev: Vec<f64> = emb.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev.into_iter().step_by(2).collect()
}

/// min Σq s.t. Σ q_i λ_i ≥ η, 0 ≤ q ≤ 1, by enumerating every vertex: each has at
/// most one fractional coordinate.
fn lp_oracle(lambda: &[f64], eta: f64) -> f64 {
    let d = lambda.len();
    let mut best = f64::INFINITY;
    for ones in 0u32..1 << d {
        let mass: f64 = (0..d).filter(|&i| ones & (1 << i) != 0).map(|i| lambda[i]).sum();
        let count = ones.count_ones() as f64;
        if mass >= eta {
            best = best.min(count);
        }
        for j in (0..d).filter(|&j| ones & (1 << j) == 0 && lambda[j] > 0.0) {
            let q = (eta - mass) / lambda[j];
            if (0.0..=1.0).contains(&q) {
                best = best.min(count + q);
            }
        }
    }
    best
}

fn hypothesis_exactness() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for s in 0..200u64 {
        let mut rng = rng_from_seed(derive_seed(2, s));
        let rho = if s % 10 == 0 { haar_state(2, &mut rng).to_density() } else { random_mixed(2, &mut rng) };
        let lambda = oracle_eigenvalues(&rho);
        for eta in [0.3, 0.65, 0.9, 1.0] {
            let target = if eta >= 1.0 { 1.0 - 1e-9 } else { eta };
            let want = lp_oracle(&lambda, target).log2();
            let got = hypothesis_entropy(&rho, eta).map_err(|e| e.to_string())?.value;
            worst = worst.max((want - got).abs());
            checked += 1;
        }
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e} from LP oracle"))?;
    Ok(format!("{checked} (state, η) pairs match the LP oracle, max deviation {worst:.1e}"))
}

fn complexity_structure() -> Outcome {
    let search = SearchConfig::default();
    let etas = [0.3, 0.65, 0.9, 1.0];
    let n = 3;
    for s in 0..50u64 {
        let mut rng = rng_from_seed(derive_seed(3, s));
        let rho = match s % 3 {
            0 => random_mixed(n, &mut rng),
            1 => haar_state(n, &mut rng).to_density(),
            _ => {
                let arch = random_architecture(n, rng.random_range(1..=2), &mut rng).unwrap();
                contract(&haar_circuit(arch, &mut rng), &PureState::zero(n)).unwrap().to_density()
            }
        };
        let mut table = [[0usize; 4]; 3];
        for (r, row) in table.iter_mut().enumerate() {
            for (e, &eta) in etas.iter().enumerate() {
                let h = complexity_entropy(&rho, r, eta, &search).map_err(|e| e.to_string())?;
                ensure(h.value <= n, || format!("state {s}: value {} out of range", h.value))?;
                let (prob, value) = verify_witness(&h.witness, &rho).map_err(|e| e.to_string())?;
                ensure(value == h.value && prob >= h.eta - 1e-9, || format!("state {s}: witness does not certify"))?;
                row[e] = h.value;
            }
        }
        for r in 0..3 {
            for e in 0..4 {
                if r > 0 {
                    ensure(table[r][e] <= table[r - 1][e], || format!("state {s}: not nonincreasing in r: {table:?}"))?;
                }
                if e > 0 {
                    ensure(table[r][e] >= table[r][e - 1], || format!("state {s}: not nondecreasing in η: {table:?}"))?;
                }
            }
        }
    }
    for r in 0..3 {
        let z = complexity_entropy(&PureState::zero(n).to_density(), r, 1.0, &search).map_err(|e| e.to_string())?;
        ensure(z.value == 0, || format!("H_c(|000⟩) = {} at r = {r}", z.value))?;
    }
    let plus = complexity_entropy(&PureState::plus(n).to_density(), 0, 1.0, &search).map_err(|e| e.to_string())?;
    ensure(plus.value == 3, || format!("H_c(|+++⟩, r=0, η=1) = {}", plus.value))?;
    Ok("50 states × r∈{0,1,2} × 4 η: integer, in [0,3], monotone; H_c(|000⟩)=0, H_c(|+⟩³,r=0,η=1)=3".into())
}

fn ghz_preparation() -> Circuit {
    let h = 1.0 / 2f64.sqrt();
    let c = |x: f64| C64::new(x, 0.0);
    #[rustfmt::skip]
    let cnot = Matrix4::new(
        c(1.0), c(0.0), c(0.0), c(0.0),
        c(0.0), c(1.0), c(0.0), c(0.0),
        c(0.0), c(0.0), c(0.0), c(1.0),
        c(0.0), c(0.0), c(1.0), c(0.0),
    );
    #[rustfmt::skip]
    let had = Matrix4::new(
        c(h), c(0.0), c(h), c(0.0),
        c(0.0), c(h), c(0.0), c(h),
        c(h), c(0.0), c(-h), c(0.0),
        c(0.0), c(h), c(0.0), c(-h),
    );
    let g1 = Gate2Q::from_unitary(cnot * had, (0, 1)).unwrap();
    let g2 = Gate2Q::from_unitary(cnot, (1, 2)).unwrap();
    Circuit::from_gates(3, &[g1, g2]).unwrap()
}

fn extraction_achievability() -> Outcome {
    let prep = ghz_preparation();
    let ghz = contract(&prep, &PureState::zero(3)).unwrap();
    ensure(pure_distance(&ghz, &PureState::ghz(3)) < 1e-12, || "GHZ preparation is wrong".into())?;
    let rho = ghz.to_density();
    let known = MeasOp::new(Mask::full(3), prep.inverse()).unwrap();
    let (known_prob, _) = verify_witness(&known, &rho).map_err(|e| e.to_string())?;
    ensure(known_prob > 1.0 - 1e-12, || format!("known preparation accepts with {known_prob}"))?;

    let eta: f64 = 1.0 - 1e-9;
    let (r, eps) = (2, 0.01);
    let bound = (1.0 - eta).sqrt() + r as f64 * eps;
    let exact = ExtractionPlan::new(&rho, r, eta, (1.0 - eta).sqrt(), &SearchConfig::default())
        .map_err(|e| e.to_string())?
        .trial(&FuzzModel::pauli(0.0), &mut rng_from_seed(4))
        .map_err(|e| e.to_string())?;
    ensure(exact.w == 3 && exact.distance <= 1e-6, || format!("ε=0: w = {}, distance {:e}", exact.w, exact.distance))?;

    let plan = ExtractionPlan::new(&rho, r, eta, bound, &SearchConfig::default()).map_err(|e| e.to_string())?;
    let model = FuzzModel::pauli(eps);
    let mut worst: f64 = 0.0;
    let mut ok = 0;
    for t in 0..1000u64 {
        let res = plan.trial(&model, &mut rng_from_seed(derive_seed(4, t))).map_err(|e| e.to_string())?;
        worst = worst.max(res.distance);
        ok += usize::from(res.w == 3 && res.distance <= bound);
    }
    ensure(ok == 1000, || format!("{ok}/1000 trials within {bound}"))?;
    Ok(format!("ε=0: w=3, distance {:.1e}; ε=0.01: 1000/1000 within {bound:.5}, worst {worst:.5}", exact.distance))
}

fn extraction_converse() -> Outcome {
    let n = 3;
    let search = SearchConfig::default();
    let mut tight = 0;
    for s in 0..100u64 {
        let mut rng = rng_from_seed(derive_seed(5, s));
        let r = rng.random_range(0..=2usize);
        let prep_gates = rng.random_range(0..=2usize);
        let arch = random_architecture(n, prep_gates, &mut rng).unwrap();
        let pure = contract(&haar_circuit(arch, &mut rng), &PureState::zero(n)).unwrap();
        let noise: f64 = rng.random_range(0.0..0.3);
        let rho = DensityOp::mixture(&[(1.0 - noise, pure), (noise, haar_state(n, &mut rng))]).unwrap();
        let eps: f64 = rng.random_range(0.0..0.01);
        let delta = r as f64 * eps + rng.random_range(0.01..0.5);
        let eta = 1.0 - (delta - r as f64 * eps).powi(2);
        let plan = ExtractionPlan::new(&rho, r, eta, delta, &search).map_err(|e| e.to_string())?;
        let res = plan.trial(&FuzzModel::pauli(eps), &mut rng).map_err(|e| e.to_string())?;
        ensure(res.w <= res.converse_cap, || {
            format!("instance {s}: w = {} exceeds n − H_c^(r,1−δ) = {}", res.w, res.converse_cap)
        })?;
        ensure(res.distance <= delta, || format!("instance {s}: distance {} > δ = {delta}", res.distance))?;
        tight += usize::from(res.w == res.converse_cap);
    }
    Ok(format!("100/100 instances with w ≤ n − H_c^(r,1−δ) ({tight} tight)"))
}

fn expenditure_bound() -> Outcome {
    let mut rng = rng_from_seed(6);
    let n = 3;
    let circ = haar_circuit(Architecture::new(n, vec![(0, 1), (1, 2)]).unwrap(), &mut rng);
    let base = PureState::zero(2).to_density().tensor(&DensityOp::maximally_mixed(1));
    let rho = circ.apply_density(&base).unwrap();
    let (r, eps) = (2, 0.01);
    let search = SearchConfig::default();
    let exact = ExpenditurePlan::new(&rho, r, 1.0, 0.0, &search).map_err(|e| e.to_string())?;
    let fuzzy = ExpenditurePlan::new(&rho, r, 1.0, 2.0 * r as f64 * eps, &search).map_err(|e| e.to_string())?;
    ensure(exact.w() == 2, || format!("referee projects {} qubits, expected 2", exact.w()))?;
    let mut worst = 1.0f64;
    for bank in [BankState::RandomPure, BankState::MaximallyMixed] {
        let res = exact.trial(&FuzzModel::pauli(0.0), &bank, &mut rng).map_err(|e| e.to_string())?;
        ensure((res.guess_prob - 1.0).abs() <= 1e-9, || format!("ε=0, {}: {}", res.bank, res.guess_prob))?;
        let model = FuzzModel::pauli(eps);
        let mut ok = 0;
        for t in 0..1000u64 {
            let res = fuzzy.trial(&model, &bank, &mut rng_from_seed(derive_seed(6, t))).map_err(|e| e.to_string())?;
            worst = worst.min(res.guess_prob);
            ok += usize::from(res.guess_prob >= 1.0 - 2.0 * r as f64 * eps);
        }
        ensure(ok == 1000, || format!("{}: {ok}/1000 trials reach 0.96", bank.label()))?;
    }
    Ok(format!("ε=0 guess_prob = 1; ε=0.01: 2000/2000 ≥ 0.96 (pure and mixed σ), worst {worst:.5}"))
}

fn accessible_dimension_checks() -> Outcome {
    let mut rng = rng_from_seed(7);
    let single = Architecture::new(2, vec![(0, 1)]).unwrap();
    let rep = accessible_dimension(&single, &PureState::zero(2), 5, 1e-8, &mut rng).map_err(|e| e.to_string())?;
    let gap = rep.gap_ratios.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    ensure(rep.dimension == 7, || format!("n=2 single gate: dimension {}", rep.dimension))?;
    ensure(gap > 1e3, || format!("gap ratio {gap:e}"))?;

    let mut sweep = Vec::new();
    for layers in 1..=6 {
        let arch = brickwork(3, layers, false).unwrap();
        sweep.push(
            accessible_dimension(&arch, &PureState::zero(3), 3, 1e-8, &mut rng).map_err(|e| e.to_string())?.dimension,
        );
    }
    ensure(sweep.windows(2).all(|w| w[0] <= w[1]) && *sweep.last().unwrap() == 15, || format!("sweep {sweep:?}"))?;

    let mut worst_ratio: f64 = 0.0;
    for (arch, n) in [(single, 2), (brickwork(3, 3, false).unwrap(), 3)] {
        let circ = haar_circuit(arch, &mut rng);
        let input = PureState::zero(n);
        let analytic = tangent_frame(&circ, &input).unwrap().columns;
        for h in [1e-4, 1e-5] {
            let fd = finite_difference_frame(&circ, &input, h).unwrap();
            let err = (&analytic - fd).abs().max();
            ensure(err <= 10.0 * h, || format!("h = {h}: max deviation {err:e}"))?;
            worst_ratio = worst_ratio.max(err / h);
        }
    }
    Ok(format!("dim 7 (gap {gap:.1e}); n=3 sweep {sweep:?}; FD error ≤ {worst_ratio:.2e}·h"))
}

fn brickwork_monotone() -> Outcome {
    let start = Instant::now();
    let model = FuzzModel::pauli(0.05);
    let mut summary = Vec::new();
    for n in [3, 4] {
        for layers in [1, 2] {
            let (mut in_regime, mut saturated) = (0, 0);
            for t in 0..100u64 {
                let mut rng = rng_from_seed(derive_seed(8, (n * 1000 + layers * 100) as u64 + t));
                let trial = brickwork_monotone_trial(n, layers, &model, 1e-8, &mut rng).map_err(|e| e.to_string())?;
                ensure(!trial.violation, || {
                    format!("n={n} T={layers} trial {t}: rank {} -> {}", trial.short_rank, trial.long_rank)
                })?;
                if trial.saturated {
                    saturated += 1;
                } else {
                    in_regime += 1;
                }
            }
            summary.push(format!("n={n},T={layers}: {in_regime} strict/{saturated} saturated"));
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!("zero violations; {}; {:.1}s", summary.join("; "), elapsed.as_secs_f64()))
}

fn negentropy_growth() -> Outcome {
    let (n, k, r) = (6, 5, 2);
    let mut lows = Vec::new();
    let mut highs = Vec::new();
    for t in 0..20u64 {
        let trial = negentropy_dimension_trial(n, k, r, 1, 1e-8, &mut rng_from_seed(derive_seed(9, t)))
            .map_err(|e| e.to_string())?;
        ensure(trial.in_regime, || "(6,5,2) should be in regime".into())?;
        ensure(trial.strict_increase, || format!("trial {t}: {} -> {}", trial.lower_rank, trial.upper_rank))?;
        lows.push(trial.lower_rank);
        highs.push(trial.upper_rank);
    }
    let (max_low, min_high) = (*lows.iter().max().unwrap(), *highs.iter().min().unwrap());
    ensure(max_low < min_high, || format!("max dim(U_r,4) {max_low} ≥ min dim(U_r,5) {min_high}"))?;
    let out = negentropy_dimension_trial(4, 3, 1, 2, 1e-8, &mut rng_from_seed(9)).map_err(|e| e.to_string())?;
    ensure(out.regime == "out-of-regime" && !out.violation, || format!("(4,3,1) labeled {}", out.regime))?;
    Ok(format!("20/20 points: k=4 ranks ≤ {max_low} < k=5 ranks ≥ {min_high}; (4,3,1) labeled out-of-regime"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for exp in Experiment::ALL {
        let mut bytes = Vec::new();
        for copy in 0..2 {
            let cfg = ExperimentConfig {
                experiment: Some(exp),
                seed: 42,
                trials: 6,
                r: 1,
                layers: 2,
                points: 2,
                k: Some(2),
                state: unclab::cli::StateSpec::RandomMixed,
                out_dir: dir.path().join(format!("{}-{copy}", exp.name())),
                ..Default::default()
            };
            let out = run(&cfg).map_err(|e| format!("{}: {e}", exp.name()))?;
            bytes.push(std::fs::read(&out.csv_path).map_err(|e| e.to_string())?);
        }
        ensure(bytes[0] == bytes[1], || format!("{} CSV differs between runs", exp.name()))?;
    }
    Ok(format!("{} experiments reproduce byte-identical CSV", Experiment::ALL.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("fuzzy composition bound", fuzzy_composition),
        ("hypothesis entropy exactness", hypothesis_exactness),
        ("complexity entropy structure", complexity_structure),
        ("extraction achievability", extraction_achievability),
        ("extraction converse", extraction_converse),
        ("expenditure bound", expenditure_bound),
        ("accessible dimension", accessible_dimension_checks),
        ("brickwork monotone", brickwork_monotone),
        ("negentropy dimension growth", negentropy_growth),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
