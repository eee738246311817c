use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{BankSpec, Experiment, ExperimentConfig};
use super::manifest::{now_rfc3339, sha256_hex, RunManifest, CSV_SCHEMA_VERSION};
use super::{EXIT_OK, EXIT_VIOLATION};
use crate::centropy::{complexity_entropy, hypothesis_entropy, ResultKind, SearchConfig};
use crate::circuits::{brickwork, contract, random_architecture, Circuit};
use crate::fuzz::realize_fuzzy;
use crate::geometry::{
    accessible_dimension, brickwork_monotone_trial, negentropy_dimension_trial, state_cap, DimReport,
};
use crate::protocols::{BankState, ExpenditurePlan, ExtractionPlan};
use crate::qcore::{haar_state, haar_su4, Gate2Q, PureState};
use crate::seed::{derive_seed, derive_seed_path, rng_from_seed};
use crate::Result;

/// Seed stream of the optimizer restarts, kept apart from the trial streams.
const SEARCH_STREAM: u64 = 0x5ea2_c400;
/// Seed stream of states shared by every trial.
const STATE_STREAM: u64 = 0x57a7_e000;

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub experiment: String,
    pub trials: usize,
    pub violations: usize,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub manifest_path: PathBuf,
    pub summary: Value,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.violations == 0 {
            EXIT_OK
        } else {
            EXIT_VIOLATION
        }
    }
}

struct Table {
    columns: &'static [&'static str],
    csv: Vec<u8>,
    violations: usize,
    extra: BTreeMap<&'static str, Value>,
}

fn write_rows<T: Serialize>(columns: &'static [&'static str], rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(columns)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Validates `cfg`, runs every trial and writes CSV, summary and manifest.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let exp = cfg.experiment()?;
    let started_at = now_rfc3339();
    let trial_count = if exp == Experiment::AccessibleDim { cfg.layers } else { cfg.trials };
    let seeds: Vec<u64> = (0..trial_count as u64).map(|i| derive_seed(cfg.seed, i)).collect();
    let search =
        SearchConfig::default().with_restarts(cfg.restarts).with_seed(derive_seed_path(cfg.seed, &[SEARCH_STREAM]));

    let table = match exp {
        Experiment::FuzzBound => fuzz_bound(cfg, &seeds)?,
        Experiment::Entropy => entropy(cfg, &seeds, &search)?,
        Experiment::Extract => extract(cfg, &seeds, &search)?,
        Experiment::Expend => expend(cfg, &seeds, &search)?,
        Experiment::AccessibleDim => accessible_dim(cfg, &seeds)?,
        Experiment::BwMonotone => bw_monotone(cfg, &seeds)?,
        Experiment::NegentropyDim => negentropy_dim(cfg, &seeds)?,
    };

    std::fs::create_dir_all(&cfg.out_dir)?;
    let csv_name = format!("{}.csv", exp.name());
    let csv_path = cfg.out_dir.join(&csv_name);
    std::fs::write(&csv_path, &table.csv)?;

    let mut summary = json!({
        "experiment": exp.name(),
        "trials": trial_count,
        "violations": table.violations,
    });
    if let Value::Object(map) = &mut summary {
        map.extend(table.extra.into_iter().map(|(k, v)| (k.to_string(), v)));
    }
    let summary_bytes = (serde_json::to_string_pretty(&summary)? + "\n").into_bytes();
    let summary_path = cfg.out_dir.join("summary.json");
    std::fs::write(&summary_path, &summary_bytes)?;

    let manifest = RunManifest {
        tool: "unclab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        csv_schema_version: CSV_SCHEMA_VERSION,
        csv_columns: table.columns.iter().map(|c| c.to_string()).collect(),
        started_at,
        finished_at: now_rfc3339(),
        trial_seeds: seeds,
        digests: BTreeMap::from([
            (csv_name, sha256_hex(&table.csv)),
            ("summary.json".to_string(), sha256_hex(&summary_bytes)),
        ]),
    };
    let manifest_path = cfg.out_dir.join("manifest.json");
    manifest.write(&manifest_path)?;

    Ok(RunOutcome {
        experiment: exp.name().to_string(),
        trials: trial_count,
        violations: table.violations,
        csv_path,
        summary_path,
        manifest_path,
        summary,
    })
}

fn worst(values: impl Iterator<Item = f64>, max: bool) -> Value {
    let v = values.fold(None, |acc: Option<f64>, x| {
        Some(match acc {
            None => x,
            Some(a) if max => a.max(x),
            Some(a) => a.min(x),
        })
    });
    v.map_or(Value::Null, |x| json!(x))
}

#[derive(Serialize)]
struct FuzzRow {
    seed: u64,
    n: usize,
    r: usize,
    epsilon: f64,
    distance: f64,
    bound: f64,
    pass: bool,
}

const FUZZ_COLUMNS: &[&str] = &["seed", "n", "r", "epsilon", "distance", "bound", "pass"];

/// Random r-gate circuits on random pure inputs, exact against one fuzzy realization.
fn fuzz_bound(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<Table> {
    let model = cfg.fuzz();
    let bound = cfg.r as f64 * cfg.epsilon;
    let rows = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = rng_from_seed(seed);
            let arch = random_architecture(cfg.n, cfg.r, &mut rng)?;
            let targets: Vec<Gate2Q> =
                arch.slots.iter().map(|&t| Gate2Q { u: haar_su4(&mut rng), targets: t }).collect();
            let omega = haar_state(cfg.n, &mut rng);
            let record = realize_fuzzy(&targets, &model, &mut rng)?;
            let exact = contract(&Circuit::from_gates(cfg.n, &targets)?, &omega)?;
            let fuzzy = contract(&Circuit::from_gates(cfg.n, &record.realized)?, &omega)?;
            let overlap = exact.inner(&fuzzy)?.norm_sqr().min(1.0);
            let distance = (1.0 - overlap).sqrt();
            Ok(FuzzRow {
                seed,
                n: cfg.n,
                r: cfg.r,
                epsilon: cfg.epsilon,
                distance,
                bound,
                pass: distance <= bound + 1e-12,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        columns: FUZZ_COLUMNS,
        violations: rows.iter().filter(|r| !r.pass).count(),
        extra: BTreeMap::from([
            ("worst_distance", worst(rows.iter().map(|r| r.distance), true)),
            ("bound", json!(bound)),
        ]),
        csv: write_rows(FUZZ_COLUMNS, &rows)?,
    })
}

#[derive(Serialize)]
struct EntropyRow {
    seed: u64,
    n: usize,
    r: usize,
    eta: f64,
    state: &'static str,
    hypothesis_entropy: f64,
    complexity_entropy: usize,
    achieved_prob: f64,
    kind: &'static str,
    violation: bool,
}

const ENTROPY_COLUMNS: &[&str] = &[
    "seed",
    "n",
    "r",
    "eta",
    "state",
    "hypothesis_entropy",
    "complexity_entropy",
    "achieved_prob",
    "kind",
    "violation",
];

/// H_c^{r',η} for r' = 0..=r per trial state, checked for monotonicity in r and
/// dominance over the hypothesis-testing entropy.
fn entropy(cfg: &ExperimentConfig, seeds: &[u64], search: &SearchConfig) -> Result<Table> {
    let per_trial = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = rng_from_seed(seed);
            let rho = cfg.state.build(cfg.n, &mut rng)?;
            let h = hypothesis_entropy(&rho, cfg.eta)?.value;
            let mut rows = Vec::with_capacity(cfg.r + 1);
            let mut prev: Option<usize> = None;
            for r in 0..=cfg.r {
                let hc = complexity_entropy(&rho, r, cfg.eta, search)?;
                let violation = prev.is_some_and(|p| hc.value > p) || (hc.value as f64) < h - 1e-9;
                prev = Some(hc.value);
                rows.push(EntropyRow {
                    seed,
                    n: cfg.n,
                    r,
                    eta: cfg.eta,
                    state: cfg.state.name(),
                    hypothesis_entropy: h,
                    complexity_entropy: hc.value,
                    achieved_prob: hc.achieved_prob,
                    kind: match hc.kind {
                        ResultKind::Exhaustive => "exhaustive",
                        ResultKind::OptimizedUpperBound => "optimized-upper-bound",
                    },
                    violation,
                });
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<EntropyRow> = per_trial.into_iter().flatten().collect();
    Ok(Table {
        columns: ENTROPY_COLUMNS,
        violations: rows.iter().filter(|r| r.violation).count(),
        extra: BTreeMap::new(),
        csv: write_rows(ENTROPY_COLUMNS, &rows)?,
    })
}

#[derive(Serialize)]
struct ExtractRow {
    seed: u64,
    n: usize,
    r: usize,
    eta: f64,
    epsilon: f64,
    w: usize,
    distance: f64,
    bound: f64,
    converse_cap: usize,
    pass: bool,
}

const EXTRACT_COLUMNS: &[&str] =
    &["seed", "n", "r", "eta", "epsilon", "w", "distance", "bound", "converse_cap", "pass"];

fn shared_state(cfg: &ExperimentConfig) -> Result<Option<crate::qcore::DensityOp>> {
    if cfg.state.is_random() {
        return Ok(None);
    }
    let mut rng = rng_from_seed(derive_seed_path(cfg.seed, &[STATE_STREAM]));
    cfg.state.build(cfg.n, &mut rng).map(Some)
}

fn extract(cfg: &ExperimentConfig, seeds: &[u64], search: &SearchConfig) -> Result<Table> {
    let model = cfg.fuzz();
    let delta = cfg.extract_delta();
    let shared = match shared_state(cfg)? {
        Some(rho) => Some(ExtractionPlan::new(&rho, cfg.r, cfg.eta, delta, search)?),
        None => None,
    };
    if let Some(plan) = &shared {
        plan.check_regime(&model)?;
    }
    let rows = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = rng_from_seed(seed);
            let own;
            let plan = match &shared {
                Some(p) => p,
                None => {
                    let rho = cfg.state.build(cfg.n, &mut rng)?;
                    own = ExtractionPlan::new(&rho, cfg.r, cfg.eta, delta, search)?;
                    &own
                }
            };
            let res = plan.trial(&model, &mut rng)?;
            Ok(ExtractRow {
                seed,
                n: cfg.n,
                r: cfg.r,
                eta: cfg.eta,
                epsilon: cfg.epsilon,
                w: res.w,
                distance: res.distance,
                bound: res.bound,
                converse_cap: res.converse_cap,
                pass: res.pass && res.w <= res.converse_cap,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        columns: EXTRACT_COLUMNS,
        violations: rows.iter().filter(|r| !r.pass).count(),
        extra: BTreeMap::from([
            ("worst_distance", worst(rows.iter().map(|r| r.distance), true)),
            ("bound", rows.first().map_or(Value::Null, |r| json!(r.bound))),
            ("delta", json!(delta)),
        ]),
        csv: write_rows(EXTRACT_COLUMNS, &rows)?,
    })
}

#[derive(Serialize)]
struct ExpendRow {
    seed: u64,
    n: usize,
    r: usize,
    eta: f64,
    epsilon: f64,
    delta: f64,
    w: usize,
    bank: String,
    guess_prob: f64,
    bound: f64,
    pass: bool,
}

const EXPEND_COLUMNS: &[&str] =
    &["seed", "n", "r", "eta", "epsilon", "delta", "w", "bank", "guess_prob", "bound", "pass"];

fn expend(cfg: &ExperimentConfig, seeds: &[u64], search: &SearchConfig) -> Result<Table> {
    let model = cfg.fuzz();
    let delta = cfg.expend_delta();
    let bank = match cfg.bank {
        BankSpec::MaximallyMixed => BankState::MaximallyMixed,
        BankSpec::RandomPure => BankState::RandomPure,
    };
    let shared = match shared_state(cfg)? {
        Some(rho) => Some(ExpenditurePlan::new(&rho, cfg.r, cfg.eta, delta, search)?),
        None => None,
    };
    if let Some(plan) = &shared {
        plan.check_regime(&model)?;
    }
    let rows = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = rng_from_seed(seed);
            let own;
            let plan = match &shared {
                Some(p) => p,
                None => {
                    let rho = cfg.state.build(cfg.n, &mut rng)?;
                    own = ExpenditurePlan::new(&rho, cfg.r, cfg.eta, delta, search)?;
                    &own
                }
            };
            let res = plan.trial(&model, &bank, &mut rng)?;
            Ok(ExpendRow {
                seed,
                n: cfg.n,
                r: cfg.r,
                eta: cfg.eta,
                epsilon: cfg.epsilon,
                delta,
                w: res.w,
                bank: res.bank,
                guess_prob: res.guess_prob,
                bound: res.bound,
                pass: res.pass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        columns: EXPEND_COLUMNS,
        violations: rows.iter().filter(|r| !r.pass).count(),
        extra: BTreeMap::from([
            ("worst_guess_prob", worst(rows.iter().map(|r| r.guess_prob), false)),
            ("bound", json!(1.0 - 2.0 * cfg.r as f64 * cfg.epsilon)),
            ("delta", json!(delta)),
        ]),
        csv: write_rows(EXPEND_COLUMNS, &rows)?,
    })
}

#[derive(Serialize)]
struct DimCsvRow {
    seed: u64,
    arch_id: String,
    n: usize,
    #[serde(rename = "R")]
    slots: usize,
    point: usize,
    rank: usize,
    tol: f64,
    saturated: bool,
}

const DIM_COLUMNS: &[&str] = &["seed", "arch_id", "n", "R", "point", "rank", "tol", "saturated"];

/// Brickwork sweep over 1..=layers layers; one seed per layer count.
fn accessible_dim(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<Table> {
    let input = PureState::zero(cfg.n);
    let reports = seeds
        .iter()
        .enumerate()
        .map(|(i, &seed)| {
            let arch = brickwork(cfg.n, i + 1, false)?;
            accessible_dimension(&arch, &input, cfg.points, cfg.tol, &mut rng_from_seed(seed))
        })
        .collect::<Result<Vec<DimReport>>>()?;
    let mut violations = 0;
    let mut prev = 0;
    for rep in &reports {
        if rep.dimension < prev || rep.dimension > (15 * rep.slots + 1).min(state_cap(rep.n)) {
            violations += 1;
        }
        prev = rep.dimension;
    }
    let rows: Vec<DimCsvRow> = reports
        .iter()
        .zip(seeds)
        .flat_map(|(rep, &seed)| {
            rep.rows().into_iter().map(move |r| DimCsvRow {
                seed,
                arch_id: r.arch_id,
                n: r.n,
                slots: r.slots,
                point: r.point,
                rank: r.rank,
                tol: r.tol,
                saturated: r.saturated,
            })
        })
        .collect();
    Ok(Table {
        columns: DIM_COLUMNS,
        violations,
        extra: BTreeMap::from([("reports", serde_json::to_value(&reports)?)]),
        csv: write_rows(DIM_COLUMNS, &rows)?,
    })
}

#[derive(Serialize)]
struct MonotoneRow {
    seed: u64,
    n: usize,
    layers: usize,
    extended_layers: usize,
    short_rank: usize,
    long_rank: usize,
    cap: usize,
    saturated: bool,
    strict_increase: bool,
    violation: bool,
}

const MONOTONE_COLUMNS: &[&str] = &[
    "seed",
    "n",
    "layers",
    "extended_layers",
    "short_rank",
    "long_rank",
    "cap",
    "saturated",
    "strict_increase",
    "violation",
];

fn bw_monotone(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<Table> {
    let model = cfg.fuzz();
    let rows = seeds
        .par_iter()
        .map(|&seed| {
            let t = brickwork_monotone_trial(cfg.n, cfg.layers, &model, cfg.tol, &mut rng_from_seed(seed))?;
            Ok(MonotoneRow {
                seed,
                n: t.n,
                layers: t.layers,
                extended_layers: t.extended_layers,
                short_rank: t.short_rank,
                long_rank: t.long_rank,
                cap: t.cap,
                saturated: t.saturated,
                strict_increase: t.strict_increase,
                violation: t.violation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        columns: MONOTONE_COLUMNS,
        violations: rows.iter().filter(|r| r.violation).count(),
        extra: BTreeMap::from([
            ("saturated", json!(rows.iter().filter(|r| r.saturated).count())),
            ("in_regime", json!(rows.iter().filter(|r| !r.saturated).count())),
        ]),
        csv: write_rows(MONOTONE_COLUMNS, &rows)?,
    })
}

#[derive(Serialize)]
struct NegentropyRow {
    seed: u64,
    n: usize,
    k: usize,
    r: usize,
    regime: String,
    lower_rank: usize,
    upper_rank: usize,
    strict_increase: bool,
    violation: bool,
}

const NEGENTROPY_COLUMNS: &[&str] =
    &["seed", "n", "k", "r", "regime", "lower_rank", "upper_rank", "strict_increase", "violation"];

fn negentropy_dim(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<Table> {
    let k = cfg.k();
    let rows = seeds
        .par_iter()
        .map(|&seed| {
            let t = negentropy_dimension_trial(cfg.n, k, cfg.r, cfg.points, cfg.tol, &mut rng_from_seed(seed))?;
            Ok(NegentropyRow {
                seed,
                n: t.n,
                k: t.k,
                r: t.r,
                regime: t.regime,
                lower_rank: t.lower_rank,
                upper_rank: t.upper_rank,
                strict_increase: t.strict_increase,
                violation: t.violation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let in_regime = rows.iter().filter(|r| r.regime == "in-regime").count();
    Ok(Table {
        columns: NEGENTROPY_COLUMNS,
        violations: rows.iter().filter(|r| r.violation).count(),
        extra: BTreeMap::from([("in_regime", json!(in_regime)), ("out_of_regime", json!(rows.len() - in_regime))]),
        csv: write_rows(NEGENTROPY_COLUMNS, &rows)?,
    })
}
