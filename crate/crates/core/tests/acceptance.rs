//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stcode::decode::{Experiment, FaultModel, LookupDecoder, NoiseModel, TrialKind, DEFAULT_TABLE_BUDGET};
use stcode::outcome_code::{compute_outcome_code, linearize};
use stcode::propagation::{back_cumulant, check_operator, check_operator_forward, cumulant, effect};
use stcode::sparsify::{low_weight_stabilizers, SearchOptions, SpacetimeGraph};
use stcode::spacetime_code::logical_generators;
use stcode::{BitMatrix, BitVec, Circuit, SpacetimeCode};

use common::*;

const SEED: u64 = 0x5eed_2024;
const ADJOINT_TRIPLES: usize = 1000;
const CORPUS: usize = 100;
const FAULTS_PER_CIRCUIT: usize = 1000;
const PAIRS: usize = 1000;
const MC_P: f64 = 1e-3;
const MC_TRIALS: u64 = 10_000;
const MC_SEED: u64 = 2024;
const RESIDUAL_RATE_MAX: f64 = 1e-3;
const PROB_REL_TOL: f64 = 1e-9;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn run(id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Verdict) -> bool {
    let t = Instant::now();
    let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        verdict(false, format!("panicked: {msg}"))
    });
    let el = t.elapsed();
    let in_time = limit.is_none_or(|l| el <= l);
    let pass = v.pass && in_time;
    let limit_s = limit.map_or(String::new(), |l| format!(" (limit {}s)", l.as_secs()));
    println!(
        "criterion {id} {name}: {} | {} | {:.2}s{limit_s}",
        if pass { "PASS" } else { "FAIL" },
        v.detail,
        el.as_secs_f64()
    );
    pass
}

/// Random circuits with n <= 4 and m <= 8, shared by several criteria.
fn corpus() -> Vec<Circuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..CORPUS)
        .map(|_| {
            let n = rng.gen_range(1..=4);
            let depth = rng.gen_range(2..=8);
            let m = rng.gen_range(3..=8);
            random_circuit(&mut rng, n, depth, m, 0.6)
        })
        .collect()
}

fn adjointness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let mut bad = 0;
    for _ in 0..ADJOINT_TRIPLES {
        let n = rng.gen_range(1..=6);
        let depth = rng.gen_range(1..=8);
        let c = random_circuit(&mut rng, n, depth, 6, 0.3);
        let f = random_fault(&mut rng, &c);
        let g = random_fault(&mut rng, &c);
        let lhs = cumulant(&c, &f).unwrap().commutator(&g);
        let rhs = f.commutator(&back_cumulant(&c, &g).unwrap());
        bad += (lhs != rhs) as usize;
    }
    verdict(bad == 0, format!("{ADJOINT_TRIPLES} triples, {bad} violations"))
}

fn maximality(corpus: &[Circuit]) -> Verdict {
    let mut mismatches = 0;
    let mut dim_mismatches = 0;
    for c in corpus {
        let (oc, _) = compute_outcome_code(c);
        let reach = reachable_outcomes(c);
        let checks: Vec<(BitVec, bool)> = oc.checks().iter().map(|ch| (ch.u.clone(), ch.b)).collect();
        let sols = solution_set(c.num_measurements(), &checks);
        mismatches += (reach != sols) as usize;
        dim_mismatches += (reach.len() != 1usize << oc.k()) as usize;
    }
    verdict(
        mismatches == 0 && dim_mismatches == 0,
        format!("{} circuits, {mismatches} set mismatches, {dim_mismatches} dimension mismatches", corpus.len()),
    )
}

fn symplectic_rank(ops: &[stcode::FaultOperator]) -> usize {
    let Some(first) = ops.first() else { return 0 };
    let cols = 2 * first.flat().n();
    BitMatrix::from_rows(cols, ops.iter().map(|f| f.flat().symplectic()).collect()).rank()
}

fn linear_code(c: &Circuit) -> (Circuit, stcode::OutcomeCode, SpacetimeCode) {
    let lin = linearize(c);
    let (oc, _) = compute_outcome_code(&lin);
    let code = SpacetimeCode::build(&lin, &oc).unwrap();
    (lin, oc, code)
}

fn structure(corpus: &[Circuit]) -> Verdict {
    let mut v = [0usize; 5];
    for c in corpus {
        let (lin, oc, code) = linear_code(c);
        let st: Vec<_> = oc.checks().iter().map(|ch| check_operator(&lin, &ch.u).unwrap()).collect();
        for i in 0..st.len() {
            for j in i + 1..st.len() {
                v[0] += st[i].commutator(&st[j]) as usize;
            }
        }
        for (s, ch) in st.iter().zip(oc.checks()) {
            v[1] += !s.layer(0).is_identity() as usize;
            let levels: Vec<usize> = ch.u.iter_ones().map(|j| lin.measurement(j).level).collect();
            let lo = *levels.iter().min().unwrap();
            let hi = *levels.iter().max().unwrap();
            v[2] += (0..=lin.depth()).filter(|&l| (l < lo || l >= hi) && !s.layer(l).is_identity()).count().min(1);
            v[3] += (check_operator_forward(&lin, &ch.u).unwrap() != *s) as usize;
        }
        let n_big = lin.n() * (lin.depth() + 1);
        let k_big = n_big - symplectic_rank(&st);
        let m = lin.num_measurements();
        v[4] += (k_big != n_big - (m - oc.k()) || code.num_logicals() != k_big) as usize;
    }
    let total: usize = v.iter().sum();
    verdict(
        total == 0,
        format!(
            "{} circuits; violations: commutation {}, input layer {}, level bounds {}, forward/backward {}, parameters {}",
            corpus.len(),
            v[0],
            v[1],
            v[2],
            v[3],
            v[4]
        ),
    )
}

fn reduction(corpus: &[Circuit]) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let mut bad = 0;
    for c in corpus {
        let (lin, oc, code) = linear_code(c);
        for _ in 0..FAULTS_PER_CIRCUIT {
            let f = random_fault(&mut rng, &lin);
            let sq = code.syndrome(&f).unwrap();
            let so = oc.syndrome(&effect(&lin, &f).unwrap().f).unwrap();
            bad += (sq != so) as usize;
        }
    }
    verdict(bad == 0, format!("{} faults, {bad} violations", corpus.len() * FAULTS_PER_CIRCUIT))
}

fn completeness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let mut circuits = Vec::new();
    while circuits.len() < 20 {
        let n = rng.gen_range(2..=3);
        let depth = rng.gen_range(2..=(18 / n - 1));
        let c = random_circuit(&mut rng, n, depth, 10, 0.6);
        let (_, oc, _) = linear_code(&c);
        if oc.r() >= 2 && oc.r() <= 12 && n * (depth + 1) <= 18 {
            circuits.push(c);
        }
    }
    let mut discrepancies = 0;
    let mut compared = 0;
    for c in &circuits {
        let (lin, _, code) = linear_code(c);
        let graph = SpacetimeGraph::build(&lin);
        for m in [2, 4, 6] {
            let sp = low_weight_stabilizers(c, m, SearchOptions::default()).unwrap();
            let got: BTreeSet<String> = sp.found.iter().map(|f| f.to_string()).collect();
            let want = brute_low_weight(&code, &graph, m);
            compared += want.len();
            discrepancies += got.symmetric_difference(&want).count();
        }
    }
    verdict(
        discrepancies == 0,
        format!("{} circuits x M in {{2,4,6}}, {compared} stabilizers, {discrepancies} discrepancies", circuits.len()),
    )
}

fn logical_rank(corpus: &[Circuit]) -> Verdict {
    let mut rank_bad = 0;
    for c in corpus {
        let (lin, oc, code) = linear_code(c);
        let mut all = code.stabilizers().to_vec();
        all.extend(logical_generators(&lin, &oc).unwrap().all());
        rank_bad += (symplectic_rank(&all) != 2 * code.num_logicals() + code.r()) as usize;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let mut pair_bad = 0;
    for i in 0..PAIRS {
        let lin = linearize(&corpus[i % corpus.len()]);
        let m = lin.num_measurements();
        let u = BitVec::from_bools(&(0..m).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
        let v = BitVec::from_bools(&(0..m).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
        let lhs = check_operator(&lin, &u).unwrap().commutator(&flip_product(&lin, &v));
        pair_bad += (lhs != u.dot(&v)) as usize;
    }
    verdict(
        rank_bad == 0 && pair_bad == 0,
        format!("{} circuits with rank != 2K+r: {rank_bad}; {PAIRS} pairs, {pair_bad} pairing violations", corpus.len()),
    )
}

fn repetition_end_to_end() -> Verdict {
    let c = repetition_circuit();
    let exp = Experiment::new(&c, &NoiseModel::uniform(MC_P), 2, DEFAULT_TABLE_BUDGET).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(MC_SEED);
    let events = exp.model.events();
    let mut single_fail = 0;
    for e in events {
        single_fail += (exp.judge(&e.fault, &mut rng).kind != TrialKind::Success) as usize;
    }
    let rep = exp.monte_carlo(MC_TRIALS, MC_SEED);
    let residual_rate = rep.residual_failures as f64 / rep.trials as f64;
    let pass = single_fail == 0 && rep.outcome_failures == 0 && residual_rate <= RESIDUAL_RATE_MAX;
    verdict(
        pass,
        format!(
            "single events {}/{} succeed; Monte Carlo p={MC_P} trials={MC_TRIALS} seed={MC_SEED}: outcome failures {}, residual failure rate {residual_rate} (max {RESIDUAL_RATE_MAX}), misses {}",
            events.len() - single_fail,
            events.len(),
            rep.outcome_failures,
            rep.misses
        ),
    )
}

fn mlf_optimality() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let nm = NoiseModel { p_unitary: 0.02, p_measurement: 0.05, p_idle: 0.01, overrides: Default::default() };
    let mut tested = 0;
    let mut violations = 0;
    let mut classes = 0;
    let mut attempts = 0;
    while tested < 12 && attempts < 10_000 {
        attempts += 1;
        let n = rng.gen_range(1..=2);
        let depth = rng.gen_range(1..=4);
        let c = random_circuit(&mut rng, n, depth, 4, 0.6);
        let lin = linearize(&c);
        let model = FaultModel::new(&lin, &nm).unwrap();
        if model.locations().len() > 10 || configuration_count(&model) > 200_000 {
            continue;
        }
        let (oc, _) = compute_outcome_code(&lin);
        if oc.r() == 0 {
            continue;
        }
        let code = SpacetimeCode::build(&lin, &oc).unwrap();
        let full = model.active_locations().len();
        let table = LookupDecoder::build(&lin, &code, &model, full, DEFAULT_TABLE_BUDGET).unwrap();
        let brute = brute_mlf(&model, &code);
        for (s, &best) in &brute {
            classes += 1;
            match table.get(s) {
                Some(e) => {
                    let tol = PROB_REL_TOL * best.abs().max(1.0);
                    violations += ((e.log_prob - best).abs() > tol) as usize;
                    violations += ((model.log_prob(&e.events) - e.log_prob).abs() > tol) as usize;
                }
                None => violations += 1,
            }
        }
        violations += (table.len() != brute.len()) as usize;
        tested += 1;
    }
    verdict(
        violations == 0 && tested == 12,
        format!("{tested} circuits, {classes} syndrome classes, {violations} violations"),
    )
}

fn cli_determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_stcode");
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("rep.stc");
    std::fs::write(&input, REPETITION).unwrap();
    let input = input.to_str().unwrap().to_string();
    let table = |k: usize| dir.path().join(format!("table{k}.bin")).to_str().unwrap().to_string();
    let runs: Vec<(&str, Vec<String>)> = vec![
        ("validate", vec!["validate".into(), input.clone()]),
        ("checks", vec!["checks".into(), input.clone()]),
        ("checks --json", vec!["checks".into(), input.clone(), "--json".into(), "--emit-linearized".into(), "-".into()]),
        ("spacetime", vec!["spacetime".into(), input.clone(), "--logicals".into(), "--verify".into()]),
        ("spacetime --json", vec!["spacetime".into(), input.clone(), "--json".into(), "--logicals".into()]),
        ("spacetime --alist", vec!["spacetime".into(), input.clone(), "--alist".into()]),
        ("spacetime --mm", vec!["spacetime".into(), input.clone(), "--mm".into()]),
        ("sparsify", vec!["sparsify".into(), input.clone(), "-M".into(), "6".into()]),
        ("sparsify json", vec!["sparsify".into(), input.clone(), "-M".into(), "6".into(), "--format".into(), "json".into()]),
        (
            "simulate",
            vec!["simulate", &input, "--p", "0.01", "--trials", "2000", "--seed", "7", "--dump-table"]
                .into_iter()
                .map(String::from)
                .collect(),
        ),
    ];
    let mut differing = Vec::new();
    let mut failed = Vec::new();
    for (name, args) in &runs {
        let mut outs = Vec::new();
        for k in 0..2 {
            let mut args = args.clone();
            if *name == "simulate" {
                args.push(table(k));
            }
            let o = Command::new(bin).args(&args).output().unwrap();
            if !o.status.success() {
                failed.push(name.to_string());
            }
            let mut bytes = o.stdout;
            if *name == "simulate" {
                bytes.extend(std::fs::read(table(k)).unwrap_or_default());
            }
            outs.push(bytes);
        }
        if outs[0] != outs[1] || outs[0].is_empty() {
            differing.push(name.to_string());
        }
    }
    verdict(
        differing.is_empty() && failed.is_empty(),
        format!("{} invocations; differing {differing:?}; failed {failed:?}", runs.len()),
    )
}

fn main() {
    let corpus = corpus();
    let s = Duration::from_secs;
    let results = [
        run(1, "adjointness", Some(s(5)), adjointness),
        run(2, "outcome-code maximality", Some(s(60)), || maximality(&corpus)),
        run(3, "spacetime-code structure", None, || structure(&corpus)),
        run(4, "reduction identity", None, || reduction(&corpus)),
        run(5, "low-weight search completeness", Some(s(120)), completeness),
        run(6, "logical-operator rank", None, || logical_rank(&corpus)),
        run(7, "repetition code end to end", Some(s(60)), repetition_end_to_end),
        run(8, "MLF optimality", None, mlf_optimality),
        run(9, "CLI determinism", None, cli_determinism),
    ];
    let failed = results.iter().filter(|&&p| !p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
