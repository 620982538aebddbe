//! Shared oracles for integration and acceptance tests: a dense state-vector
//! simulator, random circuit and fault generators, and brute-force searches.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use stcode::circuit::{Gate, OpKind, Operation};
use stcode::decode::FaultModel;
use stcode::pauli::{Letter, PhasedPauli, ProjPauli};
use stcode::propagation::flip_fault;
use stcode::sparsify::SpacetimeGraph;
use stcode::{BitVec, Circuit, FaultOperator, SpacetimeCode};

pub const REPETITION: &str = include_str!("../data/repetition.stc");

pub fn repetition_circuit() -> Circuit {
    stcode::parse_circuit(REPETITION).expect("repetition circuit parses")
}

const ONE_QUBIT: [&str; 10] = ["I", "X", "Y", "Z", "H", "S", "S_DAG", "SQRT_X", "SQRT_X_DAG", "H"];
const TWO_QUBIT: [&str; 3] = ["CX", "CZ", "SWAP"];

pub fn random_letter<R: Rng>(rng: &mut R) -> Letter {
    [Letter::I, Letter::X, Letter::Y, Letter::Z][rng.gen_range(0..4)]
}

pub fn random_proj<R: Rng>(rng: &mut R, n: usize) -> ProjPauli {
    let mut p = ProjPauli::identity(n);
    for q in 0..n {
        p.set(q, random_letter(rng));
    }
    p
}

pub fn random_fault<R: Rng>(rng: &mut R, c: &Circuit) -> FaultOperator {
    let flat = random_proj(rng, c.n() * (c.depth() + 1));
    FaultOperator::from_flat(c.n(), c.depth(), flat)
}

/// Measurement letters lean towards `Z` so that repeated measurements, and
/// with them checks, are common.
fn biased_letter<R: Rng>(rng: &mut R) -> Letter {
    match rng.gen_range(0..10) {
        0..=5 => Letter::Z,
        6..=8 => Letter::X,
        _ => Letter::Y,
    }
}

/// Random leveled circuit: every level has at least one operation, and at
/// most `max_meas` measurements overall.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, depth: usize, max_meas: usize, p_meas: f64) -> Circuit {
    let mut ops = Vec::new();
    let mut meas = 0;
    for l in 1..=depth {
        let mut free: Vec<usize> = (0..n).collect();
        free.shuffle(rng);
        let before = ops.len();
        while !free.is_empty() {
            if rng.gen_bool(0.15) && ops.len() > before {
                free.pop();
                continue;
            }
            if meas < max_meas && rng.gen_bool(p_meas) {
                let w = rng.gen_range(1..=free.len().min(3));
                let qs: Vec<usize> = free.drain(free.len() - w..).collect();
                let mut p = ProjPauli::identity(n);
                for &q in &qs {
                    p.set(q, biased_letter(rng));
                }
                ops.push(Operation::measure(PhasedPauli::hermitian(p, rng.gen_bool(0.3)), l));
                meas += 1;
            } else if free.len() >= 2 && rng.gen_bool(0.5) {
                let a = free.pop().unwrap();
                let b = free.pop().unwrap();
                let g = TWO_QUBIT[rng.gen_range(0..TWO_QUBIT.len())];
                ops.push(Operation::gate(g, &[a, b], l).unwrap());
            } else {
                let a = free.pop().unwrap();
                let g = ONE_QUBIT[rng.gen_range(0..ONE_QUBIT.len())];
                ops.push(Operation::gate(g, &[a], l).unwrap());
            }
        }
    }
    Circuit::new(n, ops).expect("generated circuit is valid")
}

/// Random circuit with exactly `m` measurements where possible.
pub fn random_circuit_with_meas<R: Rng>(rng: &mut R, n: usize, depth: usize, m: usize) -> Circuit {
    loop {
        let c = random_circuit(rng, n, depth, m, 0.45);
        if c.num_measurements() == m {
            return c;
        }
    }
}

// ---------------------------------------------------------------------------
// Dense state-vector simulation, qubit q is bit q of the basis index.

type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn one_qubit_matrix(name: &str) -> Mat2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match name {
        "I" => [[o, z], [z, o]],
        "X" => [[z, o], [o, z]],
        "Y" => [[z, -i], [i, z]],
        "Z" => [[o, z], [z, -o]],
        "H" => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        "S" => [[o, z], [z, i]],
        "S_DAG" => [[o, z], [z, -i]],
        "SQRT_X" => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        "SQRT_X_DAG" => [[c(0.5, -0.5), c(0.5, 0.5)], [c(0.5, 0.5), c(0.5, -0.5)]],
        _ => panic!("no matrix for {name}"),
    }
}

fn apply_one(psi: &mut [Complex64], q: usize, m: &Mat2) {
    let bit = 1usize << q;
    for b in 0..psi.len() {
        if b & bit == 0 {
            let (a0, a1) = (psi[b], psi[b | bit]);
            psi[b] = m[0][0] * a0 + m[0][1] * a1;
            psi[b | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

fn apply_two(psi: &mut [Complex64], name: &str, a: usize, b: usize) {
    let (ba, bb) = (1usize << a, 1usize << b);
    match name {
        "CX" => {
            for x in 0..psi.len() {
                if x & ba != 0 && x & bb == 0 {
                    psi.swap(x, x | bb);
                }
            }
        }
        "CZ" => {
            for (x, v) in psi.iter_mut().enumerate() {
                if x & ba != 0 && x & bb != 0 {
                    *v = -*v;
                }
            }
        }
        "SWAP" => {
            for x in 0..psi.len() {
                if x & ba != 0 && x & bb == 0 {
                    psi.swap(x, (x ^ ba) | bb);
                }
            }
        }
        _ => panic!("no matrix for {name}"),
    }
}

/// `P|psi>` for `P = i^phase X^x Z^z`.
pub fn apply_pauli(psi: &[Complex64], p: &PhasedPauli) -> Vec<Complex64> {
    let n = p.n();
    let mut xm = 0usize;
    let mut zm = 0usize;
    for q in 0..n {
        if p.proj().x().get(q) {
            xm |= 1 << q;
        }
        if p.proj().z().get(q) {
            zm |= 1 << q;
        }
    }
    let ph = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][(p.phase_exp() % 4) as usize];
    let mut out = vec![c(0.0, 0.0); psi.len()];
    for (b, &a) in psi.iter().enumerate() {
        let sign = if (b & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[b ^ xm] += ph * a * sign;
    }
    out
}

fn apply_unitary(psi: &mut [Complex64], op: &Operation) {
    match &op.kind {
        OpKind::Unitary { gate: Gate::Named(name), qubits, .. } => match qubits.len() {
            1 => apply_one(psi, qubits[0], &one_qubit_matrix(name)),
            2 => apply_two(psi, name, qubits[0], qubits[1]),
            _ => panic!("unsupported arity"),
        },
        _ => panic!("simulator handles named gates only"),
    }
}

/// Applies every unitary of a measurement-free circuit to `psi`.
pub fn run_unitaries(circ: &Circuit, psi: &mut [Complex64]) {
    for op in circ.ops() {
        apply_unitary(psi, op);
    }
}

pub fn basis_state(n: usize, x: usize) -> Vec<Complex64> {
    let mut psi = vec![c(0.0, 0.0); 1 << n];
    psi[x] = c(1.0, 0.0);
    psi
}

pub fn close(a: &[Complex64], b: &[Complex64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-9)
}

fn norm2(psi: &[Complex64]) -> f64 {
    psi.iter().map(|a| a.norm_sqr()).sum()
}

/// Every outcome string reachable with nonzero probability from the
/// maximally mixed input (union over computational basis inputs).
pub fn reachable_outcomes(circ: &Circuit) -> BTreeSet<Vec<bool>> {
    let n = circ.n();
    let dim = 1usize << n;
    let mut out = BTreeSet::new();
    for x in 0..dim {
        let mut psi = vec![c(0.0, 0.0); dim];
        psi[x] = c(1.0, 0.0);
        branch(circ, 0, psi, Vec::new(), &mut out);
    }
    out
}

fn branch(circ: &Circuit, start: usize, mut psi: Vec<Complex64>, outcomes: Vec<bool>, out: &mut BTreeSet<Vec<bool>>) {
    let ops = circ.ops();
    let mut i = start;
    while i < ops.len() {
        match &ops[i].kind {
            OpKind::Unitary { .. } => apply_unitary(&mut psi, &ops[i]),
            OpKind::Measurement(p) => {
                let pp = apply_pauli(&psi, p);
                for bit in [false, true] {
                    let s = if bit { -1.0 } else { 1.0 };
                    let proj: Vec<Complex64> =
                        psi.iter().zip(&pp).map(|(a, b)| (a + b * s) * 0.5).collect();
                    let w = norm2(&proj);
                    if w > 1e-9 {
                        let k = 1.0 / w.sqrt();
                        let next: Vec<Complex64> = proj.into_iter().map(|a| a * k).collect();
                        let mut o = outcomes.clone();
                        o.push(bit);
                        branch(circ, i + 1, next, o, out);
                    }
                }
                return;
            }
        }
        i += 1;
    }
    out.insert(outcomes);
}

/// All strings `o` of length `m` with `H o = b`.
pub fn solution_set(m: usize, checks: &[(BitVec, bool)]) -> BTreeSet<Vec<bool>> {
    let mut out = BTreeSet::new();
    for x in 0u64..(1u64 << m) {
        let o: Vec<bool> = (0..m).map(|j| x >> j & 1 == 1).collect();
        let v = BitVec::from_bools(&o);
        if checks.iter().all(|(u, b)| u.dot(&v) == *b) {
            out.insert(o);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Brute-force searches.

/// Every element of the stabilizer group with weight in `1..=max_weight`
/// whose support is connected in the spacetime graph.
pub fn brute_low_weight(code: &SpacetimeCode, graph: &SpacetimeGraph, max_weight: usize) -> BTreeSet<String> {
    let st = code.stabilizers();
    let mut out = BTreeSet::new();
    let mut cur = FaultOperator::identity(code.n(), code.depth());
    for x in 1u64..(1u64 << st.len()) {
        cur.mul_assign(&st[x.trailing_zeros() as usize]);
        let w = cur.weight();
        if w >= 1 && w <= max_weight && graph.is_connected(&cur.support()) {
            out.insert(cur.to_string());
        }
    }
    out
}

/// `L(v)`: product of single-outcome flip faults.
pub fn flip_product(c: &Circuit, v: &BitVec) -> FaultOperator {
    let mut f = FaultOperator::for_circuit(c);
    for j in v.iter_ones() {
        f.mul_assign(&flip_fault(c, j));
    }
    f
}

/// Maximum log-probability per syndrome over all configurations, each
/// active location either fault-free or struck by exactly one of its events.
pub fn brute_mlf(model: &FaultModel, code: &SpacetimeCode) -> HashMap<BitVec, f64> {
    let active = model.active_locations();
    let radix: Vec<usize> = active.iter().map(|&l| model.events_at(l).len() + 1).collect();
    let first_event: Vec<usize> = active
        .iter()
        .map(|&l| {
            let e = &model.events_at(l)[0];
            model.events().iter().position(|x| x == e).unwrap()
        })
        .collect();
    let mut best: HashMap<BitVec, f64> = HashMap::new();
    let mut digits = vec![0usize; radix.len()];
    loop {
        let events: Vec<usize> = digits
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(i, &d)| first_event[i] + d - 1)
            .collect();
        let f = model.fault_of(&events);
        let s = code.syndrome(&f).unwrap();
        let lp = model.log_prob(&events);
        let e = best.entry(s).or_insert(f64::NEG_INFINITY);
        if lp > *e {
            *e = lp;
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                return best;
            }
            digits[i] += 1;
            if digits[i] < radix[i] {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Number of configurations enumerated by [`brute_mlf`].
pub fn configuration_count(model: &FaultModel) -> u128 {
    model.active_locations().iter().map(|&l| model.events_at(l).len() as u128 + 1).product()
}
