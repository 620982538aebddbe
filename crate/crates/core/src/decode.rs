//! Circuit noise, outcome sampling, lookup-table most-likely-fault decoding and
//! Monte Carlo accounting.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Circuit, OpKind};
use crate::error::{check_dim, Error, Result};
use crate::gf2::BitVec;
use crate::outcome_code::{compute_outcome_code, linearize, OutcomeCode, OutputStabilizerGroup};
use crate::pauli::{Letter, ProjPauli};
use crate::propagation::{self, Effect, FaultOperator};
use crate::spacetime_code::SpacetimeCode;

/// Fault probabilities per location class, with per-operation overrides.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    pub p_unitary: f64,
    pub p_measurement: f64,
    pub p_idle: f64,
    /// Operation index → probability, replacing the class default.
    pub overrides: BTreeMap<usize, f64>,
}

impl NoiseModel {
    pub fn uniform(p: f64) -> Self {
        NoiseModel { p_unitary: p, p_measurement: p, p_idle: p, overrides: BTreeMap::new() }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.p_unitary, self.p_measurement, self.p_idle];
        for p in all.iter().chain(self.overrides.values()) {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::Precondition(format!("probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocationKind {
    /// Index into the circuit's operation list.
    Operation(usize),
    Idle,
}

/// A place where a fault can strike: an operation or an idle qubit at a level.
#[derive(Clone, Debug, PartialEq)]
pub struct Location {
    pub kind: LocationKind,
    pub level: usize,
    pub qubits: Vec<usize>,
    /// Measurement index if this location is a measurement.
    pub measurement: Option<usize>,
    pub p: f64,
}

/// One way a location can be faulty.
#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub location: usize,
    /// Pauli error on the location's support, placed right after its level.
    pub pauli: ProjPauli,
    /// Whether the measurement outcome is also flipped.
    pub flip: bool,
    pub fault: FaultOperator,
    /// Probability that the location is faulty in exactly this way.
    pub p: f64,
}

/// All fault locations of a circuit and their elementary events.
#[derive(Clone, Debug)]
pub struct FaultModel {
    n: usize,
    depth: usize,
    locations: Vec<Location>,
    events: Vec<Event>,
    loc_events: Vec<std::ops::Range<usize>>,
}

/// Non-identity Paulis on `qubits`, qubit 0 varying fastest in I, X, Y, Z order.
fn support_paulis(n: usize, qubits: &[usize]) -> Vec<ProjPauli> {
    let letters = [Letter::I, Letter::X, Letter::Y, Letter::Z];
    let w = qubits.len();
    (1..4usize.pow(w as u32))
        .map(|mut t| {
            let mut p = ProjPauli::identity(n);
            for &q in qubits {
                p.set(q, letters[t % 4]);
                t /= 4;
            }
            p
        })
        .collect()
}

impl FaultModel {
    /// Locations ordered by level; within a level, operations in file order
    /// then idle qubits ascending.
    pub fn new(c: &Circuit, nm: &NoiseModel) -> Result<FaultModel> {
        nm.validate()?;
        let mut locations = Vec::new();
        let mut meas_of_op = HashMap::new();
        for (j, m) in c.measurements().iter().enumerate() {
            meas_of_op.insert(m.op_index, j);
        }
        let mut op_index = 0;
        for l in 1..=c.depth() {
            for op in c.ops_at_level(l) {
                let (class_p, measurement) = match op.kind {
                    OpKind::Measurement(_) => (nm.p_measurement, meas_of_op.get(&op_index).copied()),
                    OpKind::Unitary { .. } => (nm.p_unitary, None),
                };
                let p = nm.overrides.get(&op_index).copied().unwrap_or(class_p);
                let mut qubits = op.support();
                qubits.sort_unstable();
                locations.push(Location {
                    kind: LocationKind::Operation(op_index),
                    level: l,
                    qubits,
                    measurement,
                    p,
                });
                op_index += 1;
            }
            for q in c.idle_qubits(l) {
                locations.push(Location {
                    kind: LocationKind::Idle,
                    level: l,
                    qubits: vec![q],
                    measurement: None,
                    p: nm.p_idle,
                });
            }
        }
        let mut events = Vec::new();
        let mut loc_events = Vec::with_capacity(locations.len());
        for (li, loc) in locations.iter().enumerate() {
            let start = events.len();
            if loc.p > 0.0 {
                let paulis = support_paulis(c.n(), &loc.qubits);
                let flips: &[bool] = if loc.measurement.is_some() { &[false, true] } else { &[false] };
                let p = loc.p / (paulis.len() * flips.len()) as f64;
                for e in &paulis {
                    for &flip in flips {
                        let mut fault = FaultOperator::eta(c.n(), c.depth(), loc.level, e)?;
                        if flip {
                            fault.mul_assign(&propagation::flip_fault(c, loc.measurement.unwrap()));
                        }
                        events.push(Event { location: li, pauli: e.clone(), flip, fault, p });
                    }
                }
            }
            loc_events.push(start..events.len());
        }
        Ok(FaultModel { n: c.n(), depth: c.depth(), locations, events, loc_events })
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn events_at(&self, location: usize) -> &[Event] {
        &self.events[self.loc_events[location].clone()]
    }

    /// Locations that can be faulty (`p > 0`).
    pub fn active_locations(&self) -> Vec<usize> {
        (0..self.locations.len()).filter(|&i| !self.loc_events[i].is_empty()).collect()
    }

    /// Product fault of a set of events.
    pub fn fault_of(&self, events: &[usize]) -> FaultOperator {
        let mut f = FaultOperator::identity(self.n, self.depth);
        for &e in events {
            f.mul_assign(&self.events[e].fault);
        }
        f
    }

    /// Natural log of the probability of the configuration in which exactly
    /// the given events occur (at distinct locations) and every other
    /// location is fault-free.
    pub fn log_prob(&self, events: &[usize]) -> f64 {
        let mut faulty = vec![false; self.locations.len()];
        let mut lp = 0.0;
        for &e in events {
            let ev = &self.events[e];
            faulty[ev.location] = true;
            lp += ev.p.ln();
        }
        for (i, loc) in self.locations.iter().enumerate() {
            if !faulty[i] {
                lp += (1.0 - loc.p).ln();
            }
        }
        lp
    }

    /// Each location independently faulty with its probability; a faulty
    /// location picks one of its events uniformly.
    pub fn sample_events<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        let mut out = Vec::new();
        for (li, loc) in self.locations.iter().enumerate() {
            let range = self.loc_events[li].clone();
            if range.is_empty() {
                continue;
            }
            if rng.gen::<f64>() < loc.p {
                out.push(rng.gen_range(range));
            }
        }
        out
    }

    pub fn sample_fault<R: Rng>(&self, rng: &mut R) -> FaultOperator {
        self.fault_of(&self.sample_events(rng))
    }
}

/// Draws a fault for circuit `c` under noise `nm`.
pub fn sample_fault<R: Rng>(c: &Circuit, nm: &NoiseModel, rng: &mut R) -> Result<FaultOperator> {
    Ok(FaultModel::new(c, nm)?.sample_fault(rng))
}

/// Uniform sampling of fault-free outcome strings.
#[derive(Clone, Debug)]
pub struct OutcomeSampler {
    basis: Vec<BitVec>,
    offset: BitVec,
}

impl OutcomeSampler {
    pub fn new(oc: &OutcomeCode) -> Self {
        OutcomeSampler { basis: oc.codeword_basis(), offset: oc.particular_solution() }
    }

    pub fn sample_codeword<R: Rng>(&self, rng: &mut R) -> BitVec {
        let mut o = self.offset.clone();
        for b in &self.basis {
            if rng.gen::<bool>() {
                o.xor_assign(b);
            }
        }
        o
    }

    /// A uniformly random fault-free outcome string flipped by the fault's effect.
    pub fn sample<R: Rng>(&self, c: &Circuit, f: &FaultOperator, rng: &mut R) -> Result<BitVec> {
        let e = propagation::effect(c, f)?;
        let mut o = self.sample_codeword(rng);
        o.xor_assign(&e.f);
        Ok(o)
    }
}

/// Outcomes of a run with fault `f` on the maximally mixed input.
pub fn simulate_outcomes<R: Rng>(
    c: &Circuit,
    oc: &OutcomeCode,
    f: &FaultOperator,
    rng: &mut R,
) -> Result<BitVec> {
    OutcomeSampler::new(oc).sample(c, f, rng)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LookupEntry {
    pub log_prob: f64,
    pub events: Vec<usize>,
    pub fault: FaultOperator,
    pub effect: Effect,
    text: String,
}

impl LookupEntry {
    pub fn prob(&self) -> f64 {
        self.log_prob.exp()
    }
}

/// Syndrome → most likely enumerated fault.
#[derive(Clone, Debug)]
pub struct LookupDecoder {
    r: usize,
    m: usize,
    n: usize,
    max_faults: usize,
    table: HashMap<BitVec, LookupEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub effect: Effect,
    /// The syndrome had no table entry.
    pub miss: bool,
}

pub const DEFAULT_TABLE_BUDGET: u64 = 10_000_000;

const TIE_TOLERANCE: f64 = 1e-9;

fn same_prob(a: f64, b: f64) -> bool {
    a == b || (a.is_finite() && b.is_finite() && (a - b).abs() <= TIE_TOLERANCE * a.abs().max(1.0))
}

/// Number of ways to pick at most `k` distinct locations and one event at each.
pub fn count_configurations(event_counts: &[usize], k: usize) -> u128 {
    let mut e = vec![0u128; k + 1];
    e[0] = 1;
    for &c in event_counts {
        for j in (1..=k).rev() {
            e[j] = e[j].saturating_add(e[j - 1].saturating_mul(c as u128));
        }
    }
    e.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

struct Builder<'a> {
    model: &'a FaultModel,
    syn: Vec<BitVec>,
    eff: Vec<Effect>,
    delta: Vec<f64>,
    forced_of_event: Vec<bool>,
    forced_total: usize,
    base: f64,
    table: HashMap<BitVec, LookupEntry>,
}

impl Builder<'_> {
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &mut self,
        active: &[usize],
        start: usize,
        left: usize,
        syn: &BitVec,
        eff: &Effect,
        lp: f64,
        forced: usize,
        chosen: &mut Vec<usize>,
    ) {
        self.record(syn, eff, lp, forced, chosen);
        if left == 0 {
            return;
        }
        for ai in start..active.len() {
            for e in self.model.loc_events[active[ai]].clone() {
                let s = syn.xor(&self.syn[e]);
                let ef = Effect { f: eff.f.xor(&self.eff[e].f), e: eff.e.mul(&self.eff[e].e) };
                chosen.push(e);
                let fc = forced + self.forced_of_event[e] as usize;
                self.dfs(active, ai + 1, left - 1, &s, &ef, lp + self.delta[e], fc, chosen);
                chosen.pop();
            }
        }
    }

    fn record(&mut self, syn: &BitVec, eff: &Effect, lp: f64, forced: usize, chosen: &[usize]) {
        let lp = if forced == self.forced_total { self.base + lp } else { f64::NEG_INFINITY };
        let make = |model: &FaultModel| {
            let fault = model.fault_of(chosen);
            let text = fault.to_string();
            LookupEntry { log_prob: lp, events: chosen.to_vec(), fault, effect: eff.clone(), text }
        };
        match self.table.get_mut(syn) {
            None => {
                let entry = make(self.model);
                self.table.insert(syn.clone(), entry);
            }
            Some(old) => {
                let better = if same_prob(lp, old.log_prob) {
                    if chosen.len() != old.events.len() {
                        chosen.len() < old.events.len()
                    } else {
                        self.model.fault_of(chosen).to_string() < old.text
                    }
                } else {
                    lp > old.log_prob
                };
                if better {
                    *old = make(self.model);
                }
            }
        }
    }
}

impl LookupDecoder {
    /// Enumerates every configuration of at most `max_faults` events at
    /// distinct locations and keeps the most likely one per syndrome. Ties go
    /// to fewer events, then to the smaller fault text.
    pub fn build(
        c: &Circuit,
        code: &SpacetimeCode,
        model: &FaultModel,
        max_faults: usize,
        budget: u64,
    ) -> Result<LookupDecoder> {
        let active = model.active_locations();
        let counts: Vec<usize> = active.iter().map(|&l| model.loc_events[l].len()).collect();
        let total = count_configurations(&counts, max_faults);
        if total > budget as u128 {
            return Err(Error::Budget(format!(
                "{total} fault configurations over {} locations with up to {max_faults} faults (budget {budget})",
                active.len()
            )));
        }
        let syn: Vec<BitVec> = model.events.iter().map(|e| code.syndrome_unchecked(&e.fault)).collect();
        let eff = model
            .events
            .iter()
            .map(|e| propagation::effect(c, &e.fault))
            .collect::<Result<Vec<_>>>()?;
        let mut base = 0.0;
        let mut forced_total = 0;
        let mut forced_loc = vec![false; model.locations.len()];
        for (i, loc) in model.locations.iter().enumerate() {
            if loc.p >= 1.0 {
                forced_total += 1;
                forced_loc[i] = true;
            } else {
                base += (1.0 - loc.p).ln();
            }
        }
        let delta = model
            .events
            .iter()
            .map(|e| {
                let p = model.locations[e.location].p;
                e.p.ln() - if p < 1.0 { (1.0 - p).ln() } else { 0.0 }
            })
            .collect();
        let forced_of_event = model.events.iter().map(|e| forced_loc[e.location]).collect();
        let mut b = Builder {
            model,
            syn,
            eff,
            delta,
            forced_of_event,
            forced_total,
            base,
            table: HashMap::new(),
        };
        let zero = Effect::trivial(c.num_measurements(), c.n());
        b.dfs(&active, 0, max_faults, &BitVec::zeros(code.r()), &zero, 0.0, 0, &mut Vec::new());
        Ok(LookupDecoder { r: code.r(), m: c.num_measurements(), n: c.n(), max_faults, table: b.table })
    }

    pub fn max_faults(&self) -> usize {
        self.max_faults
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&self, syndrome: &BitVec) -> Option<&LookupEntry> {
        self.table.get(syndrome)
    }

    /// Entries sorted by syndrome.
    pub fn entries(&self) -> Vec<(&BitVec, &LookupEntry)> {
        let mut v: Vec<_> = self.table.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    /// Effect of the stored fault for the outcome syndrome of `o`.
    pub fn decode(&self, oc: &OutcomeCode, o: &BitVec) -> Result<Decoded> {
        check_dim(oc.m(), o.len())?;
        let s = oc.syndrome_unchecked(o);
        Ok(match self.table.get(&s) {
            Some(e) => Decoded { effect: e.effect.clone(), miss: false },
            None => Decoded { effect: Effect::trivial(self.m, self.n), miss: true },
        })
    }

    /// Binary dump: magic, version, `r`, `m`, entry count, then per entry the
    /// syndrome bytes, event count, event indices and log-probability.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(TABLE_MAGIC);
        out.extend_from_slice(&TABLE_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.r as u32).to_le_bytes());
        out.extend_from_slice(&(self.m as u32).to_le_bytes());
        out.extend_from_slice(&(self.table.len() as u64).to_le_bytes());
        for (s, e) in self.entries() {
            out.extend_from_slice(&s.to_bytes());
            out.extend_from_slice(&(e.events.len() as u32).to_le_bytes());
            for &ev in &e.events {
                out.extend_from_slice(&(ev as u32).to_le_bytes());
            }
            out.extend_from_slice(&e.log_prob.to_le_bytes());
        }
        out
    }
}

pub const TABLE_MAGIC: &[u8; 8] = b"STCLKUP\0";
pub const TABLE_VERSION: u32 = 1;

/// One record of a dumped table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRecord {
    pub syndrome: BitVec,
    pub events: Vec<u32>,
    pub log_prob: f64,
}

/// Reads a dump written by [`LookupDecoder::to_bytes`]; returns `(r, m, records)`.
pub fn read_table(bytes: &[u8]) -> Result<(usize, usize, Vec<TableRecord>)> {
    let bad = |msg: &str| Error::Precondition(format!("malformed table: {msg}"));
    let mut pos = 0usize;
    let mut take = |k: usize| -> Result<&[u8]> {
        let s = bytes.get(pos..pos + k).ok_or_else(|| bad("truncated"))?;
        pos += k;
        Ok(s)
    };
    if take(8)? != TABLE_MAGIC {
        return Err(bad("bad magic"));
    }
    let u32_at = |s: &[u8]| u32::from_le_bytes(s.try_into().expect("4 bytes"));
    let version = u32_at(take(4)?);
    if version != TABLE_VERSION {
        return Err(bad("unsupported version"));
    }
    let r = u32_at(take(4)?) as usize;
    let m = u32_at(take(4)?) as usize;
    let count = u64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
    let mut recs = Vec::new();
    for _ in 0..count {
        let syndrome = BitVec::from_bytes(r, take(r.div_ceil(8))?).ok_or_else(|| bad("syndrome"))?;
        let k = u32_at(take(4)?) as usize;
        let mut events = Vec::with_capacity(k);
        for _ in 0..k {
            events.push(u32_at(take(4)?));
        }
        let log_prob = f64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
        recs.push(TableRecord { syndrome, events, log_prob });
    }
    if pos != bytes.len() {
        return Err(bad("trailing bytes"));
    }
    Ok((r, m, recs))
}

/// Minimum-weight decoder for the output stabilizer code.
#[derive(Debug)]
pub struct OutputDecoder {
    n: usize,
    generators: Vec<ProjPauli>,
    logicals: Vec<ProjPauli>,
    cache: Mutex<HashMap<BitVec, ProjPauli>>,
}

impl OutputDecoder {
    pub fn new(group: &OutputStabilizerGroup, n: usize) -> Self {
        OutputDecoder {
            n,
            generators: group.generators.iter().map(|g| g.op.proj().clone()).collect(),
            logicals: group
                .logicals
                .iter()
                .flat_map(|(a, b)| [a.proj().clone(), b.proj().clone()])
                .collect(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn syndrome(&self, e: &ProjPauli) -> BitVec {
        BitVec::from_bools(&self.generators.iter().map(|g| g.commutator(e)).collect::<Vec<_>>())
    }

    /// A minimum-weight Pauli with the given syndrome, first in enumeration
    /// order among those of that weight.
    pub fn correction(&self, s: &BitVec) -> ProjPauli {
        if let Some(c) = self.cache.lock().expect("cache poisoned").get(s) {
            return c.clone();
        }
        let c = self.search(s);
        self.cache.lock().expect("cache poisoned").insert(s.clone(), c.clone());
        c
    }

    fn search(&self, s: &BitVec) -> ProjPauli {
        let n = self.n;
        for w in 0..=n {
            let mut qubits: Vec<usize> = (0..w).collect();
            loop {
                for mut t in 0..3usize.pow(w as u32) {
                    let mut p = ProjPauli::identity(n);
                    for &q in &qubits {
                        p.set(q, Letter::NON_IDENTITY[t % 3]);
                        t /= 3;
                    }
                    if &self.syndrome(&p) == s {
                        return p;
                    }
                }
                if !next_combination(&mut qubits, n) {
                    break;
                }
            }
        }
        unreachable!("every syndrome of independent generators is attainable")
    }

    /// Whether the decoder undoes `r` up to a stabilizer.
    pub fn is_correctable(&self, r: &ProjPauli) -> bool {
        let c = self.correction(&self.syndrome(r));
        let residual = c.mul(r);
        self.logicals.iter().all(|l| !l.commutator(&residual))
    }
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Success iff the outcome flips are recovered exactly and the residual
/// `Ê·E` is corrected by the minimum-weight output decoder.
pub fn is_success(
    c: &Circuit,
    out: &OutputDecoder,
    f: &FaultOperator,
    est: &Effect,
) -> Result<bool> {
    let actual = propagation::effect(c, f)?;
    Ok(est.f == actual.f && out.is_correctable(&est.e.mul(&actual.e)))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TrialReport {
    pub trials: u64,
    pub successes: u64,
    pub outcome_failures: u64,
    pub residual_failures: u64,
    /// Trials whose syndrome was absent from the table (also counted above).
    pub misses: u64,
    pub seed: u64,
    pub max_faults: usize,
}

impl TrialReport {
    pub fn failures(&self) -> u64 {
        self.outcome_failures + self.residual_failures
    }

    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.failures() as f64 / self.trials as f64
        }
    }

    /// 95% Wilson score interval for the failure rate.
    pub fn ci95(&self) -> (f64, f64) {
        wilson(self.failures(), self.trials)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc {
            schema_version: u32,
            trials: u64,
            failures: u64,
            outcome_failures: u64,
            residual_failures: u64,
            misses: u64,
            rate: f64,
            ci95: [f64; 2],
            seed: u64,
            #[serde(rename = "M_f")]
            max_faults: usize,
        }
        let (lo, hi) = self.ci95();
        serde_json::to_string_pretty(&Doc {
            schema_version: crate::SCHEMA_VERSION,
            trials: self.trials,
            failures: self.failures(),
            outcome_failures: self.outcome_failures,
            residual_failures: self.residual_failures,
            misses: self.misses,
            rate: self.rate(),
            ci95: [lo, hi],
            seed: self.seed,
            max_faults: self.max_faults,
        })
        .expect("serializable")
    }
}

pub fn wilson(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = n as f64;
    let p = k as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Everything needed to decode a circuit under a noise model.
#[derive(Debug)]
pub struct Experiment {
    /// The linearized circuit.
    pub circuit: Circuit,
    pub outcome_code: OutcomeCode,
    pub code: SpacetimeCode,
    pub model: FaultModel,
    pub decoder: LookupDecoder,
    pub output: OutputDecoder,
    pub sampler: OutcomeSampler,
}

impl Experiment {
    pub fn new(c: &Circuit, nm: &NoiseModel, max_faults: usize, budget: u64) -> Result<Self> {
        let circuit = linearize(c);
        let (outcome_code, group) = compute_outcome_code(&circuit);
        let code = SpacetimeCode::build(&circuit, &outcome_code)?;
        let model = FaultModel::new(&circuit, nm)?;
        let decoder = LookupDecoder::build(&circuit, &code, &model, max_faults, budget)?;
        let output = OutputDecoder::new(&group, circuit.n());
        let sampler = OutcomeSampler::new(&outcome_code);
        Ok(Experiment { circuit, outcome_code, code, model, decoder, output, sampler })
    }

    /// One trial: sample, simulate, decode, judge.
    pub fn run_trial<R: Rng>(&self, rng: &mut R) -> TrialOutcome {
        let events = self.model.sample_events(rng);
        let f = self.model.fault_of(&events);
        self.judge(&f, rng)
    }

    /// Decodes a run with the given fault and classifies the result.
    pub fn judge<R: Rng>(&self, f: &FaultOperator, rng: &mut R) -> TrialOutcome {
        let actual = propagation::effect(&self.circuit, f).expect("shapes match");
        let mut o = self.sampler.sample_codeword(rng);
        o.xor_assign(&actual.f);
        let d = self.decoder.decode(&self.outcome_code, &o).expect("length matches");
        let kind = if d.effect.f != actual.f {
            TrialKind::OutcomeFailure
        } else if !self.output.is_correctable(&d.effect.e.mul(&actual.e)) {
            TrialKind::ResidualFailure
        } else {
            TrialKind::Success
        };
        TrialOutcome { kind, miss: d.miss }
    }

    /// Independent trials with per-trial streams `(seed, index)`; the report
    /// does not depend on thread count.
    pub fn monte_carlo(&self, trials: u64, seed: u64) -> TrialReport {
        let outcomes: Vec<TrialOutcome> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t);
                self.run_trial(&mut rng)
            })
            .collect();
        let mut rep = TrialReport { trials, seed, max_faults: self.decoder.max_faults(), ..Default::default() };
        for o in outcomes {
            match o.kind {
                TrialKind::Success => rep.successes += 1,
                TrialKind::OutcomeFailure => rep.outcome_failures += 1,
                TrialKind::ResidualFailure => rep.residual_failures += 1,
            }
            rep.misses += o.miss as u64;
        }
        rep
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialKind {
    Success,
    OutcomeFailure,
    ResidualFailure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub kind: TrialKind,
    pub miss: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_circuit;

    fn two_z() -> Circuit {
        parse_circuit("QUBITS 1\nM Z0\nTICK\nM Z0").unwrap()
    }

    #[test]
    fn locations_and_events() {
        let c = parse_circuit("QUBITS 2\nCX 0 1\nTICK\nM Z0").unwrap();
        let fm = FaultModel::new(&c, &NoiseModel::uniform(0.01)).unwrap();
        let kinds: Vec<_> = fm.locations().iter().map(|l| (l.level, l.qubits.clone())).collect();
        assert_eq!(kinds, vec![(1, vec![0, 1]), (2, vec![0]), (2, vec![1])]);
        assert_eq!(fm.events_at(0).len(), 15);
        assert_eq!(fm.events_at(1).len(), 6);
        assert_eq!(fm.events_at(2).len(), 3);
        let total: f64 = fm.events_at(1).iter().map(|e| e.p).sum();
        assert!((total - 0.01).abs() < 1e-15);
    }

    #[test]
    fn zero_noise_gives_identity() {
        let c = two_z();
        let fm = FaultModel::new(&c, &NoiseModel::uniform(0.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert!(fm.sample_fault(&mut rng).is_identity());
        }
        assert!(fm.events().is_empty());
    }

    #[test]
    fn forced_measurement_fault() {
        let c = parse_circuit("QUBITS 1\nM Z0").unwrap();
        let mut nm = NoiseModel::uniform(0.0);
        nm.p_measurement = 1.0;
        let fm = FaultModel::new(&c, &nm).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut flips = 0;
        for _ in 0..200 {
            let ev = fm.sample_events(&mut rng);
            assert_eq!(ev.len(), 1);
            let e = &fm.events()[ev[0]];
            if e.flip {
                flips += 1;
                let f = &e.fault;
                assert_eq!(f.layer(0), ProjPauli::parse("X0", 1).unwrap());
            }
        }
        assert!(flips > 60 && flips < 140, "{flips}");
    }

    #[test]
    fn outcome_sampling_on_repeated_measurement() {
        let c = two_z();
        let (oc, _) = compute_outcome_code(&c);
        let s = OutcomeSampler::new(&oc);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = [0usize; 4];
        for _ in 0..400 {
            let o = s.sample(&c, &FaultOperator::for_circuit(&c), &mut rng).unwrap();
            seen[o.get(0) as usize + 2 * o.get(1) as usize] += 1;
        }
        assert_eq!(seen[1] + seen[2], 0);
        assert!(seen[0] > 150 && seen[3] > 150);

        let x = FaultOperator::parse("1.5:X0", 1, 2).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        let a = s.sample(&c, &FaultOperator::for_circuit(&c), &mut r1).unwrap();
        let b = s.sample(&c, &x, &mut r2).unwrap();
        assert_eq!(a.xor(&b).to_string(), "01");
    }

    #[test]
    fn lookup_table_for_repeated_measurement() {
        let c = two_z();
        let (oc, _) = compute_outcome_code(&c);
        let code = SpacetimeCode::build(&c, &oc).unwrap();
        let fm = FaultModel::new(&c, &NoiseModel::uniform(0.01)).unwrap();
        let d0 = LookupDecoder::build(&c, &code, &fm, 0, DEFAULT_TABLE_BUDGET).unwrap();
        assert_eq!(d0.len(), 1);
        assert!(d0.get(&BitVec::zeros(1)).unwrap().fault.is_identity());
        let d1 = LookupDecoder::build(&c, &code, &fm, 1, DEFAULT_TABLE_BUDGET).unwrap();
        let e = d1.get(&BitVec::unit(1, 0)).unwrap();
        assert_eq!(e.events.len(), 1);
        assert_eq!(e.effect.f.count_ones(), 1);
        assert!(d1.get(&BitVec::zeros(1)).unwrap().fault.is_identity());
        let o = BitVec::parse_bits("10").unwrap();
        let dec = d1.decode(&oc, &o).unwrap();
        assert!(!dec.miss);
        assert_eq!(dec.effect, e.effect);
    }

    #[test]
    fn configuration_count() {
        assert_eq!(count_configurations(&[3, 15, 6], 0), 1);
        assert_eq!(count_configurations(&[3, 15, 6], 1), 25);
        assert_eq!(count_configurations(&[3, 15, 6], 2), 25 + 45 + 18 + 90);
        assert_eq!(count_configurations(&[2, 2], 5), 9);
    }

    #[test]
    fn budget_is_enforced() {
        let c = two_z();
        let (oc, _) = compute_outcome_code(&c);
        let code = SpacetimeCode::build(&c, &oc).unwrap();
        let fm = FaultModel::new(&c, &NoiseModel::uniform(0.01)).unwrap();
        match LookupDecoder::build(&c, &code, &fm, 2, 10) {
            Err(Error::Budget(msg)) => assert!(msg.contains("2 locations"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn table_dump_round_trip() {
        let c = two_z();
        let exp = Experiment::new(&c, &NoiseModel::uniform(0.01), 2, DEFAULT_TABLE_BUDGET).unwrap();
        let bytes = exp.decoder.to_bytes();
        let (r, m, recs) = read_table(&bytes).unwrap();
        assert_eq!((r, m, recs.len()), (1, 2, exp.decoder.len()));
        for rec in recs {
            let e = exp.decoder.get(&rec.syndrome).unwrap();
            assert_eq!(rec.log_prob, e.log_prob);
            assert_eq!(rec.events.iter().map(|&x| x as usize).collect::<Vec<_>>(), e.events);
        }
        assert!(read_table(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn output_decoder_min_weight() {
        let c = parse_circuit("QUBITS 3\nM Z0*Z1\nM Z2\nTICK\nM Z1*Z2").unwrap();
        let (_, g) = compute_outcome_code(&c);
        let od = OutputDecoder::new(&g, 3);
        let x1 = ProjPauli::parse("X1", 3).unwrap();
        assert_eq!(od.correction(&od.syndrome(&x1)).weight(), 1);
        assert!(od.is_correctable(&ProjPauli::parse("Z0", 3).unwrap()));
        assert!(od.is_correctable(&ProjPauli::identity(3)));
    }

    #[test]
    fn noiseless_monte_carlo_always_succeeds() {
        let c = parse_circuit("QUBITS 2\nM Z0*Z1\nTICK\nCX 0 1\nTICK\nM Z1").unwrap();
        let exp = Experiment::new(&c, &NoiseModel::uniform(0.0), 1, DEFAULT_TABLE_BUDGET).unwrap();
        let rep = exp.monte_carlo(200, 5);
        assert_eq!(rep.successes, 200);
        assert_eq!(rep, exp.monte_carlo(200, 5));
    }

    #[test]
    fn wilson_interval() {
        let (lo, hi) = wilson(0, 100);
        assert!(lo.abs() < 1e-12);
        assert!(hi > 0.03 && hi < 0.04);
        let (lo, hi) = wilson(50, 100);
        assert!(lo < 0.5 && hi > 0.5);
    }
}
