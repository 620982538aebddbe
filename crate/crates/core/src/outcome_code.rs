//! Outcome code of a Clifford circuit via stabilizer simulation with
//! provenance tracking.
//!
//! The simulation starts from the empty stabilizer set, so the input state is
//! unconstrained. Each row's actual sign is `(-1)^(o·prov)` times the sign of
//! its stored operator, where `o` is the vector of outcomes observed so far.

use serde::Serialize;

use crate::circuit::{Circuit, OpKind};
use crate::error::{check_dim, Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::pauli::PhasedPauli;
use crate::symplectic;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedStabilizer {
    pub op: PhasedPauli,
    /// Measurements whose outcomes multiply the sign of `op`.
    pub prov: BitVec,
}

/// An affine check `(o | u) = b` satisfied by every fault-free outcome string.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OutcomeCheck {
    pub u: BitVec,
    pub b: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeCode {
    m: usize,
    checks: Vec<OutcomeCheck>,
    /// Measurement that produced each check; always the last bit of its `u`.
    sources: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputStabilizerGroup {
    pub generators: Vec<AugmentedStabilizer>,
    /// `(X̄_i, Z̄_i)` pairs completing the generators to the full Pauli group.
    pub logicals: Vec<(PhasedPauli, PhasedPauli)>,
}

/// Writes `±p` as a product of rows. Returns `(negative, K)` with
/// `(-1)^negative · p = ∏_{k∈K} rows[k].op`, or `None` if `±p ∉ ⟨rows⟩`.
///
/// Rows must be independent and pairwise commuting.
pub fn membership_and_decompose(
    rows: &[AugmentedStabilizer],
    p: &PhasedPauli,
) -> Option<(bool, Vec<usize>)> {
    let n = p.n();
    if rows.iter().any(|r| r.op.commutator(p)) {
        return None;
    }
    let mut reduced: Vec<(BitVec, BitVec)> = Vec::with_capacity(rows.len());
    let mut pivots: Vec<usize> = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let mut v = r.op.proj().symplectic();
        let mut comb = BitVec::unit(rows.len(), i);
        for ((rv, rc), &pv) in reduced.iter().zip(&pivots) {
            if v.get(pv) {
                v.xor_assign(rv);
                comb.xor_assign(rc);
            }
        }
        let pv = v.first_one()?;
        reduced.push((v, comb));
        pivots.push(pv);
    }
    let mut v = p.proj().symplectic();
    let mut comb = BitVec::zeros(rows.len());
    for ((rv, rc), &pv) in reduced.iter().zip(&pivots) {
        if v.get(pv) {
            v.xor_assign(rv);
            comb.xor_assign(rc);
        }
    }
    if !v.is_zero() {
        return None;
    }
    let k: Vec<usize> = comb.iter_ones().collect();
    let mut prod = PhasedPauli::identity(n);
    for &i in &k {
        prod = prod.mul(&rows[i].op);
    }
    debug_assert_eq!(prod.proj(), p.proj());
    Some((prod.phase_exp() != p.phase_exp(), k))
}

/// Measurement update when `m` anticommutes with some row: the lowest-index
/// anticommuting row is the pivot, the other anticommuting rows absorb it,
/// the pivot is removed, and `m` is appended with provenance `prov`.
pub fn anticommuting_update(
    rows: &mut Vec<AugmentedStabilizer>,
    m: &PhasedPauli,
    prov: BitVec,
) -> Result<()> {
    let Some(t) = rows.iter().position(|r| r.op.commutator(m)) else {
        return Err(Error::Precondition("operator commutes with every row".into()));
    };
    let pivot = rows.remove(t);
    for r in rows.iter_mut() {
        if r.op.commutator(m) {
            r.op = pivot.op.mul(&r.op);
            r.prov.xor_assign(&pivot.prov);
        }
    }
    rows.push(AugmentedStabilizer { op: m.clone(), prov });
    Ok(())
}

/// Runs the simulation; returns the outcome code and the final stabilizers.
pub fn compute_outcome_code(c: &Circuit) -> (OutcomeCode, OutputStabilizerGroup) {
    let (code, rows) = simulate(c);
    let gens: Vec<_> = rows.iter().map(|r| r.op.proj().clone()).collect();
    let logicals = symplectic::logical_pairs(&gens, c.n())
        .into_iter()
        .map(|(a, b)| (PhasedPauli::hermitian(a, false), PhasedPauli::hermitian(b, false)))
        .collect();
    (code, OutputStabilizerGroup { generators: rows, logicals })
}

fn simulate(c: &Circuit) -> (OutcomeCode, Vec<AugmentedStabilizer>) {
    let m = c.num_measurements();
    let mut rows: Vec<AugmentedStabilizer> = Vec::new();
    let mut checks = Vec::new();
    let mut sources = Vec::new();
    let mut j = 0;
    for op in c.ops() {
        match &op.kind {
            OpKind::Unitary { qubits, tableau, .. } => {
                for r in rows.iter_mut() {
                    r.op = tableau.apply_on(qubits, &r.op);
                }
            }
            OpKind::Measurement(s) => {
                let ej = BitVec::unit(m, j);
                if rows.iter().any(|r| r.op.commutator(s)) {
                    anticommuting_update(&mut rows, s, ej).expect("anticommuting row exists");
                } else if let Some((negative, k)) = membership_and_decompose(&rows, s) {
                    let mut u = ej;
                    for i in k {
                        u.xor_assign(&rows[i].prov);
                    }
                    checks.push(OutcomeCheck { u, b: negative });
                    sources.push(j);
                } else {
                    rows.push(AugmentedStabilizer { op: s.clone(), prov: ej });
                }
                j += 1;
            }
        }
    }
    (OutcomeCode { m, checks, sources }, rows)
}

/// The circuit with every measurement whose check has `b = 1` negated, so that
/// its outcome code is linear.
pub fn linearize(c: &Circuit) -> Circuit {
    let (code, _) = simulate(c);
    let mut flip = vec![false; c.num_measurements()];
    for (chk, &j) in code.checks.iter().zip(&code.sources) {
        flip[j] = chk.b;
    }
    c.with_flipped_measurements(&flip)
}

impl OutcomeCode {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.checks.len()
    }

    pub fn k(&self) -> usize {
        self.m - self.checks.len()
    }

    pub fn checks(&self) -> &[OutcomeCheck] {
        &self.checks
    }

    /// Measurement index at which each check was found.
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn is_linear(&self) -> bool {
        self.checks.iter().all(|c| !c.b)
    }

    /// Check matrix with rows `u_i`.
    pub fn check_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(self.m, self.checks.iter().map(|c| c.u.clone()).collect())
    }

    pub fn affine_vector(&self) -> BitVec {
        BitVec::from_bools(&self.checks.iter().map(|c| c.b).collect::<Vec<_>>())
    }

    /// Component `i` is `(o | u_i) ⊕ b_i`.
    pub fn syndrome(&self, o: &BitVec) -> Result<BitVec> {
        check_dim(self.m, o.len())?;
        Ok(self.syndrome_unchecked(o))
    }

    pub(crate) fn syndrome_unchecked(&self, o: &BitVec) -> BitVec {
        let mut s = BitVec::zeros(self.checks.len());
        for (i, c) in self.checks.iter().enumerate() {
            if c.u.dot(o) ^ c.b {
                s.set(i, true);
            }
        }
        s
    }

    /// Basis of the linear part of the code.
    pub fn codeword_basis(&self) -> Vec<BitVec> {
        self.check_matrix().nullspace()
    }

    /// Some outcome string satisfying every check.
    pub fn particular_solution(&self) -> BitVec {
        self.check_matrix()
            .solve(&self.affine_vector())
            .expect("checks are independent")
    }

    pub fn is_codeword(&self, o: &BitVec) -> bool {
        o.len() == self.m && self.syndrome_unchecked(o).is_zero()
    }
}

#[derive(Serialize)]
struct CheckJson {
    u: String,
    b: u8,
}

#[derive(Serialize)]
struct GroupJson {
    generators: Vec<String>,
    logicals: Vec<[String; 2]>,
}

#[derive(Serialize)]
pub(crate) struct OutcomeJson {
    schema_version: u32,
    m: usize,
    k: usize,
    r: usize,
    checks: Vec<CheckJson>,
    output_group: GroupJson,
}

pub(crate) fn to_json_value(code: &OutcomeCode, group: &OutputStabilizerGroup) -> OutcomeJson {
    OutcomeJson {
        schema_version: crate::SCHEMA_VERSION,
        m: code.m,
        k: code.k(),
        r: code.r(),
        checks: code
            .checks
            .iter()
            .map(|c| CheckJson { u: c.u.to_string(), b: c.b as u8 })
            .collect(),
        output_group: GroupJson {
            generators: group.generators.iter().map(|g| g.op.to_string()).collect(),
            logicals: group
                .logicals
                .iter()
                .map(|(a, b)| [a.to_string(), b.to_string()])
                .collect(),
        },
    }
}

/// JSON report `{m, k, checks, output_group}`.
pub fn to_json(code: &OutcomeCode, group: &OutputStabilizerGroup) -> String {
    serde_json::to_string_pretty(&to_json_value(code, group)).expect("serializable")
}
