//! The spacetime stabilizer code generated by the check operators of a circuit.

use std::fmt::Write as _;

use serde::Serialize;

use crate::circuit::Circuit;
use crate::error::{check_dim, Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::outcome_code::OutcomeCode;
use crate::pauli::ProjPauli;
use crate::propagation::{self, FaultOperator};
use crate::symplectic;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpacetimeCode {
    n: usize,
    depth: usize,
    m: usize,
    k: usize,
    checks: Vec<BitVec>,
    stabilizers: Vec<FaultOperator>,
}

impl SpacetimeCode {
    /// One check operator `B[F(u_i)]` per outcome check. The outcome code must
    /// be linear.
    pub fn build(c: &Circuit, oc: &OutcomeCode) -> Result<SpacetimeCode> {
        check_dim(c.num_measurements(), oc.m())?;
        if !oc.is_linear() {
            return Err(Error::NonLinear);
        }
        let checks: Vec<BitVec> = oc.checks().iter().map(|ch| ch.u.clone()).collect();
        let stabilizers = checks
            .iter()
            .map(|u| propagation::check_operator(c, u))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpacetimeCode { n: c.n(), depth: c.depth(), m: oc.m(), k: oc.k(), checks, stabilizers })
    }

    /// Replaces the generators, e.g. by a sparser basis of the same group.
    pub fn with_stabilizers(&self, stabilizers: Vec<FaultOperator>, checks: Vec<BitVec>) -> Self {
        assert_eq!(stabilizers.len(), checks.len());
        SpacetimeCode { stabilizers, checks, ..self.clone() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of spacetime qubits `n(Δ+1)`.
    pub fn num_qubits(&self) -> usize {
        self.n * (self.depth + 1)
    }

    /// Number of logical qubits `N − (m − k)`.
    pub fn num_logicals(&self) -> usize {
        self.num_qubits() - (self.m - self.k)
    }

    pub fn r(&self) -> usize {
        self.stabilizers.len()
    }

    pub fn stabilizers(&self) -> &[FaultOperator] {
        &self.stabilizers
    }

    /// The outcome check behind each stabilizer.
    pub fn checks(&self) -> &[BitVec] {
        &self.checks
    }

    /// Component `i` is `[S_i, F]`.
    pub fn syndrome(&self, f: &FaultOperator) -> Result<BitVec> {
        check_dim(self.num_qubits(), f.flat().n())?;
        Ok(self.syndrome_unchecked(f))
    }

    pub(crate) fn syndrome_unchecked(&self, f: &FaultOperator) -> BitVec {
        let mut s = BitVec::zeros(self.stabilizers.len());
        for (i, st) in self.stabilizers.iter().enumerate() {
            if st.commutator(f) {
                s.set(i, true);
            }
        }
        s
    }

    /// Rows are stabilizers in symplectic form; X bits of spacetime qubit
    /// `l·n + q` in column `l·n + q`, Z bits `N` columns later.
    pub fn check_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(
            2 * self.num_qubits(),
            self.stabilizers.iter().map(|s| s.flat().symplectic()).collect(),
        )
    }

    pub fn to_alist(&self) -> String {
        alist(&self.check_matrix())
    }

    pub fn to_matrix_market(&self) -> String {
        matrix_market(&self.check_matrix())
    }

    pub fn to_json(&self, logicals: Option<&LogicalGenerators>) -> String {
        #[derive(Serialize)]
        struct Logicals {
            output: Vec<String>,
            level: Vec<String>,
            relation: Vec<String>,
        }
        #[derive(Serialize)]
        struct Doc {
            schema_version: u32,
            n: usize,
            depth: usize,
            #[serde(rename = "N")]
            big_n: usize,
            #[serde(rename = "K")]
            big_k: usize,
            r: usize,
            column_order: &'static str,
            stabilizers: Vec<String>,
            #[serde(skip_serializing_if = "Option::is_none")]
            logicals: Option<Logicals>,
        }
        let s = |v: &[FaultOperator]| v.iter().map(|f| f.to_string()).collect();
        let doc = Doc {
            schema_version: crate::SCHEMA_VERSION,
            n: self.n,
            depth: self.depth,
            big_n: self.num_qubits(),
            big_k: self.num_logicals(),
            r: self.r(),
            column_order: COLUMN_ORDER,
            stabilizers: s(&self.stabilizers),
            logicals: logicals.map(|l| Logicals {
                output: s(&l.output),
                level: s(&l.level),
                relation: s(&l.relation),
            }),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }
}

pub const COLUMN_ORDER: &str =
    "X part then Z part; within each part spacetime qubit (layer l, qubit q) is column l*n+q";

/// Generators of the normalizer of the spacetime code, in three families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalGenerators {
    /// `η_{Δ+0.5}(P)` for `P` in `{X_q, Z_q}`.
    pub output: Vec<FaultOperator>,
    /// `G(P, l)` for `P` in a basis of the commutant of the level-`l` measurements.
    pub level: Vec<FaultOperator>,
    /// `L(v)` for `v` in a basis of the outcome code.
    pub relation: Vec<FaultOperator>,
}

impl LogicalGenerators {
    pub fn all(&self) -> Vec<FaultOperator> {
        self.output.iter().chain(&self.level).chain(&self.relation).cloned().collect()
    }
}

/// `G(P, l) = η_{l-0.5}(P) η_{l+0.5}(U_l P U_l⁻¹)`, whose cumulant is `η_{l-0.5}(P)`.
pub fn level_generator(c: &Circuit, p: &ProjPauli, l: usize) -> FaultOperator {
    let mut f = FaultOperator::for_circuit(c);
    f.mul_layer(l - 1, p);
    f.mul_layer(l, &c.apply_level_proj(l, p));
    f
}

pub fn logical_generators(c: &Circuit, oc: &OutcomeCode) -> Result<LogicalGenerators> {
    check_dim(c.num_measurements(), oc.m())?;
    let (n, depth) = (c.n(), c.depth());
    let mut output = Vec::with_capacity(2 * n);
    for q in 0..n {
        for l in [crate::pauli::Letter::X, crate::pauli::Letter::Z] {
            output.push(FaultOperator::eta(n, depth, depth, &ProjPauli::single(n, q, l))?);
        }
    }
    let mut level = Vec::new();
    for l in 1..=depth {
        let measured: Vec<ProjPauli> = c
            .ops_at_level(l)
            .iter()
            .filter_map(|op| match &op.kind {
                crate::circuit::OpKind::Measurement(s) => Some(s.proj().clone()),
                _ => None,
            })
            .collect();
        for p in symplectic::commutant_basis(&measured, n) {
            level.push(level_generator(c, &p, l));
        }
    }
    let flips: Vec<FaultOperator> =
        (0..c.num_measurements()).map(|j| propagation::flip_fault(c, j)).collect();
    let relation = oc
        .codeword_basis()
        .iter()
        .map(|v| {
            let mut f = FaultOperator::for_circuit(c);
            for j in v.iter_ones() {
                f.mul_assign(&flips[j]);
            }
            f
        })
        .collect();
    Ok(LogicalGenerators { output, level, relation })
}

/// Rank of a set of fault operators as symplectic vectors.
pub fn rank(ops: &[FaultOperator]) -> usize {
    let flat: Vec<ProjPauli> = ops.iter().map(|f| f.flat().clone()).collect();
    symplectic::rank(&flat)
}

/// Structural self-checks; returns a description of every violation found.
pub fn verify(c: &Circuit, code: &SpacetimeCode) -> Vec<String> {
    let mut out = Vec::new();
    let st = code.stabilizers();
    for i in 0..st.len() {
        for j in i + 1..st.len() {
            if st[i].commutator(&st[j]) {
                out.push(format!("stabilizers {i} and {j} anticommute"));
            }
        }
    }
    for (i, (s, u)) in st.iter().zip(code.checks()).enumerate() {
        if !s.layer(0).is_identity() {
            out.push(format!("stabilizer {i} acts on the input layer"));
        }
        let levels: Vec<usize> = u.iter_ones().map(|j| c.measurement(j).level).collect();
        if let (Some(&lo), Some(&hi)) = (levels.iter().min(), levels.iter().max()) {
            for l in (0..lo).chain(hi..=c.depth()) {
                if !s.layer(l).is_identity() {
                    out.push(format!("stabilizer {i} acts on layer {l} outside [{lo}, {hi})"));
                }
            }
        }
        match propagation::check_operator_forward(c, u) {
            Ok(fwd) if &fwd == s => {}
            _ => out.push(format!("stabilizer {i} differs from its forward construction")),
        }
    }
    if rank(st) != st.len() {
        out.push("stabilizers are linearly dependent".into());
    }
    if code.num_logicals() + code.r() != code.num_qubits() {
        out.push("K + r differs from N".into());
    }
    out
}

/// MacKay alist text for a binary matrix, zero-padded to the maximum weights.
pub fn alist(h: &BitMatrix) -> String {
    let rows = h.num_rows();
    let cols = h.num_cols();
    let t = h.transpose();
    let row_w: Vec<usize> = h.rows().iter().map(|r| r.count_ones()).collect();
    let col_w: Vec<usize> = t.rows().iter().map(|r| r.count_ones()).collect();
    let max_r = row_w.iter().copied().max().unwrap_or(0);
    let max_c = col_w.iter().copied().max().unwrap_or(0);
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let mut s = String::new();
    writeln!(s, "{cols} {rows}").unwrap();
    writeln!(s, "{max_c} {max_r}").unwrap();
    writeln!(s, "{}", join(&col_w)).unwrap();
    writeln!(s, "{}", join(&row_w)).unwrap();
    let mut lists = |m: &BitMatrix, width: usize| {
        for r in m.rows() {
            let mut idx: Vec<usize> = r.iter_ones().map(|i| i + 1).collect();
            idx.resize(width, 0);
            writeln!(s, "{}", join(&idx)).unwrap();
        }
    };
    lists(&t, max_c);
    lists(h, max_r);
    s
}

/// Parses alist text back into a matrix.
pub fn parse_alist(text: &str) -> Option<BitMatrix> {
    let mut nums = text.split_whitespace().map(|t| t.parse::<usize>().ok());
    let mut next = || nums.next().flatten();
    let cols = next()?;
    let rows = next()?;
    let max_c = next()?;
    let max_r = next()?;
    for _ in 0..cols + rows {
        next()?;
    }
    let mut h = BitMatrix::zeros(rows, cols);
    for c in 0..cols {
        for _ in 0..max_c {
            let r = next()?;
            if r > 0 {
                h.set(r - 1, c, true);
            }
        }
    }
    for r in 0..rows {
        for _ in 0..max_r {
            let c = next()?;
            if c > 0 && !h.get(r, c - 1) {
                return None;
            }
        }
    }
    Some(h)
}

/// MatrixMarket coordinate format, entries in row-major order.
pub fn matrix_market(h: &BitMatrix) -> String {
    let nnz: usize = h.rows().iter().map(|r| r.count_ones()).sum();
    let mut s = String::from("%%MatrixMarket matrix coordinate integer general\n");
    writeln!(s, "{} {} {}", h.num_rows(), h.num_cols(), nnz).unwrap();
    for (i, r) in h.rows().iter().enumerate() {
        for j in r.iter_ones() {
            writeln!(s, "{} {} 1", i + 1, j + 1).unwrap();
        }
    }
    s
}
