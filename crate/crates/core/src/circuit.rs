//! Leveled Clifford circuits: unitaries and Pauli-product measurements.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::clifford::CliffordTableau;
use crate::error::{Error, Result};
use crate::pauli::{PhasedPauli, ProjPauli};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    Named(String),
    Tableau,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpKind {
    Unitary {
        gate: Gate,
        qubits: Vec<usize>,
        tableau: CliffordTableau,
        inverse: CliffordTableau,
    },
    Measurement(PhasedPauli),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    pub level: usize,
    pub kind: OpKind,
}

impl Operation {
    pub fn gate(name: &str, qubits: &[usize], level: usize) -> Result<Operation> {
        let tableau = CliffordTableau::named(name)
            .ok_or_else(|| Error::Precondition(format!("unknown gate {name:?}")))?;
        if tableau.n() != qubits.len() {
            return Err(Error::Precondition(format!(
                "gate {name} takes {} qubits, got {}",
                tableau.n(),
                qubits.len()
            )));
        }
        let inverse = tableau.inverse();
        Ok(Operation {
            level,
            kind: OpKind::Unitary {
                gate: Gate::Named(name.to_string()),
                qubits: qubits.to_vec(),
                tableau,
                inverse,
            },
        })
    }

    /// A generic Clifford given by its local tableau; local qubit `i` is `qubits[i]`.
    pub fn tableau(tableau: CliffordTableau, qubits: &[usize], level: usize) -> Operation {
        let inverse = tableau.inverse();
        Operation {
            level,
            kind: OpKind::Unitary { gate: Gate::Tableau, qubits: qubits.to_vec(), tableau, inverse },
        }
    }

    pub fn measure(op: PhasedPauli, level: usize) -> Operation {
        Operation { level, kind: OpKind::Measurement(op) }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self.kind, OpKind::Measurement(_))
    }

    /// Qubits acted on, ascending for measurements and in argument order for unitaries.
    pub fn support(&self) -> Vec<usize> {
        match &self.kind {
            OpKind::Unitary { qubits, .. } => qubits.clone(),
            OpKind::Measurement(p) => p.proj().support(),
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            OpKind::Unitary { gate: Gate::Named(name), qubits, .. } => {
                f.write_str(name)?;
                for q in qubits {
                    write!(f, " {q}")?;
                }
                Ok(())
            }
            OpKind::Unitary { gate: Gate::Tableau, qubits, tableau, .. } => {
                f.write_str("TABLEAU")?;
                for q in qubits {
                    write!(f, " {q}")?;
                }
                write!(f, " {tableau}")
            }
            OpKind::Measurement(p) => write!(f, "M {p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Overlap { level: usize, qubit: usize, first: usize },
    QubitOutOfRange { qubit: usize, n: usize },
    RepeatedQubit { qubit: usize },
    IdentityMeasurement,
    NonHermitianMeasurement,
    LevelOutOfOrder { level: usize, previous: usize },
    ZeroLevel,
    WidthMismatch { expected: usize, got: usize },
    InvalidTableau(String),
}

/// A structural problem found by [`Circuit::validate`] or the parser.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// Index of the offending operation in chronological order.
    pub op: usize,
    pub line: Option<usize>,
    pub kind: DiagnosticKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: ")?,
            None => write!(f, "operation {}: ", self.op)?,
        }
        match &self.kind {
            DiagnosticKind::Overlap { level, qubit, first } => write!(
                f,
                "overlaps operation {first} on qubit {qubit} at level {level}"
            ),
            DiagnosticKind::QubitOutOfRange { qubit, n } => {
                write!(f, "qubit {qubit} out of range for {n} qubits")
            }
            DiagnosticKind::RepeatedQubit { qubit } => write!(f, "qubit {qubit} repeated"),
            DiagnosticKind::IdentityMeasurement => f.write_str("measurement of the identity"),
            DiagnosticKind::NonHermitianMeasurement => {
                f.write_str("measured operator is not Hermitian")
            }
            DiagnosticKind::LevelOutOfOrder { level, previous } => {
                write!(f, "level {level} follows level {previous}")
            }
            DiagnosticKind::ZeroLevel => f.write_str("levels start at 1"),
            DiagnosticKind::WidthMismatch { expected, got } => {
                write!(f, "operator width {got}, expected {expected}")
            }
            DiagnosticKind::InvalidTableau(msg) => write!(f, "invalid tableau: {msg}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub op: PhasedPauli,
    pub level: usize,
    /// Position of the measurement in the operation list.
    pub op_index: usize,
}

/// An `n`-qubit circuit whose operations are sorted by level.
pub struct Circuit {
    n: usize,
    depth: usize,
    ops: Vec<Operation>,
    measurements: Vec<Measurement>,
    level_ranges: Vec<std::ops::Range<usize>>,
    levels: OnceLock<Vec<CliffordTableau>>,
    windows: RwLock<HashMap<(usize, usize), Arc<CliffordTableau>>>,
}

impl Clone for Circuit {
    fn clone(&self) -> Self {
        Circuit::new_unchecked(self.n, self.ops.clone())
    }
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.depth == other.depth && self.ops == other.ops
    }
}

impl Eq for Circuit {}

impl fmt::Debug for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Circuit")
            .field("n", &self.n)
            .field("depth", &self.depth)
            .field("ops", &self.ops)
            .finish()
    }
}

impl Circuit {
    /// Builds and validates a circuit.
    pub fn new(n: usize, ops: Vec<Operation>) -> Result<Circuit> {
        let c = Circuit::new_unchecked(n, ops);
        let diags = c.validate();
        if diags.is_empty() {
            Ok(c)
        } else {
            Err(Error::Invalid(diags))
        }
    }

    /// Builds a circuit without validation. Level queries on an invalid
    /// circuit may panic.
    pub fn new_unchecked(n: usize, ops: Vec<Operation>) -> Circuit {
        let depth = ops.iter().map(|o| o.level).max().unwrap_or(0);
        let measurements = ops
            .iter()
            .enumerate()
            .filter_map(|(i, o)| match &o.kind {
                OpKind::Measurement(p) => {
                    Some(Measurement { op: p.clone(), level: o.level, op_index: i })
                }
                _ => None,
            })
            .collect();
        let mut level_ranges = vec![0..0; depth + 1];
        let mut i = 0;
        for (l, range) in level_ranges.iter_mut().enumerate().skip(1) {
            while i < ops.len() && ops[i].level < l {
                i += 1;
            }
            let start = i;
            while i < ops.len() && ops[i].level == l {
                i += 1;
            }
            *range = start..i;
        }
        Circuit {
            n,
            depth,
            ops,
            measurements,
            level_ranges,
            levels: OnceLock::new(),
            windows: RwLock::new(HashMap::new()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The largest level Δ.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn num_measurements(&self) -> usize {
        self.measurements.len()
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    /// Measurement `j`, counted from zero in chronological order.
    pub fn measurement(&self, j: usize) -> &Measurement {
        &self.measurements[j]
    }

    /// Operations at level `l` (empty slice if none or out of range).
    pub fn ops_at_level(&self, l: usize) -> &[Operation] {
        match self.level_ranges.get(l) {
            Some(r) => &self.ops[r.clone()],
            None => &[],
        }
    }

    /// Qubits untouched by every operation at level `l`, ascending.
    pub fn idle_qubits(&self, l: usize) -> Vec<usize> {
        let mut busy = vec![false; self.n];
        for op in self.ops_at_level(l) {
            for q in op.support() {
                busy[q] = true;
            }
        }
        (0..self.n).filter(|&q| !busy[q]).collect()
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut push = |op: usize, kind| out.push(Diagnostic { op, line: None, kind });
        let mut prev = 0;
        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        for (i, op) in self.ops.iter().enumerate() {
            if op.level == 0 {
                push(i, DiagnosticKind::ZeroLevel);
            }
            if op.level < prev {
                push(i, DiagnosticKind::LevelOutOfOrder { level: op.level, previous: prev });
            }
            prev = prev.max(op.level);
            let support: Vec<usize> = match &op.kind {
                OpKind::Unitary { qubits, tableau, .. } => {
                    if tableau.n() != qubits.len() {
                        push(
                            i,
                            DiagnosticKind::WidthMismatch { expected: qubits.len(), got: tableau.n() },
                        );
                    }
                    let mut seen = Vec::new();
                    for &q in qubits {
                        if q >= self.n {
                            push(i, DiagnosticKind::QubitOutOfRange { qubit: q, n: self.n });
                        }
                        if seen.contains(&q) {
                            push(i, DiagnosticKind::RepeatedQubit { qubit: q });
                        }
                        seen.push(q);
                    }
                    seen
                }
                OpKind::Measurement(p) => {
                    if p.n() != self.n {
                        push(i, DiagnosticKind::WidthMismatch { expected: self.n, got: p.n() });
                    }
                    if p.is_identity() {
                        push(i, DiagnosticKind::IdentityMeasurement);
                    } else if !p.is_hermitian() {
                        push(i, DiagnosticKind::NonHermitianMeasurement);
                    }
                    p.proj().support()
                }
            };
            for q in support {
                match owner.get(&(op.level, q)) {
                    Some(&first) if first != i => push(
                        i,
                        DiagnosticKind::Overlap { level: op.level, qubit: q, first },
                    ),
                    Some(_) => {}
                    None => {
                        owner.insert((op.level, q), i);
                    }
                }
            }
        }
        out
    }

    fn levels(&self) -> &[CliffordTableau] {
        self.levels.get_or_init(|| {
            (0..=self.depth)
                .map(|l| {
                    let mut t = CliffordTableau::identity(self.n);
                    for op in self.ops_at_level(l) {
                        if let OpKind::Unitary { qubits, tableau, .. } = &op.kind {
                            t = t.compose(&tableau.embed(qubits, self.n));
                        }
                    }
                    t
                })
                .collect()
        })
    }

    fn check_level(&self, l: usize, min: usize) -> Result<()> {
        if l < min || l > self.depth {
            Err(Error::OutOfRange { index: l, limit: self.depth })
        } else {
            Ok(())
        }
    }

    /// `U_l`: the product of the unitaries at level `l`, for `1 ≤ l ≤ Δ`.
    pub fn level_unitary(&self, l: usize) -> Result<&CliffordTableau> {
        self.check_level(l, 1)?;
        Ok(&self.levels()[l])
    }

    /// `U_{i,j} = U_j ⋯ U_{i+1}`, the identity when `j ≤ i`.
    pub fn window_unitary(&self, i: usize, j: usize) -> Result<Arc<CliffordTableau>> {
        self.check_level(i, 0)?;
        self.check_level(j, 0)?;
        if j <= i {
            return Ok(Arc::new(CliffordTableau::identity(self.n)));
        }
        if let Some(t) = self.windows.read().expect("window cache poisoned").get(&(i, j)) {
            return Ok(Arc::clone(t));
        }
        let prev = self.window_unitary(i, j - 1)?;
        let t = Arc::new(prev.compose(&self.levels()[j]));
        self.windows
            .write()
            .expect("window cache poisoned")
            .insert((i, j), Arc::clone(&t));
        Ok(t)
    }

    /// `U_l p U_l⁻¹` applied gate by gate.
    pub fn apply_level(&self, l: usize, p: &PhasedPauli) -> PhasedPauli {
        let mut p = p.clone();
        for op in self.ops_at_level(l) {
            if let OpKind::Unitary { qubits, tableau, .. } = &op.kind {
                p = tableau.apply_on(qubits, &p);
            }
        }
        p
    }

    /// `U_l p U_l⁻¹` modulo phase.
    pub fn apply_level_proj(&self, l: usize, p: &ProjPauli) -> ProjPauli {
        let mut p = p.clone();
        for op in self.ops_at_level(l) {
            if let OpKind::Unitary { qubits, tableau, .. } = &op.kind {
                p = tableau.apply_on_proj(qubits, &p);
            }
        }
        p
    }

    /// `U_l⁻¹ p U_l` modulo phase.
    pub fn apply_level_inverse_proj(&self, l: usize, p: &ProjPauli) -> ProjPauli {
        let mut p = p.clone();
        for op in self.ops_at_level(l) {
            if let OpKind::Unitary { qubits, inverse, .. } = &op.kind {
                p = inverse.apply_on_proj(qubits, &p);
            }
        }
        p
    }

    /// Same circuit with measurement `j` negated wherever `flip[j]` is set.
    pub fn with_flipped_measurements(&self, flip: &[bool]) -> Circuit {
        assert_eq!(flip.len(), self.num_measurements());
        let mut ops = self.ops.clone();
        for (m, &f) in self.measurements.iter().zip(flip) {
            if f {
                if let OpKind::Measurement(p) = &mut ops[m.op_index].kind {
                    *p = p.negate();
                }
            }
        }
        Circuit::new_unchecked(self.n, ops)
    }

    /// Canonical text: one operation per line, levels separated by `TICK`.
    pub fn to_text(&self) -> String {
        let mut s = format!("QUBITS {}\n", self.n);
        for l in 1..=self.depth {
            if l > 1 {
                s.push_str("TICK\n");
            }
            for op in self.ops_at_level(l) {
                s.push_str(&op.to_string());
                s.push('\n');
            }
        }
        s
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
