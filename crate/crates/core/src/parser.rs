//! Line-based circuit text format.
//!
//! ```text
//! # comment
//! QUBITS 3
//! M Z0
//! TICK
//! CX 0 1
//! TABLEAU 1 2 { X0 -> +X0*X1, Z0 -> +Z0,
//!               X1 -> +X1, Z1 -> +Z0*Z1 }
//! TICK
//! M -Z0*Z1
//! ```
//!
//! Levels start at 1 and each `TICK` advances to the next level. Named gates
//! broadcast over their arguments (`H 0 1 2` is three gates). Tableau entries
//! use local qubit indices.

use crate::circuit::{Circuit, Diagnostic, DiagnosticKind, Operation};
use crate::clifford::CliffordTableau;
use crate::error::{Error, Result};
use crate::pauli::PhasedPauli;

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, msg: msg.into() }
}

fn parse_qubit(tok: &str, line: usize) -> Result<usize> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(line, format!("expected qubit index, found {tok:?}")));
    }
    tok.parse().map_err(|_| syntax(line, format!("qubit index {tok} overflows")))
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.split_once('#').map_or(l, |(a, _)| a).trim())
        .collect();
    let mut n: Option<usize> = None;
    let mut level = 1;
    let mut ops: Vec<Operation> = Vec::new();
    let mut op_lines: Vec<usize> = Vec::new();
    let mut diags: Vec<Diagnostic> = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let lineno = i + 1;
        let line = lines[i];
        i += 1;
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let Some(nq) = n else {
            if head != "QUBITS" {
                return Err(syntax(lineno, "expected QUBITS header"));
            }
            n = Some(rest.parse().map_err(|_| syntax(lineno, "QUBITS needs a count"))?);
            continue;
        };
        let range_diag = |op: usize, qubit: usize, diags: &mut Vec<Diagnostic>| {
            diags.push(Diagnostic {
                op,
                line: Some(lineno),
                kind: DiagnosticKind::QubitOutOfRange { qubit, n: nq },
            })
        };
        match head {
            "QUBITS" => return Err(syntax(lineno, "duplicate QUBITS header")),
            "TICK" => {
                if !rest.is_empty() {
                    return Err(syntax(lineno, "TICK takes no arguments"));
                }
                level += 1;
            }
            "M" => {
                if rest.is_empty() {
                    return Err(syntax(lineno, "M needs a Pauli operator"));
                }
                let op = match PhasedPauli::parse(rest, nq) {
                    Ok(p) => p,
                    Err(Error::OutOfRange { index, .. }) => {
                        range_diag(ops.len(), index, &mut diags);
                        PhasedPauli::parse("I", nq)?
                    }
                    Err(e) => return Err(syntax(lineno, e.to_string())),
                };
                ops.push(Operation::measure(op, level));
                op_lines.push(lineno);
            }
            "TABLEAU" => {
                let (args, mut body) = match rest.split_once('{') {
                    Some((a, b)) => (a.trim(), b.to_string()),
                    None => return Err(syntax(lineno, "TABLEAU needs a { ... } body")),
                };
                while !body.contains('}') {
                    if i >= lines.len() {
                        return Err(syntax(lineno, "unterminated TABLEAU body"));
                    }
                    body.push('\n');
                    body.push_str(lines[i]);
                    i += 1;
                }
                let (inner, after) = body.split_once('}').expect("checked above");
                if !after.trim().is_empty() {
                    return Err(syntax(lineno, "unexpected text after TABLEAU body"));
                }
                let qubits = args
                    .split_whitespace()
                    .map(|t| parse_qubit(t, lineno))
                    .collect::<Result<Vec<_>>>()?;
                if qubits.is_empty() {
                    return Err(syntax(lineno, "TABLEAU needs at least one qubit"));
                }
                let w = qubits.len();
                let mut xs: Vec<Option<PhasedPauli>> = vec![None; w];
                let mut zs: Vec<Option<PhasedPauli>> = vec![None; w];
                for entry in inner.split([',', '\n']).map(str::trim).filter(|e| !e.is_empty()) {
                    let (lhs, rhs) = entry
                        .split_once("->")
                        .ok_or_else(|| syntax(lineno, format!("bad tableau entry {entry:?}")))?;
                    let lhs = lhs.trim();
                    let slot = match lhs.chars().next() {
                        Some('X') => &mut xs,
                        Some('Z') => &mut zs,
                        _ => return Err(syntax(lineno, format!("bad generator {lhs:?}"))),
                    };
                    let k = parse_qubit(&lhs[1..], lineno)?;
                    if k >= w {
                        return Err(syntax(lineno, format!("generator {lhs} beyond {w} qubits")));
                    }
                    if slot[k].is_some() {
                        return Err(syntax(lineno, format!("generator {lhs} given twice")));
                    }
                    let img = PhasedPauli::parse(rhs, w)
                        .map_err(|e| syntax(lineno, format!("in {lhs}: {e}")))?;
                    slot[k] = Some(img);
                }
                let collect = |v: Vec<Option<PhasedPauli>>, letter: char| {
                    v.into_iter()
                        .enumerate()
                        .map(|(k, p)| p.ok_or_else(|| syntax(lineno, format!("missing {letter}{k}"))))
                        .collect::<Result<Vec<_>>>()
                };
                let xs = collect(xs, 'X')?;
                let zs = collect(zs, 'Z')?;
                let op_index = ops.len();
                let tableau = match CliffordTableau::from_images(xs, zs) {
                    Ok(t) => t,
                    Err(e) => {
                        diags.push(Diagnostic {
                            op: op_index,
                            line: Some(lineno),
                            kind: DiagnosticKind::InvalidTableau(e.to_string()),
                        });
                        CliffordTableau::identity(w)
                    }
                };
                for &q in &qubits {
                    if q >= nq {
                        range_diag(op_index, q, &mut diags);
                    }
                }
                ops.push(Operation::tableau(tableau, &qubits, level));
                op_lines.push(lineno);
            }
            name => {
                let Some(t) = CliffordTableau::named(name) else {
                    return Err(syntax(lineno, format!("unknown instruction {name:?}")));
                };
                let args = rest
                    .split_whitespace()
                    .map(|t| parse_qubit(t, lineno))
                    .collect::<Result<Vec<_>>>()?;
                let w = t.n();
                if args.is_empty() || args.len() % w != 0 {
                    return Err(syntax(
                        lineno,
                        format!("{name} acts on {w} qubit(s), got {} argument(s)", args.len()),
                    ));
                }
                for chunk in args.chunks(w) {
                    for &q in chunk {
                        if q >= nq {
                            range_diag(ops.len(), q, &mut diags);
                        }
                    }
                    ops.push(Operation::gate(name, chunk, level)?);
                    op_lines.push(lineno);
                }
            }
        }
    }
    let Some(n) = n else {
        return Err(syntax(lines.len().max(1), "missing QUBITS header"));
    };
    if !diags.is_empty() {
        return Err(Error::Invalid(diags));
    }
    let c = Circuit::new_unchecked(n, ops);
    let mut found = c.validate();
    if found.is_empty() {
        return Ok(c);
    }
    for d in &mut found {
        d.line = op_lines.get(d.op).copied();
    }
    Err(Error::Invalid(found))
}

impl std::str::FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Circuit> {
        parse_circuit(s)
    }
}
