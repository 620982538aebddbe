//! Outcome codes, spacetime codes and circuit decoding for Clifford circuits.

pub mod circuit;
pub mod clifford;
pub mod decode;
pub mod error;
pub mod gf2;
pub mod outcome_code;
pub mod parser;
pub mod pauli;
pub mod propagation;
pub mod spacetime_code;
pub mod sparsify;
pub mod symplectic;

pub use circuit::{Circuit, Diagnostic, DiagnosticKind, Operation};
pub use clifford::CliffordTableau;
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVec};
pub use parser::parse_circuit;
pub use outcome_code::{compute_outcome_code, linearize, OutcomeCheck, OutcomeCode, OutputStabilizerGroup};
pub use pauli::{Letter, PhasedPauli, ProjPauli};
pub use propagation::{Effect, FaultOperator};
pub use spacetime_code::{LogicalGenerators, SpacetimeCode};

/// Version stamped into every JSON document this crate writes.
pub const SCHEMA_VERSION: u32 = 1;
