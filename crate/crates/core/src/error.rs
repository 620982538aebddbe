use crate::circuit::Diagnostic;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },

    #[error("invalid Pauli string {text:?}: {msg}")]
    PauliSyntax { text: String, msg: String },

    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("invalid circuit: {}", join_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),

    #[error("outcome code has affine checks; linearize the circuit first")]
    NonLinear,

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

fn join_diagnostics(d: &[Diagnostic]) -> String {
    d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
