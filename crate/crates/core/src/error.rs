use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),

    #[error("qubit {qubit} out of range for register of size {size}")]
    QubitOutOfRange { qubit: usize, size: usize },

    #[error("gate {gate} expects {expected} operand(s), got {found}")]
    ArityMismatch {
        gate: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("gate {gate} expects {expected} parameter(s), got {found}")]
    ParamMismatch {
        gate: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("duplicate operand {0}")]
    DuplicateOperand(usize),

    #[error("non-finite angle in gate {0}")]
    NonFiniteAngle(&'static str),

    #[error("register size must be at least 1")]
    EmptyRegister,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("physical qubits {0} and {1} are not coupled")]
    NotAdjacent(usize, usize),

    #[error("no path between physical qubits {0} and {1}")]
    Disconnected(usize, usize),

    #[error("invalid coupling map: {0}")]
    InvalidCouplingMap(String),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("{0} has no unitary denotation")]
    NonUnitary(String),

    #[error("register of {nqreg} qubits exceeds oracle cap of {cap}")]
    RegisterTooLarge { nqreg: usize, cap: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("rule {rule} does not match at position {position}")]
    NoMatch { rule: String, position: usize },

    #[error("rule {0} is not certified")]
    UncertifiedRule(String),

    #[error("rule {0} only holds on an ancilla subspace")]
    AncillaRule(String),

    #[error("invalid rule {name}: {reason}")]
    InvalidRule { name: String, reason: String },

    #[error("quaternion is not unit length (norm {0})")]
    NonUnitQuaternion(f64),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("pass {pass} requires {missing} to have run first")]
    MissingAnalysis { pass: String, missing: String },

    #[error("pass {pass} calls {callee}, which has no verified contract")]
    Unverified { pass: String, callee: String },

    #[error("unknown pass {0}")]
    UnknownPass(String),

    #[error("step limit {0} reached without termination")]
    StepLimit(usize),

    #[error("measure out of range: {0}")]
    MeasureOverflow(String),

    #[error("io: {0}")]
    Io(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
