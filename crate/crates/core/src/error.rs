use thiserror::Error;

use crate::vpa::Violation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VpaError {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("invalid automaton: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("automaton is not live: {0}")]
    NotLive(String),
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("expected a finite automaton (no call or return symbols)")]
    NotFiniteAutomaton,
    #[error("partition does not cover the states of the automaton: {0}")]
    PartitionMismatch(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid random spec: {0}")]
    InvalidSpec(String),
    #[error("instance too large for exhaustive search: {vars} variables (limit {limit})")]
    InstanceTooLarge { vars: usize, limit: usize },
    #[error("hard clauses are unsatisfiable")]
    Unsatisfiable,
    #[error("unsupported clause: {0}")]
    UnsupportedClause(String),
    #[error("pop on empty frame stack")]
    FrameUnderflow,
    #[error("assignment is not transitive: {0}")]
    NonTransitive(String),
}

pub type Result<T, E = VpaError> = std::result::Result<T, E>;
