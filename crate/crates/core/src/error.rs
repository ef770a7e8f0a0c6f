use thiserror::Error;

use crate::model::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unknown {kind} `{name}`")]
    UnknownIdentifier {
        line: usize,
        kind: &'static str,
        name: String,
    },
    #[error("line {line}: duplicate {kind} `{name}`")]
    Duplicate {
        line: usize,
        kind: &'static str,
        name: String,
    },
    #[error("empty rule list")]
    EmptyRuleList,
    #[error("action `{action}` is not available to agent {agent} at state {state}")]
    UnavailableAction {
        agent: usize,
        state: String,
        action: String,
    },
    #[error("invalid history: {0}")]
    InvalidHistory(String),
    #[error("formula cannot be bound to the model: {0}")]
    Binding(String),
    #[error("formula outside the supported fragment: {0}")]
    Fragment(String),
    #[error("unsupported strategy representation: {0}")]
    Representation(String),
    #[error("strategy is not uniform: {0}")]
    NonUniform(String),
    #[error("preimage of {action} is not propositionally definable: {inside} and {outside} share a label signature")]
    Undefinable {
        action: String,
        inside: String,
        outside: String,
    },
    #[error("invalid model: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidModel(Vec<Diagnostic>),
    #[error("rule-based strategy not supported here: {0}")]
    UnsupportedRules(String),
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
