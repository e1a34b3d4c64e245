use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    /// `event` is `None` when the initial polygon or center is at fault.
    #[error("{}", match .event {
        Some(i) => format!("invalid scenario at event {i}: {reason}"),
        None => format!("invalid scenario: {reason}"),
    })]
    ScenarioInvalid { event: Option<usize>, reason: String },
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}
