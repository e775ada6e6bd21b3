use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsafe variable {variable} in rule `{rule}`")]
    Unsafe { rule: String, variable: String },

    #[error("program is not stratified: negative cycle through {}", .0.join(", "))]
    NotStratified(Vec<String>),

    #[error("constraints are not supported by the evaluator: `{0}`")]
    Constraint(String),

    #[error("atom is not ground: {0}")]
    NonGround(String),

    #[error("mode declaration error: {0}")]
    Mode(String),

    #[error("cannot generalise `{literal}`: no matching mode declaration")]
    Generalise { literal: String },

    #[error("no candidate abducibles: {0}")]
    NoAbducibles(String),

    #[error("corpus error: {0}")]
    Corpus(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
