//! Predicate and policy syntax: expression trees, parsing, rendering,
//! policy graphs, the policy file format and lint checks.

mod expr;
mod file;
mod lexer;
mod lint;
mod parser;
mod policy;
mod render;

pub use expr::{BinOp, Expr, NOT_LEVEL};
pub use file::{parse_policy_file, parse_policy_file_named, render_policy_file};
pub use lint::{lint_policy, PolicyDiagnostic, Severity};
pub use parser::{parse_literal, parse_predicate};
pub use policy::{edge_label, EdgeId, ElementId, NodeId, PolicyEdge, PolicyGraph, PolicyNode, SemanticPiece};
pub use render::render_predicate;

use thiserror::Error;

/// A predicate text error. Lines and columns are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: unterminated string")]
    UnterminatedString { line: usize, column: usize },
    #[error("{line}:{column}: unknown operator '{token}'")]
    UnknownOperator { line: usize, column: usize, token: String },
}

impl ParseError {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PolicyFileError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate node line for '{name}'")]
    DuplicateNode { line: usize, name: String },
    #[error(transparent)]
    Predicate(ParseError),
}
