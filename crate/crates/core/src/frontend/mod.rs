//! Textual QIR: lexing, parsing, printing and profile validation.
//!
//! The accepted language is a restricted subset of the LLVM textual IR. Both
//! the opaque `ptr` reference type and the legacy `%Qubit*`/`%Result*`
//! spellings are read; the printer always writes `ptr`.

pub mod ast;
mod lexer;
mod parser;
mod printer;
mod profile;

use thiserror::Error;

pub use ast::*;
pub use parser::{canonicalize, parse_module};
pub use printer::{print_module, InstText, ValueText};
pub use profile::{adaptive_violations, base_violations, validate_profile, Profile, ProfileReport, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message} (at `{token}`)")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub token: String,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, token: impl Into<String>, message: impl Into<String>) -> ParseError {
        ParseError { line, column, token: token.into(), message: message.into() }
    }
}
