//! Concrete syntax for logic programs, goals and answers.
//!
//! The syntax is Prolog-like: `head :- b1, ..., bn.` or `head.`, variables
//! start with an uppercase letter or `_`, lists are written `[a, b | T]`,
//! `\/` is the right-associative union functor and `name:type` builds a
//! record field. `%` starts a line comment.

mod answer;
mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

pub use answer::{print_answer, AnswerStyle, PrintError};
pub use parser::{parse_atom, parse_goal, parse_program, parse_term};
pub use printer::{print_atom, print_clause, print_goal, print_program, print_term, Printer};

/// 1-based position of a token or node in its source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SourceSpan {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            span,
            message: message.into(),
        }
    }
}
