//! Front end for a small untyped class-based language with Java-like syntax.
//!
//! ```text
//! program  := class*
//! class    := 'class' Name ('extends' Name)? '{' member* '}'
//! member   := Name ';'                                   field
//!           | Name '(' params ')' '{' 'super' '(' args ')' ';'
//!                 ('this' '.' Name '=' expr ';')* '}'    constructor
//!           | Name '(' params ')' '{' expr ';'? '}'      method
//! expr     := 'if' '(' expr ')' expr 'else' expr
//!           | diff ('<=' diff)?
//! diff     := postfix ('-' postfix)*
//! postfix  := primary ('.' Name ('(' args ')')?)*
//! primary  := Int | 'true' | 'false' | 'null' | 'this' | Name
//!           | 'new' Name '(' args ')' | '(' expr ')'
//! ```
//!
//! `≤` is accepted for `<=`, `//` starts a line comment. A missing
//! `extends` means `Object`; a missing constructor means `C() { super(); }`.

mod ast;
mod lexer;
mod parser;
mod printer;

use thiserror::Error;

use crate::text::{ParseError, SourceSpan};

pub use ast::{BinOp, ClassDecl, ClassTable, Constructor, Expr, ExprKind, MethodDecl, ROOT_CLASS};
pub use parser::{parse_classes, parse_expr};
pub use printer::{print_class, print_classes, print_expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("{span}: duplicate class `{name}`")]
    DuplicateClass { name: String, span: SourceSpan },
    #[error("{span}: class `{name}` inherits from itself")]
    InheritanceCycle { name: String, span: SourceSpan },
    #[error("{span}: class `{class}` extends unknown class `{parent}`")]
    UnknownParent {
        class: String,
        parent: String,
        span: SourceSpan,
    },
    #[error("{span}: constructor of `{class}` does not assign field `{field}`")]
    UnassignedField {
        class: String,
        field: String,
        span: SourceSpan,
    },
    #[error("{span}: {message}")]
    Invalid { message: String, span: SourceSpan },
}

impl FrontendError {
    pub fn span(&self) -> SourceSpan {
        match self {
            FrontendError::Syntax(e) => e.span,
            FrontendError::DuplicateClass { span, .. }
            | FrontendError::InheritanceCycle { span, .. }
            | FrontendError::UnknownParent { span, .. }
            | FrontendError::UnassignedField { span, .. }
            | FrontendError::Invalid { span, .. } => *span,
        }
    }
}
