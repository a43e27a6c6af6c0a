//! Logic programming with inductive, coinductive and structural resolution,
//! a productivity-preserving program transformation, a ground fixpoint
//! oracle, and a type inference front end for a small class-based language.

pub mod compiler;
pub mod engine;
pub mod env;
pub mod minioo;
pub mod oracle;
pub mod par;
pub mod rational;
pub mod term;
pub mod text;
pub mod transform;

pub use engine::{Answer, AnswerKind, Budget, Config, Engine, Verdict};
pub use env::BindingEnv;
pub use term::{Atom, Clause, Goal, Program, Sym, Term};
