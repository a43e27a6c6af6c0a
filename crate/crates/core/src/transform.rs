//! Proof-term transformation: every predicate gains a last argument that
//! records the derivation of the atom.
//!
//! Clause `i` with body `B1, ..., Bn` becomes
//! `head + k$i(P$1, ..., P$n) :- B1 + P$1, ..., Bn + P$n`. Facts get the
//! constant `k$i`. Rewriting in a transformed program always terminates:
//! each step consumes one proof functor from the goal.

use std::collections::BTreeMap;
use std::fmt::Write;

use thiserror::Error;

use crate::engine::Answer;
use crate::term::{Atom, Clause, Goal, Program, Sym, Term};

pub const KAPPA_PREFIX: &str = "k$";
pub const PROOF_VAR_PREFIX: &str = "P$";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("clause {clause} uses the reserved functor `{name}`")]
    ReservedFunctor { clause: usize, name: String },
    #[error("clause {clause} uses the reserved variable `{name}`")]
    ReservedVariable { clause: usize, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformedProgram {
    pub program: Program,
    /// Clause id to its proof functor.
    pub kappa_table: BTreeMap<usize, Sym>,
    /// Proof functor to the source clause.
    pub back_map: BTreeMap<Sym, Clause>,
}

pub fn kappa(id: usize) -> Sym {
    Sym::from(format!("{KAPPA_PREFIX}{id}"))
}

pub fn is_proof_var(v: &Sym) -> bool {
    v.as_str().starts_with(PROOF_VAR_PREFIX)
}

/// The proof variable `transform_goal` gives the `n`-th atom (1-based).
pub fn proof_var(n: usize) -> Term {
    Term::Var(Sym::from(format!("{PROOF_VAR_PREFIX}{n}")))
}

fn with_proof(a: &Atom, proof: Term) -> Atom {
    let mut args = a.args.clone();
    args.push(proof);
    Atom {
        pred: a.pred.clone(),
        args,
    }
}

fn check_namespace(c: &Clause) -> Result<(), TransformError> {
    let mut terms: Vec<&Term> = c.head.args.iter().collect();
    for b in &c.body {
        terms.extend(b.args.iter());
    }
    let preds = std::iter::once(&c.head).chain(c.body.iter()).map(|a| &a.pred);
    for p in preds {
        if p.as_str().starts_with(KAPPA_PREFIX) {
            return Err(TransformError::ReservedFunctor {
                clause: c.id,
                name: p.to_string(),
            });
        }
    }
    for t in terms {
        let mut fs = Default::default();
        t.collect_functors(&mut fs);
        if let Some((f, _)) = fs.iter().find(|(f, _)| f.as_str().starts_with(KAPPA_PREFIX)) {
            return Err(TransformError::ReservedFunctor {
                clause: c.id,
                name: f.to_string(),
            });
        }
        if let Some(v) = t.vars().into_iter().find(is_proof_var) {
            return Err(TransformError::ReservedVariable {
                clause: c.id,
                name: v.to_string(),
            });
        }
    }
    Ok(())
}

pub fn transform_clause(c: &Clause) -> Clause {
    let proofs: Vec<Term> = (1..=c.body.len()).map(proof_var).collect();
    let head = with_proof(&c.head, Term::app_sym(kappa(c.id), proofs.clone()));
    let body = c.body.iter().zip(proofs).map(|(b, pv)| with_proof(b, pv)).collect();
    Clause {
        id: c.id,
        head,
        body,
        span: c.span,
    }
}

pub fn transform_program(p: &Program) -> Result<TransformedProgram, TransformError> {
    let mut clauses = Vec::with_capacity(p.len());
    let mut kappa_table = BTreeMap::new();
    let mut back_map = BTreeMap::new();
    for c in p.clauses() {
        check_namespace(c)?;
        clauses.push(transform_clause(c));
        kappa_table.insert(c.id, kappa(c.id));
        back_map.insert(kappa(c.id), c.clone());
    }
    Ok(TransformedProgram {
        program: Program::new(clauses),
        kappa_table,
        back_map,
    })
}

/// Adds a distinct fresh proof variable to every atom.
pub fn transform_goal(g: &Goal) -> Goal {
    Goal::new(
        g.atoms
            .iter()
            .enumerate()
            .map(|(i, a)| with_proof(a, proof_var(i + 1)))
            .collect(),
    )
}

/// Removes the proof variables from an answer to a transformed goal.
pub fn strip_answer(a: &Answer, _t: &TransformedProgram) -> Answer {
    a.retain_vars(|v| !is_proof_var(v))
}

/// The proof of the `i`-th goal atom, unfolded through cycles `depth` times.
pub fn proof_of(a: &Answer, i: usize, depth: usize) -> Term {
    a.bindings.resolve(&proof_var(i + 1), depth)
}

/// `k$<id> -> <clause head>` lines.
pub fn kappa_table_text(t: &TransformedProgram) -> String {
    let mut s = String::new();
    for (k, c) in &t.back_map {
        let _ = writeln!(s, "{k} -> {}", c.head);
    }
    s
}

pub const UNFINISHED: &str = "⟨unfinished⟩";

/// Indented proof tree, one source clause per line.
pub fn render_proof(pi: &Term, t: &TransformedProgram) -> String {
    let mut out = String::new();
    render(pi, t, 0, &mut out);
    out
}

fn render(pi: &Term, t: &TransformedProgram, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match pi {
        Term::Var(_) => {
            let _ = writeln!(out, "{pad}{UNFINISHED}");
        }
        Term::App(f, args) => {
            match t.back_map.get(f) {
                Some(c) => {
                    let _ = writeln!(out, "{pad}clause {}: {c}", c.id);
                }
                None => {
                    let _ = writeln!(out, "{pad}{f}");
                }
            }
            for a in args.iter() {
                render(a, t, indent + 1, out);
            }
        }
    }
}

/// Total number of function symbols in the proof arguments of `atoms`.
pub fn proof_measure(atoms: &[Atom], env: &crate::env::BindingEnv) -> Option<usize> {
    let mut total = 0;
    for a in atoms {
        let last = a.args.last()?;
        total += env.resolve_full(last)?.symbol_count();
    }
    Some(total)
}
