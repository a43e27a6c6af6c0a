//! Desk-scale check that the proof-term transformation preserves both the
//! inductive and the coinductive semantics on a fragment.
//!
//! Iterates of the transformed program are kept as proof grammars: at level
//! `k` each atom maps to its productions `(proof functor, body atoms)`, and
//! the proofs of the atom at level `k` are the terms built from one of its
//! productions with level-`k - 1` proofs of the body atoms. At level 0 the
//! downward iteration admits every proof and the upward one none. This
//! keeps the number of stored proofs polynomial where the explicit sets
//! grow doubly exponentially.

use std::collections::BTreeMap;

use thiserror::Error;

use super::fragment::{build_fragment, AtomSet, GAtom, GroundFragment, OracleError};
use super::rterm::RTerm;
use super::tp::{index, instances, tp_step_with};
use crate::par::{self, Parallelism};
use crate::term::{Program, Sym};
use crate::transform::{transform_program, TransformError};

/// Stands for an arbitrary proof argument while iterating.
pub const ANY_PROOF: &str = "any$";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LemmaError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

pub type Production = (Sym, Vec<GAtom>);

/// Level-indexed proof grammar of a transformed program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofGrammar {
    /// At level 0: `true` admits every proof, `false` none.
    pub base_admits_all: bool,
    pub levels: Vec<BTreeMap<GAtom, Vec<Production>>>,
}

impl ProofGrammar {
    /// Atoms with at least one proof at level `k`.
    pub fn provable(&self, k: usize) -> AtomSet {
        self.levels[k].keys().cloned().collect()
    }

    /// Is `pi` a proof of `a` at level `k`?
    pub fn admits(&self, k: usize, a: &GAtom, pi: &RTerm) -> bool {
        let Some(prods) = self.levels[k].get(a) else {
            return false;
        };
        if k == 0 {
            return self.base_admits_all;
        }
        prods.iter().any(|(f, body)| {
            pi.functor() == f
                && pi.arity() == body.len()
                && body.iter().enumerate().all(|(j, b)| self.admits(k - 1, b, &pi.arg(j)))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub n: usize,
    pub depth: usize,
    pub cycles: usize,
    pub atoms_checked: usize,
    pub up_holds: bool,
    pub down_holds: bool,
    pub counterexamples: Vec<String>,
    pub up_grammar: ProofGrammar,
    pub down_grammar: ProofGrammar,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.up_holds && self.down_holds
    }
}

fn with_any(a: &GAtom) -> GAtom {
    let mut args = a.args.clone();
    args.push(RTerm::constant(ANY_PROOF));
    GAtom {
        pred: a.pred.clone(),
        args,
    }
}

/// One step of the transformed program over the atoms provable at the
/// previous level; proof arguments are opaque, so every body atom carries
/// the wildcard and the head's proof functor names the production.
fn grammar_step(
    mode: Parallelism,
    tp: &Program,
    prev: &BTreeMap<GAtom, Vec<Production>>,
    tfrag: &GroundFragment,
) -> BTreeMap<GAtom, Vec<Production>> {
    let s: AtomSet = prev.keys().map(with_any).collect();
    let idx = index(&s);
    let mut next: BTreeMap<GAtom, Vec<Production>> = BTreeMap::new();
    for list in par::map(mode, tp.clauses(), |c| instances(mode, c, &idx, tfrag)) {
        for (head, body) in list {
            let proof = head.args.last().expect("proof argument").functor().clone();
            let body: Vec<GAtom> = body.iter().map(GAtom::drop_last).collect();
            let prods = next.entry(head.drop_last()).or_default();
            if !prods.iter().any(|(f, b)| *f == proof && *b == body) {
                prods.push((proof, body));
            }
        }
    }
    next
}

fn compare(direction: &str, k: usize, orig: &AtomSet, proj: &AtomSet, out: &mut Vec<String>) -> bool {
    let mut ok = true;
    for a in orig.difference(proj) {
        ok = false;
        out.push(format!("{direction} k={k}: {a} only in the source semantics"));
    }
    for a in proj.difference(orig) {
        ok = false;
        out.push(format!("{direction} k={k}: {a} only in the transformed semantics"));
    }
    ok
}

pub fn check_transform_lemmas(p: &Program, n: usize, d: usize, c: usize) -> Result<LemmaReport, LemmaError> {
    let frag = build_fragment(p, d, c)?;
    check_lemmas_in(Parallelism::default(), p, n, &frag)
}

/// For every `k <= n` compares `T_P ↑ k` and `T_P ↓ k` with the atoms that
/// have a proof in the corresponding iterate of the transformed program.
pub fn check_lemmas_in(
    mode: Parallelism,
    p: &Program,
    n: usize,
    frag: &GroundFragment,
) -> Result<LemmaReport, LemmaError> {
    let t = transform_program(p)?;
    let mut tfrag = GroundFragment::from_universe(&t.program, frag.universe.clone(), frag.depth, frag.cycles);
    tfrag.free_last_arg = true;
    let mut counterexamples = Vec::new();

    let run = |start: AtomSet, admits_all: bool, direction: &str, out: &mut Vec<String>| {
        let mut holds = true;
        let mut cur = start.clone();
        let mut grammar = ProofGrammar {
            base_admits_all: admits_all,
            levels: vec![start.iter().map(|a| (a.clone(), Vec::new())).collect()],
        };
        for k in 0..=n {
            holds &= compare(direction, k, &cur, &grammar.provable(k), out);
            if k == n {
                break;
            }
            cur = tp_step_with(mode, p, &cur, frag);
            let next = grammar_step(mode, &t.program, &grammar.levels[k], &tfrag);
            grammar.levels.push(next);
        }
        (holds, grammar)
    };

    let (up_holds, up_grammar) = run(AtomSet::new(), false, "up", &mut counterexamples);
    let (down_holds, down_grammar) = run(frag.atoms()?, true, "down", &mut counterexamples);

    Ok(LemmaReport {
        n,
        depth: frag.depth,
        cycles: frag.cycles,
        atoms_checked: frag.atom_count().unwrap_or(0),
        up_holds,
        down_holds,
        counterexamples,
        up_grammar,
        down_grammar,
    })
}
