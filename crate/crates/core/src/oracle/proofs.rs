//! Replays the proof terms of an answer to a transformed goal against the
//! source program, giving the ground atoms the proof is made of.

use std::collections::HashMap;

use thiserror::Error;

use super::fragment::{AtomSet, GAtom, RESERVED_CONSTANT};
use super::rterm::RTerm;
use crate::engine::Answer;
use crate::env::deref;
use crate::term::{Atom, Goal, Program, Sym, Term};
use crate::transform::{proof_var, KAPPA_PREFIX};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("proof of {atom} is unfinished")]
    Unfinished { atom: String },
    #[error("`{functor}` names no clause of the program")]
    UnknownClause { functor: String },
    #[error("clause {clause} does not apply to {atom}")]
    Mismatch { clause: usize, atom: String },
}

fn clause_id(f: &Sym, arity: usize, p: &Program) -> Option<usize> {
    let id: usize = f.as_str().strip_prefix(KAPPA_PREFIX)?.parse().ok()?;
    let c = p.clause(id)?;
    (c.body.len() == arity).then_some(id)
}

/// Atoms of the proof trees recorded in `answer`, an answer to
/// `transform_goal(goal)` on the transformation of `p`. Variables left
/// free by the proof are instantiated with the reserved constant. Cyclic
/// proofs are followed once around each cycle.
pub fn proof_atoms(p: &Program, goal: &Goal, answer: &Answer) -> Result<AtomSet, ProofError> {
    let mut env = answer.bindings.clone();
    let mut seen: HashMap<Sym, Atom> = HashMap::new();
    let mut collected: Vec<Atom> = Vec::new();
    let mut work: Vec<(Atom, Term)> = goal
        .atoms
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), proof_var(i + 1)))
        .collect();
    while let Some((atom, proof)) = work.pop() {
        let (node, via) = deref(&env, &proof);
        if let Some(v) = &via {
            if let Some(prev) = seen.get(v).cloned() {
                let mut trail = Vec::new();
                if !env.unify_atoms_in_place(&atom, &prev, false, &mut trail) {
                    return Err(ProofError::Mismatch {
                        clause: 0,
                        atom: env.resolve_atom(&atom, 2).to_string(),
                    });
                }
                continue;
            }
            seen.insert(v.clone(), atom.clone());
        }
        let Term::App(f, args) = &node else {
            return Err(ProofError::Unfinished {
                atom: env.resolve_atom(&atom, 2).to_string(),
            });
        };
        let id = clause_id(f, args.len(), p).ok_or_else(|| ProofError::UnknownClause {
            functor: f.as_str().to_string(),
        })?;
        let c = env.rename_apart(p.clause(id).expect("checked above"));
        let mut trail = Vec::new();
        if !env.unify_atoms_in_place(&atom, &c.head, false, &mut trail) {
            return Err(ProofError::Mismatch {
                clause: id,
                atom: env.resolve_atom(&atom, 2).to_string(),
            });
        }
        collected.push(atom);
        for (b, sub) in c.body.into_iter().zip(args.iter()).rev() {
            work.push((b, sub.clone()));
        }
    }
    let filler = Term::constant(RESERVED_CONSTANT);
    let mut out = AtomSet::new();
    for a in &collected {
        let mut args = Vec::with_capacity(a.args.len());
        for t in &a.args {
            for v in env.reachable_vars(&t.vars()) {
                if !env.is_bound(&v) {
                    env.bind(v, filler.clone());
                }
            }
            for v in t.vars() {
                if !env.is_bound(&v) {
                    env.bind(v, filler.clone());
                }
            }
            args.push(RTerm::from_env(&env, t).expect("all variables bound"));
        }
        out.insert(GAtom {
            pred: a.pred.clone(),
            args,
        });
    }
    Ok(out)
}

/// The atoms of `goal` under `answer`, with free variables instantiated by
/// the reserved constant.
pub fn ground_goal(goal: &Goal, answer: &Answer) -> Vec<GAtom> {
    let mut env = answer.bindings.clone();
    let filler = Term::constant(RESERVED_CONSTANT);
    goal.atoms
        .iter()
        .map(|a| {
            let args = a
                .args
                .iter()
                .map(|t| {
                    for v in env.reachable_vars(&t.vars()).into_iter().chain(t.vars()) {
                        if !env.is_bound(&v) {
                            env.bind(v, filler.clone());
                        }
                    }
                    RTerm::from_env(&env, t).expect("all variables bound")
                })
                .collect();
            GAtom {
                pred: a.pred.clone(),
                args,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{colp_solve, sld_solve, Config};
    use crate::text::{parse_goal, parse_program};
    use crate::transform::{transform_goal, transform_program};

    #[test]
    fn inductive_proof() {
        let p = parse_program("nat(0).\nnat(s(X)) :- nat(X).\n").unwrap();
        let g = parse_goal("nat(s(s(Y)))").unwrap();
        let t = transform_program(&p).unwrap();
        let v = sld_solve(&transform_goal(&g), &t.program, &Config::default());
        let atoms = proof_atoms(&p, &g, v.first().unwrap()).unwrap();
        let shown: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
        assert_eq!(shown, vec!["nat(0)", "nat(s(0))", "nat(s(s(0)))"]);
    }

    #[test]
    fn coinductive_proof() {
        let p = parse_program("zeros(cons(0, X)) :- zeros(X).").unwrap();
        let g = parse_goal("zeros(X)").unwrap();
        let t = transform_program(&p).unwrap();
        let v = colp_solve(&transform_goal(&g), &t.program, &Config::default());
        let a = v.first().unwrap();
        let atoms = proof_atoms(&p, &g, a).unwrap();
        assert_eq!(atoms.len(), 1);
        assert_eq!(
            atoms.iter().next().unwrap().to_string(),
            "zeros(C1) where C1 = cons(0, C1)"
        );
        assert_eq!(ground_goal(&g, a), atoms.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn free_variables_are_filled() {
        let p = parse_program("p(X, f(Y)).").unwrap();
        let g = parse_goal("p(a, Z)").unwrap();
        let t = transform_program(&p).unwrap();
        let v = sld_solve(&transform_goal(&g), &t.program, &Config::default());
        let atoms = proof_atoms(&p, &g, v.first().unwrap()).unwrap();
        assert_eq!(atoms.iter().next().unwrap().to_string(), "p(a, f(c$0))");
    }
}
