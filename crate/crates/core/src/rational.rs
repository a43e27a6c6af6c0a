//! Rational trees as μ-equation systems.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::env::{bisimilar, deref, BindingEnv, Bindings};
use crate::term::{Sym, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MuError {
    #[error("degenerate variable-only cycle through {0}")]
    DegenerateCycle(Sym),
    #[error("equation for {0} has a variable right-hand side")]
    NonContractive(Sym),
}

/// A root term together with one equation per cycle entry.
#[derive(Clone, PartialEq, Eq)]
pub struct MuTerm {
    pub root: Term,
    pub equations: BTreeMap<Sym, Term>,
}

impl MuTerm {
    pub fn finite(root: Term) -> Self {
        MuTerm {
            root,
            equations: BTreeMap::new(),
        }
    }

    /// Checks that every right-hand side is a compound term.
    pub fn new(root: Term, equations: BTreeMap<Sym, Term>) -> Result<Self, MuError> {
        for (v, rhs) in &equations {
            if rhs.is_var() {
                return Err(MuError::NonContractive(v.clone()));
            }
        }
        Ok(MuTerm { root, equations })
    }

    pub fn is_rational(&self) -> bool {
        !self.equations.is_empty()
    }

    /// The root with every equation unfolded at most `k` times per path.
    pub fn unfold(&self, k: usize) -> Term {
        self.to_env().resolve(&self.root, k)
    }

    pub fn to_env(&self) -> BindingEnv {
        BindingEnv::from_bindings(self.equations.iter().map(|(v, t)| (v.clone(), t.clone())))
    }

    /// Variables occurring free (without an equation).
    pub fn free_vars(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.root.collect_vars(&mut out);
        self.equations.values().for_each(|t| t.collect_vars(&mut out));
        out.retain(|v| !self.equations.contains_key(v));
        out
    }
}

impl Bindings for MuTerm {
    fn lookup(&self, v: &Sym) -> Option<&Term> {
        self.equations.get(v)
    }
}

impl fmt::Debug for MuTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)?;
        if !self.equations.is_empty() {
            f.write_str(" where ")?;
            for (i, (v, t)) in self.equations.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{v} = {t}")?;
            }
        }
        Ok(())
    }
}

/// Reads `t` under `env` as a μ-term with one equation per cycle entry.
pub fn to_mu(env: &BindingEnv, t: &Term) -> Result<MuTerm, MuError> {
    let mut entries: HashSet<Sym> = HashSet::new();
    let mut on_stack: HashSet<Sym> = HashSet::new();
    let mut done: HashSet<Sym> = HashSet::new();
    for v in t.vars() {
        visit_var(env, &v, &mut entries, &mut on_stack, &mut done)?;
    }
    let root = build(env, t, &entries)?;
    let mut equations = BTreeMap::new();
    for e in &entries {
        let (d, _) = deref(env, &Term::Var(e.clone()));
        let rhs = build_compound(env, &d, &entries)?;
        equations.insert(e.clone(), rhs);
    }
    Ok(MuTerm { root, equations })
}

fn node_of(env: &BindingEnv, v: &Sym) -> Result<Option<(Sym, Term)>, MuError> {
    let (d, via) = deref(env, &Term::Var(v.clone()));
    match (d, via) {
        (d @ Term::App(..), Some(node)) => Ok(Some((node, d))),
        (Term::Var(r), _) => {
            if env.is_bound(&r) {
                Err(MuError::DegenerateCycle(r))
            } else {
                Ok(None)
            }
        }
        _ => Ok(None),
    }
}

fn visit_var(
    env: &BindingEnv,
    v: &Sym,
    entries: &mut HashSet<Sym>,
    on_stack: &mut HashSet<Sym>,
    done: &mut HashSet<Sym>,
) -> Result<(), MuError> {
    let Some((node, body)) = node_of(env, v)? else {
        return Ok(());
    };
    if on_stack.contains(&node) {
        entries.insert(node);
        return Ok(());
    }
    if done.contains(&node) {
        return Ok(());
    }
    on_stack.insert(node.clone());
    for w in body.vars() {
        visit_var(env, &w, entries, on_stack, done)?;
    }
    on_stack.remove(&node);
    done.insert(node);
    Ok(())
}

fn build(env: &BindingEnv, t: &Term, entries: &HashSet<Sym>) -> Result<Term, MuError> {
    match t {
        Term::Var(v) => match node_of(env, v)? {
            None => Ok(deref(env, t).0),
            Some((node, body)) => {
                if entries.contains(&node) {
                    Ok(Term::Var(node))
                } else {
                    build_compound(env, &body, entries)
                }
            }
        },
        Term::App(..) => build_compound(env, t, entries),
    }
}

fn build_compound(env: &BindingEnv, t: &Term, entries: &HashSet<Sym>) -> Result<Term, MuError> {
    match t {
        Term::App(f, args) => {
            let mut out = Vec::with_capacity(args.len());
            for a in args.iter() {
                out.push(build(env, a, entries)?);
            }
            Ok(Term::App(f.clone(), out.into()))
        }
        Term::Var(_) => build(env, t, entries),
    }
}

/// Are the two rational trees equal?
pub fn rational_equal(m1: &MuTerm, m2: &MuTerm) -> bool {
    bisimilar(m1, &m1.root, m2, &m2.root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn mu(root: &str, eqs: &[(&str, &str)]) -> MuTerm {
        MuTerm::new(t(root), eqs.iter().map(|(v, s)| (Sym::new(v), t(s))).collect()).unwrap()
    }

    #[test]
    fn zeros_to_mu() {
        let env = BindingEnv::from_bindings([(Sym::new("X"), t("cons(0, X)"))]);
        let m = to_mu(&env, &t("X")).unwrap();
        assert_eq!(m.root, t("X"));
        assert_eq!(m.equations.len(), 1);
        assert_eq!(m.equations[&Sym::new("X")], t("cons(0, X)"));
    }

    #[test]
    fn finite_to_mu() {
        let m = to_mu(&BindingEnv::new(), &t("f(a)")).unwrap();
        assert_eq!(m, MuTerm::finite(t("f(a)")));
    }

    #[test]
    fn acyclic_bindings_inline() {
        let env = BindingEnv::from_bindings([
            (Sym::new("X"), t("f(Y, Z)")),
            (Sym::new("Y"), t("g(Z)")),
            (Sym::new("Z"), t("cons(0, Z)")),
        ]);
        let m = to_mu(&env, &t("X")).unwrap();
        assert_eq!(m.root, t("f(g(Z), Z)"));
        assert_eq!(m.equations.len(), 1);
    }

    #[test]
    fn degenerate_cycle_is_an_error() {
        let env = BindingEnv::from_bindings([(Sym::new("X"), t("Y")), (Sym::new("Y"), t("X"))]);
        assert!(matches!(to_mu(&env, &t("f(X)")), Err(MuError::DegenerateCycle(_))));
    }

    #[test]
    fn equality_examples() {
        assert!(rational_equal(
            &mu("X", &[("X", "cons(0, X)")]),
            &mu("Y", &[("Y", "cons(0, cons(0, Y))")])
        ));
        assert!(!rational_equal(
            &mu("X", &[("X", "cons(0, X)")]),
            &mu("X", &[("X", "cons(1, X)")])
        ));
        assert!(rational_equal(&mu("f(a)", &[]), &mu("f(a)", &[])));
        assert!(!rational_equal(&mu("f(a)", &[]), &mu("f(b)", &[])));
        // Finite prefix versus cycle.
        assert!(rational_equal(
            &mu("cons(0, X)", &[("X", "cons(0, X)")]),
            &mu("X", &[("X", "cons(0, X)")])
        ));
    }

    #[test]
    fn unfold_then_reread() {
        let m = mu("X", &[("X", "cons(0, X)")]);
        for k in 0..=5 {
            let unfolded = m.unfold(k);
            let reread = MuTerm {
                root: unfolded,
                equations: m.equations.clone(),
            };
            assert!(rational_equal(&m, &reread));
        }
    }

    #[test]
    fn non_contractive_rejected() {
        let r = MuTerm::new(t("X"), [(Sym::new("X"), t("Y"))].into_iter().collect());
        assert!(r.is_err());
    }
}
