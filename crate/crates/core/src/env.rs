//! Binding environments, unification, matching and finite unfolding.
//!
//! A [`BindingEnv`] maps variables to terms and may contain cycles; a cycle
//! through a compound term denotes a rational tree. Cycles consisting only of
//! variables (`X = Y, Y = X`) denote no tree and collapse to one unbound
//! variable, the least name on the cycle.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::term::{Atom, Clause, Sym, Term};

/// Read access to a variable binding map.
pub trait Bindings {
    fn lookup(&self, v: &Sym) -> Option<&Term>;
}

impl Bindings for BTreeMap<Sym, Term> {
    fn lookup(&self, v: &Sym) -> Option<&Term> {
        self.get(v)
    }
}

impl Bindings for HashMap<Sym, Term> {
    fn lookup(&self, v: &Sym) -> Option<&Term> {
        self.get(v)
    }
}

/// Follows variable bindings until an unbound variable or a compound term.
///
/// Returns the final term and, for a compound, the last variable on the chain
/// (its identity for cycle detection).
pub fn deref<B: Bindings + ?Sized>(b: &B, t: &Term) -> (Term, Option<Sym>) {
    let mut cur = t.clone();
    let mut via = None;
    let mut seen: Vec<Sym> = Vec::new();
    loop {
        let next = match &cur {
            Term::App(..) => return (cur, via),
            Term::Var(v) => match b.lookup(v) {
                None => return (cur, None),
                Some(next) => {
                    if seen.contains(v) {
                        return (Term::Var(degenerate_representative(b, v)), None);
                    }
                    seen.push(v.clone());
                    via = Some(v.clone());
                    next.clone()
                }
            },
        };
        cur = next;
    }
}

fn degenerate_representative<B: Bindings + ?Sized>(b: &B, start: &Sym) -> Sym {
    let mut least = start.clone();
    let mut cur = start.clone();
    loop {
        match b.lookup(&cur) {
            Some(Term::Var(next)) if next != start => {
                if *next < least {
                    least = next.clone();
                }
                cur = next.clone();
            }
            _ => return least,
        }
    }
}

/// Names a compound node by the variable bound to it, or else by the term
/// itself. Either way there are finitely many names, so a walk over two
/// rational trees revisits a pair of names on every cycle.
fn node_key(f: &Sym, args: &std::sync::Arc<[Term]>, via: Option<Sym>) -> Term {
    match via {
        Some(v) => Term::Var(v),
        None => Term::App(f.clone(), args.clone()),
    }
}

/// Decides equality of the (possibly rational) trees denoted by `a` under `l`
/// and `b` under `r`. Free variables are equal only to themselves.
pub fn bisimilar<L, R>(l: &L, a: &Term, r: &R, b: &Term) -> bool
where
    L: Bindings + ?Sized,
    R: Bindings + ?Sized,
{
    let mut visited: HashSet<(Term, Term)> = HashSet::new();
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = stack.pop() {
        let (x, xi) = deref(l, &x);
        let (y, yi) = deref(r, &y);
        match (&x, &y) {
            (Term::Var(p), Term::Var(q)) => {
                if p != q {
                    return false;
                }
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return false;
                }
                if !visited.insert((node_key(f, xs, xi), node_key(g, ys, yi))) {
                    continue;
                }
                stack.extend(xs.iter().cloned().zip(ys.iter().cloned()));
            }
            _ => return false,
        }
    }
    true
}

/// Age of a variable: engine-introduced `V<n>` variables are younger than
/// source variables, and larger `n` is younger.
fn var_rank(v: &Sym) -> u64 {
    let s = v.as_str();
    match s.strip_prefix('V') {
        Some(rest) if !rest.is_empty() && rest.bytes().all(|c| c.is_ascii_digit()) => {
            rest.parse::<u64>().map_or(u64::MAX, |n| n.saturating_add(1))
        }
        _ => 0,
    }
}

/// Numeric suffix of an engine variable name, if it has the `V<n>` shape.
pub fn engine_var_index(v: &Sym) -> Option<u64> {
    match var_rank(v) {
        0 => None,
        n => Some(n - 1),
    }
}

#[derive(Clone, Default)]
pub struct BindingEnv {
    bindings: HashMap<Sym, Term>,
    counter: u64,
}

impl Bindings for BindingEnv {
    fn lookup(&self, v: &Sym) -> Option<&Term> {
        self.bindings.get(v)
    }
}

impl PartialEq for BindingEnv {
    fn eq(&self, other: &Self) -> bool {
        self.bindings == other.bindings
    }
}

impl BindingEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_counter(counter: u64) -> Self {
        BindingEnv {
            bindings: HashMap::new(),
            counter,
        }
    }

    /// Builds an environment from explicit bindings (cycles allowed).
    pub fn from_bindings<I: IntoIterator<Item = (Sym, Term)>>(items: I) -> Self {
        BindingEnv {
            bindings: items.into_iter().collect(),
            counter: 0,
        }
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn set_counter(&mut self, counter: u64) {
        self.counter = counter;
    }

    /// Ensures fresh names cannot collide with `V<n>` variables already in use.
    pub fn reserve_names<'a>(&mut self, used: impl IntoIterator<Item = &'a Sym>) {
        for v in used {
            if let Some(n) = engine_var_index(v) {
                self.counter = self.counter.max(n + 1);
            }
        }
    }

    pub fn fresh_var(&mut self) -> Sym {
        let v = Sym::from(format!("V{}", self.counter));
        self.counter += 1;
        v
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn get(&self, v: &Sym) -> Option<&Term> {
        self.bindings.get(v)
    }

    pub fn is_bound(&self, v: &Sym) -> bool {
        self.bindings.contains_key(v)
    }

    /// Bindings sorted by variable name.
    pub fn sorted(&self) -> Vec<(&Sym, &Term)> {
        let mut v: Vec<_> = self.bindings.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn domain(&self) -> impl Iterator<Item = &Sym> {
        self.bindings.keys()
    }

    /// Adds a binding without any check.
    pub fn bind(&mut self, v: Sym, t: Term) {
        self.bindings.insert(v, t);
    }

    pub fn unbind(&mut self, v: &Sym) {
        self.bindings.remove(v);
    }

    fn bind_trailed(&mut self, v: Sym, t: Term, trail: &mut Vec<Sym>) {
        trail.push(v.clone());
        self.bindings.insert(v, t);
    }

    /// Removes every binding recorded on `trail` past `mark`.
    pub fn undo(&mut self, trail: &mut Vec<Sym>, mark: usize) {
        for v in trail.drain(mark..) {
            self.bindings.remove(&v);
        }
    }

    pub fn deref(&self, t: &Term) -> Term {
        deref(self, t).0
    }

    /// Does `v` occur in `t` once bindings are followed?
    pub fn occurs(&self, v: &Sym, t: &Term) -> bool {
        let mut seen: HashSet<Sym> = HashSet::new();
        let mut stack = vec![t.clone()];
        while let Some(t) = stack.pop() {
            match t {
                Term::Var(w) => {
                    if w == *v {
                        return true;
                    }
                    if let Some(b) = self.bindings.get(&w) {
                        if seen.insert(w) {
                            stack.push(b.clone());
                        }
                    }
                }
                Term::App(_, args) => stack.extend(args.iter().cloned()),
            }
        }
        false
    }

    /// Unifies in place, recording new bindings on `trail`. On failure the
    /// environment is left as it was.
    pub fn unify_in_place(&mut self, a: &Term, b: &Term, occurs_check: bool, trail: &mut Vec<Sym>) -> bool {
        let mark = trail.len();
        if self.unify_inner(a, b, occurs_check, trail) {
            true
        } else {
            self.undo(trail, mark);
            false
        }
    }

    pub fn unify_atoms_in_place(&mut self, a: &Atom, b: &Atom, occurs_check: bool, trail: &mut Vec<Sym>) -> bool {
        if a.pred != b.pred || a.args.len() != b.args.len() {
            return false;
        }
        let mark = trail.len();
        for (x, y) in a.args.iter().zip(b.args.iter()) {
            if !self.unify_inner(x, y, occurs_check, trail) {
                self.undo(trail, mark);
                return false;
            }
        }
        true
    }

    fn unify_inner(&mut self, a: &Term, b: &Term, occurs_check: bool, trail: &mut Vec<Sym>) -> bool {
        let mut visited: HashSet<(Term, Term)> = HashSet::new();
        let mut stack = vec![(a.clone(), b.clone())];
        while let Some((x, y)) = stack.pop() {
            let (x, xi) = deref(self, &x);
            let (y, yi) = deref(self, &y);
            match (x, y) {
                (Term::Var(p), Term::Var(q)) => {
                    if p == q {
                        continue;
                    }
                    if var_rank(&q) > var_rank(&p) {
                        self.bind_trailed(q, Term::Var(p), trail);
                    } else {
                        self.bind_trailed(p, Term::Var(q), trail);
                    }
                }
                (Term::Var(p), t @ Term::App(..)) | (t @ Term::App(..), Term::Var(p)) => {
                    if occurs_check && self.occurs(&p, &t) {
                        return false;
                    }
                    self.bind_trailed(p, t, trail);
                }
                (Term::App(f, xs), Term::App(g, ys)) => {
                    if f != g || xs.len() != ys.len() {
                        return false;
                    }
                    let (i, j) = (node_key(&f, &xs, xi), node_key(&g, &ys, yi));
                    let key = if i <= j { (i, j) } else { (j, i) };
                    if !visited.insert(key) {
                        continue;
                    }
                    stack.extend(xs.iter().cloned().zip(ys.iter().cloned()).rev());
                }
            }
        }
        true
    }

    /// One-sided matching: a substitution for the variables of `pattern`
    /// (which are not looked up in this environment) such that the
    /// instantiated pattern equals `target` under this environment.
    /// Variables of `target` are never bound.
    pub fn matcher(&self, pattern: &[Term], target: &[Term]) -> Option<HashMap<Sym, Term>> {
        if pattern.len() != target.len() {
            return None;
        }
        let mut sigma: HashMap<Sym, Term> = HashMap::new();
        let mut stack: Vec<(&Term, Term)> = pattern.iter().zip(target.iter().cloned()).collect();
        while let Some((p, t)) = stack.pop() {
            match p {
                Term::Var(v) => match sigma.get(v) {
                    Some(prev) => {
                        if !self.equal(prev, &t) {
                            return None;
                        }
                    }
                    None => {
                        sigma.insert(v.clone(), t);
                    }
                },
                Term::App(f, ps) => match deref(self, &t).0 {
                    Term::App(g, ts) if *f == g && ps.len() == ts.len() => {
                        stack.extend(ps.iter().zip(ts.iter().cloned()));
                    }
                    _ => return None,
                },
            }
        }
        Some(sigma)
    }

    pub fn match_atom(&self, pattern: &Atom, target: &Atom) -> Option<HashMap<Sym, Term>> {
        if pattern.pred != target.pred {
            return None;
        }
        self.matcher(&pattern.args, &target.args)
    }

    /// Equality of the rational trees denoted by `a` and `b`.
    pub fn equal(&self, a: &Term, b: &Term) -> bool {
        bisimilar(self, a, self, b)
    }

    /// Unfolds bindings; each cycle entry is expanded at most `depth` times on
    /// any path, after which its variable is left in place.
    pub fn resolve(&self, t: &Term, depth: usize) -> Term {
        let mut path = HashMap::new();
        self.resolve_rec(t, depth, &mut path)
    }

    fn resolve_rec(&self, t: &Term, depth: usize, path: &mut HashMap<Sym, usize>) -> Term {
        match t {
            Term::Var(_) => {
                let (d, via) = deref(self, t);
                match (&d, via) {
                    (Term::App(..), Some(v)) => {
                        let count = path.get(&v).copied().unwrap_or(0);
                        if count >= depth {
                            return Term::Var(v);
                        }
                        path.insert(v.clone(), count + 1);
                        let out = self.resolve_rec(&d, depth, path);
                        path.insert(v, count);
                        out
                    }
                    _ => d,
                }
            }
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| self.resolve_rec(a, depth, path)).collect(),
            ),
        }
    }

    /// Full substitution; `None` when a cycle is reachable.
    pub fn resolve_full(&self, t: &Term) -> Option<Term> {
        let mut on_path = HashSet::new();
        self.resolve_full_rec(t, &mut on_path)
    }

    fn resolve_full_rec(&self, t: &Term, on_path: &mut HashSet<Sym>) -> Option<Term> {
        match t {
            Term::Var(_) => {
                let (d, via) = deref(self, t);
                match (&d, via) {
                    (Term::App(..), Some(v)) => {
                        if !on_path.insert(v.clone()) {
                            return None;
                        }
                        let out = self.resolve_full_rec(&d, on_path);
                        on_path.remove(&v);
                        out
                    }
                    _ => Some(d),
                }
            }
            Term::App(f, args) => {
                let mut out = Vec::with_capacity(args.len());
                for a in args.iter() {
                    out.push(self.resolve_full_rec(a, on_path)?);
                }
                Some(Term::App(f.clone(), out.into()))
            }
        }
    }

    pub fn resolve_atom(&self, a: &Atom, depth: usize) -> Atom {
        Atom {
            pred: a.pred.clone(),
            args: a.args.iter().map(|t| self.resolve(t, depth)).collect(),
        }
    }

    /// Is a cycle reachable from `t`?
    pub fn is_cyclic(&self, t: &Term) -> bool {
        self.resolve_full(t).is_none()
    }

    /// Variables reachable from `roots` through bindings, in discovery order.
    pub fn reachable_vars(&self, roots: &[Sym]) -> Vec<Sym> {
        let mut seen: HashSet<Sym> = HashSet::new();
        let mut order = Vec::new();
        let mut queue: Vec<Sym> = roots.to_vec();
        queue.reverse();
        while let Some(v) = queue.pop() {
            if !seen.insert(v.clone()) {
                continue;
            }
            order.push(v.clone());
            if let Some(t) = self.bindings.get(&v) {
                let mut vs = t.vars();
                vs.reverse();
                queue.extend(vs);
            }
        }
        order
    }

    /// The sub-environment reachable from `roots`.
    pub fn restrict(&self, roots: &[Sym]) -> BindingEnv {
        let mut out = BindingEnv::with_counter(self.counter);
        for v in self.reachable_vars(roots) {
            if let Some(t) = self.bindings.get(&v) {
                out.bindings.insert(v, t.clone());
            }
        }
        out
    }

    /// Replaces every variable of `c` by a fresh `V<n>`, in order of first
    /// occurrence.
    pub fn rename_apart(&mut self, c: &Clause) -> Clause {
        let mut map: HashMap<Sym, Term> = HashMap::new();
        for v in c.vars() {
            let fresh = self.fresh_var();
            map.insert(v, Term::Var(fresh));
        }
        let mut f = |v: &Sym| map.get(v).cloned();
        Clause {
            id: c.id,
            head: c.head.map_vars(&mut f),
            body: c.body.iter().map(|a| a.map_vars(&mut f)).collect(),
            span: c.span,
        }
    }
}

impl fmt::Debug for BindingEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BindingEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.sorted().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} ↦ {t}")?;
        }
        f.write_str("}")
    }
}

/// Most general unifier of `t1` and `t2` extending `env`.
pub fn unify(t1: &Term, t2: &Term, env: &BindingEnv, occurs_check: bool) -> Option<BindingEnv> {
    let mut out = env.clone();
    let mut trail = Vec::new();
    out.unify_in_place(t1, t2, occurs_check, &mut trail).then_some(out)
}

pub fn unify_atoms(a: &Atom, b: &Atom, env: &BindingEnv, occurs_check: bool) -> Option<BindingEnv> {
    let mut out = env.clone();
    let mut trail = Vec::new();
    out.unify_atoms_in_place(a, b, occurs_check, &mut trail).then_some(out)
}

/// Most general matcher of `pattern` against `target`, returned as `env`
/// extended with bindings for pattern variables only. The pattern must be
/// standardized apart from `env`.
pub fn match_atoms(pattern: &Atom, target: &Atom, env: &BindingEnv) -> Option<BindingEnv> {
    let sigma = env.match_atom(pattern, target)?;
    let mut out = env.clone();
    for (v, t) in sigma {
        out.bind(v, t);
    }
    Some(out)
}

pub fn resolve(env: &BindingEnv, t: &Term, depth: usize) -> Term {
    env.resolve(t, depth)
}

pub fn rename_apart(c: &Clause, env: &mut BindingEnv) -> Clause {
    env.rename_apart(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_atom, parse_term};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn env_of(pairs: &[(&str, &str)]) -> BindingEnv {
        BindingEnv::from_bindings(pairs.iter().map(|(v, s)| (Sym::new(v), t(s))))
    }

    #[test]
    fn unify_zeros_step() {
        let env = unify(&t("zeros(X)"), &t("zeros(cons(0, X1))"), &BindingEnv::new(), false).unwrap();
        assert_eq!(env.len(), 1);
        assert_eq!(env.get(&Sym::new("X")), Some(&t("cons(0, X1)")));
    }

    #[test]
    fn bisimilar_out_of_phase_cycles() {
        let l = env_of(&[("V", "g(b, u(a, V))")]);
        let r = env_of(&[("T", "u(a, g(b, T))")]);
        assert!(bisimilar(&l, &t("u(a, V)"), &r, &t("T")));
        assert!(!bisimilar(&l, &t("u(b, V)"), &r, &t("T")));
    }

    #[test]
    fn unify_out_of_phase_cycles() {
        let mut env = env_of(&[("V", "g(b, u(a, V))"), ("T", "u(a, g(b, T))")]);
        let mut trail = Vec::new();
        assert!(env.unify_in_place(&t("u(a, V)"), &t("T"), false, &mut trail));
        assert!(trail.is_empty());
        assert!(!env.unify_in_place(&t("u(b, V)"), &t("T"), false, &mut trail));
    }

    #[test]
    fn occurs_check_rejects_cycle() {
        assert!(unify(&t("X"), &t("f(X)"), &BindingEnv::new(), true).is_none());
        let env = unify(&t("X"), &t("f(X)"), &BindingEnv::new(), false).unwrap();
        assert!(env.is_cyclic(&t("X")));
    }

    #[test]
    fn unify_rational_zeros() {
        let env = unify(&t("zeros(X)"), &t("zeros(cons(0, X))"), &BindingEnv::new(), false).unwrap();
        assert_eq!(env.get(&Sym::new("X")), Some(&t("cons(0, X)")));
        assert_eq!(env.resolve(&t("X"), 2), t("cons(0, cons(0, X))"));
    }

    #[test]
    fn cyclic_unification_terminates() {
        // X = cons(0, X) against Y = cons(0, cons(0, Y)): same rational tree.
        let env = env_of(&[("X", "cons(0, X)"), ("Y", "cons(0, cons(0, Y))")]);
        let out = unify(&t("X"), &t("Y"), &env, false).unwrap();
        assert_eq!(out, env);
        let env = env_of(&[("X", "cons(0, X)"), ("Y", "cons(0, cons(1, Y))")]);
        assert!(unify(&t("X"), &t("Y"), &env, false).is_none());
    }

    #[test]
    fn functor_clash_fails() {
        assert!(unify(&t("f(a)"), &t("f(b)"), &BindingEnv::new(), true).is_none());
        assert!(unify(&t("f(a)"), &t("f(a, b)"), &BindingEnv::new(), true).is_none());
    }

    #[test]
    fn younger_variable_is_bound() {
        let env = unify(&t("X"), &t("V3"), &BindingEnv::new(), true).unwrap();
        assert_eq!(env.get(&Sym::new("V3")), Some(&t("X")));
        let env = unify(&t("V9"), &t("V3"), &BindingEnv::new(), true).unwrap();
        assert_eq!(env.get(&Sym::new("V9")), Some(&t("V3")));
    }

    #[test]
    fn matching() {
        let env = BindingEnv::new();
        let m = match_atoms(
            &parse_atom("from(X, scons(X, Y))").unwrap(),
            &parse_atom("from(0, [0|X1])").unwrap(),
            &env,
        )
        .unwrap();
        assert_eq!(m.get(&Sym::new("X")), Some(&t("0")));
        assert_eq!(m.get(&Sym::new("Y")), Some(&t("X1")));

        let m = match_atoms(&parse_atom("p(f(X))").unwrap(), &parse_atom("p(f(a))").unwrap(), &env).unwrap();
        assert_eq!(m.get(&Sym::new("X")), Some(&t("a")));

        assert!(match_atoms(&parse_atom("p(f(X))").unwrap(), &parse_atom("p(Y)").unwrap(), &env).is_none());
        assert!(match_atoms(&parse_atom("p(X, X)").unwrap(), &parse_atom("p(a, b)").unwrap(), &env).is_none());
    }

    #[test]
    fn matching_sees_target_bindings() {
        let env = env_of(&[("Y", "f(a)")]);
        let m = env
            .match_atom(&parse_atom("p(f(X))").unwrap(), &parse_atom("p(Y)").unwrap())
            .unwrap();
        assert_eq!(m.get(&Sym::new("X")), Some(&t("a")));
    }

    #[test]
    fn resolve_examples() {
        assert_eq!(
            env_of(&[("X", "cons(0, X)")]).resolve(&t("X"), 2),
            t("cons(0, cons(0, X))")
        );
        assert_eq!(BindingEnv::new().resolve(&t("f(a)"), 9), t("f(a)"));
        assert_eq!(env_of(&[("X", "f(Y)"), ("Y", "a")]).resolve(&t("X"), 9), t("f(a)"));
    }

    #[test]
    fn degenerate_cycle_collapses() {
        let env = env_of(&[("X", "Y"), ("Y", "X")]);
        assert_eq!(env.deref(&t("X")), t("X"));
        assert_eq!(env.deref(&t("Y")), t("X"));
        assert_eq!(env.resolve(&t("f(Y)"), 3), t("f(X)"));
        assert!(env.equal(&t("X"), &t("Y")));
    }

    #[test]
    fn rename_apart_is_deterministic() {
        let c = crate::text::parse_program("p(X) :- q(X).").unwrap().clauses()[0].clone();
        let mut env = BindingEnv::with_counter(7);
        let r = env.rename_apart(&c);
        assert_eq!(r.to_string(), "p(V7) :- q(V7).");
        let r2 = env.rename_apart(&c);
        assert_eq!(r2.to_string(), "p(V8) :- q(V8).");
        let g = crate::text::parse_program("p(a).").unwrap().clauses()[0].clone();
        assert_eq!(env.rename_apart(&g), g);
    }

    #[test]
    fn restrict_keeps_reachable() {
        let env = env_of(&[("X", "f(Y)"), ("Y", "g(Z)"), ("W", "a")]);
        let r = env.restrict(&[Sym::new("X")]);
        assert_eq!(r.len(), 2);
        assert!(!r.is_bound(&Sym::new("W")));
    }
}
