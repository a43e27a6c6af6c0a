//! First-order syntax: symbols, terms, atoms, clauses, programs and goals.
//!
//! Terms are always finite trees. Rational (cyclic) terms only exist as
//! variables interpreted through a [`BindingEnv`](crate::env::BindingEnv)
//! whose bindings form a cycle.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::text::SourceSpan;

/// Interned-by-refcount identifier used for variables, functors and predicates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(s: &str) -> Self {
        Sym(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Self {
        Sym::new(s)
    }
}

impl From<String> for Sym {
    fn from(s: String) -> Self {
        Sym(Arc::from(s))
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Functor used for the empty list.
pub const NIL: &str = "[]";
/// Functor behind the `[H|T]` list notation.
pub const CONS: &str = "scons";
/// Union type constructor, written infix as `\/`.
pub const UNION: &str = "\\/";
/// Record field constructor, written infix as `name:type`.
pub const FIELD: &str = "fld";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Sym),
    App(Sym, Arc<[Term]>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Sym::new(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::App(Sym::new(name), Arc::from(Vec::new()))
    }

    pub fn app(functor: &str, args: Vec<Term>) -> Term {
        Term::App(Sym::new(functor), Arc::from(args))
    }

    pub fn app_sym(functor: Sym, args: Vec<Term>) -> Term {
        Term::App(functor, Arc::from(args))
    }

    pub fn nil() -> Term {
        Term::constant(NIL)
    }

    /// Builds `[t1, ..., tn | tail]`.
    pub fn list_with_tail(items: Vec<Term>, tail: Term) -> Term {
        items
            .into_iter()
            .rev()
            .fold(tail, |acc, item| Term::app(CONS, vec![item, acc]))
    }

    pub fn list(items: Vec<Term>) -> Term {
        Term::list_with_tail(items, Term::nil())
    }

    pub fn union(left: Term, right: Term) -> Term {
        Term::app(UNION, vec![left, right])
    }

    pub fn field(name: &str, ty: Term) -> Term {
        Term::app(FIELD, vec![Term::constant(name), ty])
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Sym> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    pub fn functor(&self) -> Option<(&Sym, usize)> {
        match self {
            Term::Var(_) => None,
            Term::App(f, args) => Some((f, args.len())),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Appends variables in left-to-right order of first occurrence.
    pub fn collect_vars(&self, out: &mut Vec<Sym>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    /// Number of function symbols (including constants).
    pub fn symbol_count(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::symbol_count).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }

    /// Replaces variables according to `f`; variables mapped to `None` stay.
    pub fn map_vars(&self, f: &mut impl FnMut(&Sym) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }

    pub fn collect_functors(&self, out: &mut BTreeSet<(Sym, usize)>) {
        if let Term::App(f, args) = self {
            out.insert((f.clone(), args.len()));
            args.iter().for_each(|a| a.collect_functors(out));
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::text::print_term(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::print_term(self))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Sym,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        Atom {
            pred: Sym::new(pred),
            args,
        }
    }

    pub fn key(&self) -> (Sym, usize) {
        (self.pred.clone(), self.args.len())
    }

    /// The atom viewed as a term with the predicate as functor.
    pub fn to_term(&self) -> Term {
        Term::app_sym(self.pred.clone(), self.args.clone())
    }

    pub fn from_term(t: &Term) -> Option<Atom> {
        match t {
            Term::App(f, args) => Some(Atom {
                pred: f.clone(),
                args: args.to_vec(),
            }),
            Term::Var(_) => None,
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Sym>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Sym) -> Option<Term>) -> Atom {
        Atom {
            pred: self.pred.clone(),
            args: self.args.iter().map(|a| a.map_vars(f)).collect(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::print_atom(self))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::print_atom(self))
    }
}

/// A definite clause. `id` is 1-based and stable in textual order.
#[derive(Clone)]
pub struct Clause {
    pub id: usize,
    pub head: Atom,
    pub body: Vec<Atom>,
    pub span: Option<SourceSpan>,
}

impl Clause {
    pub fn new(id: usize, head: Atom, body: Vec<Atom>) -> Self {
        Clause {
            id,
            head,
            body,
            span: None,
        }
    }

    pub fn vars(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.head.collect_vars(&mut out);
        self.body.iter().for_each(|a| a.collect_vars(&mut out));
        out
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }
}

// Spans are provenance only and do not take part in structural equality.
impl PartialEq for Clause {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.head == other.head && self.body == other.body
    }
}

impl Eq for Clause {}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::print_clause(self))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::print_clause(self))
    }
}

/// An ordered clause list, indexed by predicate for resolution.
#[derive(Clone, Default)]
pub struct Program {
    clauses: Vec<Clause>,
    index: HashMap<(Sym, usize), Vec<usize>>,
}

impl Program {
    /// Builds a program; clause ids are renumbered 1..=n in the given order.
    pub fn new(clauses: Vec<Clause>) -> Self {
        let clauses: Vec<Clause> = clauses
            .into_iter()
            .enumerate()
            .map(|(i, mut c)| {
                c.id = i + 1;
                c
            })
            .collect();
        let mut index: HashMap<(Sym, usize), Vec<usize>> = HashMap::new();
        for (i, c) in clauses.iter().enumerate() {
            index.entry(c.head.key()).or_default().push(i);
        }
        Program { clauses, index }
    }

    pub fn from_rules(rules: Vec<(Atom, Vec<Atom>)>) -> Self {
        Program::new(rules.into_iter().map(|(h, b)| Clause::new(0, h, b)).collect())
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Clause by 1-based id.
    pub fn clause(&self, id: usize) -> Option<&Clause> {
        id.checked_sub(1).and_then(|i| self.clauses.get(i))
    }

    /// Clauses whose head has the atom's predicate and arity, in program order.
    pub fn candidates<'a>(&'a self, atom: &Atom) -> impl Iterator<Item = &'a Clause> + 'a {
        self.index
            .get(&(atom.pred.clone(), atom.args.len()))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(move |&i| &self.clauses[i])
    }

    pub fn candidate_count(&self, atom: &Atom) -> usize {
        self.index
            .get(&(atom.pred.clone(), atom.args.len()))
            .map_or(0, Vec::len)
    }

    /// Concatenation; clause ids of `other` are shifted.
    pub fn concat(&self, other: &Program) -> Program {
        let mut all = self.clauses.clone();
        all.extend(other.clauses.iter().cloned());
        Program::new(all)
    }

    /// Function symbols (not predicates) appearing anywhere in the program.
    pub fn functors(&self) -> BTreeSet<(Sym, usize)> {
        let mut out = BTreeSet::new();
        for c in &self.clauses {
            for a in std::iter::once(&c.head).chain(c.body.iter()) {
                a.args.iter().for_each(|t| t.collect_functors(&mut out));
            }
        }
        out
    }

    /// Predicate keys appearing in heads or bodies, sorted.
    pub fn predicates(&self) -> BTreeSet<(Sym, usize)> {
        let mut out = BTreeSet::new();
        for c in &self.clauses {
            out.insert(c.head.key());
            c.body.iter().for_each(|a| {
                out.insert(a.key());
            });
        }
        out
    }
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.clauses == other.clauses
    }
}

impl Eq for Program {}

impl fmt::Debug for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::print_program(self))
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::print_program(self))
    }
}

#[derive(Clone, Default, PartialEq, Eq)]
pub struct Goal {
    pub atoms: Vec<Atom>,
}

impl Goal {
    pub fn new(atoms: Vec<Atom>) -> Self {
        Goal { atoms }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.atoms.iter().for_each(|a| a.collect_vars(&mut out));
        out
    }
}

impl fmt::Debug for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::print_goal(self))
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::print_goal(self))
    }
}
