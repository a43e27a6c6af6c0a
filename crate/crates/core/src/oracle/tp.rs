use std::collections::HashMap;
use std::fmt;

use super::fragment::{AtomSet, GAtom, GroundFragment, OracleError};
use super::rterm::RTerm;
use crate::par::{self, Parallelism};
use crate::term::{Atom, Clause, Program, Sym, Term};

type Theta = HashMap<Sym, RTerm>;

fn match_term(pattern: &Term, g: &RTerm, theta: &mut Theta) -> bool {
    match pattern {
        Term::Var(v) => match theta.get(v) {
            Some(prev) => prev == g,
            None => {
                theta.insert(v.clone(), g.clone());
                true
            }
        },
        Term::App(f, args) => {
            if g.functor() != f || g.arity() != args.len() {
                return false;
            }
            args.iter().enumerate().all(|(i, a)| match_term(a, &g.arg(i), theta))
        }
    }
}

fn match_atom(pattern: &Atom, g: &GAtom, theta: &mut Theta) -> bool {
    pattern.pred == g.pred
        && pattern.args.len() == g.args.len()
        && pattern.args.iter().zip(&g.args).all(|(p, t)| match_term(p, t, theta))
}

fn instantiate(t: &Term, theta: &Theta) -> RTerm {
    match t {
        Term::Var(v) => theta[v].clone(),
        Term::App(f, args) => {
            let args: Vec<RTerm> = args.iter().map(|a| instantiate(a, theta)).collect();
            RTerm::app(f.clone(), &args)
        }
    }
}

/// Ground instances of `c` whose bodies lie in `s` and whose heads lie in
/// `frag`, as `(head, body)` pairs.
pub(crate) fn instances(
    mode: Parallelism,
    c: &Clause,
    index: &HashMap<(Sym, usize), Vec<&GAtom>>,
    frag: &GroundFragment,
) -> Vec<(GAtom, Vec<GAtom>)> {
    let mut thetas: Vec<Theta> = match frag.restricted_atoms() {
        // The possible heads are known, so start from them.
        Some(heads) => heads
            .iter()
            .filter_map(|h| {
                let mut th = Theta::new();
                match_atom(&c.head, h, &mut th).then_some(th)
            })
            .collect(),
        None => vec![Theta::new()],
    };
    for b in &c.body {
        let Some(cands) = index.get(&b.key()) else {
            return Vec::new();
        };
        let mut next = Vec::new();
        for th in &thetas {
            for g in cands {
                let mut th = th.clone();
                if match_atom(b, g, &mut th) {
                    next.push(th);
                }
            }
        }
        if next.is_empty() {
            return Vec::new();
        }
        thetas = next;
    }
    if thetas.is_empty() {
        return Vec::new();
    }
    // Head-only variables range over the whole universe. That enumeration
    // dominates, so it is split on the first such variable's value.
    let mut free: Vec<Sym> = Vec::new();
    for v in c.head.args.iter().flat_map(|a| a.vars()) {
        if !thetas[0].contains_key(&v) && !free.contains(&v) {
            free.push(v);
        }
    }
    if let Some((first, _)) = free.split_first() {
        thetas = thetas
            .iter()
            .flat_map(|th| {
                frag.universe.iter().map(move |t| {
                    let mut th = th.clone();
                    th.insert(first.clone(), t.clone());
                    th
                })
            })
            .collect();
    }
    let rest = free.get(1..).unwrap_or_default();
    par::map(mode, &thetas, |th| {
        let mut out = Vec::new();
        for_each_assignment(rest, &frag.universe, th.clone(), &mut |th| {
            let head = ground(&c.head, th);
            if frag.contains(&head) {
                out.push((head, c.body.iter().map(|b| ground(b, th)).collect()));
            }
        });
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

fn ground(a: &Atom, th: &Theta) -> GAtom {
    GAtom {
        pred: a.pred.clone(),
        args: a.args.iter().map(|t| instantiate(t, th)).collect(),
    }
}

fn for_each_assignment(vars: &[Sym], universe: &[RTerm], mut th: Theta, f: &mut dyn FnMut(&Theta)) {
    match vars.split_first() {
        None => f(&th),
        Some((v, rest)) => {
            for t in universe {
                th.insert(v.clone(), t.clone());
                for_each_assignment(rest, universe, th.clone(), f);
            }
        }
    }
}

pub(crate) fn index(s: &AtomSet) -> HashMap<(Sym, usize), Vec<&GAtom>> {
    let mut idx: HashMap<(Sym, usize), Vec<&GAtom>> = HashMap::new();
    for a in s {
        idx.entry(a.key()).or_default().push(a);
    }
    idx
}

/// One application of the immediate consequence operator, restricted to
/// `frag`.
pub fn tp_step(p: &Program, s: &AtomSet, frag: &GroundFragment) -> AtomSet {
    tp_step_with(Parallelism::default(), p, s, frag)
}

pub fn tp_step_with(mode: Parallelism, p: &Program, s: &AtomSet, frag: &GroundFragment) -> AtomSet {
    let idx = index(s);
    par::map(mode, p.clauses(), |c| instances(mode, c, &idx, frag))
        .into_iter()
        .flatten()
        .map(|(head, _)| head)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixpointTrace {
    pub direction: Direction,
    /// `sets[k]` is the k-th iterate.
    pub sets: Vec<AtomSet>,
    /// First `k` with `sets[k] == sets[k + 1]`.
    pub fixed_at: Option<usize>,
}

impl FixpointTrace {
    pub fn last(&self) -> &AtomSet {
        self.sets.last().expect("at least the initial set")
    }
}

impl fmt::Display for FixpointTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.sets.iter().enumerate() {
            writeln!(f, "-- n={k}")?;
            for a in s {
                writeln!(f, "{a}")?;
            }
        }
        Ok(())
    }
}

fn iterate(
    mode: Parallelism,
    p: &Program,
    n: usize,
    frag: &GroundFragment,
    start: AtomSet,
    direction: Direction,
) -> FixpointTrace {
    let mut sets = vec![start];
    let mut fixed_at = None;
    for k in 0..n {
        let next = match fixed_at {
            Some(_) => sets[k].clone(),
            None => tp_step_with(mode, p, &sets[k], frag),
        };
        if fixed_at.is_none() && next == sets[k] {
            fixed_at = Some(k);
        }
        sets.push(next);
    }
    FixpointTrace {
        direction,
        sets,
        fixed_at,
    }
}

/// `T_P ↑ 0..=n` from the empty set.
pub fn tp_up(p: &Program, n: usize, frag: &GroundFragment) -> FixpointTrace {
    tp_up_with(Parallelism::default(), p, n, frag)
}

pub fn tp_up_with(mode: Parallelism, p: &Program, n: usize, frag: &GroundFragment) -> FixpointTrace {
    iterate(mode, p, n, frag, AtomSet::new(), Direction::Up)
}

/// `T_P ↓ 0..=n` from the whole fragment.
pub fn tp_down(p: &Program, n: usize, frag: &GroundFragment) -> Result<FixpointTrace, OracleError> {
    tp_down_with(Parallelism::default(), p, n, frag)
}

pub fn tp_down_with(
    mode: Parallelism,
    p: &Program,
    n: usize,
    frag: &GroundFragment,
) -> Result<FixpointTrace, OracleError> {
    Ok(iterate(mode, p, n, frag, frag.atoms()?, Direction::Down))
}

/// Is the ground atom `a` an instance of the (possibly non-ground) atom
/// `pattern`?
pub fn ground_instance_of(pattern: &Atom, a: &GAtom) -> bool {
    match_atom(pattern, a, &mut Theta::new())
}
