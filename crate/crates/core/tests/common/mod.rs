//! Seeded random programs and goals shared by the property and acceptance
//! tests.
#![allow(dead_code)]

use std::collections::HashMap;

use colp::engine::Answer;
use colp::{Atom, Goal, Program, Sym, Term};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/testdata/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_clauses: usize,
    pub max_body: usize,
    /// Body atoms only use predicates declared after the head's.
    pub hierarchical: bool,
    /// No variable repeats in a clause head.
    pub linear_heads: bool,
    /// Include the binary functor `g/2`.
    pub binary_functor: bool,
    /// Nesting depth of generated argument terms.
    pub term_depth: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_clauses: 6,
            max_body: 3,
            hierarchical: false,
            linear_heads: false,
            binary_functor: true,
            term_depth: 2,
        }
    }
}

const PREDICATES: [(&str, usize); 3] = [("p", 1), ("q", 1), ("r", 2)];
const VARS: [&str; 3] = ["X", "Y", "Z"];

pub struct Gen {
    rng: StdRng,
    shape: Shape,
    fresh: usize,
}

impl Gen {
    pub fn new(seed: u64, shape: Shape) -> Self {
        Gen {
            rng: StdRng::seed_from_u64(seed),
            shape,
            fresh: 0,
        }
    }

    fn functors(&self) -> Vec<(&'static str, usize)> {
        let mut fs = vec![("a", 0), ("b", 0), ("f", 1)];
        if self.shape.binary_functor {
            fs.push(("g", 2));
        }
        fs
    }

    fn var(&mut self, linear: bool) -> Term {
        if linear {
            self.fresh += 1;
            Term::var(&format!("H{}", self.fresh))
        } else {
            Term::var(VARS.choose(&mut self.rng).unwrap())
        }
    }

    pub fn term(&mut self, depth: usize, linear: bool) -> Term {
        if depth == 0 || self.rng.gen_bool(0.4) {
            return if self.rng.gen_bool(0.6) {
                self.var(linear)
            } else {
                Term::constant(if self.rng.gen_bool(0.5) { "a" } else { "b" })
            };
        }
        let fs = self.functors();
        let (f, n) = *fs.choose(&mut self.rng).unwrap();
        let args = (0..n).map(|_| self.term(depth - 1, linear)).collect();
        Term::app(f, args)
    }

    fn atom(&mut self, pred: usize, linear: bool) -> Atom {
        let (name, arity) = PREDICATES[pred];
        let d = self.shape.term_depth;
        Atom::new(name, (0..arity).map(|_| self.term(d, linear)).collect())
    }

    pub fn program(&mut self) -> Program {
        let n = self.rng.gen_range(1..=self.shape.max_clauses);
        let mut rules = Vec::with_capacity(n);
        for _ in 0..n {
            let hp = self.rng.gen_range(0..PREDICATES.len());
            let head = self.atom(hp, self.shape.linear_heads);
            let lo = if self.shape.hierarchical { hp + 1 } else { 0 };
            let len = if lo >= PREDICATES.len() {
                0
            } else {
                self.rng.gen_range(0..=self.shape.max_body)
            };
            // Body variables come from the head so that answers stay tied to it.
            let head_vars = head.args.iter().flat_map(|t| t.vars()).collect::<Vec<Sym>>();
            let body = (0..len)
                .map(|_| {
                    let bp = self.rng.gen_range(lo..PREDICATES.len());
                    let a = self.atom(bp, false);
                    if head_vars.is_empty() {
                        a
                    } else {
                        let hv = head_vars.clone();
                        let rng = &mut self.rng;
                        a.map_vars(&mut |_| Some(Term::Var(hv.choose(rng).unwrap().clone())))
                    }
                })
                .collect();
            rules.push((head, body));
        }
        Program::from_rules(rules)
    }

    pub fn goal(&mut self) -> Goal {
        let p = self.rng.gen_range(0..PREDICATES.len());
        let d = self.shape.term_depth;
        let (name, arity) = PREDICATES[p];
        Goal::new(vec![Atom::new(name, (0..arity).map(|_| self.term(d, false)).collect())])
    }

    /// A proof term over the clause functors of `p`, with variables at
    /// random leaves.
    pub fn proof_term(&mut self, p: &Program, depth: usize) -> Term {
        if depth == 0 || p.is_empty() || self.rng.gen_bool(0.25) {
            self.fresh += 1;
            return Term::var(&format!("W{}", self.fresh));
        }
        let c = &p.clauses()[self.rng.gen_range(0..p.len())];
        let n = c.body.len();
        let args = (0..n).map(|_| self.proof_term(p, depth - 1)).collect();
        Term::app_sym(colp::transform::kappa(c.id), args)
    }

    /// A goal for the transformation of `p` whose proof arguments are
    /// partially built proof terms.
    pub fn proof_goal(&mut self, p: &Program, max_atoms: usize, depth: usize) -> Goal {
        let n = self.rng.gen_range(1..=max_atoms);
        let atoms = (0..n)
            .map(|_| {
                let mut a = self.goal().atoms.remove(0);
                a.args.push(self.proof_term(p, depth));
                a
            })
            .collect();
        Goal::new(atoms)
    }

    pub fn rng(&mut self) -> &mut StdRng {
        &mut self.rng
    }
}

fn variant(a: &Term, b: &Term, fwd: &mut HashMap<Sym, Sym>, back: &mut HashMap<Sym, Sym>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            fwd.entry(x.clone()).or_insert_with(|| y.clone()) == y
                && back.entry(y.clone()).or_insert_with(|| x.clone()) == x
        }
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| variant(x, y, fwd, back))
        }
        _ => false,
    }
}

/// The goal variables of `a` and `b` denote the same finite terms up to a
/// consistent renaming of the variables left free.
pub fn same_answer(a: &Answer, b: &Answer, vars: &[Sym]) -> bool {
    let tuple = |x: &Answer| -> Option<Term> {
        let items = vars
            .iter()
            .map(|v| x.bindings.resolve_full(&Term::Var(v.clone())))
            .collect::<Option<Vec<_>>>()?;
        Some(Term::app("t", items))
    };
    match (tuple(a), tuple(b)) {
        (Some(x), Some(y)) => variant(&x, &y, &mut HashMap::new(), &mut HashMap::new()),
        _ => false,
    }
}
