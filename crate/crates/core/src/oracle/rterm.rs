//! Ground rational trees in canonical form.
//!
//! A tree is stored as its minimal graph (bisimilar nodes merged), numbered
//! in depth-first preorder from the root. Two trees are equal exactly when
//! their canonical graphs are identical, so `Eq`, `Ord` and `Hash` are plain
//! structural comparisons.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::env::{deref, BindingEnv};
use crate::term::{Sym, Term};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RTerm(Arc<[Node]>);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Node {
    functor: Sym,
    children: Vec<u32>,
}

/// A graph under construction: nodes with arbitrary numbering.
#[derive(Default)]
struct Builder {
    nodes: Vec<(Sym, Vec<usize>)>,
}

impl Builder {
    fn add(&mut self, f: Sym, children: Vec<usize>) -> usize {
        self.nodes.push((f, children));
        self.nodes.len() - 1
    }

    /// Copies a canonical graph in, returning the index of its root.
    fn splice(&mut self, t: &RTerm) -> usize {
        let base = self.nodes.len();
        for n in t.0.iter() {
            self.nodes.push((
                n.functor.clone(),
                n.children.iter().map(|&c| base + c as usize).collect(),
            ));
        }
        base
    }

    fn finish(self, root: usize) -> RTerm {
        canonicalize(&self.nodes, root)
    }
}

/// Minimises by partition refinement, then renumbers in preorder.
fn canonicalize(nodes: &[(Sym, Vec<usize>)], root: usize) -> RTerm {
    let reachable = {
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            if !std::mem::replace(&mut seen[i], true) {
                stack.extend(nodes[i].1.iter().copied());
            }
        }
        seen
    };
    let live: Vec<usize> = (0..nodes.len()).filter(|&i| reachable[i]).collect();

    let mut class: HashMap<usize, usize> = HashMap::new();
    {
        let mut ids: BTreeMap<(&Sym, usize), usize> = BTreeMap::new();
        for &i in &live {
            let k = (&nodes[i].0, nodes[i].1.len());
            let next = ids.len();
            class.insert(i, *ids.entry(k).or_insert(next));
        }
    }
    let mut count = live.iter().map(|i| class[i]).max().map_or(0, |m| m + 1);
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next_class = HashMap::new();
        for &i in &live {
            let sig = (class[&i], nodes[i].1.iter().map(|c| class[c]).collect::<Vec<_>>());
            let n = ids.len();
            next_class.insert(i, *ids.entry(sig).or_insert(n));
        }
        let new_count = ids.len();
        class = next_class;
        if new_count == count {
            break;
        }
        count = new_count;
    }

    // One representative per class, then preorder numbering from the root.
    let mut rep: HashMap<usize, usize> = HashMap::new();
    for &i in &live {
        rep.entry(class[&i]).or_insert(i);
    }
    let mut number: HashMap<usize, u32> = HashMap::new();
    let mut order: Vec<usize> = Vec::new();
    let mut stack = vec![class[&root]];
    while let Some(k) = stack.pop() {
        if number.contains_key(&k) {
            continue;
        }
        number.insert(k, order.len() as u32);
        order.push(k);
        for c in nodes[rep[&k]].1.iter().rev() {
            if !number.contains_key(&class[c]) {
                stack.push(class[c]);
            }
        }
    }
    let out: Vec<Node> = order
        .iter()
        .map(|k| {
            let (f, cs) = &nodes[rep[k]];
            Node {
                functor: f.clone(),
                children: cs.iter().map(|c| number[&class[c]]).collect(),
            }
        })
        .collect();
    RTerm(out.into())
}

impl RTerm {
    pub fn constant(name: &str) -> RTerm {
        RTerm(
            vec![Node {
                functor: Sym::new(name),
                children: Vec::new(),
            }]
            .into(),
        )
    }

    pub fn app(f: Sym, args: &[RTerm]) -> RTerm {
        if args.is_empty() {
            return RTerm::constant(f.as_str());
        }
        let mut b = Builder::default();
        let root = b.add(f, Vec::new());
        let kids: Vec<usize> = args.iter().map(|a| b.splice(a)).collect();
        b.nodes[root].1 = kids;
        b.finish(root)
    }

    /// A ground finite term. Returns `None` if `t` has a variable.
    pub fn from_term(t: &Term) -> Option<RTerm> {
        match t {
            Term::Var(_) => None,
            Term::App(f, args) => {
                let args: Option<Vec<RTerm>> = args.iter().map(RTerm::from_term).collect();
                Some(RTerm::app(f.clone(), &args?))
            }
        }
    }

    /// The tree denoted by `t` under `env`. Returns `None` if an unbound
    /// variable is reachable.
    pub fn from_env(env: &BindingEnv, t: &Term) -> Option<RTerm> {
        let mut b = Builder::default();
        let mut by_var: HashMap<Sym, usize> = HashMap::new();
        let root = build_env(env, t, &mut b, &mut by_var)?;
        Some(b.finish(root))
    }

    /// A graph given as explicit nodes `(functor, children)`; `root` indexes
    /// into `nodes`.
    pub fn from_graph(nodes: &[(Sym, Vec<usize>)], root: usize) -> RTerm {
        canonicalize(nodes, root)
    }

    pub fn functor(&self) -> &Sym {
        &self.0[0].functor
    }

    pub fn arity(&self) -> usize {
        self.0[0].children.len()
    }

    pub fn node_count(&self) -> usize {
        self.0.len()
    }

    /// The subtree at argument `i` of the root.
    pub fn arg(&self, i: usize) -> RTerm {
        let start = self.0[0].children[i] as usize;
        if start == 0 {
            return self.clone();
        }
        let nodes: Vec<(Sym, Vec<usize>)> = self
            .0
            .iter()
            .map(|n| (n.functor.clone(), n.children.iter().map(|&c| c as usize).collect()))
            .collect();
        canonicalize(&nodes, start)
    }

    pub fn args(&self) -> Vec<RTerm> {
        (0..self.arity()).map(|i| self.arg(i)).collect()
    }

    pub fn is_finite(&self) -> bool {
        // Preorder numbering means every back edge points to a smaller index
        // on the current path; a finite tree's minimal graph is a DAG.
        let n = self.0.len();
        let mut state = vec![0u8; n];
        fn dfs(nodes: &[Node], i: usize, state: &mut [u8]) -> bool {
            state[i] = 1;
            for &c in &nodes[i].children {
                let c = c as usize;
                if state[c] == 1 || (state[c] == 0 && !dfs(nodes, c, state)) {
                    return false;
                }
            }
            state[i] = 2;
            true
        }
        dfs(&self.0, 0, &mut state)
    }

    /// The finite term, if there is one.
    pub fn to_term(&self) -> Option<Term> {
        if !self.is_finite() {
            return None;
        }
        fn go(nodes: &[Node], i: usize) -> Term {
            let n = &nodes[i];
            Term::app_sym(
                n.functor.clone(),
                n.children.iter().map(|&c| go(nodes, c as usize)).collect(),
            )
        }
        Some(go(&self.0, 0))
    }

    /// Does `f` occur anywhere in the tree?
    pub fn mentions(&self, f: &str) -> bool {
        self.0.iter().any(|n| n.functor.as_str() == f)
    }

    /// Writes the tree as a term whose cycle entries are variables named by
    /// `name`, recording one equation per entry in `eqs`.
    pub(crate) fn to_mu_parts(&self, name: &mut dyn FnMut() -> Sym, eqs: &mut Vec<(Sym, Term)>) -> Term {
        let n = self.0.len();
        // Nodes targeted by an edge that closes a cycle become entries.
        let mut entry = vec![false; n];
        let mut state = vec![0u8; n];
        fn mark(nodes: &[Node], i: usize, state: &mut [u8], entry: &mut [bool]) {
            state[i] = 1;
            for &c in &nodes[i].children {
                let c = c as usize;
                match state[c] {
                    0 => mark(nodes, c, state, entry),
                    1 => entry[c] = true,
                    _ => {}
                }
            }
            state[i] = 2;
        }
        mark(&self.0, 0, &mut state, &mut entry);
        let names: Vec<Option<Sym>> = entry.iter().map(|&e| if e { Some(name()) } else { None }).collect();
        fn go(nodes: &[Node], i: usize, names: &[Option<Sym>], top: bool) -> Term {
            if let (Some(v), false) = (&names[i], top) {
                return Term::Var(v.clone());
            }
            let n = &nodes[i];
            Term::app_sym(
                n.functor.clone(),
                n.children
                    .iter()
                    .map(|&c| go(nodes, c as usize, names, false))
                    .collect(),
            )
        }
        for (i, v) in names.iter().enumerate() {
            if let Some(v) = v {
                eqs.push((v.clone(), go(&self.0, i, &names, true)));
            }
        }
        go(&self.0, 0, &names, false)
    }
}

fn build_env(env: &BindingEnv, t: &Term, b: &mut Builder, by_var: &mut HashMap<Sym, usize>) -> Option<usize> {
    let (d, via) = deref(env, t);
    match d {
        Term::Var(_) => None,
        Term::App(f, args) => {
            if let Some(v) = &via {
                if let Some(&i) = by_var.get(v) {
                    return Some(i);
                }
            }
            let i = b.add(f, Vec::new());
            if let Some(v) = via {
                by_var.insert(v, i);
            }
            let mut kids = Vec::with_capacity(args.len());
            for a in args.iter() {
                kids.push(build_env(env, a, b, by_var)?);
            }
            b.nodes[i].1 = kids;
            Some(i)
        }
    }
}

impl fmt::Display for RTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut k = 0;
        let mut fresh = || {
            k += 1;
            Sym::from(format!("C{k}"))
        };
        let mut eqs = Vec::new();
        let t = self.to_mu_parts(&mut fresh, &mut eqs);
        write!(f, "{t}")?;
        write_eqs(f, &eqs)
    }
}

impl fmt::Debug for RTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub(crate) fn write_eqs(f: &mut fmt::Formatter<'_>, eqs: &[(Sym, Term)]) -> fmt::Result {
    if !eqs.is_empty() {
        f.write_str(" where ")?;
        for (i, (v, t)) in eqs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} = {t}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_term;

    fn zeros(prefix: usize) -> RTerm {
        let mut t = Term::var("Z");
        for _ in 0..prefix {
            t = Term::app("cons", vec![Term::constant("0"), t]);
        }
        let env = BindingEnv::from_bindings([(Sym::new("Z"), parse_term("cons(0, Z)").unwrap())]);
        RTerm::from_env(&env, &t).unwrap()
    }

    #[test]
    fn bisimilar_trees_are_equal() {
        assert_eq!(zeros(0), zeros(3));
        assert_eq!(zeros(0).node_count(), 2);
        assert!(!zeros(0).is_finite());
        assert_eq!(zeros(0).arg(1), zeros(0));
        assert_eq!(zeros(0).to_string(), "C1 where C1 = cons(0, C1)");
    }

    #[test]
    fn finite_round_trip() {
        let t = parse_term("f(g(a), g(a), b)").unwrap();
        let r = RTerm::from_term(&t).unwrap();
        assert!(r.is_finite());
        assert_eq!(r.to_term().unwrap(), t);
        assert_eq!(r.node_count(), 4);
        assert_eq!(r.args()[0], RTerm::from_term(&parse_term("g(a)").unwrap()).unwrap());
        assert!(RTerm::from_term(&parse_term("f(X)").unwrap()).is_none());
    }

    #[test]
    fn app_merges_bisimilar_children() {
        let z = zeros(0);
        let again = RTerm::app(Sym::new("cons"), &[RTerm::constant("0"), z.clone()]);
        assert_eq!(again, z);
    }

    #[test]
    fn different_cycles_differ() {
        let env = BindingEnv::from_bindings([(Sym::new("Z"), parse_term("cons(1, Z)").unwrap())]);
        let ones = RTerm::from_env(&env, &Term::var("Z")).unwrap();
        assert_ne!(ones, zeros(0));
    }
}
