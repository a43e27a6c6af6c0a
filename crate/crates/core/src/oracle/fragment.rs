use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use super::rterm::{write_eqs, RTerm};
use crate::term::{Program, Sym, Term};

/// Constant added to a signature that has none.
pub const RESERVED_CONSTANT: &str = "c$0";
pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("fragment has more than {cap} elements")]
    TooLarge { cap: usize },
}

/// A ground atom over canonical rational trees.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GAtom {
    pub pred: Sym,
    pub args: Vec<RTerm>,
}

impl GAtom {
    pub fn new(pred: &str, args: Vec<RTerm>) -> Self {
        GAtom {
            pred: Sym::new(pred),
            args,
        }
    }

    pub fn key(&self) -> (Sym, usize) {
        (self.pred.clone(), self.args.len())
    }

    /// The atom without its last argument.
    pub fn drop_last(&self) -> GAtom {
        GAtom {
            pred: self.pred.clone(),
            args: self.args[..self.args.len().saturating_sub(1)].to_vec(),
        }
    }
}

impl fmt::Display for GAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut k = 0;
        let mut fresh = || {
            k += 1;
            Sym::from(format!("C{k}"))
        };
        let mut eqs = Vec::new();
        let args: Vec<Term> = self.args.iter().map(|a| a.to_mu_parts(&mut fresh, &mut eqs)).collect();
        let atom = crate::term::Atom {
            pred: self.pred.clone(),
            args,
        };
        write!(f, "{atom}")?;
        write_eqs(f, &eqs)
    }
}

impl fmt::Debug for GAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub type AtomSet = BTreeSet<GAtom>;

/// A finite slice of the Herbrand base: every predicate of the program
/// applied to terms of a finite universe.
#[derive(Debug, Clone)]
pub struct GroundFragment {
    pub universe: Vec<RTerm>,
    members: HashSet<RTerm>,
    pub predicates: Vec<(Sym, usize)>,
    pub depth: usize,
    pub cycles: usize,
    pub cap: usize,
    /// When set, the last argument of every atom is unconstrained.
    pub free_last_arg: bool,
    /// When set, the fragment consists of exactly these atoms.
    restricted: Option<AtomSet>,
}

impl GroundFragment {
    pub fn from_universe(p: &Program, universe: Vec<RTerm>, depth: usize, cycles: usize) -> Self {
        let mut universe = universe;
        universe.sort();
        universe.dedup();
        let members = universe.iter().cloned().collect();
        GroundFragment {
            universe,
            members,
            predicates: p.predicates().into_iter().collect(),
            depth,
            cycles,
            cap: DEFAULT_CAP,
            free_last_arg: false,
            restricted: None,
        }
    }

    /// The fragment made of exactly `atoms`, over the subterms of their
    /// arguments. Iterating the consequence operator inside it certifies
    /// membership in the least (upward) or greatest (downward) model.
    pub fn over_atoms(p: &Program, atoms: AtomSet) -> Self {
        let mut seen: HashSet<RTerm> = HashSet::new();
        let mut stack: Vec<RTerm> = atoms.iter().flat_map(|a| a.args.iter().cloned()).collect();
        while let Some(t) = stack.pop() {
            if seen.insert(t.clone()) {
                stack.extend(t.args());
            }
        }
        let mut f = GroundFragment::from_universe(p, seen.into_iter().collect(), 0, 0);
        for a in &atoms {
            if !f.predicates.contains(&a.key()) {
                f.predicates.push(a.key());
            }
        }
        f.restricted = Some(atoms);
        f
    }

    pub fn is_restricted(&self) -> bool {
        self.restricted.is_some()
    }

    pub(crate) fn restricted_atoms(&self) -> Option<&AtomSet> {
        self.restricted.as_ref()
    }

    pub fn contains_term(&self, t: &RTerm) -> bool {
        self.members.contains(t)
    }

    pub fn contains(&self, a: &GAtom) -> bool {
        if let Some(s) = &self.restricted {
            return s.contains(a);
        }
        if !self.predicates.contains(&a.key()) {
            return false;
        }
        let checked = if self.free_last_arg {
            &a.args[..a.args.len().saturating_sub(1)]
        } else {
            &a.args[..]
        };
        checked.iter().all(|t| self.members.contains(t))
    }

    /// Number of atoms, or `None` past the cap.
    pub fn atom_count(&self) -> Option<usize> {
        if let Some(s) = &self.restricted {
            return Some(s.len());
        }
        let u = self.universe.len();
        let mut total: usize = 0;
        for (_, n) in &self.predicates {
            let k = u.checked_pow(*n as u32)?;
            total = total.checked_add(k)?;
            if total > self.cap {
                return None;
            }
        }
        Some(total)
    }

    /// Every atom of the fragment, in canonical order.
    pub fn atoms(&self) -> Result<AtomSet, OracleError> {
        if let Some(s) = &self.restricted {
            return Ok(s.clone());
        }
        if self.free_last_arg || self.atom_count().is_none() {
            return Err(OracleError::TooLarge { cap: self.cap });
        }
        let mut out = AtomSet::new();
        for (pred, n) in &self.predicates {
            let mut idx = vec![0usize; *n];
            if *n > 0 && self.universe.is_empty() {
                continue;
            }
            loop {
                out.insert(GAtom {
                    pred: pred.clone(),
                    args: idx.iter().map(|&i| self.universe[i].clone()).collect(),
                });
                let mut k = 0;
                loop {
                    if k == *n {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] < self.universe.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == *n {
                    break;
                }
            }
        }
        Ok(out)
    }
}

/// The function symbols of `p`, with a reserved constant added if it has
/// none.
pub fn signature(p: &Program) -> Vec<(Sym, usize)> {
    let mut fs: BTreeSet<(Sym, usize)> = p.functors();
    if !fs.iter().any(|(_, n)| *n == 0) {
        fs.insert((Sym::new(RESERVED_CONSTANT), 0));
    }
    fs.into_iter().collect()
}

/// Finite ground terms of depth at most `d` (constants have depth 0).
pub fn finite_terms(sig: &[(Sym, usize)], d: usize, cap: usize) -> Result<Vec<RTerm>, OracleError> {
    let mut level: BTreeSet<RTerm> = sig
        .iter()
        .filter(|(_, n)| *n == 0)
        .map(|(f, _)| RTerm::constant(f.as_str()))
        .collect();
    for _ in 0..d {
        let prev: Vec<RTerm> = level.iter().cloned().collect();
        for (f, n) in sig.iter().filter(|(_, n)| *n > 0) {
            for args in tuples(&prev, *n, cap)? {
                level.insert(RTerm::app(f.clone(), &args));
                if level.len() > cap {
                    return Err(OracleError::TooLarge { cap });
                }
            }
        }
    }
    Ok(level.into_iter().collect())
}

fn tuples(items: &[RTerm], n: usize, cap: usize) -> Result<Vec<Vec<RTerm>>, OracleError> {
    let mut out: Vec<Vec<RTerm>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * items.len());
        for prefix in &out {
            for it in items {
                let mut v = prefix.clone();
                v.push(it.clone());
                next.push(v);
            }
        }
        if next.len() > cap {
            return Err(OracleError::TooLarge { cap });
        }
        out = next;
    }
    Ok(out)
}

/// Infinite rational terms whose minimal graph has at most `c` nodes on or
/// above a cycle; every other argument is a finite term of depth below `d`.
pub fn rational_terms(sig: &[(Sym, usize)], d: usize, c: usize, cap: usize) -> Result<Vec<RTerm>, OracleError> {
    if c == 0 {
        return Ok(Vec::new());
    }
    let leaves = finite_terms(sig, d.saturating_sub(1), cap)?;
    let compound: Vec<(Sym, usize)> = sig.iter().filter(|(_, n)| *n > 0).cloned().collect();
    let mut out: BTreeSet<RTerm> = BTreeSet::new();
    for k in 1..=c {
        // Each of the k cyclic nodes picks a functor and, per argument,
        // either a leaf or one of the k nodes.
        let choices = leaves.len() + k;
        let mut shapes: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new()];
        for _ in 0..k {
            let mut next = Vec::new();
            for s in &shapes {
                for (fi, (_, n)) in compound.iter().enumerate() {
                    let mut arg_choices: Vec<Vec<usize>> = vec![Vec::new()];
                    for _ in 0..*n {
                        let mut grown = Vec::with_capacity(arg_choices.len() * choices);
                        for a in &arg_choices {
                            for ch in 0..choices {
                                let mut a = a.clone();
                                a.push(ch);
                                grown.push(a);
                            }
                        }
                        arg_choices = grown;
                    }
                    for a in arg_choices {
                        let mut s = s.clone();
                        s.push((fi, a));
                        next.push(s);
                        if next.len() > cap {
                            return Err(OracleError::TooLarge { cap });
                        }
                    }
                }
            }
            shapes = next;
        }
        for s in shapes {
            // Cyclic nodes first, then the leaves they point to.
            let mut nodes: Vec<(Sym, Vec<usize>)> =
                s.iter().map(|(fi, _)| (compound[*fi].0.clone(), Vec::new())).collect();
            let mut leaf_index: HashMap<usize, usize> = HashMap::new();
            for (i, (_, args)) in s.iter().enumerate() {
                let mut kids = Vec::with_capacity(args.len());
                for &ch in args {
                    if ch < k {
                        kids.push(ch);
                    } else {
                        let idx = match leaf_index.get(&(ch - k)) {
                            Some(&idx) => idx,
                            None => {
                                let idx = append_finite(&mut nodes, &leaves[ch - k]);
                                leaf_index.insert(ch - k, idx);
                                idx
                            }
                        };
                        kids.push(idx);
                    }
                }
                nodes[i].1 = kids;
            }
            let t = RTerm::from_graph(&nodes, 0);
            if !t.is_finite() {
                out.insert(t);
                if out.len() > cap {
                    return Err(OracleError::TooLarge { cap });
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

fn append_finite(nodes: &mut Vec<(Sym, Vec<usize>)>, t: &RTerm) -> usize {
    let term = t.to_term().expect("leaf terms are finite");
    fn go(nodes: &mut Vec<(Sym, Vec<usize>)>, t: &Term) -> usize {
        let i = nodes.len();
        nodes.push((t.functor().expect("ground").0.clone(), Vec::new()));
        let kids: Vec<usize> = t.args().iter().map(|a| go(nodes, a)).collect();
        nodes[i].1 = kids;
        i
    }
    go(nodes, &term)
}

/// Finite terms of depth at most `d` plus rational terms with at most `c`
/// cyclic nodes, over the signature of `p`.
pub fn build_fragment(p: &Program, d: usize, c: usize) -> Result<GroundFragment, OracleError> {
    let sig = signature(p);
    let mut universe = finite_terms(&sig, d, DEFAULT_CAP)?;
    universe.extend(rational_terms(&sig, d, c, DEFAULT_CAP)?);
    let frag = GroundFragment::from_universe(p, universe, d, c);
    if frag.atom_count().is_none() {
        return Err(OracleError::TooLarge { cap: frag.cap });
    }
    Ok(frag)
}
