//! SLD, Co-LP and structural resolution.
//!
//! All engines search depth-first, select the leftmost atom and try clauses
//! in program order. Every engine is bounded by a [`Budget`] and is fully
//! deterministic: the same inputs give the same [`Verdict`], traces included.

mod batch;
mod sld;
mod sres;

use std::fmt;

use crate::env::BindingEnv;
use crate::term::{Atom, Goal, Sym, Term};

pub use batch::{solve_batch, Engine};
pub use sld::{colp_solve, sld_solve, sld_step, DerivationNode, Solver};
pub use sres::{
    productivity_report, rewrite_normalize, rewrite_step, sres_solve, subst_step, ProductivityReport, Rewrite,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Total reductions across the whole search.
    pub max_steps: usize,
    /// Resolution steps on one SLD or Co-LP branch.
    pub max_depth: usize,
    /// Rewriting steps in one normalisation.
    pub max_rewrite_steps: usize,
    /// Substitution steps on one S-resolution branch.
    pub max_subst_steps: usize,
    /// Stop after this many answers.
    pub max_answers: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_steps: 10_000,
            max_depth: 1_000,
            max_rewrite_steps: 1_000,
            max_subst_steps: 1_000,
            max_answers: 1,
        }
    }
}

pub const DEFAULT_LAZY_K: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisScope {
    /// Only ancestors with the same predicate and arity.
    SamePredicate,
    /// Any ancestor atom.
    AnyAncestor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub budget: Budget,
    /// `None` picks the engine default: on for SLD, off otherwise.
    pub occurs_check: Option<bool>,
    pub trace: bool,
    pub lazy_k: usize,
    /// Further partial answers taken after the first one, each once every
    /// variable left unresolved by the previous one is bound.
    pub lazy_refinements: usize,
    pub hypothesis: HypothesisScope,
    pub iterative_deepening: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            budget: Budget::default(),
            occurs_check: None,
            trace: false,
            lazy_k: DEFAULT_LAZY_K,
            lazy_refinements: 0,
            hypothesis: HypothesisScope::SamePredicate,
            iterative_deepening: false,
        }
    }
}

impl From<Budget> for Config {
    fn from(budget: Budget) -> Self {
        Config {
            budget,
            ..Config::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Sld,
    Hyp,
    Rw,
    Su,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::Sld => "sld",
            RuleKind::Hyp => "hyp",
            RuleKind::Rw => "rw",
            RuleKind::Su => "su",
        })
    }
}

/// One reduction. `clause` is `None` for a hypothesis step; `atom` is the
/// 0-based position of the reduced atom in the goal; `sigma` lists the
/// bindings the step added, sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub n: usize,
    pub kind: RuleKind,
    pub clause: Option<usize>,
    pub atom: usize,
    pub sigma: Vec<(Sym, Term)>,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{} {} clause ", self.n, self.kind)?;
        match self.clause {
            Some(id) => write!(f, "{id}")?,
            None => f.write_str("-")?,
        }
        write!(f, " atom {} σ={{", self.atom)?;
        for (i, (v, t)) in self.sigma.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} ↦ {t}")?;
        }
        f.write_str("}")
    }
}

impl std::str::FromStr for TraceStep {
    type Err = String;

    /// Reads back one line written by `Display`.
    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let bad = || format!("malformed trace line `{line}`");
        let (head, sigma) = line.split_once(" σ={").ok_or_else(bad)?;
        let sigma = sigma.strip_suffix('}').ok_or_else(bad)?;
        let parts: Vec<&str> = head.split_whitespace().collect();
        let [n, kind, "clause", clause, "atom", atom] = parts.as_slice() else {
            return Err(bad());
        };
        let n = n.strip_prefix('#').and_then(|n| n.parse().ok()).ok_or_else(bad)?;
        let kind = match *kind {
            "sld" => RuleKind::Sld,
            "hyp" => RuleKind::Hyp,
            "rw" => RuleKind::Rw,
            "su" => RuleKind::Su,
            _ => return Err(bad()),
        };
        let clause = match *clause {
            "-" => None,
            c => Some(c.parse().map_err(|_| bad())?),
        };
        let atom = atom.parse().map_err(|_| bad())?;
        let mut pairs = Vec::new();
        if !sigma.is_empty() {
            // `A ↦ s, B ↦ t` read as the argument list `A, s, B, t`.
            let flat = format!("s({})", sigma.replace(" ↦ ", ", "));
            let t = crate::text::parse_term(&flat).map_err(|e| format!("{}: {e}", bad()))?;
            let args = t.args();
            if args.len() % 2 != 0 {
                return Err(bad());
            }
            for kv in args.chunks(2) {
                let v = kv[0].as_var().ok_or_else(bad)?.clone();
                pairs.push((v, kv[1].clone()));
            }
        }
        Ok(TraceStep {
            n,
            kind,
            clause,
            atom,
            sigma: pairs,
        })
    }
}

pub fn format_trace(trace: &[TraceStep]) -> String {
    trace.iter().map(|s| format!("{s}\n")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnswerKind {
    Total,
    Rational,
    Partial,
}

impl fmt::Display for AnswerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnswerKind::Total => "total",
            AnswerKind::Rational => "rational",
            AnswerKind::Partial => "partial",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Answer {
    pub kind: AnswerKind,
    /// Variables of the goal, in order of first occurrence.
    pub goal_vars: Vec<Sym>,
    /// Bindings reachable from the goal variables.
    pub bindings: BindingEnv,
    pub steps_used: usize,
    pub trace: Option<Vec<TraceStep>>,
}

impl Answer {
    pub(crate) fn from_env(
        kind: AnswerKind,
        goal_vars: &[Sym],
        env: &BindingEnv,
        steps_used: usize,
        trace: Option<Vec<TraceStep>>,
    ) -> Answer {
        let bindings = env.restrict(goal_vars);
        let kind = match kind {
            AnswerKind::Partial => AnswerKind::Partial,
            _ if goal_vars.iter().any(|v| bindings.is_cyclic(&Term::Var(v.clone()))) => AnswerKind::Rational,
            _ => AnswerKind::Total,
        };
        Answer {
            kind,
            goal_vars: goal_vars.to_vec(),
            bindings,
            steps_used,
            trace,
        }
    }

    /// The goal variable's value, unfolded `depth` times through cycles.
    pub fn value(&self, v: &str, depth: usize) -> Term {
        self.bindings.resolve(&Term::var(v), depth)
    }

    /// Drops goal variables not satisfying `keep` and recomputes the kind.
    pub fn retain_vars(&self, keep: impl Fn(&Sym) -> bool) -> Answer {
        let vars: Vec<Sym> = self.goal_vars.iter().filter(|v| keep(v)).cloned().collect();
        Answer::from_env(self.kind, &vars, &self.bindings, self.steps_used, self.trace.clone())
    }
}

/// A rewriting chain that did not normalise within budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// The goal the chain started from, under the bindings at that point.
    pub goal: Vec<Atom>,
    /// The first steps of the chain.
    pub chain: Vec<TraceStep>,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// `exhaustive` is true when the whole search space was covered.
    Answers {
        answers: Vec<Answer>,
        exhaustive: bool,
    },
    /// The budget ran out before any answer was found.
    Exhausted {
        steps: usize,
        max_depth_reached: usize,
    },
    Failed,
    NotUniversallyObservable {
        witness: Witness,
    },
}

impl Verdict {
    pub fn answers(&self) -> &[Answer] {
        match self {
            Verdict::Answers { answers, .. } => answers,
            _ => &[],
        }
    }

    pub fn first(&self) -> Option<&Answer> {
        self.answers().first()
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self, Verdict::Exhausted { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Answers { .. } => "answers",
            Verdict::Exhausted { .. } => "exhausted",
            Verdict::Failed => "failed",
            Verdict::NotUniversallyObservable { .. } => "not_universally_observable",
        }
    }
}

pub(crate) fn goal_vars(g: &Goal) -> Vec<Sym> {
    g.vars()
}

/// Fresh engine state for `g`: the counter starts past any `V<n>` in it.
pub(crate) fn initial_env(g: &Goal) -> BindingEnv {
    let mut env = BindingEnv::new();
    let vars = g.vars();
    env.reserve_names(vars.iter());
    env
}

pub(crate) fn sigma_since(env: &BindingEnv, trail: &[Sym]) -> Vec<(Sym, Term)> {
    let mut out: Vec<(Sym, Term)> = trail
        .iter()
        .filter_map(|v| env.get(v).map(|t| (v.clone(), t.clone())))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}
