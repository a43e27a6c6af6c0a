use std::collections::{BTreeMap, HashMap};

use super::{goal_vars, initial_env, sigma_since, Answer, AnswerKind, Config, RuleKind};
use super::{TraceStep, Verdict, Witness};
use crate::env::BindingEnv;
use crate::term::{Atom, Goal, Program, Sym, Term};

/// Steps of a diverging chain kept in its witness.
const WITNESS_STEPS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub enum Rewrite {
    NormalForm {
        goal: Vec<Atom>,
        steps: usize,
        trace: Vec<TraceStep>,
    },
    Diverged(Witness),
}

/// Rewrites with the first matching clause at the leftmost reducible atom
/// until no clause head matches any atom. Only the fresh-variable counter of
/// `env` changes.
pub fn rewrite_normalize(goal: &[Atom], p: &Program, env: &mut BindingEnv, cfg: &Config) -> Rewrite {
    normalize(goal, p, env, cfg.budget.max_rewrite_steps, cfg.trace)
}

fn normalize(goal: &[Atom], p: &Program, env: &mut BindingEnv, limit: usize, record: bool) -> Rewrite {
    let mut cur: Vec<Atom> = goal.to_vec();
    let mut trace = Vec::new();
    let mut steps = 0;
    'outer: loop {
        for i in 0..cur.len() {
            for c in p.candidates(&cur[i]) {
                let Some(sigma) = env.match_atom(&c.head, &cur[i]) else {
                    continue;
                };
                steps += 1;
                if record || steps <= WITNESS_STEPS {
                    let mut s: Vec<(Sym, Term)> = sigma.iter().map(|(v, t)| (v.clone(), t.clone())).collect();
                    s.sort_by(|a, b| a.0.cmp(&b.0));
                    trace.push(TraceStep {
                        n: steps,
                        kind: RuleKind::Rw,
                        clause: Some(c.id),
                        atom: i,
                        sigma: s,
                    });
                }
                if steps > limit {
                    trace.truncate(WITNESS_STEPS);
                    return Rewrite::Diverged(Witness {
                        goal: goal.iter().map(|a| env.resolve_atom(a, 2)).collect(),
                        chain: trace,
                        steps: limit,
                    });
                }
                let body = instantiate_body(&c.body, sigma, env);
                cur.splice(i..=i, body);
                continue 'outer;
            }
        }
        if !record {
            trace.clear();
        }
        return Rewrite::NormalForm {
            goal: cur,
            steps,
            trace,
        };
    }
}

/// One rewriting step at the leftmost reducible atom, or `None` when the
/// goal is in normal form.
pub fn rewrite_step(goal: &[Atom], p: &Program, env: &mut BindingEnv) -> Option<Vec<Atom>> {
    for (i, a) in goal.iter().enumerate() {
        for c in p.candidates(a) {
            if let Some(sigma) = env.match_atom(&c.head, a) {
                let mut next = goal.to_vec();
                next.splice(i..=i, instantiate_body(&c.body, sigma, env));
                return Some(next);
            }
        }
    }
    None
}

fn instantiate_body(body: &[Atom], mut sigma: HashMap<Sym, Term>, env: &mut BindingEnv) -> Vec<Atom> {
    body.iter()
        .map(|a| {
            a.map_vars(&mut |v| {
                Some(
                    sigma
                        .entry(v.clone())
                        .or_insert_with(|| Term::Var(env.fresh_var()))
                        .clone(),
                )
            })
        })
        .collect()
}

struct Child {
    env: BindingEnv,
    clause: usize,
    atom: usize,
    sigma: Vec<(Sym, Term)>,
}

/// Unifier-only children for the leftmost atom. A goal with an atom that
/// unifies with no clause head is dead and has no children.
fn subst_children(goal: &[Atom], p: &Program, env: &BindingEnv) -> Vec<Child> {
    let mut probe = env.clone();
    let mut trail = Vec::new();
    for a in goal {
        let alive = p.candidates(a).any(|c| {
            let saved = probe.counter();
            let renamed = probe.rename_apart(c);
            let ok = probe.unify_atoms_in_place(a, &renamed.head, false, &mut trail);
            probe.undo(&mut trail, 0);
            probe.set_counter(saved);
            ok
        });
        if !alive {
            return Vec::new();
        }
    }
    let Some(selected) = goal.first() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for c in p.candidates(selected) {
        if env.match_atom(&c.head, selected).is_some() {
            continue;
        }
        let mut child = env.clone();
        let renamed = child.rename_apart(c);
        let mut trail = Vec::new();
        if child.unify_atoms_in_place(selected, &renamed.head, false, &mut trail) {
            let sigma = sigma_since(&child, &trail);
            out.push(Child {
                env: child,
                clause: c.id,
                atom: 0,
                sigma,
            });
        }
    }
    out
}

/// Substitution children of a rewriting normal form, in clause order. The
/// goal atoms are unchanged; the unifier lives in each child's environment.
pub fn subst_step(goal: &Goal, p: &Program, env: &BindingEnv) -> Vec<(Goal, BindingEnv)> {
    subst_children(&goal.atoms, p, env)
        .into_iter()
        .map(|c| (goal.clone(), c.env))
        .collect()
}

struct State {
    goal: Vec<Atom>,
    env: BindingEnv,
    depth: usize,
    trace: Vec<TraceStep>,
    snapshot: Option<Answer>,
    refinements: usize,
}

fn unresolved(a: &Answer) -> Vec<Sym> {
    let roots: Vec<Sym> = a.goal_vars.iter().filter(|v| observed(v)).cloned().collect();
    a.bindings
        .reachable_vars(&roots)
        .into_iter()
        .filter(|v| !a.bindings.is_bound(v))
        .collect()
}

fn observed(v: &Sym) -> bool {
    !v.as_str().starts_with(crate::transform::PROOF_VAR_PREFIX)
}

/// Structural resolution: rewriting normalisation alternated with
/// substitution steps, depth-first over the substitution alternatives.
///
/// A branch that has taken `lazy_k` substitution steps and has bound every
/// observed goal variable records a partial answer; it is reported when no
/// total answer is found within budget.
pub fn sres_solve(g: &Goal, p: &Program, cfg: &Config) -> Verdict {
    let vars = goal_vars(g);
    let watched: Vec<Sym> = vars.iter().filter(|v| observed(v)).cloned().collect();
    let budget = &cfg.budget;
    let mut answers: Vec<Answer> = Vec::new();
    let mut steps = 0usize;
    let mut cut = false;
    let mut deepest = 0;
    let mut last_snapshot: Option<Answer> = None;
    let mut stack = vec![State {
        goal: g.atoms.clone(),
        env: initial_env(g),
        depth: 0,
        trace: Vec::new(),
        snapshot: None,
        refinements: 0,
    }];

    while let Some(mut st) = stack.pop() {
        deepest = deepest.max(st.depth);
        let normal = match normalize(&st.goal, p, &mut st.env, budget.max_rewrite_steps, cfg.trace) {
            Rewrite::Diverged(w) => return Verdict::NotUniversallyObservable { witness: w },
            Rewrite::NormalForm { goal, steps: n, trace } => {
                steps += n;
                if cfg.trace {
                    for mut s in trace {
                        s.n = st.trace.len() + 1;
                        st.trace.push(s);
                    }
                }
                goal
            }
        };
        if normal.is_empty() {
            let t = cfg.trace.then(|| st.trace.clone());
            answers.push(Answer::from_env(AnswerKind::Total, &vars, &st.env, steps, t));
            if answers.len() >= budget.max_answers.max(1) {
                return Verdict::Answers {
                    answers,
                    exhaustive: false,
                };
            }
            continue;
        }
        if st.snapshot.is_none() && st.depth >= cfg.lazy_k && watched.iter().all(|v| st.env.is_bound(v)) {
            let t = cfg.trace.then(|| st.trace.clone());
            st.snapshot = Some(Answer::from_env(AnswerKind::Partial, &vars, &st.env, steps, t));
        } else if let Some(prev) = &st.snapshot {
            if st.refinements < cfg.lazy_refinements && unresolved(prev).iter().all(|v| st.env.is_bound(v)) {
                let t = cfg.trace.then(|| st.trace.clone());
                st.snapshot = Some(Answer::from_env(AnswerKind::Partial, &vars, &st.env, steps, t));
                st.refinements += 1;
            }
        }
        if steps >= budget.max_steps {
            if st.snapshot.is_some() {
                last_snapshot = st.snapshot;
            }
            cut = true;
            break;
        }
        if st.depth >= budget.max_subst_steps {
            if st.snapshot.is_some() {
                last_snapshot = st.snapshot;
            }
            cut = true;
            continue;
        }
        let children = subst_children(&normal, p, &st.env);
        steps += children.len();
        for c in children.into_iter().rev() {
            let mut trace = Vec::new();
            if cfg.trace {
                trace = st.trace.clone();
                trace.push(TraceStep {
                    n: trace.len() + 1,
                    kind: RuleKind::Su,
                    clause: Some(c.clause),
                    atom: c.atom,
                    sigma: c.sigma,
                });
            }
            stack.push(State {
                goal: normal.clone(),
                env: c.env,
                depth: st.depth + 1,
                trace,
                snapshot: st.snapshot.clone(),
                refinements: st.refinements,
            });
        }
    }

    if !answers.is_empty() {
        let exhaustive = !cut && stack.is_empty();
        return Verdict::Answers { answers, exhaustive };
    }
    if let Some(a) = last_snapshot {
        return Verdict::Answers {
            answers: vec![a],
            exhaustive: false,
        };
    }
    if cut {
        Verdict::Exhausted {
            steps,
            max_depth_reached: deepest,
        }
    } else {
        Verdict::Failed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductivityReport {
    /// Every rewriting normalisation met on the followed branch terminated.
    pub observable: bool,
    /// Substitution steps completed on the followed branch.
    pub liveness: usize,
    /// Functors bound to goal variables by substitution steps that were then
    /// consumed by rewriting.
    pub constructors: BTreeMap<Sym, usize>,
    /// The branch ended (success or dead end) within budget.
    pub terminated: bool,
    pub witness: Option<Witness>,
}

/// Follows the first substitution alternative at every step and records
/// evidence of observability and liveness.
pub fn productivity_report(g: &Goal, p: &Program, cfg: &Config) -> ProductivityReport {
    let budget = &cfg.budget;
    let mut env = initial_env(g);
    let mut report = ProductivityReport {
        observable: true,
        liveness: 0,
        constructors: BTreeMap::new(),
        terminated: false,
        witness: None,
    };
    let mut steps = 0;
    let mut goal = match normalize(&g.atoms, p, &mut env, budget.max_rewrite_steps, false) {
        Rewrite::Diverged(w) => {
            report.observable = false;
            report.witness = Some(w);
            return report;
        }
        Rewrite::NormalForm { goal, steps: n, .. } => {
            steps += n;
            goal
        }
    };
    while report.liveness < budget.max_subst_steps && steps < budget.max_steps {
        if goal.is_empty() {
            report.terminated = true;
            break;
        }
        let mut existing = Vec::new();
        for a in &goal {
            a.collect_vars(&mut existing);
        }
        let existing = env.reachable_vars(&existing);
        let Some(child) = subst_children(&goal, p, &env).into_iter().next() else {
            report.terminated = true;
            break;
        };
        env = child.env;
        steps += 1;
        let produced: Vec<Sym> = child
            .sigma
            .iter()
            .filter(|(v, _)| existing.contains(v))
            .filter_map(|(_, t)| t.functor().map(|(f, _)| f.clone()))
            .collect();
        match normalize(&goal, p, &mut env, budget.max_rewrite_steps, false) {
            Rewrite::Diverged(w) => {
                report.observable = false;
                report.witness = Some(w);
                return report;
            }
            Rewrite::NormalForm {
                goal: next, steps: n, ..
            } => {
                steps += n;
                if n > 0 {
                    for f in produced {
                        *report.constructors.entry(f).or_insert(0) += 1;
                    }
                }
                goal = next;
            }
        }
        report.liveness += 1;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Budget;
    use crate::text::{parse_goal, parse_program, print_answer, AnswerStyle};

    const EX3: &str = "p(f(X)) :- p(X).\nq(X) :- q(X).\n";
    const FROM: &str = "from(N, [N|T]) :- from(s(N), T).";

    fn goal(s: &str) -> Goal {
        parse_goal(s).unwrap()
    }

    #[test]
    fn rewriting_examples() {
        let p = parse_program(EX3).unwrap();
        let cfg = Config::default();
        let mut env = BindingEnv::new();
        assert!(matches!(
            rewrite_normalize(&goal("q(X)").atoms, &p, &mut env, &cfg),
            Rewrite::Diverged(_)
        ));
        match rewrite_normalize(&goal("p(X)").atoms, &p, &mut env, &cfg) {
            Rewrite::NormalForm { goal: g, steps, .. } => {
                assert_eq!(steps, 0);
                assert_eq!(g, goal("p(X)").atoms);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn subst_examples() {
        let p = parse_program(EX3).unwrap();
        let g = goal("p(X)");
        let kids = subst_step(&g, &p, &initial_env(&g));
        assert_eq!(kids.len(), 1);
        let x = kids[0].1.resolve(&Term::var("X"), 3);
        assert_eq!(x.functor().unwrap().0.as_str(), "f");
        assert!(x.args()[0].is_var());

        let p = parse_program("class(b).").unwrap();
        let g = goal("class(a)");
        assert!(subst_step(&g, &p, &initial_env(&g)).is_empty());
    }

    #[test]
    fn from_lazy_answer() {
        let p = parse_program(FROM).unwrap();
        let v = sres_solve(&goal("from(0, X)"), &p, &Config::default());
        let a = v.first().expect("partial answer");
        assert_eq!(a.kind, AnswerKind::Partial);
        assert_eq!(
            print_answer(a, AnswerStyle::Lazy, 10).unwrap(),
            "X = [0|[s(0)|[s(s(0))|X'?]]]"
        );
    }

    #[test]
    fn total_answers_and_unobservable() {
        let p = parse_program("nat(0).\nnat(s(X)) :- nat(X).\n").unwrap();
        let v = sres_solve(&goal("nat(s(s(0)))"), &p, &Config::default());
        assert_eq!(v.first().unwrap().kind, AnswerKind::Total);
        let p = parse_program(EX3).unwrap();
        assert!(matches!(
            sres_solve(&goal("q(X)"), &p, &Config::default()),
            Verdict::NotUniversallyObservable { .. }
        ));
    }

    #[test]
    fn productivity() {
        let p = parse_program(EX3).unwrap();
        let cfg = Config {
            budget: Budget {
                max_subst_steps: 10,
                ..Budget::default()
            },
            ..Config::default()
        };
        let r = productivity_report(&goal("p(X)"), &p, &cfg);
        assert!(r.observable);
        assert!(r.liveness >= 3);
        assert_eq!(r.constructors.get(&Sym::new("f")), Some(&10));
        let r = productivity_report(&goal("q(X)"), &p, &cfg);
        assert!(!r.observable);
        assert!(r.witness.is_some());
    }
}
