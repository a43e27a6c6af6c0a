use std::sync::Arc;

use super::{goal_vars, initial_env, sigma_since, Answer, AnswerKind, Config, HypothesisScope};
use super::{RuleKind, TraceStep, Verdict};
use crate::env::{unify_atoms, BindingEnv};
use crate::term::{Atom, Clause, Goal, Program};

/// A goal state for single-step inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivationNode {
    pub goal: Goal,
    pub env: BindingEnv,
    /// Atoms selected on the path to this node, oldest first.
    pub ancestors: Vec<Atom>,
    pub depth: usize,
    pub rule: Option<(RuleKind, Option<usize>)>,
}

impl DerivationNode {
    pub fn root(goal: Goal) -> Self {
        let env = initial_env(&goal);
        DerivationNode {
            goal,
            env,
            ancestors: Vec::new(),
            depth: 0,
            rule: None,
        }
    }
}

/// All SLD children of `n`, in clause order. Bindings stay in the child's
/// environment; the occurs check is on.
pub fn sld_step(n: &DerivationNode, p: &Program) -> Vec<DerivationNode> {
    let Some((selected, rest)) = n.goal.atoms.split_first() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for c in p.candidates(selected) {
        let mut env = n.env.clone();
        let renamed = env.rename_apart(c);
        let Some(env) = unify_atoms(selected, &renamed.head, &env, true) else {
            continue;
        };
        let mut atoms = renamed.body.clone();
        atoms.extend(rest.iter().cloned());
        let mut ancestors = n.ancestors.clone();
        ancestors.push(selected.clone());
        out.push(DerivationNode {
            goal: Goal::new(atoms),
            env,
            ancestors,
            depth: n.depth + 1,
            rule: Some((RuleKind::Sld, Some(c.id))),
        });
    }
    out
}

struct AncNode {
    atom: Atom,
    parent: Anc,
}

type Anc = Option<Arc<AncNode>>;

struct GoalNode {
    atom: Atom,
    anc: Anc,
    next: GoalList,
}

type GoalList = Option<Arc<GoalNode>>;

fn goal_from(atoms: &[Atom], anc: &Anc, tail: GoalList) -> GoalList {
    atoms.iter().rev().fold(tail, |next, a| {
        Some(Arc::new(GoalNode {
            atom: a.clone(),
            anc: anc.clone(),
            next,
        }))
    })
}

struct Frame {
    goal: Arc<GoalNode>,
    hyps: Vec<Atom>,
    clauses: Vec<usize>,
    alt: usize,
    mark: usize,
    counter: u64,
    depth: usize,
    trace_len: usize,
}

/// Depth-first SLD and Co-LP search.
pub struct Solver<'a> {
    program: &'a Program,
    cfg: &'a Config,
    coinductive: bool,
}

enum Outcome {
    Done(Verdict),
    DepthCut { answers: Vec<Answer>, steps: usize },
}

impl<'a> Solver<'a> {
    pub fn new(program: &'a Program, cfg: &'a Config, coinductive: bool) -> Self {
        Solver {
            program,
            cfg,
            coinductive,
        }
    }

    pub fn solve(&self, g: &Goal) -> Verdict {
        if !self.cfg.iterative_deepening {
            return match self.run(g, self.cfg.budget.max_depth, self.cfg.budget.max_steps) {
                Outcome::Done(v) => v,
                Outcome::DepthCut { answers, steps } => self.cut_verdict(answers, steps),
            };
        }
        let mut limit = 1;
        let mut spent = 0;
        loop {
            let remaining = self.cfg.budget.max_steps.saturating_sub(spent);
            match self.run(g, limit, remaining) {
                Outcome::Done(v) => return v,
                Outcome::DepthCut { answers, steps } => {
                    spent += steps;
                    if !answers.is_empty() || limit >= self.cfg.budget.max_depth || spent >= self.cfg.budget.max_steps {
                        return self.cut_verdict(answers, spent);
                    }
                    limit = (limit * 2).min(self.cfg.budget.max_depth);
                }
            }
        }
    }

    fn cut_verdict(&self, answers: Vec<Answer>, steps: usize) -> Verdict {
        if answers.is_empty() {
            Verdict::Exhausted {
                steps,
                max_depth_reached: self.cfg.budget.max_depth,
            }
        } else {
            Verdict::Answers {
                answers,
                exhaustive: false,
            }
        }
    }

    fn occurs_check(&self) -> bool {
        self.cfg.occurs_check.unwrap_or(!self.coinductive)
    }

    fn frame(&self, goal: Arc<GoalNode>, env: &BindingEnv, mark: usize, depth: usize, trace_len: usize) -> Frame {
        let mut hyps = Vec::new();
        if self.coinductive {
            let mut cur = goal.anc.clone();
            while let Some(n) = cur {
                let same = n.atom.key() == goal.atom.key();
                if same || self.cfg.hypothesis == HypothesisScope::AnyAncestor {
                    hyps.push(n.atom.clone());
                }
                cur = n.parent.clone();
            }
        }
        let clauses = self.program.candidates(&goal.atom).map(|c| c.id).collect();
        Frame {
            goal,
            hyps,
            clauses,
            alt: 0,
            mark,
            counter: env.counter(),
            depth,
            trace_len,
        }
    }

    fn run(&self, g: &Goal, max_depth: usize, max_steps: usize) -> Outcome {
        let vars = goal_vars(g);
        let mut env = initial_env(g);
        let mut trail = Vec::new();
        let mut trace: Vec<TraceStep> = Vec::new();
        let mut answers = Vec::new();
        let mut steps = 0usize;
        let mut cut = false;
        let occurs = self.occurs_check();
        let max_answers = self.cfg.budget.max_answers.max(1);

        let Some(root) = goal_from(&g.atoms, &None, None) else {
            let a = Answer::from_env(AnswerKind::Total, &vars, &env, 0, self.cfg.trace.then(Vec::new));
            return Outcome::Done(Verdict::Answers {
                answers: vec![a],
                exhaustive: true,
            });
        };
        let mut stack = vec![self.frame(root, &env, 0, 0, 0)];

        while let Some(top) = stack.last_mut() {
            env.undo(&mut trail, top.mark);
            env.set_counter(top.counter);
            trace.truncate(top.trace_len);
            let n_alts = top.hyps.len() + top.clauses.len();
            if top.alt >= n_alts {
                stack.pop();
                continue;
            }
            let i = top.alt;
            top.alt += 1;
            steps += 1;
            if steps > max_steps {
                return Outcome::Done(if answers.is_empty() {
                    Verdict::Exhausted {
                        steps: steps - 1,
                        max_depth_reached: stack.len(),
                    }
                } else {
                    Verdict::Answers {
                        answers,
                        exhaustive: false,
                    }
                });
            }
            let node = top.goal.clone();
            let depth = top.depth;
            let mark = trail.len();
            let (next, kind, clause_id) = if i < top.hyps.len() {
                let hyp = top.hyps[i].clone();
                if !env.unify_atoms_in_place(&node.atom, &hyp, occurs, &mut trail) {
                    continue;
                }
                (node.next.clone(), RuleKind::Hyp, None)
            } else {
                let c: &Clause = self
                    .program
                    .clause(top.clauses[i - top.hyps.len()])
                    .expect("candidate clause id");
                let renamed = env.rename_apart(c);
                if !env.unify_atoms_in_place(&node.atom, &renamed.head, occurs, &mut trail) {
                    continue;
                }
                let anc = Some(Arc::new(AncNode {
                    atom: node.atom.clone(),
                    parent: node.anc.clone(),
                }));
                (
                    goal_from(&renamed.body, &anc, node.next.clone()),
                    RuleKind::Sld,
                    Some(c.id),
                )
            };
            if self.cfg.trace {
                trace.push(TraceStep {
                    n: trace.len() + 1,
                    kind,
                    clause: clause_id,
                    atom: 0,
                    sigma: sigma_since(&env, &trail[mark..]),
                });
            }
            match next {
                None => {
                    let t = self.cfg.trace.then(|| trace.clone());
                    answers.push(Answer::from_env(AnswerKind::Total, &vars, &env, steps, t));
                    if answers.len() >= max_answers {
                        return Outcome::Done(Verdict::Answers {
                            answers,
                            exhaustive: false,
                        });
                    }
                }
                Some(goal) => {
                    if depth + 1 >= max_depth {
                        cut = true;
                        continue;
                    }
                    let f = self.frame(goal, &env, trail.len(), depth + 1, trace.len());
                    stack.push(f);
                }
            }
        }

        if cut {
            Outcome::DepthCut { answers, steps }
        } else if answers.is_empty() {
            Outcome::Done(Verdict::Failed)
        } else {
            Outcome::Done(Verdict::Answers {
                answers,
                exhaustive: true,
            })
        }
    }
}

pub fn sld_solve(g: &Goal, p: &Program, cfg: &Config) -> Verdict {
    Solver::new(p, cfg, false).solve(g)
}

pub fn colp_solve(g: &Goal, p: &Program, cfg: &Config) -> Verdict {
    Solver::new(p, cfg, true).solve(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Budget;
    use crate::term::{Sym, Term};
    use crate::text::{parse_goal, parse_program, parse_term};

    const ZEROS: &str = "zeros(cons(0, X)) :- zeros(X).";
    const NAT: &str = "nat(0).\nnat(s(X)) :- nat(X).\n";

    #[test]
    fn zeros_step() {
        let p = parse_program(ZEROS).unwrap();
        let n = DerivationNode::root(parse_goal("zeros(X)").unwrap());
        let kids = sld_step(&n, &p);
        assert_eq!(kids.len(), 1);
        let k = &kids[0];
        assert_eq!(k.goal.atoms.len(), 1);
        let x = k.env.resolve(&Term::var("X"), 5);
        let Term::App(f, args) = x else { panic!() };
        assert_eq!(f.as_str(), "cons");
        assert!(args[1].is_var());
    }

    #[test]
    fn empty_body_clause_removes_atom() {
        let p = parse_program(NAT).unwrap();
        let n = DerivationNode::root(parse_goal("nat(0)").unwrap());
        let kids = sld_step(&n, &p);
        assert_eq!(kids.len(), 1);
        assert!(kids[0].goal.is_empty());
    }

    #[test]
    fn sld_enumerates_in_clause_order() {
        let p = parse_program(NAT).unwrap();
        let cfg = Config {
            budget: Budget {
                max_answers: 3,
                ..Budget::default()
            },
            ..Config::default()
        };
        let v = sld_solve(&parse_goal("nat(X)").unwrap(), &p, &cfg);
        let xs: Vec<Term> = v.answers().iter().map(|a| a.value("X", 10)).collect();
        assert_eq!(
            xs,
            vec![
                parse_term("0").unwrap(),
                parse_term("s(0)").unwrap(),
                parse_term("s(s(0))").unwrap()
            ]
        );
        assert!(v.answers().iter().all(|a| a.kind == AnswerKind::Total));
    }

    #[test]
    fn sld_on_zeros_exhausts() {
        let p = parse_program(ZEROS).unwrap();
        let v = sld_solve(&parse_goal("zeros(X)").unwrap(), &p, &Config::default());
        assert!(v.is_exhausted(), "{v:?}");
    }

    #[test]
    fn colp_on_zeros_is_rational() {
        let p = parse_program(ZEROS).unwrap();
        let v = colp_solve(&parse_goal("zeros(X)").unwrap(), &p, &Config::default());
        let a = v.first().expect("answer");
        assert_eq!(a.kind, AnswerKind::Rational);
        let env = BindingEnv::from_bindings([(Sym::new("X"), parse_term("cons(0, X)").unwrap())]);
        assert!(crate::env::bisimilar(
            &a.bindings,
            &Term::var("X"),
            &env,
            &Term::var("X")
        ));
    }

    #[test]
    fn failure_and_empty_goal() {
        let p = parse_program(NAT).unwrap();
        assert_eq!(
            sld_solve(&parse_goal("nat(a)").unwrap(), &p, &Config::default()),
            Verdict::Failed
        );
        let v = sld_solve(&Goal::new(vec![]), &p, &Config::default());
        assert_eq!(v.first().unwrap().kind, AnswerKind::Total);
        assert!(v.first().unwrap().bindings.is_empty());
    }

    #[test]
    fn trace_lines() {
        let p = parse_program(NAT).unwrap();
        let cfg = Config {
            trace: true,
            ..Config::default()
        };
        let v = sld_solve(&parse_goal("nat(s(0))").unwrap(), &p, &cfg);
        let t = v.first().unwrap().trace.clone().unwrap();
        let lines: Vec<String> = t.iter().map(|s| s.to_string()).collect();
        assert_eq!(
            lines,
            vec!["#1 sld clause 2 atom 0 σ={V0 ↦ 0}", "#2 sld clause 1 atom 0 σ={}"]
        );
        for (line, step) in lines.iter().zip(&t) {
            assert_eq!(&line.parse::<crate::engine::TraceStep>().unwrap(), step);
        }
        assert!("#1 sld clause x atom 0 σ={}"
            .parse::<crate::engine::TraceStep>()
            .is_err());
    }

    #[test]
    fn iterative_deepening_finds_answer() {
        let p = parse_program("p(X) :- p(X).\np(a).\n").unwrap();
        let cfg = Config {
            iterative_deepening: true,
            ..Config::default()
        };
        let deep = sld_solve(&parse_goal("p(X)").unwrap(), &p, &cfg);
        assert_eq!(deep.first().unwrap().value("X", 1), Term::constant("a"));
        // Plain depth-first search only reaches the fact after backing out
        // of the depth limit.
        let plain = sld_solve(&parse_goal("p(X)").unwrap(), &p, &Config::default());
        assert!(deep.first().unwrap().steps_used < plain.first().unwrap().steps_used);
    }
}
