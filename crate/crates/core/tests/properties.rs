mod common;

use std::collections::HashMap;

use colp::engine::{colp_solve, rewrite_step, sld_solve, sres_solve, Config};
use colp::env::{bisimilar, unify, BindingEnv};
use colp::oracle::{build_fragment, tp_up};
use colp::text::{parse_program, parse_term, print_program, print_term};
use colp::transform::{proof_measure, strip_answer, transform_goal, transform_program};
use colp::{Sym, Term};
use common::{same_answer, Gen, Shape};
use proptest::prelude::*;

fn apply(s: &HashMap<Sym, Term>, t: &Term) -> Term {
    match t {
        Term::Var(v) => match s.get(v) {
            Some(u) => apply(s, u),
            None => t.clone(),
        },
        Term::App(f, xs) => Term::app_sym(f.clone(), xs.iter().map(|x| apply(s, x)).collect()),
    }
}

/// Textbook unification with occurs check, as an independent reference.
fn robinson(a: &Term, b: &Term) -> Option<HashMap<Sym, Term>> {
    let mut s: HashMap<Sym, Term> = HashMap::new();
    let mut eqs = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = eqs.pop() {
        let (x, y) = (apply(&s, &x), apply(&s, &y));
        match (&x, &y) {
            (Term::Var(v), Term::Var(w)) if v == w => {}
            (Term::Var(v), t) | (t, Term::Var(v)) => {
                if t.vars().contains(v) {
                    return None;
                }
                s.insert(v.clone(), t.clone());
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                eqs.extend(xs.iter().cloned().zip(ys.iter().cloned()));
            }
        }
    }
    Some(s)
}

fn shape() -> Shape {
    Shape {
        term_depth: 3,
        ..Shape::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn unify_agrees_with_reference(seed in any::<u64>()) {
        let mut g = Gen::new(seed, shape());
        let (a, b) = (g.term(3, false), g.term(3, false));
        let ours = unify(&a, &b, &BindingEnv::new(), true);
        let theirs = robinson(&a, &b);
        prop_assert_eq!(ours.is_some(), theirs.is_some(), "{} = {}", a, b);
        if let (Some(env), Some(s)) = (ours, theirs) {
            let l = env.resolve_full(&a).unwrap();
            prop_assert_eq!(&l, &env.resolve_full(&b).unwrap());
            let r = apply(&s, &a);
            let pair = |x: &Term| Term::app("t", vec![x.clone()]);
            let (e1, e2) = (BindingEnv::new(), BindingEnv::new());
            // Most general unifiers coincide up to renaming: each instance
            // matches the other.
            prop_assert!(colp::env::match_atoms(
                &colp::Atom::from_term(&pair(&l)).unwrap(),
                &colp::Atom::from_term(&pair(&r)).unwrap(),
                &e1
            ).is_some());
            prop_assert!(colp::env::match_atoms(
                &colp::Atom::from_term(&pair(&r)).unwrap(),
                &colp::Atom::from_term(&pair(&l)).unwrap(),
                &e2
            ).is_some());
        }
    }

    #[test]
    fn rational_unification_is_bisimilarity(seed in any::<u64>()) {
        let mut g = Gen::new(seed, shape());
        let mut env = BindingEnv::new();
        for v in ["X", "Y", "Z"] {
            let t = match g.term(3, false) {
                t @ Term::App(..) => t,
                t => Term::app("f", vec![t]),
            };
            env.bind(Sym::new(v), t);
        }
        let (a, b) = (g.term(3, false), g.term(3, false));
        let same = bisimilar(&env, &a, &env, &b);
        let mut trail = Vec::new();
        prop_assert_eq!(env.clone().unify_in_place(&a, &b, false, &mut trail), same, "{} = {}", a, b);
        prop_assert!(trail.is_empty());
    }

    #[test]
    fn terms_and_programs_round_trip(seed in any::<u64>()) {
        let mut g = Gen::new(seed, shape());
        let t = g.term(4, false);
        prop_assert_eq!(parse_term(&print_term(&t)).unwrap(), t);
        let p = g.program();
        let text = print_program(&p);
        prop_assert_eq!(print_program(&parse_program(&text).unwrap()), text);
    }

    #[test]
    fn rewriting_shrinks_proofs(seed in any::<u64>()) {
        let mut g = Gen::new(seed, Shape::default());
        let p = g.program();
        let t = transform_program(&p).unwrap();
        let goal = g.proof_goal(&p, 3, 4);
        let mut env = BindingEnv::new();
        env.reserve_names(&goal.vars());
        let mut cur = goal.atoms.clone();
        let mut measure = proof_measure(&cur, &env).unwrap();
        while let Some(next) = rewrite_step(&cur, &t.program, &mut env) {
            let m = proof_measure(&next, &env).unwrap();
            prop_assert!(m < measure, "{} -> {}", measure, m);
            measure = m;
            cur = next;
        }
    }

    #[test]
    fn upward_iterates_grow(seed in any::<u64>()) {
        let mut g = Gen::new(seed, Shape { binary_functor: false, term_depth: 1, max_clauses: 4, ..Shape::default() });
        let p = g.program();
        let frag = build_fragment(&p, 2, 1).unwrap();
        let trace = tp_up(&p, 4, &frag);
        for w in trace.sets.windows(2) {
            prop_assert!(w[0].is_subset(&w[1]));
        }
    }

    #[test]
    fn engines_agree_on_hierarchical_programs(seed in any::<u64>()) {
        let mut g = Gen::new(seed, Shape { hierarchical: true, linear_heads: true, ..Shape::default() });
        let p = g.program();
        let goal = g.goal();
        let cfg = Config::default();
        let sld = sld_solve(&goal, &p, &cfg);
        let colp = colp_solve(&goal, &p, &cfg);
        let t = transform_program(&p).unwrap();
        let sres = sres_solve(&transform_goal(&goal), &t.program, &cfg);
        let vars = goal.vars();
        match (sld.first(), colp.first(), sres.first()) {
            (None, None, None) => {}
            (Some(a), Some(b), Some(c)) => {
                prop_assert!(same_answer(a, b, &vars));
                prop_assert!(same_answer(a, &strip_answer(c, &t), &vars));
            }
            _ => prop_assert!(false, "{} / {} / {}", sld.label(), colp.label(), sres.label()),
        }
    }
}
