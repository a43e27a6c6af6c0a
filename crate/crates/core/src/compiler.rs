//! Abstract compilation: class tables and expressions become Horn clauses
//! and goals over type terms.
//!
//! Types are `int`, `bool`, `null`, `obj(class, [field:type, ...])` with
//! fields sorted by name, and unions `T1 \/ T2`. Every method becomes one
//! `hasmeth(class, method, [This, Params...], Result)` clause whose body is
//! the goal of its body expression.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::engine::{Config, Engine, Verdict};
use crate::minioo::{BinOp, ClassDecl, ClassTable, Expr, ExprKind, FrontendError, ROOT_CLASS};
use crate::term::{Atom, Clause, Goal, Program, Term};
use crate::text::{parse_program, print_clause, SourceSpan};
use crate::transform::{strip_answer, transform_goal, transform_program, TransformError};

const RUNTIME: &str = "\
invoke(obj(C, F), M, A, R) :- hasmeth(C, M, [obj(C, F)|A], R).
invoke(T1 \\/ T2, M, A, R1 \\/ R2) :- invoke(T1, M, A, R1), invoke(T2, M, A, R2).
hasmeth(C, M, A, R) :- extends(C, D), hasmeth(D, M, A, R).
fieldacc(obj(C, Rec), F, T) :- recfield(Rec, F, T).
fieldacc(T1 \\/ T2, F, R1 \\/ R2) :- fieldacc(T1, F, R1), fieldacc(T2, F, R2).
recfield([F:T|Rest], F, T).
recfield([G:U|Rest], F, T) :- recfield(Rest, F, T).
new(C, A, obj(C, Rec)) :- constructor(C, A, Rec).
subclass(X, X) :- class(X).
subclass(X, object) :- class(X).
subclass(X, Z) :- extends(X, Y), subclass(Y, Z).
leq(int, int, bool).
sub(int, int, int).
eq(X, X).
";

/// The program-independent clauses, in fixed order.
pub fn runtime_clauses() -> Program {
    static CELL: OnceLock<Program> = OnceLock::new();
    CELL.get_or_init(|| parse_program(RUNTIME).expect("runtime clauses parse"))
        .clone()
}

/// Logic-level name of a class, method or field.
pub fn logic_name(source: &str) -> String {
    source.to_lowercase()
}

fn class_term(source: &str) -> Term {
    Term::constant(&logic_name(source))
}

/// Logic variable name for a source variable.
pub fn var_name(source: &str) -> String {
    let mut cs = source.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => String::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Runtime,
    Class {
        class: String,
        span: SourceSpan,
    },
    Constructor {
        class: String,
        span: SourceSpan,
    },
    Method {
        class: String,
        method: String,
        span: SourceSpan,
    },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Runtime => f.write_str("runtime"),
            Provenance::Class { class, span } => write!(f, "{span} class {class}"),
            Provenance::Constructor { class, span } => write!(f, "{span} constructor {class}"),
            Provenance::Method { class, method, span } => write!(f, "{span} method {class}.{method}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledUnit {
    pub program: Program,
    /// Keyed by clause id.
    pub provenance: BTreeMap<usize, Provenance>,
}

impl CompiledUnit {
    /// Program text with a `% provenance:` comment before every clause.
    pub fn to_lp(&self) -> String {
        let mut out = String::new();
        for c in self.program.clauses() {
            let p = self.provenance.get(&c.id).unwrap_or(&Provenance::Runtime);
            out.push_str(&format!("% provenance: {} {p}\n{}\n", c.id, print_clause(c)));
        }
        out
    }
}

/// Source variables mapped to type terms; unmapped variables become fresh
/// logic variables, which is how inference queries are posed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeEnv {
    pub vars: BTreeMap<String, Term>,
}

impl TypeEnv {
    pub fn new() -> Self {
        TypeEnv::default()
    }

    pub fn with(mut self, name: &str, ty: Term) -> Self {
        self.vars.insert(name.to_string(), ty);
        self
    }
}

struct Ctx {
    taken: HashSet<String>,
    scope: HashMap<String, Term>,
    atoms: Vec<Atom>,
}

impl Ctx {
    fn new() -> Self {
        Ctx {
            taken: HashSet::new(),
            scope: HashMap::new(),
            atoms: Vec::new(),
        }
    }

    fn unique(&mut self, base: &str) -> String {
        let mut name = base.to_string();
        let mut i = 0;
        while self.taken.contains(&name) {
            i += 1;
            name = format!("{base}{i}");
        }
        self.taken.insert(name.clone());
        name
    }

    fn reserve_term(&mut self, t: &Term) {
        for v in t.vars() {
            self.taken.insert(v.as_str().to_string());
        }
    }

    fn bind_source(&mut self, source: &str) -> Term {
        if let Some(t) = self.scope.get(source) {
            return t.clone();
        }
        let t = Term::var(&self.unique(&var_name(source)));
        self.scope.insert(source.to_string(), t.clone());
        t
    }

    fn fresh(&mut self) -> Term {
        Term::var(&self.unique("R"))
    }

    fn push(&mut self, pred: &str, args: Vec<Term>) {
        self.atoms.push(Atom::new(pred, args));
    }

    /// Emits the goal of `e` and returns its result term. Atom-producing
    /// nodes use `want` as their result when given.
    fn expr(&mut self, e: &Expr, want: Option<Term>) -> Term {
        match &e.kind {
            ExprKind::Var(v) => self.bind_source(v),
            ExprKind::This => self.bind_source("this"),
            ExprKind::Int(_) => Term::constant("int"),
            ExprKind::Bool(_) => Term::constant("bool"),
            ExprKind::Null => Term::constant("null"),
            ExprKind::New { class, args } => {
                let args = self.exprs(args);
                let r = want.unwrap_or_else(|| self.fresh());
                self.push("new", vec![class_term(class), Term::list(args), r.clone()]);
                r
            }
            ExprKind::FieldAcc { target, field } => {
                let t = self.expr(target, None);
                let r = want.unwrap_or_else(|| self.fresh());
                self.push("fieldacc", vec![t, Term::constant(&logic_name(field)), r.clone()]);
                r
            }
            ExprKind::Invoke { target, method, args } => {
                let t = self.expr(target, None);
                let args = self.exprs(args);
                let r = want.unwrap_or_else(|| self.fresh());
                let m = Term::constant(&logic_name(method));
                self.push("invoke", vec![t, m, Term::list(args), r.clone()]);
                r
            }
            ExprKind::BinOp { op, lhs, rhs } => {
                let l = self.expr(lhs, None);
                let r_in = self.expr(rhs, None);
                let r = want.unwrap_or_else(|| self.fresh());
                let pred = match op {
                    BinOp::Leq => "leq",
                    BinOp::Sub => "sub",
                };
                self.push(pred, vec![l, r_in, r.clone()]);
                r
            }
            ExprKind::If { cond, then, els } => {
                let b = Term::constant("bool");
                let c = self.expr(cond, Some(b.clone()));
                if c != b {
                    self.push("eq", vec![c, b]);
                }
                let t = self.expr(then, None);
                let f = self.expr(els, None);
                Term::union(t, f)
            }
        }
    }

    fn exprs(&mut self, es: &[Expr]) -> Vec<Term> {
        es.iter().map(|e| self.expr(e, None)).collect()
    }

    fn reserve_sources(&mut self, e: &Expr) {
        for v in e.free_vars() {
            self.bind_source(&v);
        }
    }
}

/// Goal for a query expression; the result is named `T` when it is a fresh
/// variable.
pub fn compile_expr(e: &Expr, env: &TypeEnv) -> (Goal, Term) {
    let mut cx = Ctx::new();
    for (name, ty) in &env.vars {
        cx.reserve_term(ty);
        cx.scope.insert(name.clone(), ty.clone());
    }
    let top = Term::var(&cx.unique("T"));
    cx.reserve_sources(e);
    let r = cx.expr(e, Some(top));
    (Goal::new(cx.atoms), r)
}

fn record(fields: &[(String, Term)]) -> Term {
    let mut sorted: Vec<&(String, Term)> = fields.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    Term::list(sorted.iter().map(|(f, t)| Term::field(f, t.clone())).collect())
}

fn constructor_clause(ct: &ClassTable, c: &ClassDecl) -> Clause {
    let mut cx = Ctx::new();
    let params: Vec<Term> = c.constructor.params.iter().map(|p| cx.bind_source(p)).collect();
    for e in c
        .constructor
        .super_args
        .iter()
        .chain(c.constructor.assignments.iter().map(|(_, e)| e))
    {
        cx.reserve_sources(e);
    }
    let mut fields = Vec::new();
    if c.parent != ROOT_CLASS {
        let super_args = cx.exprs(&c.constructor.super_args);
        for f in ct.all_fields(&c.parent) {
            let v = Term::var(&cx.unique(&var_name(&logic_name(&f))));
            fields.push((logic_name(&f), v));
        }
        let parent_rec = record(&fields);
        cx.push(
            "constructor",
            vec![class_term(&c.parent), Term::list(super_args), parent_rec],
        );
    }
    for (f, e) in &c.constructor.assignments {
        let t = cx.expr(e, None);
        fields.push((logic_name(f), t));
    }
    let head = Atom::new(
        "constructor",
        vec![class_term(&c.name), Term::list(params), record(&fields)],
    );
    Clause::new(0, head, cx.atoms)
}

fn method_clause(c: &ClassDecl, m: &crate::minioo::MethodDecl) -> Clause {
    let mut cx = Ctx::new();
    let mut args = vec![cx.bind_source("this")];
    args.extend(m.params.iter().map(|p| cx.bind_source(p)));
    let top = Term::var(&cx.unique("R"));
    cx.reserve_sources(&m.body);
    let r = cx.expr(&m.body, Some(top));
    let head = Atom::new(
        "hasmeth",
        vec![
            class_term(&c.name),
            Term::constant(&logic_name(&m.name)),
            Term::list(args),
            r,
        ],
    );
    Clause::new(0, head, cx.atoms)
}

/// Runtime clauses followed by, per class, its `class` and `extends` facts,
/// its constructor clause and one `hasmeth` clause per method.
pub fn compile_class_table(ct: &ClassTable) -> Result<CompiledUnit, FrontendError> {
    ct.validate()?;
    let mut clauses: Vec<Clause> = runtime_clauses().clauses().to_vec();
    let mut prov: Vec<Provenance> = vec![Provenance::Runtime; clauses.len()];
    for c in ct.iter() {
        let here = Provenance::Class {
            class: c.name.clone(),
            span: c.span,
        };
        clauses.push(Clause::new(0, Atom::new("class", vec![class_term(&c.name)]), vec![]));
        clauses.push(Clause::new(
            0,
            Atom::new("extends", vec![class_term(&c.name), class_term(&c.parent)]),
            vec![],
        ));
        prov.extend([here.clone(), here]);
        clauses.push(constructor_clause(ct, c));
        prov.push(Provenance::Constructor {
            class: c.name.clone(),
            span: c.constructor.span,
        });
        for m in c.methods.values() {
            clauses.push(method_clause(c, m));
            prov.push(Provenance::Method {
                class: c.name.clone(),
                method: m.name.clone(),
                span: m.span,
            });
        }
    }
    let program = Program::new(clauses);
    let provenance = program.clauses().iter().map(|c| c.id).zip(prov).collect();
    Ok(CompiledUnit { program, provenance })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// Compiles `ct` and `e` and runs the goal. Structural resolution runs on
/// the transformed program and its answers have the proof variables
/// removed.
pub fn infer(ct: &ClassTable, e: &Expr, env: &TypeEnv, engine: Engine, cfg: &Config) -> Result<Verdict, InferError> {
    let unit = compile_class_table(ct)?;
    let (goal, _) = compile_expr(e, env);
    if engine != Engine::Sres {
        return Ok(engine.solve(&goal, &unit.program, cfg));
    }
    let t = transform_program(&unit.program)?;
    Ok(match engine.solve(&transform_goal(&goal), &t.program, cfg) {
        Verdict::Answers { answers, exhaustive } => Verdict::Answers {
            answers: answers.iter().map(|a| strip_answer(a, &t)).collect(),
            exhaustive,
        },
        v => v,
    })
}
