//! `colp`: command-line front end for the engines, the transformation, the
//! fixpoint oracle and the abstract compiler.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use colp::compiler::{compile_class_table, infer, TypeEnv};
use colp::engine::{format_trace, productivity_report, Budget, Config, Engine, HypothesisScope, DEFAULT_LAZY_K};
use colp::minioo::{parse_classes, parse_expr, ClassTable};
use colp::oracle::{build_fragment, check_lemmas_in, tp_down_with, tp_up_with, LemmaError};
use colp::par::Parallelism;
use colp::text::{parse_goal, parse_program, parse_term, print_answer, print_program, AnswerStyle};
use colp::transform::{kappa_table_text, proof_of, render_proof, strip_answer, transform_goal, transform_program};
use colp::{AnswerKind, Goal, Program, Verdict};

const OK: u8 = 0;
const FAILED: u8 = 1;
const EXHAUSTED: u8 = 2;
const USAGE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "colp",
    version,
    about = "Inductive, coinductive and structural resolution for Horn clauses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a goal against a logic program.
    Solve {
        file: PathBuf,
        goal: String,
        #[arg(long, value_enum, default_value_t = EngineArg::Sld)]
        engine: EngineArg,
        /// Run on the proof-term transformation of the program and show the
        /// proof of each goal atom.
        #[arg(long)]
        transform: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compile class declarations to a logic program.
    Compile {
        files: Vec<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Infer the type of an expression: `infer FILE... EXPR`.
    Infer {
        #[arg(num_args = 2.., value_names = ["FILE", "EXPR"], required = true)]
        args: Vec<String>,
        /// Type of a source variable, `name=type`; unlisted variables are inferred.
        #[arg(long = "var", value_name = "NAME=TYPE")]
        vars: Vec<String>,
        #[arg(long, value_enum, default_value_t = EngineArg::Sres)]
        engine: EngineArg,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write the proof-term transformation of a program and its functor table.
    Transform {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Functor table file; defaults to `<output>.kappa`, or comment
        /// lines on standard output.
        #[arg(long)]
        kappa: Option<PathBuf>,
    },
    /// Follow the first structural-resolution branch and report observability
    /// and productivity evidence.
    Check {
        file: PathBuf,
        goal: String,
        #[arg(long)]
        transform: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Fixpoint iterates over a finite fragment, or the transformation check.
    Oracle {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = OracleMode::Up)]
        mode: OracleMode,
        /// Iterations.
        #[arg(short = 'n', default_value_t = 4)]
        n: usize,
        /// Depth bound of fragment terms.
        #[arg(short = 'd', default_value_t = 2)]
        d: usize,
        /// Maximum number of cycles in fragment terms.
        #[arg(short = 'c', default_value_t = 1)]
        c: usize,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Sld,
    Colp,
    Sres,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Sld => Engine::Sld,
            EngineArg::Colp => Engine::Colp,
            EngineArg::Sres => Engine::Sres,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StyleArg {
    /// Flat for total answers, mu for rational ones, lazy for partial ones.
    Auto,
    Flat,
    Mu,
    Lazy,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMode {
    Up,
    Down,
    Lemmas,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Same,
    Any,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = positive)]
    max_steps: Option<usize>,
    #[arg(long, value_parser = positive)]
    max_depth: Option<usize>,
    #[arg(long, value_parser = positive)]
    max_rewrite_steps: Option<usize>,
    #[arg(long, value_parser = positive)]
    max_subst_steps: Option<usize>,
    #[arg(long, value_parser = positive)]
    max_answers: Option<usize>,
    /// Force the occurs check on or off; engines choose by default.
    #[arg(long)]
    occurs_check: Option<bool>,
    /// Print one line per reduction before the answer.
    #[arg(long)]
    trace: bool,
    #[arg(long, value_parser = positive, default_value_t = DEFAULT_LAZY_K)]
    lazy_k: usize,
    /// Extra partial-answer refinements, each resolving the previous tail.
    #[arg(long, default_value_t = 0)]
    refine: usize,
    #[arg(long, value_enum, default_value_t = StyleArg::Auto)]
    style: StyleArg,
    /// Unfolding depth for lazy printing.
    #[arg(long, value_parser = positive, default_value_t = DEFAULT_LAZY_K)]
    unfold: usize,
    /// Ancestors eligible for coinductive hypotheses.
    #[arg(long, value_enum, default_value_t = ScopeArg::Same)]
    hypothesis: ScopeArg,
    #[arg(long)]
    iterative_deepening: bool,
}

impl RunArgs {
    fn config(&self) -> Config {
        let d = Budget::default();
        Config {
            budget: Budget {
                max_steps: self.max_steps.unwrap_or(d.max_steps),
                max_depth: self.max_depth.unwrap_or(d.max_depth),
                max_rewrite_steps: self.max_rewrite_steps.unwrap_or(d.max_rewrite_steps),
                max_subst_steps: self.max_subst_steps.unwrap_or(d.max_subst_steps),
                max_answers: self.max_answers.unwrap_or(d.max_answers),
            },
            occurs_check: self.occurs_check,
            trace: self.trace,
            lazy_k: self.lazy_k,
            lazy_refinements: self.refine,
            hypothesis: match self.hypothesis {
                ScopeArg::Same => HypothesisScope::SamePredicate,
                ScopeArg::Any => HypothesisScope::AnyAncestor,
            },
            iterative_deepening: self.iterative_deepening,
        }
    }
}

/// A diagnostic and the exit code it maps to.
struct Failure(u8, String);

type Outcome = Result<(String, u8), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure(USAGE, msg.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    parse_program(&read(path)?).map_err(|e| usage(format!("{}:{e}", path.display())))
}

fn load_goal(src: &str) -> Result<Goal, Failure> {
    parse_goal(src).map_err(|e| usage(format!("goal:{e}")))
}

fn load_classes(paths: &[PathBuf]) -> Result<ClassTable, Failure> {
    let mut ct = ClassTable::default();
    for p in paths {
        let part = parse_classes(&read(p)?).map_err(|e| usage(format!("{}:{e}", p.display())))?;
        for (name, c) in part.classes {
            if ct.classes.contains_key(&name) {
                return Err(usage(format!("{}:{}: duplicate class `{name}`", p.display(), c.span)));
            }
            ct.classes.insert(name, c);
        }
    }
    ct.validate().map_err(|e| usage(e.to_string()))?;
    Ok(ct)
}

fn write_out(path: Option<&Path>, text: String) -> Outcome {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            Ok((String::new(), OK))
        }
        None => Ok((text, OK)),
    }
}

fn render_verdict(v: &Verdict, style: StyleArg, unfold: usize, out: &mut String) -> Result<u8, Failure> {
    match v {
        Verdict::Answers { answers, .. } => {
            for (i, a) in answers.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                if let Some(t) = &a.trace {
                    out.push_str(&format_trace(t));
                }
                let style = match (style, a.kind) {
                    (StyleArg::Flat, _) | (StyleArg::Auto, AnswerKind::Total) => AnswerStyle::Flat,
                    (StyleArg::Mu, _) | (StyleArg::Auto, AnswerKind::Rational) => AnswerStyle::Mu,
                    (StyleArg::Lazy, _) | (StyleArg::Auto, AnswerKind::Partial) => AnswerStyle::Lazy,
                };
                let text = print_answer(a, style, unfold).map_err(|e| Failure(FAILED, e.to_string()))?;
                if a.kind == AnswerKind::Partial {
                    out.push_str("% partial answer\n");
                }
                out.push_str(&text);
                out.push('\n');
            }
            Ok(OK)
        }
        Verdict::Failed => {
            out.push_str("false\n");
            Ok(FAILED)
        }
        Verdict::Exhausted {
            steps,
            max_depth_reached,
        } => Err(Failure(
            EXHAUSTED,
            format!("budget exhausted after {steps} steps (depth {max_depth_reached})"),
        )),
        Verdict::NotUniversallyObservable { witness } => {
            let mut msg = String::from("not universally observable: rewriting does not terminate from\n");
            for a in &witness.goal {
                let _ = writeln!(msg, "  {a}");
            }
            msg.push_str(&format_trace(&witness.chain));
            Err(Failure(EXHAUSTED, msg.trim_end().to_string()))
        }
    }
}

fn solve(file: &Path, goal: &str, engine: EngineArg, transform: bool, run: &RunArgs) -> Outcome {
    let p = load_program(file)?;
    let g = load_goal(goal)?;
    let cfg = run.config();
    let mut out = String::new();
    if !transform {
        let v = Engine::from(engine).solve(&g, &p, &cfg);
        let code = render_verdict(&v, run.style, run.unfold, &mut out)?;
        return Ok((out, code));
    }
    let t = transform_program(&p).map_err(|e| usage(e.to_string()))?;
    let v = Engine::from(engine).solve(&transform_goal(&g), &t.program, &cfg);
    let stripped = match &v {
        Verdict::Answers { answers, exhaustive } => Verdict::Answers {
            answers: answers.iter().map(|a| strip_answer(a, &t)).collect(),
            exhaustive: *exhaustive,
        },
        v => v.clone(),
    };
    let code = render_verdict(&stripped, run.style, run.unfold, &mut out)?;
    if let Some(a) = v.first() {
        for (i, atom) in g.atoms.iter().enumerate() {
            let _ = writeln!(out, "% proof of {atom}:");
            for line in render_proof(&proof_of(a, i, run.unfold), &t).lines() {
                let _ = writeln!(out, "%   {line}");
            }
        }
    }
    Ok((out, code))
}

fn infer_cmd(args: &[String], vars: &[String], engine: EngineArg, run: &RunArgs) -> Outcome {
    let (expr, files) = args.split_last().ok_or_else(|| usage("missing expression"))?;
    let files: Vec<PathBuf> = files.iter().map(PathBuf::from).collect();
    let ct = load_classes(&files)?;
    let e = parse_expr(expr).map_err(|e| usage(format!("expression:{e}")))?;
    let mut env = TypeEnv::new();
    for v in vars {
        let (name, ty) = v
            .split_once('=')
            .ok_or_else(|| usage(format!("--var `{v}`: expected NAME=TYPE")))?;
        let ty = parse_term(ty).map_err(|e| usage(format!("--var `{v}`:{e}")))?;
        env = env.with(name.trim(), ty);
    }
    let v = infer(&ct, &e, &env, engine.into(), &run.config()).map_err(|e| usage(e.to_string()))?;
    let mut out = String::new();
    let code = render_verdict(&v, run.style, run.unfold, &mut out)?;
    Ok((out, code))
}

fn transform_cmd(file: &Path, output: Option<&Path>, kappa: Option<&Path>) -> Outcome {
    let p = load_program(file)?;
    let t = transform_program(&p).map_err(|e| usage(e.to_string()))?;
    let table = kappa_table_text(&t);
    let program = print_program(&t.program);
    let sidecar = kappa
        .map(Path::to_path_buf)
        .or_else(|| output.map(|o| PathBuf::from(format!("{}.kappa", o.display()))));
    match sidecar {
        Some(k) => {
            std::fs::write(&k, table).map_err(|e| usage(format!("{}: {e}", k.display())))?;
            write_out(output, program)
        }
        None => {
            let comments: String = table.lines().map(|l| format!("% {l}\n")).collect();
            write_out(output, format!("{program}{comments}"))
        }
    }
}

fn check_cmd(file: &Path, goal: &str, transform: bool, run: &RunArgs) -> Outcome {
    let mut p = load_program(file)?;
    let mut g = load_goal(goal)?;
    if transform {
        p = transform_program(&p).map_err(|e| usage(e.to_string()))?.program;
        g = transform_goal(&g);
    }
    let r = productivity_report(&g, &p, &run.config());
    let mut out = String::new();
    let _ = writeln!(out, "observable: {}", r.observable);
    let _ = writeln!(out, "liveness: {}", r.liveness);
    let _ = writeln!(out, "terminated: {}", r.terminated);
    let constructors: Vec<String> = r.constructors.iter().map(|(f, n)| format!("{f}:{n}")).collect();
    let _ = writeln!(out, "constructors: {}", constructors.join(", "));
    if let Some(w) = &r.witness {
        let _ = writeln!(out, "witness:");
        for a in &w.goal {
            let _ = writeln!(out, "  {a}");
        }
        out.push_str(&format_trace(&w.chain));
    }
    Ok((out, if r.observable { OK } else { FAILED }))
}

fn oracle_cmd(file: &Path, mode: OracleMode, n: usize, d: usize, c: usize, sequential: bool) -> Outcome {
    let p = load_program(file)?;
    let par = if sequential {
        Parallelism::Sequential
    } else {
        Parallelism::Parallel
    };
    let too_large = |e: &dyn std::fmt::Display| Failure(EXHAUSTED, e.to_string());
    let frag = build_fragment(&p, d, c).map_err(|e| too_large(&e))?;
    match mode {
        OracleMode::Up => Ok((tp_up_with(par, &p, n, &frag).to_string(), OK)),
        OracleMode::Down => Ok((
            tp_down_with(par, &p, n, &frag).map_err(|e| too_large(&e))?.to_string(),
            OK,
        )),
        OracleMode::Lemmas => {
            let r = check_lemmas_in(par, &p, n, &frag).map_err(|e| match e {
                LemmaError::Oracle(e) => too_large(&e),
                LemmaError::Transform(e) => usage(e.to_string()),
            })?;
            let mut out = format!(
                "n={} d={} c={} atoms={}\nup: {}\ndown: {}\n",
                r.n,
                r.depth,
                r.cycles,
                r.atoms_checked,
                if r.up_holds { "holds" } else { "fails" },
                if r.down_holds { "holds" } else { "fails" },
            );
            for ce in &r.counterexamples {
                let _ = writeln!(out, "counterexample: {ce}");
            }
            Ok((out, if r.holds() { OK } else { FAILED }))
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Solve {
            file,
            goal,
            engine,
            transform,
            run,
        } => solve(&file, &goal, engine, transform, &run),
        Command::Compile { files, output } => {
            if files.is_empty() {
                return Err(usage("no input files"));
            }
            let ct = load_classes(&files)?;
            let unit = compile_class_table(&ct).map_err(|e| usage(e.to_string()))?;
            write_out(output.as_deref(), unit.to_lp())
        }
        Command::Infer {
            args,
            vars,
            engine,
            run,
        } => infer_cmd(&args, &vars, engine, &run),
        Command::Transform { file, output, kappa } => transform_cmd(&file, output.as_deref(), kappa.as_deref()),
        Command::Check {
            file,
            goal,
            transform,
            run,
        } => check_cmd(&file, &goal, transform, &run),
        Command::Oracle {
            file,
            mode,
            n,
            d,
            c,
            sequential,
        } => oracle_cmd(&file, mode, n, d, c, sequential),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(Failure(code, msg)) => {
            eprintln!("colp: {msg}");
            ExitCode::from(code)
        }
    }
}
