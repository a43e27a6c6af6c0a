use std::path::PathBuf;
use std::process::{Command, Output};

use colp::engine::TraceStep;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "testdata", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn colp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn solve_zeros_coinductively() {
    let o = colp(&["solve", &data("zeros.lp"), "?- zeros(X).", "--engine", "colp"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "X = cons(0, X)\n");
}

#[test]
fn inductive_zeros_exhausts_budget() {
    let o = colp(&["solve", &data("zeros.lp"), "zeros(X)", "--max-depth", "50"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("budget exhausted"));
}

#[test]
fn unobservable_program_diagnosed() {
    let o = colp(&["solve", &data("ex3.lp"), "?- q(X).", "--engine", "sres"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not universally observable"), "{}", stderr(&o));
}

#[test]
fn failure_exits_one() {
    let o = colp(&["solve", &data("subclass.lp"), "?- class(object)."]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn usage_and_parse_errors_exit_three() {
    assert_eq!(colp(&["solve", &data("zeros.lp"), "zeros(X"]).status.code(), Some(3));
    assert_eq!(colp(&["solve", "/nonexistent.lp", "zeros(X)"]).status.code(), Some(3));
    assert_eq!(colp(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(
        colp(&["solve", &data("zeros.lp"), "zeros(X)", "--max-steps", "0"])
            .status
            .code(),
        Some(3)
    );
    let o = colp(&["infer", &data("lists.moo"), "new EList(.addLast(1)"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("expression:1:"), "{}", stderr(&o));
}

#[test]
fn infer_heterogeneous_field_access() {
    let o = colp(&[
        "infer",
        &data("lists.moo"),
        "new EList().addLast(42).addLast(false).head",
        "--engine",
        "sld",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("T = int\n"), "{}", stdout(&o));
}

#[test]
fn infer_with_typed_variables() {
    let o = colp(&[
        "infer",
        &data("lists.moo"),
        "new EList().addLast(i)",
        "--var",
        "i=int",
        "--engine",
        "sld",
    ]);
    assert_eq!(
        stdout(&o),
        "R = obj(elist, [])\nT = obj(nelist, [head:int, tail:obj(elist, [])])\n"
    );
}

#[test]
fn infer_defaults_to_structural_resolution() {
    let o = colp(&[
        "infer",
        &data("lists.moo"),
        &data("buildlist.moo"),
        "new ListFact().buildList(42, new EList())",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("% partial answer\n"));
    assert!(out.contains("T = obj(elist, []) \\/ T'?"), "{out}");
}

#[test]
fn refined_partial_answer() {
    let o = colp(&[
        "infer",
        &data("lists.moo"),
        &data("buildlist.moo"),
        "new ListFact().buildList(42, new EList())",
        "--refine",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(
        out.contains("T = obj(elist, []) \\/ obj(nelist, [head:int, tail:obj(elist, [])]) \\/ T'?"),
        "{out}"
    );
}

#[test]
fn trace_lines_reparse() {
    let o = colp(&["solve", &data("from.lp"), "from(0, X)", "--engine", "sres", "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with('#')).map(str::trim).collect();
    assert!(!lines.is_empty());
    for (i, l) in lines.iter().enumerate() {
        let step: TraceStep = l.parse().unwrap_or_else(|e| panic!("{e}"));
        assert_eq!(step.n, i + 1);
        assert_eq!(&step.to_string(), l);
    }
}

#[test]
fn compile_to_file_with_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lists.lp");
    let o = colp(&["compile", &data("lists.moo"), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("% provenance: 1 runtime\n"));
    assert!(text
        .contains("method EList.addLast\nhasmeth(elist, addlast, [This, Elem], R) :- new(nelist, [Elem, This], R).\n"));
    // The output is itself a valid program.
    let again = colp(&[
        "solve",
        out.to_str().unwrap(),
        "?- new(elist, [], R), invoke(R, addlast, [int], T).",
    ]);
    assert_eq!(again.status.code(), Some(0));
}

#[test]
fn transform_writes_sidecar_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("subclass.t.lp");
    let o = colp(&["transform", &data("subclass.lp"), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let program = std::fs::read_to_string(&out).unwrap();
    assert!(
        program.starts_with("subclass(X, X, k$1(P$1)) :- class(X, P$1).\n"),
        "{program}"
    );
    let table = std::fs::read_to_string(dir.path().join("subclass.t.lp.kappa")).unwrap();
    assert!(table.contains("k$4 -> class(a)\n"), "{table}");
    let inline = colp(&["transform", &data("zeros.lp")]);
    assert!(stdout(&inline).contains("% k$1 -> zeros(cons(0, X))\n"));
}

#[test]
fn check_reports_observability() {
    let o = colp(&["check", &data("ex3.lp"), "p(X)", "--max-subst-steps", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("constructors: f:5"), "{}", stdout(&o));
    let o = colp(&["check", &data("ex3.lp"), "q(X)"]);
    assert_eq!(o.status.code(), Some(1));
    let o = colp(&[
        "check",
        &data("ex3.lp"),
        "q(X)",
        "--transform",
        "--max-subst-steps",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn oracle_modes() {
    let o = colp(&[
        "oracle",
        &data("zeros.lp"),
        "--mode",
        "down",
        "-n",
        "3",
        "-d",
        "2",
        "-c",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("-- n=0\n"));
    assert!(out.trim_end().ends_with("zeros(C1) where C1 = cons(0, C1)"), "{out}");
    let o = colp(&[
        "oracle",
        &data("subclass.lp"),
        "--mode",
        "lemmas",
        "-n",
        "4",
        "-d",
        "1",
        "-c",
        "0",
        "--sequential",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("up: holds\ndown: holds\n"));
}
