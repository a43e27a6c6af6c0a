use colp::minioo::{parse_classes, parse_expr, print_classes, print_expr, Expr, ExprKind, FrontendError};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/testdata/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn lists_listing_shape() {
    let ct = parse_classes(&fixture("lists.moo")).unwrap();
    assert_eq!(ct.len(), 2);
    let ne = ct.get("NEList").unwrap();
    assert_eq!(ne.fields, vec!["head", "tail"]);
    assert_eq!(ne.constructor.params, vec!["head", "tail"]);
    assert_eq!(ne.parent, "Object");
    let add = &ne.methods["addLast"];
    assert_eq!(add.params, vec!["elem"]);
    let ExprKind::New { class, args } = &add.body.kind else {
        panic!("{:?}", add.body)
    };
    assert_eq!(class, "NEList");
    assert_eq!(args[0], Expr::field(Expr::new(ExprKind::This), "head"));
}

#[test]
fn listings_round_trip() {
    for f in ["lists.moo", "listfact.moo", "buildlist.moo"] {
        let ct = parse_classes(&fixture(f)).unwrap();
        let printed = print_classes(&ct);
        let again = parse_classes(&printed).unwrap_or_else(|e| panic!("{f}: {e}\n{printed}"));
        assert_eq!(ct, again, "{f}");
        assert_eq!(printed, print_classes(&again));
    }
}

#[test]
fn replicate_body() {
    let ct = parse_classes(&fixture("listfact.moo")).unwrap();
    let body = &ct.get("ListFact").unwrap().methods["replicate"].body;
    assert_eq!(
        print_expr(body),
        "if (n <= 0) new EList() else new NEList(x, this.replicate(n - 1, x))"
    );
    assert_eq!(body.if_count(), 1);
}

#[test]
fn expression_round_trip_with_parens() {
    for src in [
        "(if (a) b else c).f",
        "a - (b - c)",
        "(a <= b) <= c",
        "new EList().addLast(42).addLast(false).head",
        "x.m(if (y <= 1) null else this, 3 - 2)",
    ] {
        let e = parse_expr(src).unwrap();
        assert_eq!(print_expr(&e), src);
        assert_eq!(parse_expr(&print_expr(&e)).unwrap(), e);
    }
}

#[test]
fn error_spans_in_bounds() {
    let cases = [
        "class A extends A { }",
        "class A { }\nclass A { }",
        "class A {\n  f;\n  A() { super(); }\n}",
        "class A { m() { 1 + 2 } }",
        "class A { m() { 1 }\n",
        "class B extends C { }",
    ];
    for src in cases {
        let e: FrontendError = parse_classes(src).unwrap_err();
        let sp = e.span();
        let lines: Vec<&str> = src.split('\n').collect();
        assert!(sp.line >= 1 && (sp.line as usize) <= lines.len(), "{src}: {e}");
        let line = lines[sp.line as usize - 1];
        assert!((sp.column as usize) <= line.chars().count() + 1, "{src}: {e}");
    }
}
