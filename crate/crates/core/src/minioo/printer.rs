use std::fmt::Write;

use super::ast::{BinOp, ClassDecl, ClassTable, Expr, ExprKind};

// Precedence levels, loosest first.
const EXPR: u8 = 0;
const DIFF: u8 = 1;
const POSTFIX: u8 = 2;

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(e, EXPR, &mut out);
    out
}

fn args(items: &[Expr], out: &mut String) {
    out.push('(');
    for (i, a) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        expr(a, EXPR, out);
    }
    out.push(')');
}

fn expr(e: &Expr, ctx: u8, out: &mut String) {
    let own = match &e.kind {
        ExprKind::If { .. } | ExprKind::BinOp { op: BinOp::Leq, .. } => EXPR,
        ExprKind::BinOp { op: BinOp::Sub, .. } => DIFF,
        _ => POSTFIX,
    };
    if own < ctx {
        out.push('(');
        expr(e, EXPR, out);
        out.push(')');
        return;
    }
    match &e.kind {
        ExprKind::Var(v) => out.push_str(v),
        ExprKind::Int(i) => write!(out, "{i}").unwrap(),
        ExprKind::Bool(b) => write!(out, "{b}").unwrap(),
        ExprKind::Null => out.push_str("null"),
        ExprKind::This => out.push_str("this"),
        ExprKind::New { class, args: a } => {
            write!(out, "new {class}").unwrap();
            args(a, out);
        }
        ExprKind::FieldAcc { target, field } => {
            expr(target, POSTFIX, out);
            write!(out, ".{field}").unwrap();
        }
        ExprKind::Invoke {
            target,
            method,
            args: a,
        } => {
            expr(target, POSTFIX, out);
            write!(out, ".{method}").unwrap();
            args(a, out);
        }
        ExprKind::If { cond, then, els } => {
            out.push_str("if (");
            expr(cond, EXPR, out);
            out.push_str(") ");
            expr(then, EXPR, out);
            out.push_str(" else ");
            expr(els, EXPR, out);
        }
        ExprKind::BinOp { op, lhs, rhs } => {
            // `<=` does not chain and `-` is left associative.
            let (l, r) = match op {
                BinOp::Leq => (DIFF, DIFF),
                BinOp::Sub => (DIFF, POSTFIX),
            };
            expr(lhs, l, out);
            write!(out, " {} ", op.symbol()).unwrap();
            expr(rhs, r, out);
        }
    }
}

pub fn print_class(c: &ClassDecl) -> String {
    let mut out = String::new();
    writeln!(out, "class {} extends {} {{", c.name, c.parent).unwrap();
    for f in &c.fields {
        writeln!(out, "    {f};").unwrap();
    }
    let ctor = &c.constructor;
    writeln!(out, "    {}({}) {{", c.name, ctor.params.join(", ")).unwrap();
    let mut sup = String::new();
    args(&ctor.super_args, &mut sup);
    writeln!(out, "        super{sup};").unwrap();
    for (f, e) in &ctor.assignments {
        writeln!(out, "        this.{f} = {};", print_expr(e)).unwrap();
    }
    writeln!(out, "    }}").unwrap();
    for m in c.methods.values() {
        writeln!(out, "    {}({}) {{", m.name, m.params.join(", ")).unwrap();
        writeln!(out, "        {}", print_expr(&m.body)).unwrap();
        writeln!(out, "    }}").unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn print_classes(ct: &ClassTable) -> String {
    ct.iter().map(print_class).collect::<Vec<_>>().join("\n")
}
