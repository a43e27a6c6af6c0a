use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use crate::term::{Atom, Clause, Goal, Program, Sym, Term, CONS, FIELD, NIL, UNION};

/// Renders terms, optionally renaming variables and marking some of them
/// with a trailing `?`.
#[derive(Debug, Clone, Default)]
pub struct Printer {
    pub names: HashMap<Sym, String>,
    pub marked: HashSet<Sym>,
}

// Operator contexts: 0 accepts `a:b`, 1 accepts `a \/ b`, 2 needs a primary.
const TOP: u8 = 0;
const UNION_CTX: u8 = 1;
const PRIMARY: u8 = 2;

impl Printer {
    pub fn new() -> Self {
        Printer::default()
    }

    pub fn term(&self, t: &Term) -> String {
        let mut s = String::new();
        self.write_term(&mut s, t, TOP);
        s
    }

    pub fn atom(&self, a: &Atom) -> String {
        let mut s = String::new();
        self.write_atom(&mut s, a);
        s
    }

    fn write_var(&self, out: &mut String, v: &Sym) {
        match self.names.get(v) {
            Some(n) => out.push_str(n),
            None => out.push_str(v.as_str()),
        }
        if self.marked.contains(v) {
            out.push('?');
        }
    }

    fn write_args(&self, out: &mut String, args: &[Term]) {
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            self.write_term(out, a, TOP);
        }
    }

    fn write_atom(&self, out: &mut String, a: &Atom) {
        out.push_str(a.pred.as_str());
        if !a.args.is_empty() {
            out.push('(');
            self.write_args(out, &a.args);
            out.push(')');
        }
    }

    fn write_term(&self, out: &mut String, t: &Term, ctx: u8) {
        let (f, args) = match t {
            Term::Var(v) => return self.write_var(out, v),
            Term::App(f, args) => (f, args),
        };
        match (f.as_str(), args.len()) {
            (FIELD, 2) => {
                let paren = ctx > TOP;
                if paren {
                    out.push('(');
                }
                self.write_term(out, &args[0], UNION_CTX);
                out.push(':');
                self.write_term(out, &args[1], TOP);
                if paren {
                    out.push(')');
                }
            }
            (UNION, 2) => {
                let paren = ctx > UNION_CTX;
                if paren {
                    out.push('(');
                }
                self.write_term(out, &args[0], PRIMARY);
                out.push_str(" \\/ ");
                self.write_term(out, &args[1], UNION_CTX);
                if paren {
                    out.push(')');
                }
            }
            (CONS, 2) => self.write_list(out, t),
            _ => {
                out.push_str(f.as_str());
                if !args.is_empty() {
                    out.push('(');
                    self.write_args(out, args);
                    out.push(')');
                }
            }
        }
    }

    /// Proper lists print flat; a list with any other tail prints as nested
    /// `[head|tail]` cells.
    fn write_list(&self, out: &mut String, t: &Term) {
        let mut items = Vec::new();
        let mut cur = t;
        while let Term::App(f, args) = cur {
            if f.as_str() == CONS && args.len() == 2 {
                items.push(&args[0]);
                cur = &args[1];
            } else {
                break;
            }
        }
        let proper = matches!(cur, Term::App(f, a) if f.as_str() == NIL && a.is_empty());
        if proper {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                self.write_term(out, item, TOP);
            }
            out.push(']');
        } else {
            for item in &items {
                out.push('[');
                self.write_term(out, item, TOP);
                out.push('|');
            }
            self.write_term(out, cur, TOP);
            for _ in &items {
                out.push(']');
            }
        }
    }
}

pub fn print_term(t: &Term) -> String {
    Printer::new().term(t)
}

pub fn print_atom(a: &Atom) -> String {
    Printer::new().atom(a)
}

pub fn print_clause(c: &Clause) -> String {
    let p = Printer::new();
    let mut s = p.atom(&c.head);
    if !c.body.is_empty() {
        s.push_str(" :- ");
        for (i, b) in c.body.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push_str(&p.atom(b));
        }
    }
    s.push('.');
    s
}

/// One clause per line, in id order.
pub fn print_program(p: &Program) -> String {
    let mut s = String::new();
    for c in p.clauses() {
        let _ = writeln!(s, "{}", print_clause(c));
    }
    s
}

pub fn print_goal(g: &Goal) -> String {
    if g.atoms.is_empty() {
        return "?- true.".into();
    }
    let p = Printer::new();
    let body: Vec<String> = g.atoms.iter().map(|a| p.atom(a)).collect();
    format!("?- {}.", body.join(", "))
}
