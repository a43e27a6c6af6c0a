use std::collections::HashSet;

use indexmap::IndexMap;

use super::ast::{BinOp, ClassDecl, ClassTable, Constructor, Expr, ExprKind, MethodDecl, ROOT_CLASS};
use super::lexer::{tokenize, Tok};
use super::FrontendError;
use crate::text::{ParseError, SourceSpan};

const KEYWORDS: &[&str] = &[
    "class", "extends", "super", "this", "new", "if", "else", "null", "true", "false",
];

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::new(
            self.span(),
            format!("expected {expected}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, t: Tok) -> PResult<SourceSpan> {
        if *self.peek() == t {
            Ok(self.bump().1)
        } else {
            Err(self.error(&t.describe()))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> PResult<SourceSpan> {
        if self.at_keyword(kw) {
            Ok(self.bump().1)
        } else {
            Err(self.error(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let sp = self.bump().1;
                Ok((s, sp))
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn comma_list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        if *self.peek() != Tok::RParen {
            out.push(item(self)?);
            while *self.peek() == Tok::Comma {
                self.bump();
                out.push(item(self)?);
            }
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    fn class(&mut self) -> Result<ClassDecl, FrontendError> {
        let span = self.keyword("class")?;
        let (name, _) = self.ident()?;
        let parent = if self.at_keyword("extends") {
            self.bump();
            self.ident()?.0
        } else {
            ROOT_CLASS.to_string()
        };
        self.expect(Tok::LBrace)?;
        let mut fields = Vec::new();
        let mut constructor: Option<Constructor> = None;
        let mut methods = IndexMap::new();
        while *self.peek() != Tok::RBrace {
            let (member, mspan) = self.ident()?;
            match self.peek() {
                Tok::Semi => {
                    self.bump();
                    if fields.contains(&member) {
                        return Err(invalid(mspan, format!("duplicate field `{member}` in class `{name}`")));
                    }
                    fields.push(member);
                }
                Tok::LParen if member == name => {
                    let params = self.params()?;
                    if constructor.is_some() {
                        return Err(invalid(mspan, format!("class `{name}` has more than one constructor")));
                    }
                    constructor = Some(self.constructor_body(params, mspan)?);
                }
                Tok::LParen => {
                    let params = self.params()?;
                    self.expect(Tok::LBrace)?;
                    let body = self.expr()?;
                    if *self.peek() == Tok::Semi {
                        self.bump();
                    }
                    self.expect(Tok::RBrace)?;
                    let key = member.to_lowercase();
                    if methods.keys().any(|m: &String| m.to_lowercase() == key) {
                        return Err(invalid(mspan, format!("duplicate method `{member}` in class `{name}`")));
                    }
                    methods.insert(
                        member.clone(),
                        MethodDecl {
                            name: member,
                            params,
                            body,
                            span: mspan,
                        },
                    );
                }
                _ => return Err(self.error("`;` or `(`").into()),
            }
        }
        self.expect(Tok::RBrace)?;
        let constructor = constructor.unwrap_or(Constructor {
            params: Vec::new(),
            super_args: Vec::new(),
            assignments: Vec::new(),
            span,
        });
        Ok(ClassDecl {
            name,
            parent,
            fields,
            constructor,
            methods,
            span,
        })
    }

    fn params(&mut self) -> Result<Vec<String>, FrontendError> {
        let start = self.span();
        let params = self.comma_list(|p| p.ident().map(|(s, _)| s))?;
        let mut seen = HashSet::new();
        for p in &params {
            if !seen.insert(p.to_lowercase()) {
                return Err(invalid(start, format!("duplicate parameter `{p}`")));
            }
        }
        Ok(params)
    }

    fn constructor_body(&mut self, params: Vec<String>, span: SourceSpan) -> PResult<Constructor> {
        self.expect(Tok::LBrace)?;
        self.keyword("super")?;
        let super_args = self.comma_list(|p| p.expr())?;
        self.expect(Tok::Semi)?;
        let mut assignments = Vec::new();
        while self.at_keyword("this") {
            self.bump();
            self.expect(Tok::Dot)?;
            let (field, _) = self.ident()?;
            self.expect(Tok::Assign)?;
            let value = self.expr()?;
            self.expect(Tok::Semi)?;
            assignments.push((field, value));
        }
        self.expect(Tok::RBrace)?;
        Ok(Constructor {
            params,
            super_args,
            assignments,
            span,
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        if self.at_keyword("if") {
            let span = self.bump().1;
            self.expect(Tok::LParen)?;
            let cond = self.expr()?;
            self.expect(Tok::RParen)?;
            let then = self.expr()?;
            self.keyword("else")?;
            let els = self.expr()?;
            return Ok(Expr {
                kind: ExprKind::If {
                    cond: Box::new(cond),
                    then: Box::new(then),
                    els: Box::new(els),
                },
                span,
            });
        }
        let lhs = self.difference()?;
        if *self.peek() == Tok::Leq {
            self.bump();
            let rhs = self.difference()?;
            let span = lhs.span;
            return Ok(Expr {
                kind: ExprKind::BinOp {
                    op: BinOp::Leq,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            });
        }
        Ok(lhs)
    }

    fn difference(&mut self) -> PResult<Expr> {
        let mut lhs = self.postfix()?;
        while *self.peek() == Tok::Minus {
            self.bump();
            let rhs = self.postfix()?;
            let span = lhs.span;
            lhs = Expr {
                kind: ExprKind::BinOp {
                    op: BinOp::Sub,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            };
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while *self.peek() == Tok::Dot {
            self.bump();
            let (name, span) = self.ident()?;
            let target = Box::new(e);
            e = if *self.peek() == Tok::LParen {
                let args = self.comma_list(|p| p.expr())?;
                Expr {
                    kind: ExprKind::Invoke {
                        target,
                        method: name,
                        args,
                    },
                    span,
                }
            } else {
                Expr {
                    kind: ExprKind::FieldAcc { target, field: name },
                    span,
                }
            };
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                let i = s
                    .parse::<i64>()
                    .map_err(|_| ParseError::new(span, format!("integer literal `{s}` out of range")))?;
                ExprKind::Int(i)
            }
            Tok::LParen => {
                self.bump();
                let mut e = self.expr()?;
                self.expect(Tok::RParen)?;
                e.span = span;
                return Ok(e);
            }
            Tok::Ident(s) => match s.as_str() {
                "this" => {
                    self.bump();
                    ExprKind::This
                }
                "null" => {
                    self.bump();
                    ExprKind::Null
                }
                "true" | "false" => {
                    self.bump();
                    ExprKind::Bool(s == "true")
                }
                "new" => {
                    self.bump();
                    let (class, _) = self.ident()?;
                    let args = self.comma_list(|p| p.expr())?;
                    ExprKind::New { class, args }
                }
                _ => ExprKind::Var(self.ident()?.0),
            },
            _ => return Err(self.error("an expression")),
        };
        Ok(Expr { kind, span })
    }
}

fn invalid(span: SourceSpan, message: String) -> FrontendError {
    FrontendError::Invalid { span, message }
}

/// Parses and validates a sequence of class declarations.
pub fn parse_classes(src: &str) -> Result<ClassTable, FrontendError> {
    let mut p = Parser::new(src)?;
    let mut ct = ClassTable::default();
    while *p.peek() != Tok::Eof {
        let c = p.class()?;
        let key = c.name.to_lowercase();
        if key == ROOT_CLASS.to_lowercase() || ct.classes.keys().any(|n| n.to_lowercase() == key) {
            return Err(FrontendError::DuplicateClass {
                name: c.name,
                span: c.span,
            });
        }
        ct.classes.insert(c.name.clone(), c);
    }
    validate(&ct)?;
    Ok(ct)
}

/// Parses one expression; the whole input must be consumed.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of input"));
    }
    Ok(e)
}

impl ClassTable {
    /// Checks the structural invariants that the parser enforces.
    pub fn validate(&self) -> Result<(), FrontendError> {
        validate(self)
    }
}

fn validate(ct: &ClassTable) -> Result<(), FrontendError> {
    let mut seen = HashSet::new();
    for c in ct.iter() {
        let key = c.name.to_lowercase();
        if key == ROOT_CLASS.to_lowercase() || !seen.insert(key) {
            return Err(FrontendError::DuplicateClass {
                name: c.name.clone(),
                span: c.span,
            });
        }
    }
    for c in ct.iter() {
        if c.parent != ROOT_CLASS && ct.get(&c.parent).is_none() {
            return Err(FrontendError::UnknownParent {
                class: c.name.clone(),
                parent: c.parent.clone(),
                span: c.span,
            });
        }
        let mut cur = c;
        for _ in 0..=ct.len() {
            match ct.get(&cur.parent) {
                Some(p) if p.name == c.name => {
                    return Err(FrontendError::InheritanceCycle {
                        name: c.name.clone(),
                        span: c.span,
                    })
                }
                Some(p) => cur = p,
                None => break,
            }
        }
        let ctor = &c.constructor;
        if c.parent == ROOT_CLASS && !ctor.super_args.is_empty() {
            return Err(invalid(
                ctor.span,
                format!("`{ROOT_CLASS}` has no constructor arguments"),
            ));
        }
        let all = ct.all_fields(&c.name);
        if let Some(f) = all
            .iter()
            .enumerate()
            .find(|(i, f)| all[..*i].contains(f))
            .map(|(_, f)| f)
        {
            return Err(invalid(
                c.span,
                format!("field `{f}` of `{}` is declared twice in its hierarchy", c.name),
            ));
        }
        for f in &c.fields {
            if !ctor.assignments.iter().any(|(g, _)| g == f) {
                return Err(FrontendError::UnassignedField {
                    class: c.name.clone(),
                    field: f.clone(),
                    span: ctor.span,
                });
            }
        }
        let assigned: Vec<&String> = ctor.assignments.iter().map(|(g, _)| g).collect();
        if assigned != c.fields.iter().collect::<Vec<_>>() {
            return Err(invalid(
                ctor.span,
                format!(
                    "constructor of `{}` must assign each of its own fields once, in declaration order",
                    c.name
                ),
            ));
        }
    }
    Ok(())
}
