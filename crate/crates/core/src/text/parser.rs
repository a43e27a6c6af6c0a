use super::lexer::{tokenize, Tok};
use super::{ParseError, SourceSpan};
use crate::term::{Atom, Clause, Goal, Program, Sym, Term, FIELD, UNION};

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    anon: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            anon: 0,
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

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        ParseError::new(
            self.span(),
            format!("expected {what}, found {}", self.peek().describe()),
        )
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let name = match self.peek() {
            Tok::Name(n) => n.clone(),
            _ => return Err(self.unexpected("an atom")),
        };
        self.bump();
        let args = if self.eat(&Tok::LParen) {
            self.args(&Tok::RParen, "`)`")?
        } else {
            Vec::new()
        };
        Ok(Atom::new(name.as_str(), args))
    }

    fn args(&mut self, close: &Tok, what: &str) -> Result<Vec<Term>, ParseError> {
        let mut out = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            out.push(self.term()?);
        }
        self.expect(close, what)?;
        Ok(out)
    }

    /// `union (':' term)?`, right-associative.
    fn term(&mut self) -> Result<Term, ParseError> {
        let left = self.union()?;
        if self.eat(&Tok::Colon) {
            let right = self.term()?;
            Ok(Term::app(FIELD, vec![left, right]))
        } else {
            Ok(left)
        }
    }

    fn union(&mut self) -> Result<Term, ParseError> {
        let left = self.primary()?;
        if self.eat(&Tok::Union) {
            let right = self.union()?;
            Ok(Term::app(UNION, vec![left, right]))
        } else {
            Ok(left)
        }
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                if v == "_" {
                    self.anon += 1;
                    Ok(Term::var(format!("_G{}", self.anon).as_str()))
                } else {
                    Ok(Term::var(v.as_str()))
                }
            }
            Tok::Name(n) => {
                self.bump();
                if self.eat(&Tok::LParen) {
                    let args = self.args(&Tok::RParen, "`)`")?;
                    Ok(Term::app_sym(Sym::from(n), args))
                } else {
                    Ok(Term::constant(n.as_str()))
                }
            }
            Tok::LBracket => {
                self.bump();
                if self.eat(&Tok::RBracket) {
                    return Ok(Term::nil());
                }
                let mut items = vec![self.term()?];
                while self.eat(&Tok::Comma) {
                    items.push(self.term()?);
                }
                let tail = if self.eat(&Tok::Bar) { self.term()? } else { Term::nil() };
                self.expect(&Tok::RBracket, "`]`")?;
                Ok(Term::list_with_tail(items, tail))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        let start = self.span();
        let head = self.atom()?;
        let mut body = Vec::new();
        if self.eat(&Tok::Neck) {
            body.push(self.atom()?);
            while self.eat(&Tok::Comma) {
                body.push(self.atom()?);
            }
        }
        let end = self.span();
        self.expect(&Tok::Dot, "`,` or `.`")?;
        let length = if end.line == start.line {
            end.column + 1 - start.column
        } else {
            0
        };
        let mut c = Clause::new(0, head, body);
        c.span = Some(SourceSpan { length, ..start });
        Ok(c)
    }
}

/// Parses a sequence of clauses; ids are assigned 1..=n in source order.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src)?;
    let mut clauses = Vec::new();
    while *p.peek() != Tok::Eof {
        clauses.push(p.clause()?);
    }
    Ok(Program::new(clauses))
}

/// Parses `?- a1, ..., an.`; both the `?-` and the final `.` are optional.
pub fn parse_goal(src: &str) -> Result<Goal, ParseError> {
    let mut p = Parser::new(src)?;
    p.eat(&Tok::Query);
    if matches!(p.peek(), Tok::Eof | Tok::Dot) {
        return Err(ParseError::new(p.span(), "empty goal"));
    }
    let mut atoms = vec![p.atom()?];
    while p.eat(&Tok::Comma) {
        atoms.push(p.atom()?);
    }
    p.eat(&Tok::Dot);
    p.expect_eof()?;
    Ok(Goal::new(atoms))
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_atom(src: &str) -> Result<Atom, ParseError> {
    let mut p = Parser::new(src)?;
    let a = p.atom()?;
    p.eat(&Tok::Dot);
    p.expect_eof()?;
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clause_ids_follow_source_order() {
        let p = parse_program("p(X) :- q(X).\nq(a).\n").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.clauses()[0].id, 1);
        assert_eq!(p.clauses()[1].id, 2);
        assert!(p.clauses()[1].is_fact());
    }

    #[test]
    fn lists_and_operators() {
        let t = parse_term("[a, b|T]").unwrap();
        assert_eq!(
            t,
            Term::list_with_tail(vec![Term::constant("a"), Term::constant("b")], Term::var("T"))
        );
        let u = parse_term("obj(c, [h:int]) \\/ X").unwrap();
        assert_eq!(u.functor().unwrap().0.as_str(), UNION);
        let f = parse_term("h:int \\/ bool").unwrap();
        assert_eq!(f.functor().unwrap().0.as_str(), FIELD);
    }

    #[test]
    fn comments_are_skipped() {
        let p = parse_program("% header\nzeros(cons(0, X)) :- zeros(X). % tail\n").unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn errors_carry_position() {
        let e = parse_program("p(a).\nq(b :- r.").unwrap_err();
        assert_eq!(e.span.line, 2);
        assert_eq!(e.span.column, 5);
        let e = parse_program("p(a) & q").unwrap_err();
        assert_eq!(e.span.column, 6);
    }

    #[test]
    fn goals() {
        assert_eq!(parse_goal("?- p(X), q(X).").unwrap().atoms.len(), 2);
        assert_eq!(parse_goal("p(X)").unwrap().atoms.len(), 1);
        assert!(parse_goal("?- .").is_err());
        assert!(parse_goal("").is_err());
    }

    #[test]
    fn anonymous_variables_are_distinct() {
        let a = parse_atom("p(_, _)").unwrap();
        assert_ne!(a.args[0], a.args[1]);
    }

    #[test]
    fn clause_span_recorded() {
        let p = parse_program("\n  p(a).").unwrap();
        let s = p.clauses()[0].span.unwrap();
        assert_eq!((s.line, s.column, s.length), (2, 3, 5));
    }
}
