use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Name(String),
    Var(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Bar,
    Dot,
    Neck,
    Query,
    Union,
    Colon,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Name(s) => format!("name `{s}`"),
            Tok::Var(s) => format!("variable `{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Neck => "`:-`".into(),
            Tok::Query => "`?-`".into(),
            Tok::Union => "`\\/`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn is_ident(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < chars.len() {
        let c = chars[i];
        let span = |len: usize| SourceSpan {
            line,
            column: col,
            length: len as u32,
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            ',' => (Tok::Comma, 1),
            '|' => (Tok::Bar, 1),
            '.' => (Tok::Dot, 1),
            '∨' => (Tok::Union, 1),
            ':' if next == Some('-') => (Tok::Neck, 2),
            ':' => (Tok::Colon, 1),
            '?' if next == Some('-') => (Tok::Query, 2),
            '\\' if next == Some('/') => (Tok::Union, 2),
            c if c.is_ascii_lowercase() || c.is_ascii_digit() => {
                let start = i;
                let mut j = i;
                while j < chars.len() && is_ident(chars[j]) {
                    j += 1;
                }
                (Tok::Name(chars[start..j].iter().collect()), j - start)
            }
            c if c.is_ascii_uppercase() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (is_ident(chars[j]) || chars[j] == '\'') {
                    j += 1;
                }
                (Tok::Var(chars[start..j].iter().collect()), j - start)
            }
            other => {
                return Err(ParseError::new(span(1), format!("unexpected character `{other}`")));
            }
        };
        out.push((tok, span(len)));
        i += len;
        col += len as u32;
    }
    out.push((
        Tok::Eof,
        SourceSpan {
            line,
            column: col,
            length: 0,
        },
    ));
    Ok(out)
}
