use thiserror::Error;

use super::expr::{name, Expr, Hint, Name};
use super::signature::Signature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: duplicate declaration of {name}")]
    Duplicate { line: usize, col: usize, name: String },
    #[error("{line}:{col}: meta-variable {name} used at binder position")]
    MetaBinder { line: usize, col: usize, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Type,
    Colon,
    Dot,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Arrow,
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let bump = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => bump(1, &mut i, &mut col),
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            ':' | '.' | '{' | '}' | '[' | ']' | '(' | ')' => {
                let tok = match c {
                    ':' => Tok::Colon,
                    '.' => Tok::Dot,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    '(' => Tok::LParen,
                    _ => Tok::RParen,
                };
                out.push(Token { tok, line: tl, col: tc });
                bump(1, &mut i, &mut col);
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Token { tok: Tok::Arrow, line: tl, col: tc });
                bump(2, &mut i, &mut col);
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                    col += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let tok = if s == "type" { Tok::Type } else { Tok::Ident(s) };
                out.push(Token { tok, line: tl, col: tc });
            }
            other => {
                return Err(ParseError::Syntax {
                    line: tl,
                    col: tc,
                    msg: format!("unexpected character {:?}", other),
                })
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Signature,
    Query,
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    sig: &'a Signature,
    mode: Mode,
    binders: Vec<String>,
    metas: Vec<Name>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax { line, col, msg: msg.into() })
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected {}", what))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::LBrace | Tok::LBrack => {
                let is_pi = *self.peek() == Tok::LBrace;
                self.next();
                let (line, col) = self.here();
                let x = self.ident()?;
                if self.mode == Mode::Query && x.starts_with(char::is_uppercase) {
                    return Err(ParseError::MetaBinder { line, col, name: x });
                }
                self.expect(Tok::Colon, "':'")?;
                let dom = self.expr()?;
                self.expect(if is_pi { Tok::RBrace } else { Tok::RBrack }, if is_pi { "'}'" } else { "']'" })?;
                self.binders.push(x.clone());
                let body = self.expr();
                self.binders.pop();
                let body = body?;
                let hint = Hint::new(&x);
                Ok(if is_pi {
                    Expr::Pi(hint, dom.into(), body.into())
                } else {
                    Expr::Lam(hint, dom.into(), body.into())
                })
            }
            _ => {
                let lhs = self.app()?;
                if *self.peek() == Tok::Arrow {
                    self.next();
                    // The anonymous binder shifts everything on the right.
                    self.binders.push(String::new());
                    let rhs = self.expr();
                    self.binders.pop();
                    Ok(Expr::Pi(Hint::new("_"), lhs.into(), rhs?.into()))
                } else {
                    Ok(lhs)
                }
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen | Tok::Type | Tok::LBrace | Tok::LBrack)
    }

    fn app(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        while self.starts_atom() {
            // A trailing binder form extends as far right as possible.
            let a = if matches!(self.peek(), Tok::LBrace | Tok::LBrack) { self.expr()? } else { self.atom()? };
            e = Expr::app(e, a);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Type => {
                self.next();
                Ok(Expr::Type)
            }
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::LBrace | Tok::LBrack => self.expr(),
            Tok::Ident(s) => {
                self.next();
                Ok(self.resolve(&s))
            }
            _ => self.err("expected expression"),
        }
    }

    fn resolve(&mut self, s: &str) -> Expr {
        if let Some(k) = self.binders.iter().rev().position(|b| b == s) {
            return Expr::Bound(k as u32);
        }
        if self.sig.position(s).is_some() {
            return Expr::Const(name(s));
        }
        if self.mode == Mode::Query && s.starts_with(char::is_uppercase) {
            let n = name(s);
            if !self.metas.contains(&n) {
                self.metas.push(n.clone());
            }
            return Expr::Meta(n);
        }
        // Unknown constants are reported by the checker, not the parser.
        Expr::Const(name(s))
    }
}

/// Parses a sequence of `name : classifier.` declarations.
pub fn parse_signature(text: &str) -> Result<Signature, ParseError> {
    let toks = lex(text)?;
    let mut sig = Signature::new();
    let mut pos = 0;
    while toks[pos].tok != Tok::Eof {
        let (line, col) = (toks[pos].line, toks[pos].col);
        let mut p = Parser {
            toks: toks.clone(),
            pos,
            sig: &sig,
            mode: Mode::Signature,
            binders: Vec::new(),
            metas: Vec::new(),
        };
        let n = p.ident()?;
        p.expect(Tok::Colon, "':'")?;
        let cls = p.expr()?;
        p.expect(Tok::Dot, "'.'")?;
        pos = p.pos;
        if !sig.push(name(&n), cls) {
            return Err(ParseError::Duplicate { line, col, name: n });
        }
    }
    Ok(sig)
}

/// Parses a query type. Free uppercase identifiers that are not declared in
/// `sig` become meta-variables, listed in order of first occurrence.
pub fn parse_query(sig: &Signature, text: &str) -> Result<(Expr, Vec<Name>), ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        sig,
        mode: Mode::Query,
        binders: Vec::new(),
        metas: Vec::new(),
    };
    let e = p.expr()?;
    if *p.peek() == Tok::Dot {
        p.next();
    }
    if *p.peek() != Tok::Eof {
        return p.err("trailing input after query");
    }
    Ok((e, p.metas))
}

/// Parses a closed expression against a signature (no meta-variables).
pub fn parse_expr(sig: &Signature, text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        sig,
        mode: Mode::Signature,
        binders: Vec::new(),
        metas: Vec::new(),
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.err("trailing input");
    }
    Ok(e)
}
