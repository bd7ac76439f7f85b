//! Clause text: `forall x1:tm. hastype x1 nat => hastype (s x1) nat.`
//!
//! Bound variables are printed as `x1, x2, …` in order of appearance, so
//! printing is deterministic and α-equivalent clauses print identically.

use std::fmt::Write as _;

use thiserror::Error;

use crate::lf_syntax::{is_ident_char, is_ident_start, name, Hint};

use super::term::{Formula, SimpleType, Term};
use super::translate::ClauseSet;

struct Printer {
    names: Vec<String>,
    next: usize,
    meta_name: fn(u32) -> String,
}

fn default_meta_name(m: u32) -> String {
    format!("?M{}", m)
}

impl Printer {
    fn bind(&mut self) -> String {
        self.next += 1;
        let n = format!("x{}", self.next);
        self.names.push(n.clone());
        n
    }

    fn term(&mut self, t: &Term, atom: bool, out: &mut String) {
        match t {
            Term::Const(c) | Term::Var(c) => out.push_str(c),
            Term::Bound(i) => {
                let i = *i as usize;
                match self.names.len().checked_sub(i + 1) {
                    Some(k) => out.push_str(&self.names[k]),
                    None => {
                        let _ = write!(out, "#{}", i);
                    }
                }
            }
            Term::Eigen(e) => {
                let _ = write!(out, "!e{}", e);
            }
            Term::Meta(m) => out.push_str(&(self.meta_name)(*m)),
            Term::Lam(_, b) => {
                if atom {
                    out.push('(');
                }
                let x = self.bind();
                let _ = write!(out, "[{}] ", x);
                self.term(b, false, out);
                self.names.pop();
                if atom {
                    out.push(')');
                }
            }
            Term::App(..) => {
                let (head, args) = t.spine();
                if atom {
                    out.push('(');
                }
                self.term(head, true, out);
                for a in args {
                    out.push(' ');
                    self.term(a, true, out);
                }
                if atom {
                    out.push(')');
                }
            }
        }
    }

    /// `left` marks the antecedent of an implication, which needs
    /// parentheses around implications and quantifiers.
    fn formula(&mut self, f: &Formula, left: bool, out: &mut String) {
        match f {
            Formula::Top => out.push_str("top"),
            Formula::Atom(s, c) => {
                out.push_str("hastype ");
                self.term(s, true, out);
                out.push(' ');
                self.term(c, true, out);
            }
            Formula::Implies(a, b) => {
                if left {
                    out.push('(');
                }
                self.formula(a, true, out);
                out.push_str(" => ");
                self.formula(b, false, out);
                if left {
                    out.push(')');
                }
            }
            Formula::Forall(_, ty, b) => {
                if left {
                    out.push('(');
                }
                let x = self.bind();
                let _ = write!(out, "forall {}:{}. ", x, ty);
                self.formula(b, false, out);
                self.names.pop();
                if left {
                    out.push(')');
                }
            }
        }
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut p = Printer { names: Vec::new(), next: 0, meta_name: default_meta_name };
    let mut out = String::new();
    p.formula(f, false, &mut out);
    out
}

/// Prints a term on its own; free bound indices show as `#i`.
pub fn print_term(t: &Term) -> String {
    let mut p = Printer { names: Vec::new(), next: 0, meta_name: default_meta_name };
    let mut out = String::new();
    p.term(t, false, &mut out);
    out
}

/// One clause per line, each terminated by `.`.
pub fn print_clauses(cs: &ClauseSet) -> String {
    let mut out = String::new();
    for c in &cs.clauses {
        out.push_str(&print_formula(&c.formula));
        out.push_str(".\n");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("clause text {line}:{col}: {msg}")]
pub struct ClauseParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Colon,
    Dot,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Implies,
    Arrow,
    Eof,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, ClauseParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l, k) = (line, col);
        let two = |s: &str| chars[i..].iter().take(2).collect::<String>() == s;
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '=' if two("=>") => Tok::Implies,
            '-' if two("->") => Tok::Arrow,
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                    col += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), l, k));
                continue;
            }
            other => return Err(ClauseParseError { line: l, col: k, msg: format!("unexpected character {:?}", other) }),
        };
        let w = if matches!(tok, Tok::Implies | Tok::Arrow) { 2 } else { 1 };
        i += w;
        col += w;
        out.push((tok, l, k));
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    scope: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ClauseParseError> {
        let (_, line, col) = self.toks[self.pos];
        Err(ClauseParseError { line, col, msg: msg.into() })
    }

    fn expect(&mut self, t: Tok) -> Result<(), ClauseParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {:?}", t))
        }
    }

    fn ident(&mut self) -> Result<String, ClauseParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn formula(&mut self) -> Result<Formula, ClauseParseError> {
        if self.is_kw("forall") {
            self.bump();
            let x = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.stype()?;
            self.expect(Tok::Dot)?;
            self.scope.push(x.clone());
            let body = self.formula();
            self.scope.pop();
            return Ok(Formula::Forall(Hint::new(&x), ty, std::sync::Arc::new(body?)));
        }
        let lhs = self.primary()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.formula()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn primary(&mut self) -> Result<Formula, ClauseParseError> {
        if self.is_kw("top") {
            self.bump();
            Ok(Formula::Top)
        } else if self.is_kw("hastype") {
            self.bump();
            let s = self.term_atom()?;
            let c = self.term_atom()?;
            Ok(Formula::atom(s, c))
        } else if *self.peek() == Tok::LParen {
            self.bump();
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            Ok(f)
        } else {
            self.err("expected formula")
        }
    }

    fn stype(&mut self) -> Result<SimpleType, ClauseParseError> {
        let a = match self.peek().clone() {
            Tok::Ident(s) if s == "tm" => SimpleType::Tm,
            Tok::Ident(s) if s == "ty" => SimpleType::Ty,
            Tok::Ident(s) if s == "o" => SimpleType::O,
            Tok::LParen => {
                self.bump();
                let t = self.stype()?;
                if *self.peek() != Tok::RParen {
                    return self.err("expected ')'");
                }
                t
            }
            _ => return self.err("expected sort"),
        };
        self.bump();
        if *self.peek() == Tok::Arrow {
            self.bump();
            Ok(SimpleType::arrow(a, self.stype()?))
        } else {
            Ok(a)
        }
    }

    fn term(&mut self) -> Result<Term, ClauseParseError> {
        if *self.peek() == Tok::LBrack {
            self.bump();
            let x = self.ident()?;
            self.expect(Tok::RBrack)?;
            self.scope.push(x.clone());
            let body = self.term();
            self.scope.pop();
            return Ok(Term::lam(Hint::new(&x), body?));
        }
        let mut t = self.term_atom()?;
        while matches!(self.peek(), Tok::Ident(_) | Tok::LParen | Tok::LBrack) {
            let a = if *self.peek() == Tok::LBrack { self.term()? } else { self.term_atom()? };
            t = Term::app(t, a);
        }
        Ok(t)
    }

    fn term_atom(&mut self) -> Result<Term, ClauseParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(match self.scope.iter().rev().position(|b| *b == s) {
                    Some(k) => Term::Bound(k as u32),
                    None => Term::Const(name(&s)),
                })
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => self.err("expected term"),
        }
    }
}

/// Parses `.`-terminated clauses; unbound identifiers become constants.
pub fn parse_clauses(text: &str) -> Result<Vec<Formula>, ClauseParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, scope: Vec::new() };
    let mut out = Vec::new();
    while *p.peek() != Tok::Eof {
        out.push(p.formula()?);
        p.expect(Tok::Dot)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hhf_logic::translate::{translate_optimized, translate_simple, Mode};
    use crate::lf_syntax::parse_signature;
    use crate::test_support::APPEND_LF;

    #[test]
    fn fixed_names_and_shape() {
        let sig = parse_signature(APPEND_LF).unwrap();
        let cs = translate_optimized(&sig);
        let text = print_clauses(&cs);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "hastype z nat.");
        assert_eq!(lines[1], "forall x1:tm. hastype x1 nat => hastype (s x1) nat.");
        assert_eq!(lines[4], "forall x1:tm. top => hastype (appNil x1) (append nil x1 x1).");
    }

    #[test]
    fn roundtrip() {
        let sig = parse_signature(APPEND_LF).unwrap();
        for cs in [translate_simple(&sig), translate_optimized(&sig)] {
            let parsed = parse_clauses(&print_clauses(&cs)).unwrap();
            let orig: Vec<Formula> = cs.clauses.iter().map(|c| c.formula.clone()).collect();
            assert_eq!(parsed, orig);
        }
        assert_eq!(print_clauses(&ClauseSet { mode: Mode::Naive, clauses: vec![] }), "");
    }

    #[test]
    fn nested_and_lambda() {
        let src = "forall x1:tm -> tm. (forall x2:tm. hastype x2 nat => hastype (x1 x2) nat) => hastype (c ([x3] x1 x3)) t.";
        let f = &parse_clauses(src).unwrap()[0];
        assert_eq!(format!("{}.", print_formula(f)), src);
    }
}
