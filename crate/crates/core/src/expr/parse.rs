//! Recursive-descent parser for the ASCII expression grammar.
//!
//! ```text
//! par     := choice ('||' choice)*
//! choice  := seq ('[]' seq)*
//! seq     := postfix (';' postfix)*
//! postfix := primary ('[' a->b,... ']' | 'rs' a | 'sy' a)*
//! primary := '(' '{' acts '}' ',' value ')' | '(' par ')' | '[' par '*' par '*' par ']' | 'stop'
//! value   := rational | '#' delay ':' rational
//! ```
//! Rationals are `p/q`, integers, decimals, or `$name` parameters.

use std::collections::{BTreeMap, HashMap};

use super::action::{Action, Multiaction};
use super::activity::{Activity, Kind};
use super::ast::{Expr, Relabeling};
use crate::rational::parse_rational;
use crate::{Error, Result, Q};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    Choice,
    Par,
    Semi,
    Comma,
    Star,
    Tilde,
    Arrow,
    Hash,
    Colon,
    Slash,
    Num(String),
    Ident(String),
    Param(String),
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number `{n}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Param(s) => format!("`${s}`"),
        Tok::Eof => "end of input".into(),
        other => {
            let s = match other {
                Tok::LParen => "(",
                Tok::RParen => ")",
                Tok::LBrace => "{",
                Tok::RBrace => "}",
                Tok::LBrack => "[",
                Tok::RBrack => "]",
                Tok::Choice => "[]",
                Tok::Par => "||",
                Tok::Semi => ";",
                Tok::Comma => ",",
                Tok::Star => "*",
                Tok::Tilde => "~",
                Tok::Arrow => "->",
                Tok::Hash => "#",
                Tok::Colon => ":",
                Tok::Slash => "/",
                _ => unreachable!(),
            };
            format!("`{s}`")
        }
    }
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_lowercase()
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit() || c == b'_'
}

fn lex(src: &str) -> std::result::Result<Vec<(Tok, usize)>, (usize, String)> {
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        // line comments
        if c == b'%' || (c == b'/' && b.get(i + 1) == Some(&b'/')) {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b'[' if b.get(i + 1) == Some(&b']') => {
                i += 1;
                Tok::Choice
            }
            b'[' => Tok::LBrack,
            b']' => Tok::RBrack,
            b'|' if b.get(i + 1) == Some(&b'|') => {
                i += 1;
                Tok::Par
            }
            b';' => Tok::Semi,
            b',' => Tok::Comma,
            b'*' => Tok::Star,
            b'~' => Tok::Tilde,
            b'-' if b.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'#' => Tok::Hash,
            b':' => Tok::Colon,
            b'/' => Tok::Slash,
            b'$' => {
                let s = i + 1;
                let mut j = s;
                while j < b.len() && (b[j].is_ascii_alphanumeric() || b[j] == b'_') {
                    j += 1;
                }
                if j == s {
                    return Err((start, "expected a parameter name after `$`".into()));
                }
                i = j - 1;
                Tok::Param(src[s..j].to_string())
            }
            c if c.is_ascii_digit() || c == b'.' => {
                let mut j = i;
                while j < b.len() && (b[j].is_ascii_digit() || b[j] == b'.') {
                    j += 1;
                }
                i = j - 1;
                Tok::Num(src[start..j].to_string())
            }
            c if is_ident_start(c) => {
                let mut j = i;
                while j < b.len() && is_ident_char(b[j]) {
                    j += 1;
                }
                i = j - 1;
                Tok::Ident(src[start..j].to_string())
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err((start, format!("unexpected character `{ch}`")));
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    params: &'a HashMap<String, Q>,
}

type PResult<T> = std::result::Result<T, (usize, String)>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err((self.offset(), format!("expected {}, found {}", describe(&t), describe(self.peek()))))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => Err((self.offset(), format!("expected an action name, found {}", describe(&t)))),
        }
    }

    fn par(&mut self) -> PResult<Expr> {
        let mut e = self.choice()?;
        while *self.peek() == Tok::Par {
            self.bump();
            e = Expr::par(e, self.choice()?);
        }
        Ok(e)
    }

    fn choice(&mut self) -> PResult<Expr> {
        let mut e = self.seq()?;
        while *self.peek() == Tok::Choice {
            self.bump();
            e = Expr::choice(e, self.seq()?);
        }
        Ok(e)
    }

    fn seq(&mut self) -> PResult<Expr> {
        let mut e = self.postfix()?;
        while *self.peek() == Tok::Semi {
            self.bump();
            e = Expr::seq(e, self.postfix()?);
        }
        Ok(e)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            match self.peek().clone() {
                Tok::LBrack => {
                    self.bump();
                    let mut map = BTreeMap::new();
                    loop {
                        let at = self.offset();
                        let from = self.ident()?;
                        self.expect(Tok::Arrow)?;
                        let to = self.ident()?;
                        if map.insert(from.clone(), to).is_some() {
                            return Err((at, format!("action `{from}` relabeled twice")));
                        }
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::RBrack)?;
                    e = Expr::Relabel(Box::new(e), Relabeling(map));
                }
                Tok::Ident(k) if k == "rs" || k == "sy" => {
                    self.bump();
                    let a = self.ident()?;
                    e = if k == "rs" { Expr::restrict(e, &a) } else { Expr::sync(e, &a) };
                }
                _ => return Ok(e),
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::LParen if *self.peek2() == Tok::LBrace => self.activity(),
            Tok::LParen => {
                self.bump();
                let e = self.par()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::LBrack => {
                self.bump();
                let a = self.par()?;
                self.expect(Tok::Star)?;
                let b = self.par()?;
                self.expect(Tok::Star)?;
                let c = self.par()?;
                self.expect(Tok::RBrack)?;
                Ok(Expr::iter(a, b, c))
            }
            Tok::Ident(k) if k == "stop" => {
                self.bump();
                Ok(Expr::stop())
            }
            t => Err((self.offset(), format!("expected an expression, found {}", describe(&t)))),
        }
    }

    fn activity(&mut self) -> PResult<Expr> {
        self.expect(Tok::LParen)?;
        self.expect(Tok::LBrace)?;
        let mut m = Multiaction::empty();
        if *self.peek() != Tok::RBrace {
            loop {
                let conj = if *self.peek() == Tok::Tilde {
                    self.bump();
                    true
                } else {
                    false
                };
                let name = self.ident()?;
                m.add(Action { name, conjugated: conj }, 1);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace)?;
        self.expect(Tok::Comma)?;
        let at = self.offset();
        let kind = if *self.peek() == Tok::Hash {
            self.bump();
            let delay = match self.bump() {
                Tok::Num(n) if n.bytes().all(|c| c.is_ascii_digit()) => {
                    n.parse::<u32>().map_err(|_| (at, format!("delay `{n}` out of range")))?
                }
                t => return Err((at, format!("expected an integer delay, found {}", describe(&t)))),
            };
            self.expect(Tok::Colon)?;
            let weight = self.rational()?;
            Kind::Deterministic { delay, weight }
        } else {
            Kind::Stochastic(self.rational()?)
        };
        kind.validate().map_err(|e| match e {
            Error::Invalid(msg) => (at, msg),
            other => (at, other.to_string()),
        })?;
        self.expect(Tok::RParen)?;
        Ok(Expr::Act(Activity::new(m, kind)))
    }

    fn rational(&mut self) -> PResult<Q> {
        let at = self.offset();
        match self.bump() {
            Tok::Param(p) => self.params.get(&p).cloned().ok_or_else(|| (at, format!("unbound parameter `${p}`"))),
            Tok::Num(n) => {
                let text = if *self.peek() == Tok::Slash {
                    self.bump();
                    match self.bump() {
                        Tok::Num(d) => format!("{n}/{d}"),
                        t => return Err((self.offset(), format!("expected a denominator, found {}", describe(&t)))),
                    }
                } else {
                    n
                };
                parse_rational(&text).map_err(|e| (at, e.to_string()))
            }
            t => Err((at, format!("expected a number, found {}", describe(&t)))),
        }
    }
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, col)
}

/// Parses a timer-free static expression without parameters.
pub fn parse_static(text: &str) -> Result<Expr> {
    parse_static_with(text, &HashMap::new())
}

/// Parses a static expression, substituting `$name` parameters.
pub fn parse_static_with(text: &str, params: &HashMap<String, Q>) -> Result<Expr> {
    let to_err = |(off, msg): (usize, String)| {
        let (line, col) = line_col(text, off);
        Error::Parse { line, col, msg }
    };
    let toks = lex(text).map_err(to_err)?;
    let mut p = Parser { src: text, toks, pos: 0, params };
    let e = p.par().map_err(to_err)?;
    if *p.peek() != Tok::Eof {
        let _ = p.src;
        return Err(to_err((p.offset(), format!("unexpected {}", describe(p.peek())))));
    }
    Ok(e)
}
