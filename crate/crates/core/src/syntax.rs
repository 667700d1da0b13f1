//! Lexer, parser and printer for the λΠ surface language.
//!
//! ```text
//! Program ::= (Command ";")*
//! Command ::= "check" Term ":" Term | "compute" Term ":" Term
//! Term    ::= "lam" Pattern "." Term
//!           | "fun" "(" Pattern ":" Term ")" "->" Term
//!           | Term1
//! Term1   ::= Term1 Term2 | "first" Term2 | "second" Term2 | Term2
//! Term2   ::= VarIdent | "U" | "(" Term ")" | "(" Term "," Term ")"
//! Pattern ::= "_" | VarIdent | "(" Pattern "," Pattern ")"
//! ```
//!
//! Comments run from `--` to the end of the line, or between `{-` and `-}`
//! (no nesting).

use std::fmt;

use thiserror::Error;

use crate::naive::{is_ident_continue, is_ident_start, NaivePattern, NaiveScopedTerm, NaiveTerm, VarIdent};

/// A source position, both components starting at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: syntax error: expected {expected}, found {found}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub expected: String,
    pub found: String,
}

impl SyntaxError {
    fn at(pos: Pos, expected: impl Into<String>, found: impl Into<String>) -> Self {
        SyntaxError {
            line: pos.line,
            col: pos.col,
            expected: expected.into(),
            found: found.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Check(NaiveTerm, NaiveTerm),
    Compute(NaiveTerm, NaiveTerm),
}

pub type Program = Vec<Command>;

/// A command with the positions of its variable occurrences, in source
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedCommand {
    pub command: Command,
    pub pos: Pos,
    pub occurrences: Vec<(VarIdent, Pos)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lam,
    Fun,
    First,
    Second,
    Universe,
    Check,
    Compute,
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Arrow,
    Semi,
    Underscore,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(x) => return write!(f, "identifier `{x}`"),
            Tok::Lam => "`lam`",
            Tok::Fun => "`fun`",
            Tok::First => "`first`",
            Tok::Second => "`second`",
            Tok::Universe => "`U`",
            Tok::Check => "`check`",
            Tok::Compute => "`compute`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::Colon => "`:`",
            Tok::Arrow => "`->`",
            Tok::Semi => "`;`",
            Tok::Underscore => "`_`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "lam" => Tok::Lam,
        "fun" => Tok::Fun,
        "first" => Tok::First,
        "second" => Tok::Second,
        "U" => Tok::Universe,
        "check" => Tok::Check,
        "compute" => Tok::Compute,
        _ => return None,
    })
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut pos = Pos { line: 1, col: 1 };
    let advance = |i: &mut usize, pos: &mut Pos| {
        if chars[*i] == '\n' {
            pos.line += 1;
            pos.col = 1;
        } else {
            pos.col += 1;
        }
        *i += 1;
    };
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        let start = pos;
        if c.is_whitespace() {
            advance(&mut i, &mut pos);
        } else if c == '-' && next == Some('-') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut pos);
            }
        } else if c == '{' && next == Some('-') {
            advance(&mut i, &mut pos);
            advance(&mut i, &mut pos);
            loop {
                if i >= chars.len() {
                    return Err(SyntaxError::at(start, "`-}` closing the comment", "end of input"));
                }
                if chars[i] == '-' && chars.get(i + 1) == Some(&'}') {
                    advance(&mut i, &mut pos);
                    advance(&mut i, &mut pos);
                    break;
                }
                advance(&mut i, &mut pos);
            }
        } else if c == '-' && next == Some('>') {
            advance(&mut i, &mut pos);
            advance(&mut i, &mut pos);
            out.push((Tok::Arrow, start));
        } else if is_ident_start(c) {
            let from = i;
            while i < chars.len() && is_ident_continue(chars[i]) {
                advance(&mut i, &mut pos);
            }
            let word: String = chars[from..i].iter().collect();
            out.push((keyword(&word).unwrap_or(Tok::Ident(word)), start));
        } else {
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                ':' => Tok::Colon,
                ';' => Tok::Semi,
                '_' => Tok::Underscore,
                _ => return Err(SyntaxError::at(start, "a token", format!("`{c}`"))),
            };
            advance(&mut i, &mut pos);
            out.push((tok, start));
        }
    }
    out.push((Tok::Eof, pos));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    occurrences: Vec<(VarIdent, Pos)>,
}

impl Parser {
    fn new(text: &str) -> Result<Self, SyntaxError> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
            occurrences: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if t.0 != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> SyntaxError {
        SyntaxError::at(self.pos(), expected, self.peek().to_string())
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&tok.to_string()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<VarIdent, SyntaxError> {
        match self.peek() {
            Tok::Ident(x) => {
                let x = VarIdent::new(x.clone()).expect("lexer yields valid identifiers");
                self.bump();
                Ok(x)
            }
            _ => Err(self.error(what)),
        }
    }

    fn program(&mut self) -> Result<Vec<LocatedCommand>, SyntaxError> {
        let mut out = Vec::new();
        while *self.peek() != Tok::Eof {
            let pos = self.pos();
            self.occurrences.clear();
            let command = match self.peek() {
                Tok::Check => {
                    self.bump();
                    let (t, ty) = self.typed()?;
                    Command::Check(t, ty)
                }
                Tok::Compute => {
                    self.bump();
                    let (t, ty) = self.typed()?;
                    Command::Compute(t, ty)
                }
                _ => return Err(self.error("`check` or `compute`")),
            };
            self.expect(Tok::Semi)?;
            out.push(LocatedCommand {
                command,
                pos,
                occurrences: std::mem::take(&mut self.occurrences),
            });
        }
        Ok(out)
    }

    fn typed(&mut self) -> Result<(NaiveTerm, NaiveTerm), SyntaxError> {
        let t = self.term()?;
        self.expect(Tok::Colon)?;
        let ty = self.term()?;
        Ok((t, ty))
    }

    fn term(&mut self) -> Result<NaiveTerm, SyntaxError> {
        match self.peek() {
            Tok::Lam => {
                self.bump();
                let p = self.pattern()?;
                self.expect(Tok::Dot)?;
                let body = self.term()?;
                Ok(NaiveTerm::Lam(p, NaiveScopedTerm::new(body)))
            }
            Tok::Fun => {
                self.bump();
                self.expect(Tok::LParen)?;
                let p = self.pattern()?;
                self.expect(Tok::Colon)?;
                let dom = self.term()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Arrow)?;
                let cod = self.term()?;
                Ok(NaiveTerm::pi(p, dom, cod))
            }
            _ => self.term1(),
        }
    }

    fn term1(&mut self) -> Result<NaiveTerm, SyntaxError> {
        let mut head = match self.peek() {
            Tok::First => {
                self.bump();
                NaiveTerm::first(self.term2()?)
            }
            Tok::Second => {
                self.bump();
                NaiveTerm::second(self.term2()?)
            }
            _ => self.term2()?,
        };
        while matches!(self.peek(), Tok::Ident(_) | Tok::Universe | Tok::LParen) {
            head = NaiveTerm::app(head, self.term2()?);
        }
        Ok(head)
    }

    fn term2(&mut self) -> Result<NaiveTerm, SyntaxError> {
        match self.peek() {
            Tok::Ident(_) => {
                let pos = self.pos();
                let x = self.ident("a term")?;
                self.occurrences.push((x.clone(), pos));
                Ok(NaiveTerm::Var(x))
            }
            Tok::Universe => {
                self.bump();
                Ok(NaiveTerm::Universe)
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                        let r = self.term()?;
                        self.expect(Tok::RParen)?;
                        Ok(NaiveTerm::pair(t, r))
                    }
                    Tok::RParen => {
                        self.bump();
                        Ok(t)
                    }
                    _ => Err(self.error("`)` or `,`")),
                }
            }
            _ => Err(self.error("a term")),
        }
    }

    fn pattern(&mut self) -> Result<NaivePattern, SyntaxError> {
        match self.peek() {
            Tok::Underscore => {
                self.bump();
                Ok(NaivePattern::Wildcard)
            }
            Tok::Ident(_) => Ok(NaivePattern::Var(self.ident("a pattern")?)),
            Tok::LParen => {
                self.bump();
                let l = self.pattern()?;
                self.expect(Tok::Comma)?;
                let r = self.pattern()?;
                self.expect(Tok::RParen)?;
                Ok(NaivePattern::pair(l, r))
            }
            _ => Err(self.error("a pattern")),
        }
    }
}

pub fn parse_program(text: &str) -> Result<Program, SyntaxError> {
    Ok(parse_program_located(text)?.into_iter().map(|c| c.command).collect())
}

pub fn parse_program_located(text: &str) -> Result<Vec<LocatedCommand>, SyntaxError> {
    Parser::new(text)?.program()
}

/// Parses a single term spanning the whole input.
pub fn parse_term(text: &str) -> Result<NaiveTerm, SyntaxError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of input"));
    }
    Ok(t)
}

/// The position of the first occurrence in `located` that is free in its
/// command, if any.
pub fn first_free_occurrence(located: &LocatedCommand) -> Option<(VarIdent, Pos)> {
    let mut index = 0;
    let mut bound = Vec::new();
    let (t, ty) = match &located.command {
        Command::Check(t, ty) | Command::Compute(t, ty) => (t, ty),
    };
    [t, ty]
        .into_iter()
        .find_map(|term| free_occurrence(term, &mut bound, &mut index))
        .map(|i| located.occurrences[i].clone())
}

fn free_occurrence<'a>(t: &'a NaiveTerm, bound: &mut Vec<&'a VarIdent>, index: &mut usize) -> Option<usize> {
    match t {
        NaiveTerm::Var(x) => {
            let here = *index;
            *index += 1;
            (!bound.contains(&x)).then_some(here)
        }
        NaiveTerm::Universe => None,
        NaiveTerm::First(a) | NaiveTerm::Second(a) => free_occurrence(a, bound, index),
        NaiveTerm::Pair(a, b) | NaiveTerm::App(a, b) => {
            free_occurrence(a, bound, index).or_else(|| free_occurrence(b, bound, index))
        }
        NaiveTerm::Lam(p, body) => under(p, &body.0, bound, index),
        NaiveTerm::Pi(p, dom, body) => free_occurrence(dom, bound, index).or_else(|| under(p, &body.0, bound, index)),
    }
}

fn under<'a>(
    p: &'a NaivePattern,
    body: &'a NaiveTerm,
    bound: &mut Vec<&'a VarIdent>,
    index: &mut usize,
) -> Option<usize> {
    let mark = bound.len();
    bound.extend(p.idents());
    let found = free_occurrence(body, bound, index);
    bound.truncate(mark);
    found
}

pub fn pretty_pattern(p: &NaivePattern) -> String {
    let mut out = String::new();
    write_pattern(p, &mut out);
    out
}

fn write_pattern(p: &NaivePattern, out: &mut String) {
    match p {
        NaivePattern::Wildcard => out.push('_'),
        NaivePattern::Var(x) => out.push_str(x.as_str()),
        NaivePattern::Pair(l, r) => {
            out.push('(');
            write_pattern(l, out);
            out.push_str(", ");
            write_pattern(r, out);
            out.push(')');
        }
    }
}

pub fn pretty_term(t: &NaiveTerm) -> String {
    let mut out = String::new();
    write_term(t, 0, &mut out);
    out
}

fn write_term(t: &NaiveTerm, prec: u8, out: &mut String) {
    let level = match t {
        NaiveTerm::Lam(..) | NaiveTerm::Pi(..) => 0,
        NaiveTerm::App(..) | NaiveTerm::First(_) | NaiveTerm::Second(_) => 1,
        NaiveTerm::Var(_) | NaiveTerm::Universe | NaiveTerm::Pair(..) => 2,
    };
    let parens = level < prec;
    if parens {
        out.push('(');
    }
    match t {
        NaiveTerm::Var(x) => out.push_str(x.as_str()),
        NaiveTerm::Universe => out.push('U'),
        NaiveTerm::Pair(l, r) => {
            out.push('(');
            write_term(l, 0, out);
            out.push_str(", ");
            write_term(r, 0, out);
            out.push(')');
        }
        NaiveTerm::First(a) => {
            out.push_str("first ");
            write_term(a, 2, out);
        }
        NaiveTerm::Second(a) => {
            out.push_str("second ");
            write_term(a, 2, out);
        }
        NaiveTerm::App(f, x) => {
            write_term(f, 1, out);
            out.push(' ');
            write_term(x, 2, out);
        }
        NaiveTerm::Lam(p, body) => {
            out.push_str("lam ");
            write_pattern(p, out);
            out.push_str(" . ");
            write_term(&body.0, 0, out);
        }
        NaiveTerm::Pi(p, dom, body) => {
            out.push_str("fun (");
            write_pattern(p, out);
            out.push_str(" : ");
            write_term(dom, 0, out);
            out.push_str(") -> ");
            write_term(&body.0, 0, out);
        }
    }
    if parens {
        out.push(')');
    }
}

pub fn pretty_command(c: &Command) -> String {
    let (kw, t, ty) = match c {
        Command::Check(t, ty) => ("check", t, ty),
        Command::Compute(t, ty) => ("compute", t, ty),
    };
    format!("{kw} {} : {} ;", pretty_term(t), pretty_term(ty))
}

/// One command per line.
pub fn pretty_program(p: &[Command]) -> String {
    p.iter().map(|c| pretty_command(c) + "\n").collect()
}
