//! Naive, string-named λΠ syntax and its conversion to and from the foil.
//!
//! The naive representation is organized in the four syntactic categories
//! the conversion relies on: variable identifiers ([`VarIdent`]), patterns
//! ([`NaivePattern`]), scoped terms ([`NaiveScopedTerm`]) and terms
//! ([`NaiveTerm`]).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::direct::DirectTerm;
use crate::foil::{extend_scope, fresh_binder, Name, RawName, Scope};
use crate::pattern::Pattern;

/// Words the surface syntax reserves; they are not identifiers.
pub const RESERVED_WORDS: [&str; 7] = ["lam", "fun", "first", "second", "U", "check", "compute"];

/// A variable identifier: a letter followed by letters, digits, `_` or `'`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarIdent(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` is not a valid identifier")]
pub struct InvalidIdent(pub String);

impl VarIdent {
    pub fn new(text: impl Into<String>) -> Result<Self, InvalidIdent> {
        let text = text.into();
        if is_ident(&text) {
            Ok(VarIdent(text))
        } else {
            Err(InvalidIdent(text))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_alphabetic()
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn is_ident(text: &str) -> bool {
    let mut chars = text.chars();
    matches!(chars.next(), Some(c) if is_ident_start(c))
        && chars.all(is_ident_continue)
        && !RESERVED_WORDS.contains(&text)
}

impl FromStr for VarIdent {
    type Err = InvalidIdent;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VarIdent::new(s)
    }
}

impl fmt::Display for VarIdent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NaivePattern {
    Wildcard,
    Var(VarIdent),
    Pair(Box<NaivePattern>, Box<NaivePattern>),
}

impl NaivePattern {
    pub fn pair(l: NaivePattern, r: NaivePattern) -> Self {
        NaivePattern::Pair(Box::new(l), Box::new(r))
    }

    /// Bound identifiers, left to right (duplicates kept).
    pub fn idents(&self) -> Vec<&VarIdent> {
        let mut out = Vec::new();
        fn go<'a>(p: &'a NaivePattern, out: &mut Vec<&'a VarIdent>) {
            match p {
                NaivePattern::Wildcard => {}
                NaivePattern::Var(x) => out.push(x),
                NaivePattern::Pair(l, r) => {
                    go(l, out);
                    go(r, out);
                }
            }
        }
        go(self, &mut out);
        out
    }
}

/// A term under the binders of the enclosing constructor's pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NaiveScopedTerm(pub Box<NaiveTerm>);

impl NaiveScopedTerm {
    pub fn new(t: NaiveTerm) -> Self {
        NaiveScopedTerm(Box::new(t))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NaiveTerm {
    Var(VarIdent),
    Pair(Box<NaiveTerm>, Box<NaiveTerm>),
    First(Box<NaiveTerm>),
    Second(Box<NaiveTerm>),
    App(Box<NaiveTerm>, Box<NaiveTerm>),
    Lam(NaivePattern, NaiveScopedTerm),
    Pi(NaivePattern, Box<NaiveTerm>, NaiveScopedTerm),
    Universe,
}

impl NaiveTerm {
    pub fn pair(l: NaiveTerm, r: NaiveTerm) -> Self {
        NaiveTerm::Pair(Box::new(l), Box::new(r))
    }

    pub fn first(t: NaiveTerm) -> Self {
        NaiveTerm::First(Box::new(t))
    }

    pub fn second(t: NaiveTerm) -> Self {
        NaiveTerm::Second(Box::new(t))
    }

    pub fn app(f: NaiveTerm, x: NaiveTerm) -> Self {
        NaiveTerm::App(Box::new(f), Box::new(x))
    }

    /// Left-nested application of `f` to `args`.
    pub fn apps(f: NaiveTerm, args: impl IntoIterator<Item = NaiveTerm>) -> Self {
        args.into_iter().fold(f, NaiveTerm::app)
    }

    pub fn lam(p: NaivePattern, body: NaiveTerm) -> Self {
        NaiveTerm::Lam(p, NaiveScopedTerm::new(body))
    }

    pub fn pi(p: NaivePattern, dom: NaiveTerm, cod: NaiveTerm) -> Self {
        NaiveTerm::Pi(p, Box::new(dom), NaiveScopedTerm::new(cod))
    }

    pub fn free_idents(&self) -> BTreeSet<VarIdent> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    /// Number of nodes, patterns excluded.
    pub fn size(&self) -> usize {
        match self {
            NaiveTerm::Var(_) | NaiveTerm::Universe => 1,
            NaiveTerm::First(t) | NaiveTerm::Second(t) => 1 + t.size(),
            NaiveTerm::Pair(a, b) | NaiveTerm::App(a, b) => 1 + a.size() + b.size(),
            NaiveTerm::Lam(_, b) => 1 + b.0.size(),
            NaiveTerm::Pi(_, a, b) => 1 + a.size() + b.0.size(),
        }
    }
}

fn collect_free<'a>(t: &'a NaiveTerm, bound: &mut Vec<&'a VarIdent>, out: &mut BTreeSet<VarIdent>) {
    match t {
        NaiveTerm::Var(x) => {
            if !bound.contains(&x) {
                out.insert(x.clone());
            }
        }
        NaiveTerm::Universe => {}
        NaiveTerm::First(a) | NaiveTerm::Second(a) => collect_free(a, bound, out),
        NaiveTerm::Pair(a, b) | NaiveTerm::App(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        NaiveTerm::Lam(p, body) => {
            let mark = bound.len();
            bound.extend(p.idents());
            collect_free(&body.0, bound, out);
            bound.truncate(mark);
        }
        NaiveTerm::Pi(p, dom, body) => {
            collect_free(dom, bound, out);
            let mark = bound.len();
            bound.extend(p.idents());
            collect_free(&body.0, bound, out);
            bound.truncate(mark);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(VarIdent),
    #[error("identifier `{0}` is bound twice in one pattern")]
    DuplicateBinder(VarIdent),
}

/// Identifier bindings introduced by a pattern, in binding order.
pub type Bindings = Vec<(VarIdent, Name)>;

/// Converts a naive term in `scope` to the foil.  Identifiers bound inside
/// `t` shadow outer ones; identifiers free in `t` are resolved with
/// `rename`.  For closed terms pass a renaming that always fails and the
/// empty scope.
pub fn to_foil_term(
    rename: &dyn Fn(&VarIdent) -> Option<Name>,
    scope: &Scope,
    t: &NaiveTerm,
) -> Result<DirectTerm, ConvertError> {
    term_to_foil(rename, scope, &mut Vec::new(), t)
}

pub fn to_foil_scoped_term(
    rename: &dyn Fn(&VarIdent) -> Option<Name>,
    scope: &Scope,
    t: &NaiveScopedTerm,
) -> Result<DirectTerm, ConvertError> {
    to_foil_term(rename, scope, &t.0)
}

/// Allocates fresh binders for `p` left to right.  Returns the foil
/// pattern, its inner scope and the identifier bindings for the body.
pub fn to_foil_pattern(
    _rename: &dyn Fn(&VarIdent) -> Option<Name>,
    scope: &Scope,
    p: &NaivePattern,
) -> Result<(Pattern, Scope, Bindings), ConvertError> {
    let mut bindings = Vec::new();
    let mut inner = scope.clone();
    let pattern = pattern_to_foil(&mut inner, &mut bindings, p)?;
    Ok((pattern, inner, bindings))
}

fn pattern_to_foil(scope: &mut Scope, bindings: &mut Bindings, p: &NaivePattern) -> Result<Pattern, ConvertError> {
    Ok(match p {
        NaivePattern::Wildcard => Pattern::Wildcard,
        NaivePattern::Var(x) => {
            if bindings.iter().any(|(y, _)| y == x) {
                return Err(ConvertError::DuplicateBinder(x.clone()));
            }
            let binder = fresh_binder(scope);
            *scope = extend_scope(binder, scope);
            bindings.push((x.clone(), binder.name()));
            Pattern::Var(binder)
        }
        NaivePattern::Pair(l, r) => {
            let l = pattern_to_foil(scope, bindings, l)?;
            let r = pattern_to_foil(scope, bindings, r)?;
            Pattern::pair(l, r)
        }
    })
}

fn term_to_foil(
    rename: &dyn Fn(&VarIdent) -> Option<Name>,
    scope: &Scope,
    env: &mut Bindings,
    t: &NaiveTerm,
) -> Result<DirectTerm, ConvertError> {
    let go = |t: &NaiveTerm, env: &mut Bindings| term_to_foil(rename, scope, env, t);
    Ok(match t {
        NaiveTerm::Var(x) => match env.iter().rev().find(|(y, _)| y == x) {
            Some((_, name)) => DirectTerm::Var(*name),
            None => DirectTerm::Var(rename(x).ok_or_else(|| ConvertError::UnboundVariable(x.clone()))?),
        },
        NaiveTerm::Pair(a, b) => DirectTerm::pair(go(a, env)?, go(b, env)?),
        NaiveTerm::First(a) => DirectTerm::first(go(a, env)?),
        NaiveTerm::Second(a) => DirectTerm::second(go(a, env)?),
        NaiveTerm::App(a, b) => DirectTerm::app(go(a, env)?, go(b, env)?),
        NaiveTerm::Lam(p, body) => {
            let (pattern, _, body) = under_pattern(rename, scope, env, p, body)?;
            DirectTerm::lam(pattern, body)
        }
        NaiveTerm::Pi(p, dom, body) => {
            let dom = go(dom, env)?;
            let (pattern, _, body) = under_pattern(rename, scope, env, p, body)?;
            DirectTerm::pi(pattern, dom, body)
        }
        NaiveTerm::Universe => DirectTerm::Universe,
    })
}

fn under_pattern(
    rename: &dyn Fn(&VarIdent) -> Option<Name>,
    scope: &Scope,
    env: &mut Bindings,
    p: &NaivePattern,
    body: &NaiveScopedTerm,
) -> Result<(Pattern, Scope, DirectTerm), ConvertError> {
    let (pattern, inner, bindings) = to_foil_pattern(rename, scope, p)?;
    let mark = env.len();
    env.extend(bindings);
    let body = term_to_foil(rename, &inner, env, &body.0);
    env.truncate(mark);
    Ok((pattern, inner, body?))
}

/// Converts a closed naive term.
pub fn closed_to_foil(t: &NaiveTerm) -> Result<DirectTerm, ConvertError> {
    to_foil_term(&|_| None, &Scope::empty(), t)
}

/// An open naive term converted to the foil: free identifiers are assigned
/// raw names `0, 1, ...` in identifier order.
#[derive(Debug, Clone)]
pub struct OpenTerm {
    pub scope: Scope,
    pub term: DirectTerm,
    pub free: Bindings,
}

impl OpenTerm {
    /// The identifier for a free raw name, falling back to [`default_ident`].
    pub fn ident_of(&self, raw: RawName) -> VarIdent {
        self.free
            .iter()
            .find(|(_, n)| n.raw() == raw)
            .map(|(x, _)| x.clone())
            .unwrap_or_else(|| default_ident(raw))
    }
}

pub fn open_to_foil(t: &NaiveTerm) -> Result<OpenTerm, ConvertError> {
    let free: Bindings = t
        .free_idents()
        .into_iter()
        .enumerate()
        .map(|(i, x)| (x, Name::from_raw(RawName(i))))
        .collect();
    let scope = Scope::from_raw_names(free.iter().map(|(_, n)| n.raw()));
    let rename = |x: &VarIdent| free.iter().find(|(y, _)| y == x).map(|(_, n)| *n);
    let term = to_foil_term(&rename, &scope, t)?;
    Ok(OpenTerm { scope, term, free })
}

/// The default name scheme for raw names: `x` followed by the number.
///
/// These names can clash with user identifiers; use it only where the
/// original names have been forgotten.
pub fn default_ident(raw: RawName) -> VarIdent {
    VarIdent(format!("x{}", raw.0))
}

pub fn from_foil_term(raw_to_ident: &dyn Fn(RawName) -> VarIdent, t: &DirectTerm) -> NaiveTerm {
    let go = |t: &DirectTerm| from_foil_term(raw_to_ident, t);
    match t {
        DirectTerm::Var(n) => NaiveTerm::Var(raw_to_ident(n.raw())),
        DirectTerm::Pair(a, b) => NaiveTerm::pair(go(a), go(b)),
        DirectTerm::First(a) => NaiveTerm::first(go(a)),
        DirectTerm::Second(a) => NaiveTerm::second(go(a)),
        DirectTerm::App(a, b) => NaiveTerm::app(go(a), go(b)),
        DirectTerm::Lam(p, body) => NaiveTerm::Lam(
            from_foil_pattern(raw_to_ident, p),
            from_foil_scoped_term(raw_to_ident, body),
        ),
        DirectTerm::Pi(p, dom, body) => NaiveTerm::Pi(
            from_foil_pattern(raw_to_ident, p),
            Box::new(go(dom)),
            from_foil_scoped_term(raw_to_ident, body),
        ),
        DirectTerm::Universe => NaiveTerm::Universe,
    }
}

pub fn from_foil_pattern(raw_to_ident: &dyn Fn(RawName) -> VarIdent, p: &Pattern) -> NaivePattern {
    match p {
        Pattern::Wildcard => NaivePattern::Wildcard,
        Pattern::Var(b) => NaivePattern::Var(raw_to_ident(b.raw())),
        Pattern::Pair(l, r) => {
            NaivePattern::pair(from_foil_pattern(raw_to_ident, l), from_foil_pattern(raw_to_ident, r))
        }
    }
}

pub fn from_foil_scoped_term(raw_to_ident: &dyn Fn(RawName) -> VarIdent, t: &DirectTerm) -> NaiveScopedTerm {
    NaiveScopedTerm::new(from_foil_term(raw_to_ident, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foil::{NameBinder, ScopeCheck};

    fn x(s: &str) -> VarIdent {
        VarIdent::new(s).unwrap()
    }

    fn var(s: &str) -> NaiveTerm {
        NaiveTerm::Var(x(s))
    }

    fn pvar(s: &str) -> NaivePattern {
        NaivePattern::Var(x(s))
    }

    fn pb(r: usize) -> Pattern {
        Pattern::Var(NameBinder::from_raw(RawName(r)))
    }

    #[test]
    fn identifiers() {
        assert!(VarIdent::new("x").is_ok());
        assert!(VarIdent::new("f_1'").is_ok());
        assert!(VarIdent::new("1x").is_err());
        assert!(VarIdent::new("").is_err());
        assert!(VarIdent::new("_x").is_err());
        assert!(VarIdent::new("lam").is_err());
        assert!(VarIdent::new("U").is_err());
        assert!(VarIdent::new("Ux").is_ok());
    }

    #[test]
    fn closed_identity() {
        let t = NaiveTerm::lam(pvar("x"), var("x"));
        let d = closed_to_foil(&t).unwrap();
        assert_eq!(d, DirectTerm::lam(pb(0), DirectTerm::var(0)));
        assert!(d.check_distinct(&Scope::empty()).is_ok());
    }

    #[test]
    fn shadowing_resolves_innermost() {
        let t = NaiveTerm::lam(pvar("x"), NaiveTerm::lam(pvar("x"), var("x")));
        let d = closed_to_foil(&t).unwrap();
        assert_eq!(d, DirectTerm::lam(pb(0), DirectTerm::lam(pb(1), DirectTerm::var(1))));
    }

    #[test]
    fn unbound_variable() {
        let t = NaiveTerm::lam(pvar("x"), var("y"));
        assert_eq!(closed_to_foil(&t), Err(ConvertError::UnboundVariable(x("y"))));
    }

    #[test]
    fn patterns() {
        let none = |_: &VarIdent| None;
        let (p, s, b) = to_foil_pattern(&none, &Scope::empty(), &NaivePattern::Wildcard).unwrap();
        assert_eq!((p, s, b), (Pattern::Wildcard, Scope::empty(), vec![]));
        let (p, s, b) = to_foil_pattern(&none, &Scope::empty(), &NaivePattern::pair(pvar("x"), pvar("y"))).unwrap();
        assert_eq!(p, Pattern::pair(pb(0), pb(1)));
        assert_eq!(s, Scope::from_raw_names([RawName(0), RawName(1)]));
        assert_eq!(
            b,
            vec![
                (x("x"), Name::from_raw(RawName(0))),
                (x("y"), Name::from_raw(RawName(1)))
            ]
        );
        let dup = to_foil_pattern(&none, &Scope::empty(), &NaivePattern::pair(pvar("x"), pvar("x")));
        assert_eq!(dup.unwrap_err(), ConvertError::DuplicateBinder(x("x")));
    }

    #[test]
    fn from_foil_default_names() {
        let d = DirectTerm::lam(pb(0), DirectTerm::var(0));
        assert_eq!(
            from_foil_term(&default_ident, &d),
            NaiveTerm::lam(pvar("x0"), var("x0"))
        );
        assert_eq!(
            from_foil_term(&default_ident, &DirectTerm::Universe),
            NaiveTerm::Universe
        );
    }

    #[test]
    fn open_terms_get_sorted_names() {
        let t = NaiveTerm::app(var("b"), var("a"));
        let open = open_to_foil(&t).unwrap();
        assert_eq!(open.term, DirectTerm::app(DirectTerm::var(1), DirectTerm::var(0)));
        assert_eq!(open.ident_of(RawName(1)), x("b"));
        assert_eq!(from_foil_term(&|r| open.ident_of(r), &open.term), t);
    }

    #[test]
    fn free_idents_respect_patterns() {
        let t = NaiveTerm::pi(
            NaivePattern::pair(pvar("a"), NaivePattern::Wildcard),
            var("a"),
            NaiveTerm::app(var("a"), var("b")),
        );
        assert_eq!(t.free_idents(), [x("a"), x("b")].into_iter().collect());
    }
}
