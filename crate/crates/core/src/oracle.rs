//! Reference normalizers that share no code with the foil: one on naive
//! string names with set-based renaming, one on de Bruijn indices.  Both
//! use the same normal-order strategy and projection-based pattern beta as
//! the foil normalizers, so all implementations agree up to alpha.
//!
//! [`DbTerm`] doubles as the canonical alpha-representative: two terms are
//! alpha-equivalent exactly when their de Bruijn forms are equal.
//!
//! De Bruijn layout: a pattern with `k` variables binds indices `k-1` down
//! to `0`, so its last variable is the innermost.  Free variables stay
//! named.  Canonical encoding tags:
//!
//! | value           | bytes                          |
//! |-----------------|--------------------------------|
//! | `BVar i`        | `0x30`, varint i               |
//! | `FVar x`        | `0x31`, varint len, utf-8 x    |
//! | `App f x`       | `0x32`, f, x                   |
//! | `Lam p b`       | `0x33`, p, b                   |
//! | `Pi p a b`      | `0x34`, p, a, b                |
//! | `Pair a b`      | `0x35`, a, b                   |
//! | `First a`       | `0x36`, a                      |
//! | `Second a`      | `0x37`, a                      |
//! | `Universe`      | `0x38`                         |
//! | pattern `_`     | `0x3a`                         |
//! | pattern var     | `0x3b`                         |
//! | pattern pair    | `0x3c`, l, r                   |

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::direct::DirectTerm;
use crate::encode::{write_str, write_varint, CanonicalEncode};
use crate::foil::RawName;
use crate::fuel::{Fuel, NormalizeError};
use crate::lambda_pi::{view, FreeTerm, View};
use crate::naive::{default_ident, NaivePattern, NaiveScopedTerm, NaiveTerm, VarIdent};
use crate::pattern::Pattern;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DbPattern {
    Wildcard,
    Var,
    Pair(Box<DbPattern>, Box<DbPattern>),
}

impl DbPattern {
    pub fn pair(l: DbPattern, r: DbPattern) -> Self {
        DbPattern::Pair(Box::new(l), Box::new(r))
    }

    pub fn binder_count(&self) -> usize {
        match self {
            DbPattern::Wildcard => 0,
            DbPattern::Var => 1,
            DbPattern::Pair(l, r) => l.binder_count() + r.binder_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DbTerm {
    BVar(usize),
    FVar(VarIdent),
    App(Arc<DbTerm>, Arc<DbTerm>),
    Lam(DbPattern, Arc<DbTerm>),
    Pi(DbPattern, Arc<DbTerm>, Arc<DbTerm>),
    Pair(Arc<DbTerm>, Arc<DbTerm>),
    First(Arc<DbTerm>),
    Second(Arc<DbTerm>),
    Universe,
}

impl DbTerm {
    pub fn app(f: DbTerm, x: DbTerm) -> Self {
        DbTerm::App(Arc::new(f), Arc::new(x))
    }

    pub fn lam(p: DbPattern, body: DbTerm) -> Self {
        DbTerm::Lam(p, Arc::new(body))
    }

    pub fn pi(p: DbPattern, dom: DbTerm, cod: DbTerm) -> Self {
        DbTerm::Pi(p, Arc::new(dom), Arc::new(cod))
    }

    pub fn pair(l: DbTerm, r: DbTerm) -> Self {
        DbTerm::Pair(Arc::new(l), Arc::new(r))
    }

    pub fn first(t: DbTerm) -> Self {
        DbTerm::First(Arc::new(t))
    }

    pub fn second(t: DbTerm) -> Self {
        DbTerm::Second(Arc::new(t))
    }

    pub fn size(&self) -> usize {
        match self {
            DbTerm::BVar(_) | DbTerm::FVar(_) | DbTerm::Universe => 1,
            DbTerm::First(a) | DbTerm::Second(a) | DbTerm::Lam(_, a) => 1 + a.size(),
            DbTerm::App(a, b) | DbTerm::Pair(a, b) | DbTerm::Pi(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn free_idents(&self) -> BTreeSet<VarIdent> {
        let mut out = BTreeSet::new();
        fn go(t: &DbTerm, out: &mut BTreeSet<VarIdent>) {
            match t {
                DbTerm::FVar(x) => {
                    out.insert(x.clone());
                }
                DbTerm::BVar(_) | DbTerm::Universe => {}
                DbTerm::First(a) | DbTerm::Second(a) | DbTerm::Lam(_, a) => go(a, out),
                DbTerm::App(a, b) | DbTerm::Pair(a, b) | DbTerm::Pi(_, a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        go(self, &mut out);
        out
    }
}

impl CanonicalEncode for DbPattern {
    fn encode_into(&self, out: &mut Vec<u8>) {
        match self {
            DbPattern::Wildcard => out.push(0x3a),
            DbPattern::Var => out.push(0x3b),
            DbPattern::Pair(l, r) => {
                out.push(0x3c);
                l.encode_into(out);
                r.encode_into(out);
            }
        }
    }
}

impl CanonicalEncode for DbTerm {
    fn encode_into(&self, out: &mut Vec<u8>) {
        match self {
            DbTerm::BVar(i) => {
                out.push(0x30);
                write_varint(out, *i as u64);
            }
            DbTerm::FVar(x) => {
                out.push(0x31);
                write_str(out, x.as_str());
            }
            DbTerm::App(f, x) => {
                out.push(0x32);
                f.encode_into(out);
                x.encode_into(out);
            }
            DbTerm::Lam(p, b) => {
                out.push(0x33);
                p.encode_into(out);
                b.encode_into(out);
            }
            DbTerm::Pi(p, a, b) => {
                out.push(0x34);
                p.encode_into(out);
                a.encode_into(out);
                b.encode_into(out);
            }
            DbTerm::Pair(a, b) => {
                out.push(0x35);
                a.encode_into(out);
                b.encode_into(out);
            }
            DbTerm::First(a) => {
                out.push(0x36);
                a.encode_into(out);
            }
            DbTerm::Second(a) => {
                out.push(0x37);
                a.encode_into(out);
            }
            DbTerm::Universe => out.push(0x38),
        }
    }
}

/// Conversion to the canonical de Bruijn form.
pub trait ToDeBruijn {
    fn to_debruijn(&self) -> DbTerm;
}

/// Alpha-equivalence, decided on de Bruijn forms.
pub fn alpha_eq<A: ToDeBruijn + ?Sized, B: ToDeBruijn + ?Sized>(a: &A, b: &B) -> bool {
    a.to_debruijn() == b.to_debruijn()
}

impl ToDeBruijn for DbTerm {
    fn to_debruijn(&self) -> DbTerm {
        self.clone()
    }
}

impl ToDeBruijn for NaiveTerm {
    fn to_debruijn(&self) -> DbTerm {
        naive_to_db(self, &mut Vec::new())
    }
}

fn lookup<K: PartialEq>(env: &[K], key: &K) -> Option<usize> {
    env.iter().rev().position(|k| k == key)
}

fn naive_pattern_to_db<'a>(p: &'a NaivePattern, env: &mut Vec<&'a VarIdent>) -> DbPattern {
    match p {
        NaivePattern::Wildcard => DbPattern::Wildcard,
        NaivePattern::Var(x) => {
            env.push(x);
            DbPattern::Var
        }
        NaivePattern::Pair(l, r) => {
            let l = naive_pattern_to_db(l, env);
            DbPattern::pair(l, naive_pattern_to_db(r, env))
        }
    }
}

fn naive_to_db<'a>(t: &'a NaiveTerm, env: &mut Vec<&'a VarIdent>) -> DbTerm {
    match t {
        NaiveTerm::Var(x) => match lookup(env, &x) {
            Some(i) => DbTerm::BVar(i),
            None => DbTerm::FVar(x.clone()),
        },
        NaiveTerm::Universe => DbTerm::Universe,
        NaiveTerm::App(f, x) => DbTerm::app(naive_to_db(f, env), naive_to_db(x, env)),
        NaiveTerm::Pair(a, b) => DbTerm::pair(naive_to_db(a, env), naive_to_db(b, env)),
        NaiveTerm::First(a) => DbTerm::first(naive_to_db(a, env)),
        NaiveTerm::Second(a) => DbTerm::second(naive_to_db(a, env)),
        NaiveTerm::Lam(p, body) => {
            let mark = env.len();
            let p = naive_pattern_to_db(p, env);
            let body = naive_to_db(&body.0, env);
            env.truncate(mark);
            DbTerm::lam(p, body)
        }
        NaiveTerm::Pi(p, dom, body) => {
            let dom = naive_to_db(dom, env);
            let mark = env.len();
            let p = naive_pattern_to_db(p, env);
            let body = naive_to_db(&body.0, env);
            env.truncate(mark);
            DbTerm::pi(p, dom, body)
        }
    }
}

/// Free foil names become identifiers through [`default_ident`].
impl ToDeBruijn for DirectTerm {
    fn to_debruijn(&self) -> DbTerm {
        direct_to_debruijn(self, &default_ident)
    }
}

impl ToDeBruijn for FreeTerm {
    fn to_debruijn(&self) -> DbTerm {
        free_to_debruijn(self, &default_ident)
    }
}

pub fn direct_to_debruijn(t: &DirectTerm, free_ident: &dyn Fn(RawName) -> VarIdent) -> DbTerm {
    direct_to_db(t, free_ident, &mut Vec::new())
}

fn direct_pattern_to_db(p: &Pattern, env: &mut Vec<RawName>) -> DbPattern {
    match p {
        Pattern::Wildcard => DbPattern::Wildcard,
        Pattern::Var(b) => {
            env.push(b.raw());
            DbPattern::Var
        }
        Pattern::Pair(l, r) => {
            let l = direct_pattern_to_db(l, env);
            DbPattern::pair(l, direct_pattern_to_db(r, env))
        }
    }
}

fn direct_to_db(t: &DirectTerm, free_ident: &dyn Fn(RawName) -> VarIdent, env: &mut Vec<RawName>) -> DbTerm {
    match t {
        DirectTerm::Var(n) => match lookup(env, &n.raw()) {
            Some(i) => DbTerm::BVar(i),
            None => DbTerm::FVar(free_ident(n.raw())),
        },
        DirectTerm::Universe => DbTerm::Universe,
        DirectTerm::App(f, x) => DbTerm::app(direct_to_db(f, free_ident, env), direct_to_db(x, free_ident, env)),
        DirectTerm::Pair(a, b) => DbTerm::pair(direct_to_db(a, free_ident, env), direct_to_db(b, free_ident, env)),
        DirectTerm::First(a) => DbTerm::first(direct_to_db(a, free_ident, env)),
        DirectTerm::Second(a) => DbTerm::second(direct_to_db(a, free_ident, env)),
        DirectTerm::Lam(p, body) => {
            let mark = env.len();
            let p = direct_pattern_to_db(p, env);
            let body = direct_to_db(body, free_ident, env);
            env.truncate(mark);
            DbTerm::lam(p, body)
        }
        DirectTerm::Pi(p, dom, body) => {
            let dom = direct_to_db(dom, free_ident, env);
            let mark = env.len();
            let p = direct_pattern_to_db(p, env);
            let body = direct_to_db(body, free_ident, env);
            env.truncate(mark);
            DbTerm::pi(p, dom, body)
        }
    }
}

pub fn free_to_debruijn(t: &FreeTerm, free_ident: &dyn Fn(RawName) -> VarIdent) -> DbTerm {
    free_to_db(t, free_ident, &mut Vec::new())
}

fn free_to_db(t: &FreeTerm, free_ident: &dyn Fn(RawName) -> VarIdent, env: &mut Vec<RawName>) -> DbTerm {
    let under = |raw: RawName, body: &FreeTerm, env: &mut Vec<RawName>| {
        env.push(raw);
        let body = free_to_db(body, free_ident, env);
        env.pop();
        body
    };
    match view(t) {
        View::Var(n) => match lookup(env, &n.raw()) {
            Some(i) => DbTerm::BVar(i),
            None => DbTerm::FVar(free_ident(n.raw())),
        },
        View::Universe => DbTerm::Universe,
        View::App(f, x) => DbTerm::app(free_to_db(f, free_ident, env), free_to_db(x, free_ident, env)),
        View::Pair(a, b) => DbTerm::pair(free_to_db(a, free_ident, env), free_to_db(b, free_ident, env)),
        View::First(a) => DbTerm::first(free_to_db(a, free_ident, env)),
        View::Second(a) => DbTerm::second(free_to_db(a, free_ident, env)),
        View::Lam(s) => DbTerm::lam(DbPattern::Var, under(s.binder.raw(), &s.body, env)),
        View::Pi(dom, s) => {
            let dom = free_to_db(dom, free_ident, env);
            DbTerm::pi(DbPattern::Var, dom, under(s.binder.raw(), &s.body, env))
        }
    }
}

/// Names the binders of `t`.  A binder at depth `d` (counting enclosing
/// pattern variables) is called `x{d}`, primed until it differs from every
/// free identifier, so no capture is possible.
pub fn from_debruijn(t: &DbTerm) -> NaiveTerm {
    let free = t.free_idents();
    let name_at = |depth: usize| {
        let mut name = format!("x{depth}");
        while free.iter().any(|x| x.as_str() == name) {
            name.push('\'');
        }
        VarIdent::new(name).expect("generated names are identifiers")
    };
    from_db(t, &name_at, &mut Vec::new())
}

fn db_pattern_to_naive(p: &DbPattern, name_at: &dyn Fn(usize) -> VarIdent, env: &mut Vec<VarIdent>) -> NaivePattern {
    match p {
        DbPattern::Wildcard => NaivePattern::Wildcard,
        DbPattern::Var => {
            let x = name_at(env.len());
            env.push(x.clone());
            NaivePattern::Var(x)
        }
        DbPattern::Pair(l, r) => {
            let l = db_pattern_to_naive(l, name_at, env);
            NaivePattern::pair(l, db_pattern_to_naive(r, name_at, env))
        }
    }
}

fn from_db(t: &DbTerm, name_at: &dyn Fn(usize) -> VarIdent, env: &mut Vec<VarIdent>) -> NaiveTerm {
    match t {
        DbTerm::BVar(i) => NaiveTerm::Var(env[env.len() - 1 - i].clone()),
        DbTerm::FVar(x) => NaiveTerm::Var(x.clone()),
        DbTerm::Universe => NaiveTerm::Universe,
        DbTerm::App(f, x) => NaiveTerm::app(from_db(f, name_at, env), from_db(x, name_at, env)),
        DbTerm::Pair(a, b) => NaiveTerm::pair(from_db(a, name_at, env), from_db(b, name_at, env)),
        DbTerm::First(a) => NaiveTerm::first(from_db(a, name_at, env)),
        DbTerm::Second(a) => NaiveTerm::second(from_db(a, name_at, env)),
        DbTerm::Lam(p, body) => {
            let mark = env.len();
            let p = db_pattern_to_naive(p, name_at, env);
            let body = from_db(body, name_at, env);
            env.truncate(mark);
            NaiveTerm::Lam(p, NaiveScopedTerm::new(body))
        }
        DbTerm::Pi(p, dom, body) => {
            let dom = from_db(dom, name_at, env);
            let mark = env.len();
            let p = db_pattern_to_naive(p, name_at, env);
            let body = from_db(body, name_at, env);
            env.truncate(mark);
            NaiveTerm::Pi(p, Box::new(dom), NaiveScopedTerm::new(body))
        }
    }
}

// ---------------------------------------------------------------------------
// de Bruijn normalizer

/// Adds `by` to every index `>= cutoff`.
fn shift(t: &Arc<DbTerm>, by: usize, cutoff: usize) -> Arc<DbTerm> {
    if by == 0 {
        return t.clone();
    }
    match &**t {
        DbTerm::BVar(i) if *i >= cutoff => Arc::new(DbTerm::BVar(i + by)),
        DbTerm::BVar(_) | DbTerm::FVar(_) | DbTerm::Universe => t.clone(),
        DbTerm::App(f, x) => Arc::new(DbTerm::App(shift(f, by, cutoff), shift(x, by, cutoff))),
        DbTerm::Pair(a, b) => Arc::new(DbTerm::Pair(shift(a, by, cutoff), shift(b, by, cutoff))),
        DbTerm::First(a) => Arc::new(DbTerm::First(shift(a, by, cutoff))),
        DbTerm::Second(a) => Arc::new(DbTerm::Second(shift(a, by, cutoff))),
        DbTerm::Lam(p, b) => Arc::new(DbTerm::Lam(p.clone(), shift(b, by, cutoff + p.binder_count()))),
        DbTerm::Pi(p, a, b) => Arc::new(DbTerm::Pi(
            p.clone(),
            shift(a, by, cutoff),
            shift(b, by, cutoff + p.binder_count()),
        )),
    }
}

/// Replaces the `vals.len()` innermost indices of `t` (seen from depth
/// `depth`) with `vals`, where `vals[0]` is the outermost of them, and
/// lowers the remaining free indices.
fn instantiate(t: &Arc<DbTerm>, vals: &[Arc<DbTerm>], depth: usize) -> Arc<DbTerm> {
    let k = vals.len();
    match &**t {
        DbTerm::BVar(i) if *i < depth => t.clone(),
        DbTerm::BVar(i) if i - depth < k => shift(&vals[k - 1 - (i - depth)], depth, 0),
        DbTerm::BVar(i) => Arc::new(DbTerm::BVar(i - k)),
        DbTerm::FVar(_) | DbTerm::Universe => t.clone(),
        DbTerm::App(f, x) => Arc::new(DbTerm::App(instantiate(f, vals, depth), instantiate(x, vals, depth))),
        DbTerm::Pair(a, b) => Arc::new(DbTerm::Pair(instantiate(a, vals, depth), instantiate(b, vals, depth))),
        DbTerm::First(a) => Arc::new(DbTerm::First(instantiate(a, vals, depth))),
        DbTerm::Second(a) => Arc::new(DbTerm::Second(instantiate(a, vals, depth))),
        DbTerm::Lam(p, b) => Arc::new(DbTerm::Lam(p.clone(), instantiate(b, vals, depth + p.binder_count()))),
        DbTerm::Pi(p, a, b) => Arc::new(DbTerm::Pi(
            p.clone(),
            instantiate(a, vals, depth),
            instantiate(b, vals, depth + p.binder_count()),
        )),
    }
}

fn project_db(p: &DbPattern, arg: &Arc<DbTerm>, out: &mut Vec<Arc<DbTerm>>) {
    match p {
        DbPattern::Wildcard => {}
        DbPattern::Var => out.push(arg.clone()),
        DbPattern::Pair(l, r) => {
            project_db(l, &Arc::new(DbTerm::First(arg.clone())), out);
            project_db(r, &Arc::new(DbTerm::Second(arg.clone())), out);
        }
    }
}

fn whnf_db(t: &Arc<DbTerm>, fuel: &mut Fuel) -> Result<Arc<DbTerm>, NormalizeError> {
    let mut current = t.clone();
    loop {
        current = match &*current {
            DbTerm::App(f, x) => {
                let f = whnf_db(f, fuel)?;
                match &*f {
                    DbTerm::Lam(p, body) => {
                        fuel.tick()?;
                        let mut vals = Vec::with_capacity(p.binder_count());
                        project_db(p, x, &mut vals);
                        instantiate(body, &vals, 0)
                    }
                    _ => return Ok(Arc::new(DbTerm::App(f, x.clone()))),
                }
            }
            DbTerm::First(a) => {
                let a = whnf_db(a, fuel)?;
                match &*a {
                    DbTerm::Pair(l, _) => {
                        fuel.tick()?;
                        l.clone()
                    }
                    _ => return Ok(Arc::new(DbTerm::First(a))),
                }
            }
            DbTerm::Second(a) => {
                let a = whnf_db(a, fuel)?;
                match &*a {
                    DbTerm::Pair(_, r) => {
                        fuel.tick()?;
                        r.clone()
                    }
                    _ => return Ok(Arc::new(DbTerm::Second(a))),
                }
            }
            _ => return Ok(current),
        };
    }
}

fn nf_db(t: &Arc<DbTerm>, fuel: &mut Fuel) -> Result<Arc<DbTerm>, NormalizeError> {
    let t = whnf_db(t, fuel)?;
    Ok(match &*t {
        DbTerm::BVar(_) | DbTerm::FVar(_) | DbTerm::Universe => t,
        DbTerm::App(f, x) => Arc::new(DbTerm::App(nf_db(f, fuel)?, nf_db(x, fuel)?)),
        DbTerm::Pair(a, b) => Arc::new(DbTerm::Pair(nf_db(a, fuel)?, nf_db(b, fuel)?)),
        DbTerm::First(a) => Arc::new(DbTerm::First(nf_db(a, fuel)?)),
        DbTerm::Second(a) => Arc::new(DbTerm::Second(nf_db(a, fuel)?)),
        DbTerm::Lam(p, b) => Arc::new(DbTerm::Lam(p.clone(), nf_db(b, fuel)?)),
        DbTerm::Pi(p, a, b) => Arc::new(DbTerm::Pi(p.clone(), nf_db(a, fuel)?, nf_db(b, fuel)?)),
    })
}

pub fn whnf_debruijn(t: &DbTerm) -> DbTerm {
    let out =
        whnf_db(&Arc::new(t.clone()), &mut Fuel::unlimited()).unwrap_or_else(|e| unreachable!("unlimited fuel: {e}"));
    Arc::unwrap_or_clone(out)
}

pub fn nf_debruijn(t: &DbTerm) -> DbTerm {
    match nf_debruijn_with_fuel(t, &mut Fuel::unlimited()) {
        Ok(t) => t,
        Err(e) => unreachable!("unlimited fuel: {e}"),
    }
}

pub fn nf_debruijn_with_fuel(t: &DbTerm, fuel: &mut Fuel) -> Result<DbTerm, NormalizeError> {
    nf_db(&Arc::new(t.clone()), fuel).map(Arc::unwrap_or_clone)
}

// ---------------------------------------------------------------------------
// named normalizer

type Sym = Arc<str>;

#[derive(Debug, Clone)]
enum NPat {
    Wildcard,
    Var(Sym),
    Pair(Box<NPat>, Box<NPat>),
}

/// Internal string-named terms with shared children.
#[derive(Debug, Clone)]
enum NTerm {
    Var(Sym),
    App(Arc<NTerm>, Arc<NTerm>),
    Lam(NPat, Arc<NTerm>),
    Pi(NPat, Arc<NTerm>, Arc<NTerm>),
    Pair(Arc<NTerm>, Arc<NTerm>),
    First(Arc<NTerm>),
    Second(Arc<NTerm>),
    Universe,
}

impl NPat {
    fn of(p: &NaivePattern) -> Self {
        match p {
            NaivePattern::Wildcard => NPat::Wildcard,
            NaivePattern::Var(x) => NPat::Var(x.as_str().into()),
            NaivePattern::Pair(l, r) => NPat::Pair(Box::new(NPat::of(l)), Box::new(NPat::of(r))),
        }
    }

    fn to_naive(&self) -> NaivePattern {
        match self {
            NPat::Wildcard => NaivePattern::Wildcard,
            NPat::Var(x) => NaivePattern::Var(VarIdent::new(&**x).expect("names stay identifiers")),
            NPat::Pair(l, r) => NaivePattern::pair(l.to_naive(), r.to_naive()),
        }
    }

    fn idents<'a>(&'a self, out: &mut Vec<&'a Sym>) {
        match self {
            NPat::Wildcard => {}
            NPat::Var(x) => out.push(x),
            NPat::Pair(l, r) => {
                l.idents(out);
                r.idents(out);
            }
        }
    }

    fn rename(&self, renames: &BTreeMap<Sym, Sym>) -> NPat {
        match self {
            NPat::Wildcard => NPat::Wildcard,
            NPat::Var(x) => NPat::Var(renames.get(x).unwrap_or(x).clone()),
            NPat::Pair(l, r) => NPat::Pair(Box::new(l.rename(renames)), Box::new(r.rename(renames))),
        }
    }
}

impl NTerm {
    fn of(t: &NaiveTerm) -> Arc<Self> {
        Arc::new(match t {
            NaiveTerm::Var(x) => NTerm::Var(x.as_str().into()),
            NaiveTerm::Universe => NTerm::Universe,
            NaiveTerm::App(f, x) => NTerm::App(NTerm::of(f), NTerm::of(x)),
            NaiveTerm::Pair(a, b) => NTerm::Pair(NTerm::of(a), NTerm::of(b)),
            NaiveTerm::First(a) => NTerm::First(NTerm::of(a)),
            NaiveTerm::Second(a) => NTerm::Second(NTerm::of(a)),
            NaiveTerm::Lam(p, b) => NTerm::Lam(NPat::of(p), NTerm::of(&b.0)),
            NaiveTerm::Pi(p, a, b) => NTerm::Pi(NPat::of(p), NTerm::of(a), NTerm::of(&b.0)),
        })
    }

    fn to_naive(&self) -> NaiveTerm {
        match self {
            NTerm::Var(x) => NaiveTerm::Var(VarIdent::new(&**x).expect("names stay identifiers")),
            NTerm::Universe => NaiveTerm::Universe,
            NTerm::App(f, x) => NaiveTerm::app(f.to_naive(), x.to_naive()),
            NTerm::Pair(a, b) => NaiveTerm::pair(a.to_naive(), b.to_naive()),
            NTerm::First(a) => NaiveTerm::first(a.to_naive()),
            NTerm::Second(a) => NaiveTerm::second(a.to_naive()),
            NTerm::Lam(p, b) => NaiveTerm::lam(p.to_naive(), b.to_naive()),
            NTerm::Pi(p, a, b) => NaiveTerm::pi(p.to_naive(), a.to_naive(), b.to_naive()),
        }
    }

    fn free_vars(&self, out: &mut BTreeSet<Sym>) {
        fn go<'a>(t: &'a NTerm, bound: &mut Vec<&'a Sym>, out: &mut BTreeSet<Sym>) {
            match t {
                NTerm::Var(x) => {
                    if !bound.contains(&x) {
                        out.insert(x.clone());
                    }
                }
                NTerm::Universe => {}
                NTerm::First(a) | NTerm::Second(a) => go(a, bound, out),
                NTerm::App(a, b) | NTerm::Pair(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                NTerm::Lam(p, b) => {
                    let mark = bound.len();
                    p.idents(bound);
                    go(b, bound, out);
                    bound.truncate(mark);
                }
                NTerm::Pi(p, a, b) => {
                    go(a, bound, out);
                    let mark = bound.len();
                    p.idents(bound);
                    go(b, bound, out);
                    bound.truncate(mark);
                }
            }
        }
        go(self, &mut Vec::new(), out)
    }
}

type NamedSubst = BTreeMap<Sym, Arc<NTerm>>;

/// A substitution together with an over-approximation of the free
/// variables of its range.
struct Pending<'a> {
    map: &'a NamedSubst,
    range_free: &'a BTreeSet<Sym>,
}

/// Simultaneous capture-avoiding substitution.  A binder is renamed only
/// when it occurs free in the range of the substitution.
fn subst_named(t: &Arc<NTerm>, s: &Pending<'_>, counter: &mut usize) -> Arc<NTerm> {
    let go = |t: &Arc<NTerm>, counter: &mut usize| subst_named(t, s, counter);
    match &**t {
        NTerm::Var(x) => s.map.get(x).unwrap_or(t).clone(),
        NTerm::Universe => t.clone(),
        NTerm::App(f, x) => Arc::new(NTerm::App(go(f, counter), go(x, counter))),
        NTerm::Pair(a, b) => Arc::new(NTerm::Pair(go(a, counter), go(b, counter))),
        NTerm::First(a) => Arc::new(NTerm::First(go(a, counter))),
        NTerm::Second(a) => Arc::new(NTerm::Second(go(a, counter))),
        NTerm::Lam(p, body) => {
            let (p, body) = subst_under(p, body, s, counter);
            Arc::new(NTerm::Lam(p, body))
        }
        NTerm::Pi(p, dom, body) => {
            let dom = go(dom, counter);
            let (p, body) = subst_under(p, body, s, counter);
            Arc::new(NTerm::Pi(p, dom, body))
        }
    }
}

fn subst_under(p: &NPat, body: &Arc<NTerm>, s: &Pending<'_>, counter: &mut usize) -> (NPat, Arc<NTerm>) {
    let mut bound = Vec::new();
    p.idents(&mut bound);
    let shadows = bound.iter().any(|x| s.map.contains_key(*x));
    let clashing: Vec<&Sym> = bound.iter().copied().filter(|x| s.range_free.contains(*x)).collect();
    if !shadows && clashing.is_empty() {
        return (p.clone(), subst_named(body, s, counter));
    }
    let mut map = s.map.clone();
    for x in &bound {
        map.remove(*x);
    }
    if map.is_empty() {
        return (p.clone(), body.clone());
    }
    if clashing.is_empty() {
        let inner = Pending {
            map: &map,
            range_free: s.range_free,
        };
        return (p.clone(), subst_named(body, &inner, counter));
    }
    let mut body_free = BTreeSet::new();
    body.free_vars(&mut body_free);
    let mut range_free = s.range_free.clone();
    let mut renames = BTreeMap::new();
    for x in clashing {
        let fresh: Sym = loop {
            *counter += 1;
            let candidate: Sym = format!("{x}_{counter}").into();
            if !range_free.contains(&candidate) && !body_free.contains(&candidate) && !bound.contains(&&candidate) {
                break candidate;
            }
        };
        map.insert(x.clone(), Arc::new(NTerm::Var(fresh.clone())));
        range_free.insert(fresh.clone());
        renames.insert(x.clone(), fresh);
    }
    let inner = Pending {
        map: &map,
        range_free: &range_free,
    };
    (p.rename(&renames), subst_named(body, &inner, counter))
}

fn project_named(p: &NPat, arg: &Arc<NTerm>, out: &mut NamedSubst) {
    match p {
        NPat::Wildcard => {}
        NPat::Var(x) => {
            out.insert(x.clone(), arg.clone());
        }
        NPat::Pair(l, r) => {
            project_named(l, &Arc::new(NTerm::First(arg.clone())), out);
            project_named(r, &Arc::new(NTerm::Second(arg.clone())), out);
        }
    }
}

fn beta_named(p: &NPat, body: &Arc<NTerm>, arg: &Arc<NTerm>, counter: &mut usize) -> Arc<NTerm> {
    let mut map = NamedSubst::new();
    project_named(p, arg, &mut map);
    if map.is_empty() {
        return body.clone();
    }
    let mut range_free = BTreeSet::new();
    arg.free_vars(&mut range_free);
    subst_named(
        body,
        &Pending {
            map: &map,
            range_free: &range_free,
        },
        counter,
    )
}

fn whnf_named(t: &Arc<NTerm>, fuel: &mut Fuel, counter: &mut usize) -> Result<Arc<NTerm>, NormalizeError> {
    let mut current = t.clone();
    loop {
        current = match &*current {
            NTerm::App(f, x) => {
                let f = whnf_named(f, fuel, counter)?;
                match &*f {
                    NTerm::Lam(p, body) => {
                        fuel.tick()?;
                        beta_named(p, body, x, counter)
                    }
                    _ => return Ok(Arc::new(NTerm::App(f, x.clone()))),
                }
            }
            NTerm::First(a) => {
                let a = whnf_named(a, fuel, counter)?;
                match &*a {
                    NTerm::Pair(l, _) => {
                        fuel.tick()?;
                        l.clone()
                    }
                    _ => return Ok(Arc::new(NTerm::First(a))),
                }
            }
            NTerm::Second(a) => {
                let a = whnf_named(a, fuel, counter)?;
                match &*a {
                    NTerm::Pair(_, r) => {
                        fuel.tick()?;
                        r.clone()
                    }
                    _ => return Ok(Arc::new(NTerm::Second(a))),
                }
            }
            _ => return Ok(current),
        };
    }
}

fn nf_named_go(t: &Arc<NTerm>, fuel: &mut Fuel, counter: &mut usize) -> Result<Arc<NTerm>, NormalizeError> {
    let t = whnf_named(t, fuel, counter)?;
    let mut go = |t: &Arc<NTerm>| nf_named_go(t, fuel, counter);
    Ok(match &*t {
        NTerm::Var(_) | NTerm::Universe => t,
        NTerm::App(f, x) => {
            let f = go(f)?;
            Arc::new(NTerm::App(f, go(x)?))
        }
        NTerm::Pair(a, b) => {
            let a = go(a)?;
            Arc::new(NTerm::Pair(a, go(b)?))
        }
        NTerm::First(a) => Arc::new(NTerm::First(go(a)?)),
        NTerm::Second(a) => Arc::new(NTerm::Second(go(a)?)),
        NTerm::Lam(p, body) => Arc::new(NTerm::Lam(p.clone(), go(body)?)),
        NTerm::Pi(p, dom, body) => {
            let dom = go(dom)?;
            Arc::new(NTerm::Pi(p.clone(), dom, go(body)?))
        }
    })
}

/// Normal-order normalization on string names.
pub fn nf_named(t: &NaiveTerm) -> NaiveTerm {
    match nf_named_with_fuel(t, &mut Fuel::unlimited()) {
        Ok(t) => t,
        Err(e) => unreachable!("unlimited fuel: {e}"),
    }
}

pub fn nf_named_with_fuel(t: &NaiveTerm, fuel: &mut Fuel) -> Result<NaiveTerm, NormalizeError> {
    NamedTerm::new(t).normalize(fuel)
}

/// A naive term loaded into the named normalizer's internal form, so that
/// repeated normalizations skip the conversion.
#[derive(Debug, Clone)]
pub struct NamedTerm(Arc<NTerm>);

impl NamedTerm {
    pub fn new(t: &NaiveTerm) -> Self {
        NamedTerm(NTerm::of(t))
    }

    pub fn normalize(&self, fuel: &mut Fuel) -> Result<NaiveTerm, NormalizeError> {
        nf_named_go(&self.0, fuel, &mut 0).map(|t| t.to_naive())
    }
}
