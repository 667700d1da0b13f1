//! λΠ with pairs on the free foil, split into two signatures and summed.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::direct::DirectTerm;
use crate::foil::{extend_scope, scope_checks_enabled, with_refreshed, Name, NameBinder, Scope, ScopeCheck, Subst};
use crate::free::{substitute_unchecked, Ast, ScopedAst, Signature, Sum, SumNode};
use crate::fuel::{Fuel, NormalizeError};
use crate::pattern::Pattern;

/// Signature of λΠ without pairs.
pub enum LambdaPiSig {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LambdaPiF<Sc, T> {
    App(T, T),
    Lam(Sc),
    Pi(T, Sc),
    Universe,
}

/// Signature of pairs and projections.  Has no scoped positions.
pub enum PairSig {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairF<T> {
    Pair(T, T),
    First(T),
    Second(T),
}

impl Signature for LambdaPiSig {
    type Node<Sc, T> = LambdaPiF<Sc, T>;
    const TAG_COUNT: u8 = 4;

    fn map_node<Sc, T, Sc2, T2>(
        node: LambdaPiF<Sc, T>,
        mut f_scoped: impl FnMut(Sc) -> Sc2,
        mut f_term: impl FnMut(T) -> T2,
    ) -> LambdaPiF<Sc2, T2> {
        match node {
            LambdaPiF::App(f, x) => {
                let f = f_term(f);
                LambdaPiF::App(f, f_term(x))
            }
            LambdaPiF::Lam(body) => LambdaPiF::Lam(f_scoped(body)),
            LambdaPiF::Pi(dom, cod) => {
                let dom = f_term(dom);
                LambdaPiF::Pi(dom, f_scoped(cod))
            }
            LambdaPiF::Universe => LambdaPiF::Universe,
        }
    }

    fn as_ref<Sc, T>(node: &LambdaPiF<Sc, T>) -> LambdaPiF<&Sc, &T> {
        match node {
            LambdaPiF::App(f, x) => LambdaPiF::App(f, x),
            LambdaPiF::Lam(b) => LambdaPiF::Lam(b),
            LambdaPiF::Pi(a, b) => LambdaPiF::Pi(a, b),
            LambdaPiF::Universe => LambdaPiF::Universe,
        }
    }

    fn tag<Sc, T>(node: &LambdaPiF<Sc, T>) -> u8 {
        match node {
            LambdaPiF::App(..) => 0,
            LambdaPiF::Lam(_) => 1,
            LambdaPiF::Pi(..) => 2,
            LambdaPiF::Universe => 3,
        }
    }

    fn node_eq<Sc: PartialEq, T: PartialEq>(a: &LambdaPiF<Sc, T>, b: &LambdaPiF<Sc, T>) -> bool {
        a == b
    }

    fn node_fmt<Sc: fmt::Debug, T: fmt::Debug>(node: &LambdaPiF<Sc, T>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match node {
            LambdaPiF::App(a, b) => write!(f, "({a:?} {b:?})"),
            LambdaPiF::Lam(b) => write!(f, "(lam {b:?})"),
            LambdaPiF::Pi(a, b) => write!(f, "(fun {a:?} -> {b:?})"),
            LambdaPiF::Universe => f.write_str("U"),
        }
    }
}

impl Signature for PairSig {
    type Node<Sc, T> = PairF<T>;
    const TAG_COUNT: u8 = 3;

    fn map_node<Sc, T, Sc2, T2>(
        node: PairF<T>,
        _f_scoped: impl FnMut(Sc) -> Sc2,
        mut f_term: impl FnMut(T) -> T2,
    ) -> PairF<T2> {
        match node {
            PairF::Pair(l, r) => {
                let l = f_term(l);
                PairF::Pair(l, f_term(r))
            }
            PairF::First(t) => PairF::First(f_term(t)),
            PairF::Second(t) => PairF::Second(f_term(t)),
        }
    }

    fn as_ref<Sc, T>(node: &PairF<T>) -> PairF<&T> {
        match node {
            PairF::Pair(l, r) => PairF::Pair(l, r),
            PairF::First(t) => PairF::First(t),
            PairF::Second(t) => PairF::Second(t),
        }
    }

    fn tag<Sc, T>(node: &PairF<T>) -> u8 {
        match node {
            PairF::Pair(..) => 0,
            PairF::First(_) => 1,
            PairF::Second(_) => 2,
        }
    }

    fn node_eq<Sc: PartialEq, T: PartialEq>(a: &PairF<T>, b: &PairF<T>) -> bool {
        a == b
    }

    fn node_fmt<Sc: fmt::Debug, T: fmt::Debug>(node: &PairF<T>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match node {
            PairF::Pair(l, r) => write!(f, "({l:?}, {r:?})"),
            PairF::First(t) => write!(f, "(first {t:?})"),
            PairF::Second(t) => write!(f, "(second {t:?})"),
        }
    }
}

pub type LambdaPiPairs = Sum<LambdaPiSig, PairSig>;
pub type FreeTerm = Ast<LambdaPiPairs>;
pub type FreeScoped = ScopedAst<LambdaPiPairs>;

pub fn mk_var(name: Name) -> FreeTerm {
    Ast::Var(name)
}

pub fn mk_app(f: FreeTerm, x: FreeTerm) -> FreeTerm {
    Ast::node(SumNode::InL(LambdaPiF::App(f, x)))
}

pub fn mk_lam(binder: NameBinder, body: FreeTerm) -> FreeTerm {
    Ast::node(SumNode::InL(LambdaPiF::Lam(ScopedAst::new(binder, body))))
}

pub fn mk_pi(binder: NameBinder, dom: FreeTerm, cod: FreeTerm) -> FreeTerm {
    Ast::node(SumNode::InL(LambdaPiF::Pi(dom, ScopedAst::new(binder, cod))))
}

pub fn mk_universe() -> FreeTerm {
    Ast::node(SumNode::InL(LambdaPiF::Universe))
}

pub fn mk_pair(l: FreeTerm, r: FreeTerm) -> FreeTerm {
    Ast::node(SumNode::InR(PairF::Pair(l, r)))
}

pub fn mk_first(t: FreeTerm) -> FreeTerm {
    Ast::node(SumNode::InR(PairF::First(t)))
}

pub fn mk_second(t: FreeTerm) -> FreeTerm {
    Ast::node(SumNode::InR(PairF::Second(t)))
}

/// One layer of a [`FreeTerm`], for pattern matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View<'a> {
    Var(Name),
    App(&'a FreeTerm, &'a FreeTerm),
    Lam(&'a FreeScoped),
    Pi(&'a FreeTerm, &'a FreeScoped),
    Universe,
    Pair(&'a FreeTerm, &'a FreeTerm),
    First(&'a FreeTerm),
    Second(&'a FreeTerm),
}

pub fn view(t: &FreeTerm) -> View<'_> {
    match t {
        Ast::Var(n) => View::Var(*n),
        Ast::Node(node) => match &**node {
            SumNode::InL(LambdaPiF::App(f, x)) => View::App(f, x),
            SumNode::InL(LambdaPiF::Lam(b)) => View::Lam(b),
            SumNode::InL(LambdaPiF::Pi(a, b)) => View::Pi(a, b),
            SumNode::InL(LambdaPiF::Universe) => View::Universe,
            SumNode::InR(PairF::Pair(l, r)) => View::Pair(l, r),
            SumNode::InR(PairF::First(t)) => View::First(t),
            SumNode::InR(PairF::Second(t)) => View::Second(t),
        },
    }
}

fn assert_in_scope(scope: &Scope, t: &FreeTerm) {
    if let Err(err) = t.check_scope(scope) {
        panic!("term is not in scope {scope:?}: {err}");
    }
}

pub fn whnf_free(scope: &Scope, t: &FreeTerm) -> FreeTerm {
    match whnf_free_with_fuel(scope, t, &mut Fuel::unlimited()) {
        Ok(t) => t,
        Err(e) => unreachable!("unlimited fuel: {e}"),
    }
}

pub fn whnf_free_with_fuel(scope: &Scope, t: &FreeTerm, fuel: &mut Fuel) -> Result<FreeTerm, NormalizeError> {
    if scope_checks_enabled() {
        assert_in_scope(scope, t);
    }
    whnf(scope, t, fuel)
}

fn whnf(scope: &Scope, t: &FreeTerm, fuel: &mut Fuel) -> Result<FreeTerm, NormalizeError> {
    let mut current = t.clone();
    loop {
        current = match view(&current) {
            View::First(t) => {
                let t = whnf(scope, t, fuel)?;
                match view(&t) {
                    View::Pair(l, _) => {
                        fuel.tick()?;
                        l.clone()
                    }
                    _ => return Ok(mk_first(t)),
                }
            }
            View::Second(t) => {
                let t = whnf(scope, t, fuel)?;
                match view(&t) {
                    View::Pair(_, r) => {
                        fuel.tick()?;
                        r.clone()
                    }
                    _ => return Ok(mk_second(t)),
                }
            }
            View::App(f, x) => {
                let f = whnf(scope, f, fuel)?;
                match view(&f) {
                    View::Lam(scoped) => {
                        fuel.tick()?;
                        let subst = Subst::identity().add_subst(scoped.binder, x.clone());
                        substitute_unchecked(scope, &subst, &scoped.body)
                    }
                    _ => return Ok(mk_app(f, x.clone())),
                }
            }
            _ => return Ok(current),
        };
    }
}

pub fn nf_free(scope: &Scope, t: &FreeTerm) -> FreeTerm {
    match nf_free_with_fuel(scope, t, &mut Fuel::unlimited()) {
        Ok(t) => t,
        Err(e) => unreachable!("unlimited fuel: {e}"),
    }
}

/// Normal-order normalization, refreshing binders against `scope` before
/// going under them.
pub fn nf_free_with_fuel(scope: &Scope, t: &FreeTerm, fuel: &mut Fuel) -> Result<FreeTerm, NormalizeError> {
    if scope_checks_enabled() {
        assert_in_scope(scope, t);
    }
    nf(scope, t, fuel)
}

fn nf(scope: &Scope, t: &FreeTerm, fuel: &mut Fuel) -> Result<FreeTerm, NormalizeError> {
    let t = whnf(scope, t, fuel)?;
    Ok(match view(&t) {
        View::Var(_) | View::Universe => t,
        View::App(f, x) => mk_app(nf(scope, f, fuel)?, nf(scope, x, fuel)?),
        View::Pair(l, r) => mk_pair(nf(scope, l, fuel)?, nf(scope, r, fuel)?),
        View::First(x) => mk_first(nf(scope, x, fuel)?),
        View::Second(x) => mk_second(nf(scope, x, fuel)?),
        View::Lam(scoped) => {
            let (binder, body, inner) = open_scoped(scope, scoped);
            mk_lam(binder, nf(&inner, &body, fuel)?)
        }
        View::Pi(dom, scoped) => {
            let dom = nf(scope, dom, fuel)?;
            let (binder, body, inner) = open_scoped(scope, scoped);
            mk_pi(binder, dom, nf(&inner, &body, fuel)?)
        }
    })
}

fn open_scoped(scope: &Scope, scoped: &FreeScoped) -> (NameBinder, FreeTerm, Scope) {
    let binder = with_refreshed(scope, scoped.binder.name());
    let inner = extend_scope(binder, scope);
    if binder == scoped.binder {
        (binder, scoped.body.clone(), inner)
    } else {
        let subst = Subst::identity().add_rename(scoped.binder, binder.name());
        let body = substitute_unchecked(&inner, &subst, &scoped.body);
        (binder, body, inner)
    }
}

pub fn is_whnf_free(t: &FreeTerm) -> bool {
    match view(t) {
        View::App(f, _) => !matches!(view(f), View::Lam(_)) && is_whnf_free(f),
        View::First(x) | View::Second(x) => !matches!(view(x), View::Pair(..)) && is_whnf_free(x),
        _ => true,
    }
}

pub fn is_normal_free(t: &FreeTerm) -> bool {
    match view(t) {
        View::Var(_) | View::Universe => true,
        View::App(f, x) => !matches!(view(f), View::Lam(_)) && is_normal_free(f) && is_normal_free(x),
        View::First(x) | View::Second(x) => !matches!(view(x), View::Pair(..)) && is_normal_free(x),
        View::Pair(a, b) => is_normal_free(a) && is_normal_free(b),
        View::Lam(s) => is_normal_free(&s.body),
        View::Pi(a, s) => is_normal_free(a) && is_normal_free(&s.body),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("only single-variable patterns have a free-foil counterpart, found `{0}`")]
pub struct UnsupportedPattern(pub Pattern);

pub fn free_to_direct(t: &FreeTerm) -> DirectTerm {
    match view(t) {
        View::Var(n) => DirectTerm::Var(n),
        View::App(f, x) => DirectTerm::app(free_to_direct(f), free_to_direct(x)),
        View::Lam(s) => DirectTerm::lam(Pattern::Var(s.binder), free_to_direct(&s.body)),
        View::Pi(a, s) => DirectTerm::pi(Pattern::Var(s.binder), free_to_direct(a), free_to_direct(&s.body)),
        View::Universe => DirectTerm::Universe,
        View::Pair(l, r) => DirectTerm::pair(free_to_direct(l), free_to_direct(r)),
        View::First(x) => DirectTerm::first(free_to_direct(x)),
        View::Second(x) => DirectTerm::second(free_to_direct(x)),
    }
}

pub fn direct_to_free(t: &DirectTerm) -> Result<FreeTerm, UnsupportedPattern> {
    let binder = |p: &Pattern| match p {
        Pattern::Var(b) => Ok(*b),
        other => Err(UnsupportedPattern(other.clone())),
    };
    let go = |t: &Arc<DirectTerm>| direct_to_free(t);
    Ok(match t {
        DirectTerm::Var(n) => mk_var(*n),
        DirectTerm::App(f, x) => mk_app(go(f)?, go(x)?),
        DirectTerm::Lam(p, body) => mk_lam(binder(p)?, go(body)?),
        DirectTerm::Pi(p, a, b) => mk_pi(binder(p)?, go(a)?, go(b)?),
        DirectTerm::Universe => mk_universe(),
        DirectTerm::Pair(l, r) => mk_pair(go(l)?, go(r)?),
        DirectTerm::First(x) => mk_first(go(x)?),
        DirectTerm::Second(x) => mk_second(go(x)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foil::RawName;
    use crate::free::substitute;

    fn v(r: usize) -> FreeTerm {
        mk_var(Name::from_raw(RawName(r)))
    }

    fn b(r: usize) -> NameBinder {
        NameBinder::from_raw(RawName(r))
    }

    fn scope(raws: &[usize]) -> Scope {
        Scope::from_raw_names(raws.iter().map(|&r| RawName(r)))
    }

    #[test]
    fn views_round_trip() {
        assert_eq!(view(&mk_app(v(0), v(1))), View::App(&v(0), &v(1)));
        assert_eq!(view(&mk_universe()), View::Universe);
        let lam = mk_lam(b(0), v(0));
        match view(&lam) {
            View::Lam(s) => assert_eq!(*s, ScopedAst::new(b(0), v(0))),
            other => panic!("{other:?}"),
        }
        assert_eq!(view(&mk_first(v(2))), View::First(&v(2)));
        assert_eq!(view(&mk_pair(v(1), v(2))), View::Pair(&v(1), &v(2)));
    }

    #[test]
    fn whnf_projections() {
        let s = scope(&[0, 1]);
        assert_eq!(whnf_free(&s, &mk_second(mk_pair(v(0), v(1)))), v(1));
        assert_eq!(whnf_free(&s, &mk_first(mk_pair(v(0), v(1)))), v(0));
        assert_eq!(whnf_free(&s, &mk_first(v(0))), mk_first(v(0)));
        assert_eq!(whnf_free(&Scope::empty(), &mk_universe()), mk_universe());
    }

    #[test]
    fn whnf_self_application() {
        // (lam x. x x) (lam y. y)
        let f = mk_lam(b(0), mk_app(v(0), v(0)));
        let t = mk_app(f, mk_lam(b(0), v(0)));
        assert_eq!(whnf_free(&Scope::empty(), &t), mk_lam(b(0), v(0)));
    }

    #[test]
    fn capture_example() {
        // (lam x. lam y. x) y, y = #0 free
        let k = mk_lam(b(1), mk_lam(b(2), v(1)));
        let t = mk_app(k, v(0));
        let out = nf_free(&scope(&[0]), &t);
        assert_eq!(out, mk_lam(b(2), v(0)));
        // the binder is distinct from the free y
        match view(&out) {
            View::Lam(s) => assert_ne!(s.binder.raw(), RawName(0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sum_dispatch_matches_standalone_pairs() {
        // PairF on its own as a signature: substitution works the same
        let t: Ast<PairSig> = Ast::node(PairF::Pair(
            Ast::Var(Name::from_raw(RawName(0))),
            Ast::Var(Name::from_raw(RawName(1))),
        ));
        let s = Subst::identity().add_subst(b(0), Ast::node(PairF::First(Ast::Var(Name::from_raw(RawName(1))))));
        let out = substitute(&scope(&[1]), &s, &t);
        let expected: Ast<PairSig> = Ast::node(PairF::Pair(
            Ast::node(PairF::First(Ast::Var(Name::from_raw(RawName(1))))),
            Ast::Var(Name::from_raw(RawName(1))),
        ));
        assert_eq!(out, expected);
    }

    #[test]
    fn converters() {
        let t = mk_lam(b(0), mk_pi(b(1), v(0), mk_pair(v(1), mk_universe())));
        assert_eq!(direct_to_free(&free_to_direct(&t)).unwrap(), t);
        let d = DirectTerm::lam(Pattern::Wildcard, DirectTerm::Universe);
        assert_eq!(direct_to_free(&d), Err(UnsupportedPattern(Pattern::Wildcard)));
    }

    #[test]
    fn predicates() {
        let redex = mk_app(mk_lam(b(0), v(0)), mk_universe());
        assert!(!is_whnf_free(&redex));
        assert!(is_whnf_free(&mk_lam(b(0), redex.clone())));
        assert!(!is_normal_free(&mk_lam(b(0), redex)));
    }
}
