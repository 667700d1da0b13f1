//! λΠ with pairs and patterns on the foil, with hand-written substitution.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::encode::{write_raw, CanonicalEncode};
use crate::foil::{scope_checks_enabled, Name, RawName, Scope, ScopeCheck, ScopeError, Sinkable, Subst, VarInjection};
use crate::fuel::{Fuel, NormalizeError};
use crate::pattern::{extend_renaming, with_pattern, Pattern};

/// A λΠ term.  In `Lam` and `Pi` the last child lives in the pattern's inner
/// scope; `Pi`'s domain stays in the outer scope.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DirectTerm {
    Var(Name),
    Pair(Arc<DirectTerm>, Arc<DirectTerm>),
    First(Arc<DirectTerm>),
    Second(Arc<DirectTerm>),
    App(Arc<DirectTerm>, Arc<DirectTerm>),
    Lam(Pattern, Arc<DirectTerm>),
    Pi(Pattern, Arc<DirectTerm>, Arc<DirectTerm>),
    Universe,
}

impl DirectTerm {
    pub fn var(raw: usize) -> Self {
        DirectTerm::Var(Name::from_raw(RawName(raw)))
    }

    pub fn pair(l: DirectTerm, r: DirectTerm) -> Self {
        DirectTerm::Pair(Arc::new(l), Arc::new(r))
    }

    pub fn first(t: DirectTerm) -> Self {
        DirectTerm::First(Arc::new(t))
    }

    pub fn second(t: DirectTerm) -> Self {
        DirectTerm::Second(Arc::new(t))
    }

    pub fn app(f: DirectTerm, x: DirectTerm) -> Self {
        DirectTerm::App(Arc::new(f), Arc::new(x))
    }

    pub fn lam(p: Pattern, body: DirectTerm) -> Self {
        DirectTerm::Lam(p, Arc::new(body))
    }

    pub fn pi(p: Pattern, dom: DirectTerm, cod: DirectTerm) -> Self {
        DirectTerm::Pi(p, Arc::new(dom), Arc::new(cod))
    }

    pub fn free_names(&self) -> BTreeSet<RawName> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    /// Number of nodes, patterns excluded.
    pub fn size(&self) -> usize {
        match self {
            DirectTerm::Var(_) | DirectTerm::Universe => 1,
            DirectTerm::First(t) | DirectTerm::Second(t) => 1 + t.size(),
            DirectTerm::Pair(a, b) | DirectTerm::App(a, b) => 1 + a.size() + b.size(),
            DirectTerm::Lam(_, b) => 1 + b.size(),
            DirectTerm::Pi(_, a, b) => 1 + a.size() + b.size(),
        }
    }
}

fn collect_free(t: &DirectTerm, bound: &mut Vec<RawName>, out: &mut BTreeSet<RawName>) {
    match t {
        DirectTerm::Var(n) => {
            if !bound.contains(&n.raw()) {
                out.insert(n.raw());
            }
        }
        DirectTerm::Universe => {}
        DirectTerm::First(a) | DirectTerm::Second(a) => collect_free(a, bound, out),
        DirectTerm::Pair(a, b) | DirectTerm::App(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        DirectTerm::Lam(p, body) => under_pattern(p, bound, |bound| collect_free(body, bound, out)),
        DirectTerm::Pi(p, dom, body) => {
            collect_free(dom, bound, out);
            under_pattern(p, bound, |bound| collect_free(body, bound, out));
        }
    }
}

fn under_pattern(p: &Pattern, bound: &mut Vec<RawName>, f: impl FnOnce(&mut Vec<RawName>)) {
    let mark = bound.len();
    p.for_each_binder(&mut |b| bound.push(b.raw()));
    f(bound);
    bound.truncate(mark);
}

impl VarInjection for DirectTerm {
    fn var(name: Name) -> Self {
        DirectTerm::Var(name)
    }
}

impl Sinkable for DirectTerm {
    fn sinkability_proof(&self, rename: &dyn Fn(Name) -> Name) -> Self {
        match self {
            DirectTerm::Var(n) => DirectTerm::Var(rename(*n)),
            DirectTerm::Pair(a, b) => DirectTerm::pair(a.sinkability_proof(rename), b.sinkability_proof(rename)),
            DirectTerm::First(a) => DirectTerm::first(a.sinkability_proof(rename)),
            DirectTerm::Second(a) => DirectTerm::second(a.sinkability_proof(rename)),
            DirectTerm::App(a, b) => DirectTerm::app(a.sinkability_proof(rename), b.sinkability_proof(rename)),
            DirectTerm::Lam(p, body) => {
                let (p, rename2) = extend_renaming(rename, p);
                DirectTerm::lam(p, body.sinkability_proof(&rename2))
            }
            DirectTerm::Pi(p, dom, body) => {
                let dom = dom.sinkability_proof(rename);
                let (p, rename2) = extend_renaming(rename, p);
                DirectTerm::pi(p, dom, body.sinkability_proof(&rename2))
            }
            DirectTerm::Universe => DirectTerm::Universe,
        }
    }
}

impl CanonicalEncode for DirectTerm {
    fn encode_into(&self, out: &mut Vec<u8>) {
        match self {
            DirectTerm::Var(n) => {
                out.push(0x00);
                write_raw(out, n.raw());
            }
            DirectTerm::Pair(a, b) => {
                out.push(0x01);
                a.encode_into(out);
                b.encode_into(out);
            }
            DirectTerm::First(a) => {
                out.push(0x02);
                a.encode_into(out);
            }
            DirectTerm::Second(a) => {
                out.push(0x03);
                a.encode_into(out);
            }
            DirectTerm::App(a, b) => {
                out.push(0x04);
                a.encode_into(out);
                b.encode_into(out);
            }
            DirectTerm::Lam(p, b) => {
                out.push(0x05);
                p.encode_into(out);
                b.encode_into(out);
            }
            DirectTerm::Pi(p, a, b) => {
                out.push(0x06);
                p.encode_into(out);
                a.encode_into(out);
                b.encode_into(out);
            }
            DirectTerm::Universe => out.push(0x07),
        }
    }
}

impl ScopeCheck for DirectTerm {
    fn check_scope(&self, scope: &Scope) -> Result<(), ScopeError> {
        check(self, scope, false)
    }

    fn check_distinct(&self, scope: &Scope) -> Result<(), ScopeError> {
        check(self, scope, true)
    }
}

fn check(t: &DirectTerm, scope: &Scope, distinct: bool) -> Result<(), ScopeError> {
    match t {
        DirectTerm::Var(n) if scope.contains_name(*n) => Ok(()),
        DirectTerm::Var(n) => Err(ScopeError::NotInScope(n.raw())),
        DirectTerm::Universe => Ok(()),
        DirectTerm::First(a) | DirectTerm::Second(a) => check(a, scope, distinct),
        DirectTerm::Pair(a, b) | DirectTerm::App(a, b) => {
            check(a, scope, distinct)?;
            check(b, scope, distinct)
        }
        DirectTerm::Lam(p, body) => check(body, &pattern_scope(p, scope, distinct)?, distinct),
        DirectTerm::Pi(p, dom, body) => {
            check(dom, scope, distinct)?;
            check(body, &pattern_scope(p, scope, distinct)?, distinct)
        }
    }
}

fn pattern_scope(p: &Pattern, scope: &Scope, distinct: bool) -> Result<Scope, ScopeError> {
    if distinct {
        p.check_scope(scope)
    } else {
        let mut inner = scope.clone();
        p.for_each_binder(&mut |b| inner = inner.insert(b.raw()));
        Ok(inner)
    }
}

/// Panics when `t` has a free name that is neither mapped by `subst` nor in
/// `scope`, or when a substituted expression escapes `scope`.
fn assert_subst_input(scope: &Scope, subst: &Subst<DirectTerm>, t: &DirectTerm) {
    for raw in t.free_names() {
        let name = Name::from_raw(raw);
        assert!(
            subst.get(name).is_some() || scope.contains(raw),
            "free name {} is neither substituted nor in the output scope {:?}",
            raw,
            scope
        );
    }
    for (raw, e) in subst.entries() {
        if let Err(err) = e.check_scope(scope) {
            panic!("substitution entry for {raw} leaves the output scope: {err}");
        }
    }
}

fn assert_in_scope(scope: &Scope, t: &DirectTerm) {
    if let Err(err) = t.check_scope(scope) {
        panic!("term is not in scope {scope:?}: {err}");
    }
}

/// Capture-avoiding substitution.  `scope` is the output scope.
pub fn subst_direct(scope: &Scope, subst: &Subst<DirectTerm>, t: &DirectTerm) -> DirectTerm {
    if scope_checks_enabled() {
        assert_subst_input(scope, subst, t);
    }
    subst_term(scope, subst, t)
}

fn subst_term(scope: &Scope, subst: &Subst<DirectTerm>, t: &DirectTerm) -> DirectTerm {
    let go = |t: &DirectTerm| Arc::new(subst_term(scope, subst, t));
    match t {
        DirectTerm::Var(x) => subst.lookup(*x),
        DirectTerm::Pair(l, r) => DirectTerm::Pair(go(l), go(r)),
        DirectTerm::First(x) => DirectTerm::First(go(x)),
        DirectTerm::Second(x) => DirectTerm::Second(go(x)),
        DirectTerm::App(f, x) => DirectTerm::App(go(f), go(x)),
        DirectTerm::Lam(pat, body) => {
            let (pat2, subst2, scope2) = with_pattern(scope, pat, subst);
            DirectTerm::Lam(pat2, Arc::new(subst_term(&scope2, &subst2, body)))
        }
        DirectTerm::Pi(pat, typ, body) => {
            let (pat2, subst2, scope2) = with_pattern(scope, pat, subst);
            let body = subst_term(&scope2, &subst2, body);
            DirectTerm::Pi(pat2, go(typ), Arc::new(body))
        }
        DirectTerm::Universe => DirectTerm::Universe,
    }
}

/// Binds the variables of `pattern` to the matching projections of `arg`.
pub(crate) fn bind_pattern(pattern: &Pattern, arg: &DirectTerm, subst: Subst<DirectTerm>) -> Subst<DirectTerm> {
    match pattern {
        Pattern::Wildcard => subst,
        Pattern::Var(b) => subst.add_subst(*b, arg.clone()),
        Pattern::Pair(l, r) => {
            let arg = Arc::new(arg.clone());
            let subst = bind_pattern(l, &DirectTerm::First(arg.clone()), subst);
            bind_pattern(r, &DirectTerm::Second(arg), subst)
        }
    }
}

pub fn whnf_direct(scope: &Scope, t: &DirectTerm) -> DirectTerm {
    match whnf_direct_with_fuel(scope, t, &mut Fuel::unlimited()) {
        Ok(t) => t,
        Err(e) => unreachable!("unlimited fuel: {e}"),
    }
}

pub fn whnf_direct_with_fuel(scope: &Scope, t: &DirectTerm, fuel: &mut Fuel) -> Result<DirectTerm, NormalizeError> {
    if scope_checks_enabled() {
        assert_in_scope(scope, t);
    }
    whnf(scope, t, fuel)
}

fn whnf(scope: &Scope, t: &DirectTerm, fuel: &mut Fuel) -> Result<DirectTerm, NormalizeError> {
    let mut current = t.clone();
    loop {
        current = match &current {
            DirectTerm::First(x) => match whnf(scope, x, fuel)? {
                DirectTerm::Pair(l, _) => {
                    fuel.tick()?;
                    (*l).clone()
                }
                x => return Ok(DirectTerm::first(x)),
            },
            DirectTerm::Second(x) => match whnf(scope, x, fuel)? {
                DirectTerm::Pair(_, r) => {
                    fuel.tick()?;
                    (*r).clone()
                }
                x => return Ok(DirectTerm::second(x)),
            },
            DirectTerm::App(f, x) => match whnf(scope, f, fuel)? {
                DirectTerm::Lam(pat, body) => {
                    fuel.tick()?;
                    let subst = bind_pattern(&pat, x, Subst::identity());
                    subst_term(scope, &subst, &body)
                }
                f => return Ok(DirectTerm::App(Arc::new(f), x.clone())),
            },
            _ => return Ok(current),
        };
    }
}

pub fn nf_direct(scope: &Scope, t: &DirectTerm) -> DirectTerm {
    match nf_direct_with_fuel(scope, t, &mut Fuel::unlimited()) {
        Ok(t) => t,
        Err(e) => unreachable!("unlimited fuel: {e}"),
    }
}

/// Normal-order normalization: weak head normal form first, then the
/// subterms, going under binders after refreshing them against `scope`.
pub fn nf_direct_with_fuel(scope: &Scope, t: &DirectTerm, fuel: &mut Fuel) -> Result<DirectTerm, NormalizeError> {
    if scope_checks_enabled() {
        assert_in_scope(scope, t);
    }
    nf(scope, t, fuel)
}

fn nf(scope: &Scope, t: &DirectTerm, fuel: &mut Fuel) -> Result<DirectTerm, NormalizeError> {
    let t = whnf(scope, t, fuel)?;
    Ok(match t {
        DirectTerm::Var(_) | DirectTerm::Universe => t,
        DirectTerm::Pair(a, b) => DirectTerm::pair(nf(scope, &a, fuel)?, nf(scope, &b, fuel)?),
        DirectTerm::First(a) => DirectTerm::first(nf(scope, &a, fuel)?),
        DirectTerm::Second(a) => DirectTerm::second(nf(scope, &a, fuel)?),
        DirectTerm::App(f, x) => DirectTerm::app(nf(scope, &f, fuel)?, nf(scope, &x, fuel)?),
        DirectTerm::Lam(pat, body) => {
            let (pat, body, inner) = open_binder(scope, &pat, &body);
            DirectTerm::lam(pat, nf(&inner, &body, fuel)?)
        }
        DirectTerm::Pi(pat, dom, body) => {
            let dom = nf(scope, &dom, fuel)?;
            let (pat, body, inner) = open_binder(scope, &pat, &body);
            DirectTerm::pi(pat, dom, nf(&inner, &body, fuel)?)
        }
    })
}

/// Refreshes `pat` against `scope` and renames `body` accordingly; the body
/// is untouched when no binder had to change.
fn open_binder(scope: &Scope, pat: &Pattern, body: &Arc<DirectTerm>) -> (Pattern, Arc<DirectTerm>, Scope) {
    let (pat2, subst, inner) = with_pattern(scope, pat, &Subst::identity());
    if &pat2 == pat {
        (pat2, body.clone(), inner)
    } else {
        let body = subst_term(&inner, &subst, body);
        (pat2, Arc::new(body), inner)
    }
}

/// Whether the head of `t` is not a redex.
pub fn is_whnf(t: &DirectTerm) -> bool {
    match t {
        DirectTerm::App(f, _) => !matches!(**f, DirectTerm::Lam(..)) && is_whnf(f),
        DirectTerm::First(x) | DirectTerm::Second(x) => !matches!(**x, DirectTerm::Pair(..)) && is_whnf(x),
        _ => true,
    }
}

/// Whether `t` contains no redex anywhere.
pub fn is_normal(t: &DirectTerm) -> bool {
    match t {
        DirectTerm::Var(_) | DirectTerm::Universe => true,
        DirectTerm::App(f, x) => !matches!(**f, DirectTerm::Lam(..)) && is_normal(f) && is_normal(x),
        DirectTerm::First(x) | DirectTerm::Second(x) => !matches!(**x, DirectTerm::Pair(..)) && is_normal(x),
        DirectTerm::Pair(a, b) => is_normal(a) && is_normal(b),
        DirectTerm::Lam(_, b) => is_normal(b),
        DirectTerm::Pi(_, a, b) => is_normal(a) && is_normal(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foil::{fresh_binder, NameBinder};

    fn v(r: usize) -> DirectTerm {
        DirectTerm::var(r)
    }

    fn pv(r: usize) -> Pattern {
        Pattern::Var(NameBinder::from_raw(RawName(r)))
    }

    fn scope(raws: &[usize]) -> Scope {
        Scope::from_raw_names(raws.iter().map(|&r| RawName(r)))
    }

    #[test]
    fn substitution_avoids_capture() {
        // x = #0, y = #1 free; [x ↦ y](lam y. x)
        let t = DirectTerm::lam(pv(1), v(0));
        let s = Subst::identity().add_subst(NameBinder::from_raw(RawName(0)), v(1));
        let out = subst_direct(&scope(&[0, 1]), &s, &t);
        assert_eq!(out, DirectTerm::lam(pv(2), v(1)));
    }

    #[test]
    fn identity_substitution_is_identity() {
        let t = DirectTerm::lam(pv(1), DirectTerm::app(v(0), v(1)));
        assert_eq!(subst_direct(&scope(&[0]), &Subst::identity(), &t), t);
    }

    #[test]
    fn substitution_into_pi_domain_and_body() {
        // [#0 ↦ U] fun (x : #0) -> #0, x = #1
        let t = DirectTerm::pi(pv(1), v(0), v(0));
        let s = Subst::identity().add_subst(NameBinder::from_raw(RawName(0)), DirectTerm::Universe);
        let out = subst_direct(&scope(&[]), &s, &t);
        assert_eq!(out, DirectTerm::pi(pv(1), DirectTerm::Universe, DirectTerm::Universe));
    }

    #[test]
    fn whnf_examples() {
        let s = scope(&[0, 1]);
        let t = DirectTerm::first(DirectTerm::pair(v(0), v(1)));
        assert_eq!(whnf_direct(&s, &t), v(0));
        let id = DirectTerm::lam(pv(0), v(0));
        assert_eq!(
            whnf_direct(&Scope::empty(), &DirectTerm::app(id, DirectTerm::Universe)),
            DirectTerm::Universe
        );
        assert_eq!(whnf_direct(&s, &v(1)), v(1));
    }

    #[test]
    fn whnf_stops_at_head() {
        // lam x. (lam y. y) x is already head normal
        let inner = DirectTerm::app(DirectTerm::lam(pv(1), v(1)), v(0));
        let t = DirectTerm::lam(pv(0), inner);
        let out = whnf_direct(&Scope::empty(), &t);
        assert_eq!(out, t);
        assert!(is_whnf(&out));
        assert!(!is_normal(&out));
    }

    #[test]
    fn nf_under_binder() {
        let inner = DirectTerm::app(DirectTerm::lam(pv(1), v(1)), v(0));
        let t = DirectTerm::lam(pv(0), inner);
        assert_eq!(nf_direct(&Scope::empty(), &t), DirectTerm::lam(pv(0), v(0)));
    }

    #[test]
    fn pair_pattern_beta() {
        // (lam (a, b). b a) (U, #0)
        let f = DirectTerm::lam(Pattern::pair(pv(1), pv(2)), DirectTerm::app(v(2), v(1)));
        let t = DirectTerm::app(f, DirectTerm::pair(DirectTerm::Universe, v(0)));
        let out = nf_direct(&scope(&[0]), &t);
        assert_eq!(out, DirectTerm::app(v(0), DirectTerm::Universe));
    }

    #[test]
    fn wildcard_pattern_discards() {
        let f = DirectTerm::lam(Pattern::Wildcard, DirectTerm::Universe);
        let t = DirectTerm::app(f, v(0));
        assert_eq!(nf_direct(&scope(&[0]), &t), DirectTerm::Universe);
    }

    #[test]
    fn nf_refreshes_shadowing_binder() {
        // after sinking lam #0. #0 into {0}, normalizing renames the binder
        let t = DirectTerm::lam(pv(0), v(0));
        let out = nf_direct(&scope(&[0]), &t);
        assert_eq!(out, DirectTerm::lam(pv(1), v(1)));
        assert!(out.check_distinct(&scope(&[0])).is_ok());
    }

    #[test]
    fn fuel_limits_omega() {
        let b = fresh_binder(&Scope::empty());
        let w = DirectTerm::lam(Pattern::Var(b), DirectTerm::app(v(0), v(0)));
        let omega = DirectTerm::app(w.clone(), w);
        let err = nf_direct_with_fuel(&Scope::empty(), &omega, &mut Fuel::limited(50));
        assert_eq!(err, Err(NormalizeError::FuelExhausted { limit: 50 }));
    }

    #[test]
    fn free_names_respect_binders() {
        let t = DirectTerm::pi(pv(1), v(1), DirectTerm::app(v(1), v(2)));
        assert_eq!(t.free_names(), [RawName(1), RawName(2)].into_iter().collect());
    }

    #[test]
    #[should_panic(expected = "not in scope")]
    fn nf_rejects_out_of_scope_input() {
        nf_direct(&scope(&[0]), &v(3));
    }

    #[test]
    fn checker_distinguishes_shadowing() {
        let t = DirectTerm::lam(pv(0), v(0));
        assert!(t.check_scope(&scope(&[0])).is_ok());
        assert_eq!(t.check_distinct(&scope(&[0])), Err(ScopeError::NotFresh(RawName(0))));
        assert_eq!(v(2).check_scope(&scope(&[0])), Err(ScopeError::NotInScope(RawName(2))));
    }
}
