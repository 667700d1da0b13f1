//! Patterns: bundles of zero or more binders.
//!
//! A pattern extends an outer scope to an inner scope.  The components of a
//! [`Pattern::Pair`] chain: the left pattern's inner scope is the right
//! pattern's outer scope.

use std::fmt;

use crate::encode::{write_raw, CanonicalEncode};
use crate::foil::{
    extend_scope, sink_subst, with_refreshed, Name, NameBinder, RawName, Scope, ScopeError, Subst, VarInjection,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    Wildcard,
    Var(NameBinder),
    Pair(Box<Pattern>, Box<Pattern>),
}

impl Pattern {
    pub fn pair(left: Pattern, right: Pattern) -> Self {
        Pattern::Pair(Box::new(left), Box::new(right))
    }

    /// Visits binders left to right.
    pub fn for_each_binder(&self, f: &mut impl FnMut(NameBinder)) {
        match self {
            Pattern::Wildcard => {}
            Pattern::Var(b) => f(*b),
            Pattern::Pair(l, r) => {
                l.for_each_binder(f);
                r.for_each_binder(f);
            }
        }
    }

    pub fn binds(&self, raw: RawName) -> bool {
        match self {
            Pattern::Wildcard => false,
            Pattern::Var(b) => b.raw() == raw,
            Pattern::Pair(l, r) => l.binds(raw) || r.binds(raw),
        }
    }

    pub fn binder_count(&self) -> usize {
        match self {
            Pattern::Wildcard => 0,
            Pattern::Var(_) => 1,
            Pattern::Pair(l, r) => l.binder_count() + r.binder_count(),
        }
    }

    /// Same constructor tree, ignoring binder names.
    pub fn same_shape(&self, other: &Pattern) -> bool {
        match (self, other) {
            (Pattern::Wildcard, Pattern::Wildcard) | (Pattern::Var(_), Pattern::Var(_)) => true,
            (Pattern::Pair(a, b), Pattern::Pair(c, d)) => a.same_shape(c) && b.same_shape(d),
            _ => false,
        }
    }

    /// Checks that every binder is fresh for the scope it extends and returns
    /// the inner scope.
    pub fn check_scope(&self, scope: &Scope) -> Result<Scope, ScopeError> {
        let mut inner = scope.clone();
        let mut err = None;
        self.for_each_binder(&mut |b| {
            if err.is_some() {
                return;
            }
            if inner.contains(b.raw()) {
                err = Some(if scope.contains(b.raw()) {
                    ScopeError::NotFresh(b.raw())
                } else {
                    ScopeError::RepeatedBinder(b.raw())
                });
            } else {
                inner = extend_scope(b, &inner);
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(inner),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Wildcard => f.write_str("_"),
            Pattern::Var(b) => write!(f, "{b}"),
            Pattern::Pair(l, r) => write!(f, "({l}, {r})"),
        }
    }
}

impl CanonicalEncode for Pattern {
    fn encode_into(&self, out: &mut Vec<u8>) {
        match self {
            Pattern::Wildcard => out.push(0x10),
            Pattern::Var(b) => {
                out.push(0x11);
                write_raw(out, b.raw());
            }
            Pattern::Pair(l, r) => {
                out.push(0x12);
                l.encode_into(out);
                r.encode_into(out);
            }
        }
    }
}

/// Raw names bound by `pattern`, left to right.
pub fn names_of_pattern(pattern: &Pattern) -> Vec<RawName> {
    let mut names = Vec::with_capacity(pattern.binder_count());
    pattern.for_each_binder(&mut |b| names.push(b.raw()));
    names
}

/// The inner scope of `pattern` over `scope`.
pub fn extend_scope_pattern(pattern: &Pattern, scope: &Scope) -> Scope {
    let mut inner = scope.clone();
    pattern.for_each_binder(&mut |b| inner = extend_scope(b, &inner));
    inner
}

/// Carries a renaming of the outer scope across `pattern` without refreshing
/// it.  The pattern comes back unchanged; the new renaming is the identity on
/// the names the pattern binds and defers to `rename` elsewhere.
pub fn extend_renaming<'a>(
    rename: &'a dyn Fn(Name) -> Name,
    pattern: &Pattern,
) -> (Pattern, impl Fn(Name) -> Name + 'a) {
    let bound = names_of_pattern(pattern);
    let extended = move |name: Name| {
        if bound.contains(&name.raw()) {
            name
        } else {
            rename(name)
        }
    };
    (pattern.clone(), extended)
}

/// Refreshes the binders of `pattern` against `scope`, left to right.
///
/// Returns the refreshed pattern, `subst` extended with a renaming from each
/// old binder to its replacement, and the inner scope of the new pattern.
pub fn with_pattern<E: Clone + VarInjection>(
    scope: &Scope,
    pattern: &Pattern,
    subst: &Subst<E>,
) -> (Pattern, Subst<E>, Scope) {
    match pattern {
        Pattern::Wildcard => (Pattern::Wildcard, sink_subst(subst.clone()), scope.clone()),
        Pattern::Var(binder) => {
            let fresh = with_refreshed(scope, binder.name());
            let subst = sink_subst(subst.clone()).add_rename(*binder, fresh.name());
            let scope = extend_scope(fresh, scope);
            (Pattern::Var(fresh), subst, scope)
        }
        Pattern::Pair(left, right) => {
            let (left, subst, scope) = with_pattern(scope, left, subst);
            let (right, subst, scope) = with_pattern(&scope, right, &subst);
            (Pattern::pair(left, right), subst, scope)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scope(raws: &[usize]) -> Scope {
        Scope::from_raw_names(raws.iter().map(|&r| RawName(r)))
    }

    fn var(r: usize) -> Pattern {
        Pattern::Var(NameBinder::from_raw(RawName(r)))
    }

    fn name(r: usize) -> Name {
        Name::from_raw(RawName(r))
    }

    #[derive(Debug, Clone, PartialEq)]
    struct V(Name);

    impl VarInjection for V {
        fn var(name: Name) -> Self {
            V(name)
        }
    }

    #[test]
    fn names_of_pattern_examples() {
        assert_eq!(names_of_pattern(&Pattern::Wildcard), vec![]);
        assert_eq!(names_of_pattern(&var(3)), vec![RawName(3)]);
        let p = Pattern::pair(var(1), Pattern::pair(Pattern::Wildcard, var(2)));
        assert_eq!(names_of_pattern(&p), vec![RawName(1), RawName(2)]);
    }

    #[test]
    fn extend_scope_pattern_examples() {
        assert_eq!(extend_scope_pattern(&Pattern::Wildcard, &scope(&[0])), scope(&[0]));
        assert_eq!(extend_scope_pattern(&var(1), &scope(&[0])), scope(&[0, 1]));
        assert_eq!(
            extend_scope_pattern(&Pattern::pair(var(1), var(2)), &scope(&[0])),
            scope(&[0, 1, 2])
        );
    }

    #[test]
    fn extend_renaming_keeps_pattern() {
        let id = |n: Name| n;
        for p in [Pattern::Wildcard, var(3), Pattern::pair(var(1), var(4))] {
            let (q, _) = extend_renaming(&id, &p);
            assert_eq!(q.to_bytes(), p.to_bytes());
        }
        let shift = |n: Name| Name::from_raw(RawName(n.raw().0 + 10));
        let (_, r) = extend_renaming(&shift, &var(3));
        assert_eq!(r(name(3)), name(3));
        assert_eq!(r(name(1)), name(11));
    }

    #[test]
    fn with_pattern_reuses_when_no_collision() {
        let (p, s, sc) = with_pattern::<V>(&scope(&[]), &var(0), &Subst::identity());
        assert_eq!(p, var(0));
        assert_eq!(s.lookup(name(0)), V(name(0)));
        assert_eq!(sc, scope(&[0]));
    }

    #[test]
    fn with_pattern_refreshes_collision() {
        let (p, s, sc) = with_pattern::<V>(&scope(&[0]), &var(0), &Subst::identity());
        assert_eq!(p, var(1));
        assert_eq!(s.lookup(name(0)), V(name(1)));
        assert_eq!(sc, scope(&[0, 1]));
    }

    // Simulates refreshing the two halves of a pair in a given order.
    fn refresh_in_order(scope0: &Scope, raws: [usize; 2], left_first: bool) -> [RawName; 2] {
        let mut out = [RawName(0); 2];
        let order = if left_first { [0, 1] } else { [1, 0] };
        let mut sc = scope0.clone();
        for i in order {
            let b = with_refreshed(&sc, name(raws[i]));
            sc = extend_scope(b, &sc);
            out[i] = b.raw();
        }
        out
    }

    #[test]
    fn with_pattern_chains_left_to_right() {
        let s0 = scope(&[0]);
        let (p, s, sc) = with_pattern::<V>(&s0, &Pattern::pair(var(0), var(1)), &Subst::identity());
        let got = names_of_pattern(&p);
        let left_first = refresh_in_order(&s0, [0, 1], true);
        let right_first = refresh_in_order(&s0, [0, 1], false);
        assert_eq!(got, left_first.to_vec());
        assert_ne!(left_first, right_first);
        assert_eq!(got, vec![RawName(1), RawName(2)]);
        assert_eq!(s.lookup(name(0)), V(name(1)));
        assert_eq!(s.lookup(name(1)), V(name(2)));
        assert_eq!(sc, scope(&[0, 1, 2]));
    }

    #[test]
    fn wildcard_leaves_everything_alone() {
        let subst = Subst::identity().add_subst(NameBinder::from_raw(RawName(0)), V(name(4)));
        let (p, s, sc) = with_pattern(&scope(&[0, 4]), &Pattern::Wildcard, &subst);
        assert_eq!(p, Pattern::Wildcard);
        assert_eq!(s, subst);
        assert_eq!(sc, scope(&[0, 4]));
    }

    #[test]
    fn check_scope_reports_problems() {
        assert_eq!(var(1).check_scope(&scope(&[0])), Ok(scope(&[0, 1])));
        assert_eq!(var(0).check_scope(&scope(&[0])), Err(ScopeError::NotFresh(RawName(0))));
        assert_eq!(
            Pattern::pair(var(1), var(1)).check_scope(&scope(&[0])),
            Err(ScopeError::RepeatedBinder(RawName(1)))
        );
    }
}
