mod common;

use proptest::prelude::*;

use common::{arb_foil_pattern, arb_scope, pattern_depth};
use scopefoil::direct::DirectTerm;
use scopefoil::encode::CanonicalEncode;
use scopefoil::foil::{Name, RawName, Subst};
use scopefoil::pattern::{names_of_pattern, with_pattern, Pattern};

proptest! {
    #[test]
    fn generated_patterns_are_shallow(p in arb_foil_pattern(4)) {
        prop_assert!(pattern_depth(&p) <= 4);
    }

    #[test]
    fn shape_is_preserved(scope in arb_scope(), p in arb_foil_pattern(4)) {
        let (q, _, _) = with_pattern(&scope, &p, &Subst::<DirectTerm>::identity());
        prop_assert!(p.same_shape(&q));
        prop_assert_eq!(p.binder_count(), q.binder_count());
    }

    #[test]
    fn scope_grows_by_binder_count(scope in arb_scope(), p in arb_foil_pattern(4)) {
        let (q, _, inner) = with_pattern(&scope, &p, &Subst::<DirectTerm>::identity());
        prop_assert!(scope.is_subset(&inner));
        prop_assert_eq!(inner.len(), scope.len() + names_of_pattern(&q).len());
    }

    #[test]
    fn refreshed_names_are_distinct_and_fresh(scope in arb_scope(), p in arb_foil_pattern(4)) {
        let (q, _, _) = with_pattern(&scope, &p, &Subst::<DirectTerm>::identity());
        let names = names_of_pattern(&q);
        for (i, a) in names.iter().enumerate() {
            prop_assert!(!scope.contains(*a));
            prop_assert!(!names[i + 1..].contains(a));
        }
    }

    #[test]
    fn non_colliding_patterns_are_kept(scope in arb_scope(), p in arb_foil_pattern(4)) {
        let names = names_of_pattern(&p);
        let distinct = names.iter().enumerate().all(|(i, a)| !names[i + 1..].contains(a));
        prop_assume!(distinct && names.iter().all(|r| !scope.contains(*r)));
        let (q, _, _) = with_pattern(&scope, &p, &Subst::<DirectTerm>::identity());
        prop_assert_eq!(q.to_bytes(), p.to_bytes());
    }

    #[test]
    fn wildcard_changes_nothing(scope in arb_scope(), raw in 0usize..12, target in 0usize..12) {
        let s = Subst::identity().add_subst(
            scopefoil::foil::NameBinder::from_raw(RawName(raw)),
            DirectTerm::var(target),
        );
        let (q, s2, inner) = with_pattern(&scope, &Pattern::Wildcard, &s);
        prop_assert_eq!(q, Pattern::Wildcard);
        prop_assert_eq!(&inner, &scope);
        prop_assert_eq!(s2.clone(), s.clone());
        prop_assert_eq!(s2.lookup(Name::from_raw(RawName(raw))), DirectTerm::var(target));
    }

    #[test]
    fn renaming_maps_old_binders_to_new(scope in arb_scope(), p in arb_foil_pattern(4)) {
        let (q, s, _) = with_pattern(&scope, &p, &Subst::<DirectTerm>::identity());
        // the last occurrence of a raw name wins, as in a nested binder chain
        let old = names_of_pattern(&p);
        let new = names_of_pattern(&q);
        for (i, r) in old.iter().enumerate() {
            if !old[i + 1..].contains(r) {
                prop_assert_eq!(s.lookup(Name::from_raw(*r)), DirectTerm::Var(Name::from_raw(new[i])));
            }
        }
    }
}
