mod common;

use proptest::prelude::*;

use common::{arb_direct_in_scope, arb_naive_term, arb_scope, arb_single_binder_term};
use scopefoil::direct::DirectTerm;
use scopefoil::encode::CanonicalEncode;
use scopefoil::foil::{
    add_subst, extend_scope, fresh_binder, fresh_raw_name, identity_subst, lookup_subst, name_of, sink, sink_checked,
    with_refreshed, Name, NameBinder, RawName, Scope, Subst,
};
use scopefoil::free::sink_ast;
use scopefoil::lambda_pi::direct_to_free;

proptest! {
    #[test]
    fn fresh_name_is_not_in_scope(scope in arb_scope()) {
        prop_assert!(!scope.contains(fresh_raw_name(&scope)));
    }

    #[test]
    fn refresh_keeps_raw_iff_free(scope in arb_scope(), raw in 0usize..20) {
        let b = with_refreshed(&scope, Name::from_raw(RawName(raw)));
        prop_assert_eq!(b.raw() == RawName(raw), !scope.contains(RawName(raw)));
        prop_assert!(!scope.contains(b.raw()));
    }

    #[test]
    fn extending_with_a_fresh_binder_adds_one(scope in arb_scope()) {
        let b = fresh_binder(&scope);
        let bigger = extend_scope(b, &scope);
        prop_assert_eq!(bigger.len(), scope.len() + 1);
        prop_assert!(scope.is_subset(&bigger));
        prop_assert!(bigger.contains(b.raw()));
    }

    #[test]
    fn sinking_preserves_serialization((scope, t) in arb_direct_in_scope(arb_naive_term()), extra in arb_scope()) {
        let target = Scope::from_raw_names(scope.iter().chain(extra.iter()));
        let bytes = t.to_bytes();
        prop_assert_eq!(sink(t.clone()).to_bytes(), bytes.clone());
        prop_assert_eq!(sink_checked(t, &scope, &target).to_bytes(), bytes);
    }

    #[test]
    fn sinking_free_terms_preserves_serialization((scope, t) in arb_direct_in_scope(arb_single_binder_term())) {
        let f = direct_to_free(&t).unwrap();
        let bytes = f.to_bytes();
        prop_assert_eq!(sink_ast(f.clone()).to_bytes(), bytes.clone());
        prop_assert_eq!(sink_checked(f, &scope, &scope).to_bytes(), bytes);
    }

    #[test]
    fn lookup_after_add(raw in 0usize..10, other in 0usize..10, target in 0usize..10) {
        let b = NameBinder::from_raw(RawName(raw));
        let t = DirectTerm::var(target);
        let s = add_subst(&identity_subst(), b, t.clone());
        prop_assert_eq!(lookup_subst(&s, name_of(b)), t);
        if other != raw {
            let n = Name::from_raw(RawName(other));
            prop_assert_eq!(lookup_subst(&s, n), DirectTerm::Var(n));
        }
    }

    #[test]
    fn empty_subst_is_identity(raw in 0usize..50) {
        let n = Name::from_raw(RawName(raw));
        let s: Subst<DirectTerm> = Subst::default();
        prop_assert_eq!(s.lookup(n), identity_subst::<DirectTerm>().lookup(n));
        prop_assert_eq!(s.lookup(n), DirectTerm::Var(n));
    }
}
