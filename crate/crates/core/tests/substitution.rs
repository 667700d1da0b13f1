mod common;

use proptest::prelude::*;

use common::{arb_direct_in_scope, arb_naive_term, arb_scope, arb_single_binder_term};
use scopefoil::direct::{subst_direct, DirectTerm};
use scopefoil::foil::{fresh_binder, name_of, Name, NameBinder, RawName, Scope, ScopeCheck, Subst};
use scopefoil::free::{substitute, Ast, SumNode};
use scopefoil::lambda_pi::{direct_to_free, free_to_direct, FreeTerm, PairF, PairSig};
use scopefoil::pattern::Pattern;

/// How to build one substitution entry from the members of a target scope.
#[derive(Debug, Clone)]
enum Entry {
    Var(usize),
    App(usize, usize),
    Lam(usize),
    Pair(usize, usize),
}

fn arb_entries() -> impl Strategy<Value = Vec<Entry>> {
    let entry = prop_oneof![
        (0usize..64).prop_map(Entry::Var),
        (0usize..64, 0usize..64).prop_map(|(a, b)| Entry::App(a, b)),
        (0usize..64).prop_map(Entry::Lam),
        (0usize..64, 0usize..64).prop_map(|(a, b)| Entry::Pair(a, b)),
    ];
    proptest::collection::vec(entry, 16)
}

fn member(target: &Scope, i: usize) -> DirectTerm {
    let raws: Vec<RawName> = target.iter().collect();
    DirectTerm::Var(Name::from_raw(raws[i % raws.len()]))
}

fn build_entry(target: &Scope, e: &Entry) -> DirectTerm {
    match *e {
        Entry::Var(a) => member(target, a),
        Entry::App(a, b) => DirectTerm::app(member(target, a), member(target, b)),
        Entry::Pair(a, b) => DirectTerm::pair(member(target, a), member(target, b)),
        Entry::Lam(a) => {
            let b = fresh_binder(target);
            let body = if a % 2 == 0 {
                DirectTerm::Var(name_of(b))
            } else {
                member(target, a)
            };
            DirectTerm::lam(Pattern::Var(b), body)
        }
    }
}

/// A substitution from `scope` into `scope` plus `extra`.
fn build_subst(scope: &Scope, extra: &Scope, entries: &[Entry]) -> (Scope, Subst<DirectTerm>) {
    let target = Scope::from_raw_names(scope.iter().chain(extra.iter()).chain([RawName(100)]));
    let mut s = Subst::identity();
    for (raw, e) in scope.iter().zip(entries.iter().cycle()) {
        s = s.add_subst(NameBinder::from_raw(raw), build_entry(&target, e));
    }
    (target, s)
}

fn to_free_subst(s: &Subst<DirectTerm>) -> Subst<FreeTerm> {
    s.entries().fold(Subst::identity(), |acc, (raw, e)| {
        acc.add_subst(
            NameBinder::from_raw(raw),
            direct_to_free(e).expect("entries bind single variables"),
        )
    })
}

fn inject(a: &Ast<PairSig>) -> FreeTerm {
    match a {
        Ast::Var(n) => Ast::Var(*n),
        Ast::Node(node) => Ast::node(SumNode::InR(match &**node {
            PairF::Pair(l, r) => PairF::Pair(inject(l), inject(r)),
            PairF::First(t) => PairF::First(inject(t)),
            PairF::Second(t) => PairF::Second(inject(t)),
        })),
    }
}

fn arb_pair_ast() -> impl Strategy<Value = Ast<PairSig>> {
    let leaf = (0usize..8).prop_map(|r| Ast::Var(Name::from_raw(RawName(r))));
    leaf.prop_recursive(5, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Ast::node(PairF::Pair(l, r))),
            inner.clone().prop_map(|t| Ast::node(PairF::First(t))),
            inner.prop_map(|t| Ast::node(PairF::Second(t))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn direct_identity_subst((scope, t) in arb_direct_in_scope(arb_naive_term())) {
        prop_assert_eq!(subst_direct(&scope, &Subst::identity(), &t), t);
    }

    #[test]
    fn free_identity_subst((scope, t) in arb_direct_in_scope(arb_single_binder_term())) {
        let f = direct_to_free(&t).unwrap();
        prop_assert_eq!(substitute(&scope, &Subst::identity(), &f), f);
    }

    #[test]
    fn direct_subst_lands_in_target(
        (scope, t) in arb_direct_in_scope(arb_naive_term()),
        extra in arb_scope(),
        entries in arb_entries(),
    ) {
        let (target, s) = build_subst(&scope, &extra, &entries);
        let r = subst_direct(&target, &s, &t);
        prop_assert!(r.check_scope(&target).is_ok());
    }

    #[test]
    fn free_subst_lands_in_target(
        (scope, t) in arb_direct_in_scope(arb_single_binder_term()),
        extra in arb_scope(),
        entries in arb_entries(),
    ) {
        let (target, s) = build_subst(&scope, &extra, &entries);
        let r = substitute(&target, &to_free_subst(&s), &direct_to_free(&t).unwrap());
        prop_assert!(r.check_scope(&target).is_ok());
    }

    #[test]
    fn free_subst_agrees_with_direct(
        (scope, t) in arb_direct_in_scope(arb_single_binder_term()),
        extra in arb_scope(),
        entries in arb_entries(),
    ) {
        let (target, s) = build_subst(&scope, &extra, &entries);
        let direct = subst_direct(&target, &s, &t);
        let free = substitute(&target, &to_free_subst(&s), &direct_to_free(&t).unwrap());
        prop_assert_eq!(free_to_direct(&free), direct);
    }

    #[test]
    fn pair_signature_alone_matches_sum(a in arb_pair_ast(), targets in proptest::collection::vec(0usize..8, 8)) {
        let scope = Scope::from_raw_names((0..8).map(RawName));
        let mut alone: Subst<Ast<PairSig>> = Subst::identity();
        let mut summed: Subst<FreeTerm> = Subst::identity();
        for (i, t) in targets.iter().enumerate().filter(|(i, _)| i % 3 != 0) {
            let value: Ast<PairSig> = Ast::node(PairF::First(Ast::Var(Name::from_raw(RawName(*t)))));
            summed = summed.add_subst(NameBinder::from_raw(RawName(i)), inject(&value));
            alone = alone.add_subst(NameBinder::from_raw(RawName(i)), value);
        }
        let r = substitute(&scope, &alone, &a);
        prop_assert!(r.check_scope(&scope).is_ok());
        prop_assert_eq!(inject(&r), substitute(&scope, &summed, &inject(&a)));
        prop_assert_eq!(substitute(&scope, &Subst::identity(), &a), a);
    }
}
