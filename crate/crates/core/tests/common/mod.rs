//! Generators shared by the property tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;

use scopefoil::direct::{nf_direct_with_fuel, DirectTerm};
use scopefoil::foil::{Name, NameBinder, RawName, Scope};
use scopefoil::lambda_pi::{direct_to_free, free_to_direct, nf_free_with_fuel};
use scopefoil::naive::{open_to_foil, to_foil_term, NaivePattern, NaiveTerm, VarIdent};
use scopefoil::nbe::nf_nbe_with_fuel;
use scopefoil::oracle::{direct_to_debruijn, nf_debruijn_with_fuel, nf_named_with_fuel, DbTerm, ToDeBruijn};
use scopefoil::pattern::Pattern;
use scopefoil::Fuel;

pub const IDENTS: [&str; 8] = ["a", "b", "c", "x", "y", "z", "f", "x0"];

pub fn ident(s: &str) -> VarIdent {
    VarIdent::new(s).unwrap()
}

pub fn arb_ident() -> impl Strategy<Value = VarIdent> {
    prop_oneof![
        4 => proptest::sample::select(&IDENTS[..]).prop_map(ident),
        1 => "[a-zA-Z][a-zA-Z0-9_']{0,5}".prop_filter_map("reserved word", |s| VarIdent::new(s).ok()),
    ]
}

fn distinct_idents(p: &NaivePattern) -> bool {
    let idents = p.idents();
    let set: BTreeSet<_> = idents.iter().collect();
    set.len() == idents.len()
}

/// Patterns of depth at most `depth` without repeated identifiers.
pub fn arb_naive_pattern(depth: u32) -> impl Strategy<Value = NaivePattern> {
    let leaf = prop_oneof![
        1 => Just(NaivePattern::Wildcard),
        3 => arb_ident().prop_map(NaivePattern::Var),
    ];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        (inner.clone(), inner).prop_map(|(l, r)| NaivePattern::pair(l, r))
    })
    .prop_filter("repeated identifier", distinct_idents)
}

/// Any naive term of the full language.
pub fn arb_naive_term() -> impl Strategy<Value = NaiveTerm> {
    let leaf = prop_oneof![
        4 => arb_ident().prop_map(NaiveTerm::Var),
        1 => Just(NaiveTerm::Universe),
    ];
    leaf.prop_recursive(6, 48, 3, |inner| {
        prop_oneof![
            3 => (inner.clone(), inner.clone()).prop_map(|(f, x)| NaiveTerm::app(f, x)),
            3 => (arb_naive_pattern(2), inner.clone()).prop_map(|(p, b)| NaiveTerm::lam(p, b)),
            1 => (arb_naive_pattern(2), inner.clone(), inner.clone()).prop_map(|(p, a, b)| NaiveTerm::pi(p, a, b)),
            1 => (inner.clone(), inner.clone()).prop_map(|(a, b)| NaiveTerm::pair(a, b)),
            1 => inner.clone().prop_map(NaiveTerm::first),
            1 => inner.prop_map(NaiveTerm::second),
        ]
    })
}

/// Terms whose binders all bind one variable, so every engine accepts them.
pub fn arb_single_binder_term() -> impl Strategy<Value = NaiveTerm> {
    let leaf = prop_oneof![
        4 => arb_ident().prop_map(NaiveTerm::Var),
        1 => Just(NaiveTerm::Universe),
    ];
    leaf.prop_recursive(6, 48, 3, |inner| {
        prop_oneof![
            4 => (inner.clone(), inner.clone()).prop_map(|(f, x)| NaiveTerm::app(f, x)),
            4 => (arb_ident(), inner.clone()).prop_map(|(x, b)| NaiveTerm::lam(NaivePattern::Var(x), b)),
            1 => (arb_ident(), inner.clone(), inner.clone()).prop_map(|(x, a, b)| NaiveTerm::pi(NaivePattern::Var(x), a, b)),
            1 => (inner.clone(), inner.clone()).prop_map(|(a, b)| NaiveTerm::pair(a, b)),
            1 => inner.clone().prop_map(NaiveTerm::first),
            1 => inner.prop_map(NaiveTerm::second),
        ]
    })
}

/// Closes `t` by abstracting its free identifiers.
pub fn close(t: NaiveTerm) -> NaiveTerm {
    t.free_idents()
        .into_iter()
        .rev()
        .fold(t, |body, x| NaiveTerm::lam(NaivePattern::Var(x), body))
}

pub fn arb_closed_term() -> impl Strategy<Value = NaiveTerm> {
    arb_naive_term().prop_map(close)
}

pub fn arb_scope() -> impl Strategy<Value = Scope> {
    proptest::collection::btree_set(0usize..16, 0..8).prop_map(|s| Scope::from_raw_names(s.into_iter().map(RawName)))
}

/// A scope and a term whose free names live in it, with distinct binders.
/// Free identifiers are mapped onto scope members (the scope grows if it
/// is too small).
pub fn arb_direct_in_scope(term: impl Strategy<Value = NaiveTerm>) -> impl Strategy<Value = (Scope, DirectTerm)> {
    (arb_scope(), term).prop_map(|(scope, t)| {
        let free: Vec<VarIdent> = t.free_idents().into_iter().collect();
        let mut raws: Vec<RawName> = scope.iter().collect();
        let mut next = scope.max_raw().map_or(0, |m| m.0 + 1);
        while raws.len() < free.len() {
            raws.push(RawName(next));
            next += 1;
        }
        let scope = Scope::from_raw_names(raws.iter().copied());
        let rename = |x: &VarIdent| free.iter().position(|y| y == x).map(|i| Name::from_raw(raws[i]));
        let d = to_foil_term(&rename, &scope, &t).expect("every free identifier is mapped");
        (scope, d)
    })
}

/// Foil patterns of depth at most `depth` over raw names `0..12`; raw
/// names may repeat and collide with any scope.
pub fn arb_foil_pattern(depth: u32) -> impl Strategy<Value = Pattern> {
    let leaf = prop_oneof![
        1 => Just(Pattern::Wildcard),
        3 => (0usize..12).prop_map(|r| Pattern::Var(NameBinder::from_raw(RawName(r)))),
    ];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        (inner.clone(), inner).prop_map(|(l, r)| Pattern::pair(l, r))
    })
}

/// Depth of a pattern, a leaf being depth 0.
pub fn pattern_depth(p: &Pattern) -> u32 {
    match p {
        Pattern::Pair(l, r) => 1 + pattern_depth(l).max(pattern_depth(r)),
        _ => 0,
    }
}

/// Runs `f` on a thread with a large stack; normal forms can be deep.
pub fn with_big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(f)
        .expect("spawning a test thread")
        .join()
        .unwrap_or_else(|e| std::panic::resume_unwind(e))
}

/// Normal forms of `t` from every implementation that accepts it, in
/// canonical form, or `None` when the de Bruijn reference does not finish
/// within `budget` steps.  Implementations other than the reference get
/// four times the budget and must finish.
pub fn all_normal_forms(t: &NaiveTerm, budget: u64) -> Option<Vec<(&'static str, DbTerm)>> {
    let reference = nf_debruijn_with_fuel(&t.to_debruijn(), &mut Fuel::limited(budget)).ok()?;
    let generous = || Fuel::limited(budget * 4);
    let open = open_to_foil(t).expect("generated terms convert");
    let scope = &open.scope;
    let canon = |d: &DirectTerm| direct_to_debruijn(d, &|r| open.ident_of(r));
    let mut out = vec![
        ("debruijn", reference),
        (
            "named",
            nf_named_with_fuel(t, &mut generous())
                .expect("named finishes")
                .to_debruijn(),
        ),
        (
            "foil_direct",
            canon(&nf_direct_with_fuel(scope, &open.term, &mut generous()).expect("direct finishes")),
        ),
    ];
    if let Ok(f) = direct_to_free(&open.term) {
        let free = nf_free_with_fuel(scope, &f, &mut generous()).expect("free finishes");
        let nbe = nf_nbe_with_fuel(scope, &f, &mut generous()).expect("nbe finishes");
        out.push(("free_foil", canon(&free_to_direct(&free))));
        out.push(("nbe", canon(&free_to_direct(&nbe))));
    }
    Some(out)
}

/// The first pair of implementations that disagree, if any.
pub fn disagreement(forms: &[(&'static str, DbTerm)]) -> Option<(&'static str, &'static str)> {
    let (ref_name, reference) = &forms[0];
    forms.iter().find(|(_, d)| d != reference).map(|(n, _)| (*ref_name, *n))
}
