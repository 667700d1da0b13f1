//! The free foil: abstract syntax freely generated from a signature.
//!
//! A [`Signature`] describes the non-variable constructors of a language as
//! a node type with two kinds of children: *scoped* children, which bind one
//! variable, and plain *term* children.  [`Ast`] adds variables and ties the
//! knot.  Every signature gets capture-avoiding [`substitute`] and sinking
//! for free; the only obligation is [`Signature::map_node`].

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::fmt;
use std::marker::PhantomData;
use std::sync::Arc;

use crate::encode::{write_raw, CanonicalEncode};
use crate::foil::{
    extend_renaming_binder, extend_scope, scope_checks_enabled, sink_subst, with_refreshed, Name, NameBinder, RawName,
    Scope, ScopeCheck, ScopeError, Sinkable, Subst, VarInjection,
};

/// A two-sorted signature, mapped like a bifunctor.
pub trait Signature: Sized + 'static {
    /// One layer of syntax with scoped children of type `Sc` and term
    /// children of type `T`.
    type Node<Sc, T>;

    /// Number of distinct constructor tags.
    const TAG_COUNT: u8;

    /// Applies `f_scoped` to every scoped child and `f_term` to every term
    /// child, left to right, keeping the constructor.
    fn map_node<Sc, T, Sc2, T2>(
        node: Self::Node<Sc, T>,
        f_scoped: impl FnMut(Sc) -> Sc2,
        f_term: impl FnMut(T) -> T2,
    ) -> Self::Node<Sc2, T2>;

    fn as_ref<Sc, T>(node: &Self::Node<Sc, T>) -> Self::Node<&Sc, &T>;

    /// Constructor tag in `0..TAG_COUNT`.
    fn tag<Sc, T>(node: &Self::Node<Sc, T>) -> u8;

    fn node_eq<Sc: PartialEq, T: PartialEq>(a: &Self::Node<Sc, T>, b: &Self::Node<Sc, T>) -> bool;

    fn node_fmt<Sc: fmt::Debug, T: fmt::Debug>(node: &Self::Node<Sc, T>, f: &mut fmt::Formatter<'_>) -> fmt::Result;
}

/// A child of a node, in visiting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Child<Sc, T> {
    Scoped(Sc),
    Term(T),
}

/// The children of `node` in the order `map_node` visits them.
pub fn children<S: Signature, Sc, T>(node: &S::Node<Sc, T>) -> Vec<Child<&Sc, &T>> {
    let out = RefCell::new(Vec::new());
    let _: S::Node<(), ()> = S::map_node(
        S::as_ref(node),
        |s| out.borrow_mut().push(Child::Scoped(s)),
        |t| out.borrow_mut().push(Child::Term(t)),
    );
    out.into_inner()
}

/// A subterm with one bound variable; `body` lives in the binder's inner
/// scope.
pub struct ScopedAst<S: Signature> {
    pub binder: NameBinder,
    pub body: Ast<S>,
}

pub enum Ast<S: Signature> {
    Var(Name),
    Node(Arc<S::Node<ScopedAst<S>, Ast<S>>>),
}

impl<S: Signature> ScopedAst<S> {
    pub fn new(binder: NameBinder, body: Ast<S>) -> Self {
        ScopedAst { binder, body }
    }
}

impl<S: Signature> Ast<S> {
    pub fn node(node: S::Node<ScopedAst<S>, Ast<S>>) -> Self {
        Ast::Node(Arc::new(node))
    }

    pub fn free_names(&self) -> BTreeSet<RawName> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Ast::Var(_) => 1,
            Ast::Node(node) => {
                1 + children::<S, _, _>(node)
                    .into_iter()
                    .map(|c| match c {
                        Child::Scoped(s) => s.body.size(),
                        Child::Term(t) => t.size(),
                    })
                    .sum::<usize>()
            }
        }
    }
}

fn collect_free<S: Signature>(t: &Ast<S>, bound: &mut Vec<RawName>, out: &mut BTreeSet<RawName>) {
    match t {
        Ast::Var(n) => {
            if !bound.contains(&n.raw()) {
                out.insert(n.raw());
            }
        }
        Ast::Node(node) => {
            for c in children::<S, _, _>(node) {
                match c {
                    Child::Scoped(s) => {
                        bound.push(s.binder.raw());
                        collect_free(&s.body, bound, out);
                        bound.pop();
                    }
                    Child::Term(t) => collect_free(t, bound, out),
                }
            }
        }
    }
}

impl<S: Signature> Clone for ScopedAst<S> {
    fn clone(&self) -> Self {
        ScopedAst {
            binder: self.binder,
            body: self.body.clone(),
        }
    }
}

impl<S: Signature> Clone for Ast<S> {
    fn clone(&self) -> Self {
        match self {
            Ast::Var(n) => Ast::Var(*n),
            Ast::Node(node) => Ast::Node(Arc::clone(node)),
        }
    }
}

impl<S: Signature> PartialEq for ScopedAst<S> {
    fn eq(&self, other: &Self) -> bool {
        self.binder == other.binder && self.body == other.body
    }
}

impl<S: Signature> Eq for ScopedAst<S> {}

impl<S: Signature> PartialEq for Ast<S> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Ast::Var(a), Ast::Var(b)) => a == b,
            (Ast::Node(a), Ast::Node(b)) => Arc::ptr_eq(a, b) || S::node_eq(&**a, &**b),
            _ => false,
        }
    }
}

impl<S: Signature> Eq for Ast<S> {}

impl<S: Signature> fmt::Debug for ScopedAst<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}. {:?}", self.binder, self.body)
    }
}

impl<S: Signature> fmt::Debug for Ast<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Var(n) => write!(f, "{n}"),
            Ast::Node(node) => S::node_fmt(&**node, f),
        }
    }
}

impl<S: Signature> VarInjection for Ast<S> {
    fn var(name: Name) -> Self {
        Ast::Var(name)
    }
}

impl<S: Signature> Sinkable for Ast<S> {
    fn sinkability_proof(&self, rename: &dyn Fn(Name) -> Name) -> Self {
        match self {
            Ast::Var(n) => Ast::Var(rename(*n)),
            Ast::Node(node) => Ast::node(S::map_node(
                S::as_ref(&**node),
                |scoped: &ScopedAst<S>| {
                    let (binder, rename2) = extend_renaming_binder(rename, scoped.binder);
                    ScopedAst::new(binder, scoped.body.sinkability_proof(&rename2))
                },
                |t: &Ast<S>| t.sinkability_proof(rename),
            )),
        }
    }
}

/// Moves an AST into a larger scope.  Free of cost; see
/// [`crate::foil::sink_checked`] for the checked variant.
#[inline(always)]
pub fn sink_ast<S: Signature>(ast: Ast<S>) -> Ast<S> {
    ast
}

impl<S: Signature> CanonicalEncode for Ast<S> {
    fn encode_into(&self, out: &mut Vec<u8>) {
        match self {
            Ast::Var(n) => {
                out.push(0x20);
                write_raw(out, n.raw());
            }
            Ast::Node(node) => {
                out.push(0x21);
                out.push(S::tag(&**node));
                for c in children::<S, _, _>(node) {
                    match c {
                        Child::Scoped(s) => {
                            out.push(0x22);
                            write_raw(out, s.binder.raw());
                            s.body.encode_into(out);
                        }
                        Child::Term(t) => t.encode_into(out),
                    }
                }
            }
        }
    }
}

impl<S: Signature> ScopeCheck for Ast<S> {
    fn check_scope(&self, scope: &Scope) -> Result<(), ScopeError> {
        check(self, scope, false)
    }

    fn check_distinct(&self, scope: &Scope) -> Result<(), ScopeError> {
        check(self, scope, true)
    }
}

fn check<S: Signature>(t: &Ast<S>, scope: &Scope, distinct: bool) -> Result<(), ScopeError> {
    match t {
        Ast::Var(n) if scope.contains_name(*n) => Ok(()),
        Ast::Var(n) => Err(ScopeError::NotInScope(n.raw())),
        Ast::Node(node) => {
            for c in children::<S, _, _>(node) {
                match c {
                    Child::Scoped(s) => {
                        let raw = s.binder.raw();
                        if distinct && scope.contains(raw) {
                            return Err(ScopeError::NotFresh(raw));
                        }
                        check(&s.body, &scope.insert(raw), distinct)?;
                    }
                    Child::Term(t) => check(t, scope, distinct)?,
                }
            }
            Ok(())
        }
    }
}

/// Capture-avoiding substitution, generic in the signature.  `scope` is the
/// output scope.  Every scoped child is refreshed independently against
/// `scope`.
pub fn substitute<S: Signature>(scope: &Scope, subst: &Subst<Ast<S>>, ast: &Ast<S>) -> Ast<S> {
    if scope_checks_enabled() {
        for raw in ast.free_names() {
            assert!(
                subst.get(Name::from_raw(raw)).is_some() || scope.contains(raw),
                "free name {raw} is neither substituted nor in the output scope {scope:?}"
            );
        }
        for (raw, e) in subst.entries() {
            if let Err(err) = e.check_scope(scope) {
                panic!("substitution entry for {raw} leaves the output scope: {err}");
            }
        }
    }
    substitute_unchecked(scope, subst, ast)
}

pub(crate) fn substitute_unchecked<S: Signature>(scope: &Scope, subst: &Subst<Ast<S>>, ast: &Ast<S>) -> Ast<S> {
    match ast {
        Ast::Var(name) => subst.lookup(*name),
        Ast::Node(node) => Ast::node(S::map_node(
            S::as_ref(&**node),
            |scoped: &ScopedAst<S>| {
                let binder = with_refreshed(scope, scoped.binder.name());
                let subst2 = sink_subst(subst.clone()).add_rename(scoped.binder, binder.name());
                let scope2 = extend_scope(binder, scope);
                ScopedAst::new(binder, substitute_unchecked(&scope2, &subst2, &scoped.body))
            },
            |t: &Ast<S>| substitute_unchecked(scope, subst, t),
        )),
    }
}

/// Sum of two signatures.
pub struct Sum<F, G>(PhantomData<fn() -> (F, G)>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SumNode<A, B> {
    InL(A),
    InR(B),
}

impl<F: Signature, G: Signature> Signature for Sum<F, G> {
    type Node<Sc, T> = SumNode<F::Node<Sc, T>, G::Node<Sc, T>>;

    const TAG_COUNT: u8 = F::TAG_COUNT + G::TAG_COUNT;

    fn map_node<Sc, T, Sc2, T2>(
        node: Self::Node<Sc, T>,
        f_scoped: impl FnMut(Sc) -> Sc2,
        f_term: impl FnMut(T) -> T2,
    ) -> Self::Node<Sc2, T2> {
        match node {
            SumNode::InL(a) => SumNode::InL(F::map_node(a, f_scoped, f_term)),
            SumNode::InR(b) => SumNode::InR(G::map_node(b, f_scoped, f_term)),
        }
    }

    fn as_ref<Sc, T>(node: &Self::Node<Sc, T>) -> Self::Node<&Sc, &T> {
        match node {
            SumNode::InL(a) => SumNode::InL(F::as_ref(a)),
            SumNode::InR(b) => SumNode::InR(G::as_ref(b)),
        }
    }

    fn tag<Sc, T>(node: &Self::Node<Sc, T>) -> u8 {
        match node {
            SumNode::InL(a) => F::tag(a),
            SumNode::InR(b) => F::TAG_COUNT + G::tag(b),
        }
    }

    fn node_eq<Sc: PartialEq, T: PartialEq>(a: &Self::Node<Sc, T>, b: &Self::Node<Sc, T>) -> bool {
        match (a, b) {
            (SumNode::InL(a), SumNode::InL(b)) => F::node_eq(a, b),
            (SumNode::InR(a), SumNode::InR(b)) => G::node_eq(a, b),
            _ => false,
        }
    }

    fn node_fmt<Sc: fmt::Debug, T: fmt::Debug>(node: &Self::Node<Sc, T>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match node {
            SumNode::InL(a) => F::node_fmt(a, f),
            SumNode::InR(b) => G::node_fmt(b, f),
        }
    }
}
