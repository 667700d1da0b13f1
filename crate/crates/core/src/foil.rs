//! Names, scopes, binders and substitutions.
//!
//! A [`Name`] is a raw machine integer that is only meaningful relative to a
//! [`Scope`]: the set of raw names that are live at some program point.  A
//! [`NameBinder`] is a binding occurrence that extends an outer scope with one
//! raw name that is *not* already in it.  New binders come from
//! [`fresh_binder`] (always fresh) or [`with_refreshed`] (reuse the old raw
//! name when it does not collide, otherwise pick a fresh one), which is the
//! renaming discipline of the rapier.
//!
//! Rust has no cheap way to brand values with abstract scope indices that are
//! existentially bound inside recursive data, so scope discipline is checked
//! at runtime instead.  The checks are compiled in for debug builds and can be
//! enabled in release builds by setting `SCOPEFOIL_DEBUG_SCOPES=1`; see
//! [`scope_checks_enabled`].

use std::fmt;
use std::sync::OnceLock;

use imbl::{OrdMap, OrdSet};
use thiserror::Error;

/// The underlying representation of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RawName(pub usize);

impl fmt::Display for RawName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A variable occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name {
    raw: RawName,
}

impl Name {
    /// Wraps a raw name without any scope evidence.
    pub const fn from_raw(raw: RawName) -> Self {
        Name { raw }
    }

    pub const fn raw(self) -> RawName {
        self.raw
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.raw.fmt(f)
    }
}

/// A binding occurrence that extends an outer scope by exactly one name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NameBinder {
    raw: RawName,
}

impl NameBinder {
    /// Wraps a raw name as a binder without checking freshness.
    pub const fn from_raw(raw: RawName) -> Self {
        NameBinder { raw }
    }

    pub const fn raw(self) -> RawName {
        self.raw
    }

    /// The name this binder introduces into its inner scope.
    pub const fn name(self) -> Name {
        Name { raw: self.raw }
    }
}

impl fmt::Display for NameBinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.raw.fmt(f)
    }
}

/// The set of names in scope at some program point.
///
/// Scopes are persistent: extending a scope shares structure with the
/// original, so it is cheap to keep both along different recursion paths.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Scope {
    members: OrdSet<RawName>,
    max: Option<RawName>,
}

impl Scope {
    /// The empty scope, the only scope that can be named without a binder.
    pub fn empty() -> Self {
        Scope::default()
    }

    /// Builds a scope from raw names directly, bypassing binders.
    pub fn from_raw_names<I: IntoIterator<Item = RawName>>(names: I) -> Self {
        let members: OrdSet<RawName> = names.into_iter().collect();
        let max = members.get_max().copied();
        Scope { members, max }
    }

    pub fn contains(&self, raw: RawName) -> bool {
        self.members.contains(&raw)
    }

    pub fn contains_name(&self, name: Name) -> bool {
        self.contains(name.raw)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Largest member, cached.
    pub fn max_raw(&self) -> Option<RawName> {
        self.max
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = RawName> + '_ {
        self.members.iter().copied()
    }

    pub fn is_subset(&self, other: &Scope) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Adds `raw` without the distinctness check (shadowing is allowed).
    pub(crate) fn insert(&self, raw: RawName) -> Scope {
        let mut members = self.members.clone();
        members.insert(raw);
        let max = Some(self.max.map_or(raw, |m| m.max(raw)));
        Scope { members, max }
    }
}

impl fmt::Debug for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter().map(|r| r.0)).finish()
    }
}

/// Whether runtime scope assertions are active.
///
/// Always true in debug builds; in release builds only when the environment
/// variable `SCOPEFOIL_DEBUG_SCOPES` is `1` at first use.
pub fn scope_checks_enabled() -> bool {
    static FROM_ENV: OnceLock<bool> = OnceLock::new();
    cfg!(debug_assertions) || *FROM_ENV.get_or_init(|| std::env::var("SCOPEFOIL_DEBUG_SCOPES").is_ok_and(|v| v == "1"))
}

/// Violations reported by the scope checkers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScopeError {
    #[error("name {0} is not in scope")]
    NotInScope(RawName),
    #[error("binder {0} is not fresh for the scope it extends")]
    NotFresh(RawName),
    #[error("binder {0} occurs twice in one pattern")]
    RepeatedBinder(RawName),
}

/// Runtime scope checkers for terms.
pub trait ScopeCheck {
    /// Every free name is in `scope`.  Binders may shadow names of the
    /// ambient scope (as happens after sinking).
    fn check_scope(&self, scope: &Scope) -> Result<(), ScopeError>;

    /// [`ScopeCheck::check_scope`], and additionally every binder is fresh
    /// for the scope it extends (the Barendregt convention relative to
    /// `scope`).
    fn check_distinct(&self, scope: &Scope) -> Result<(), ScopeError>;
}

/// A raw name that does not occur in `scope`: `0` for the empty scope and
/// one past the maximum otherwise.  Gaps are never reused.
pub fn fresh_raw_name(scope: &Scope) -> RawName {
    match scope.max {
        None => RawName(0),
        Some(RawName(m)) => RawName(m + 1),
    }
}

/// A binder whose name is fresh for `scope`.
pub fn fresh_binder(scope: &Scope) -> NameBinder {
    NameBinder::from_raw(fresh_raw_name(scope))
}

/// Rebinds `name` against `scope`, keeping its raw name when that does not
/// collide with anything in scope.
pub fn with_refreshed(scope: &Scope, name: Name) -> NameBinder {
    if scope.contains(name.raw) {
        fresh_binder(scope)
    } else {
        NameBinder::from_raw(name.raw)
    }
}

pub fn name_of(binder: NameBinder) -> Name {
    binder.name()
}

/// The inner scope of `binder`, which must be fresh for `scope`.
pub fn extend_scope(binder: NameBinder, scope: &Scope) -> Scope {
    if scope_checks_enabled() {
        assert!(
            !scope.contains(binder.raw),
            "binder {} is not fresh for scope {:?}",
            binder,
            scope
        );
    }
    scope.insert(binder.raw)
}

/// Expressions that admit a scope-changing renaming of their free names.
///
/// `sinkability_proof` is the structural traversal that applies `rename` to
/// every free name (binders extend the renaming with the identity on the
/// names they bind).  Because renaming under the foil is always the identity
/// on raw names, user code calls [`sink`] instead; the traversal serves as
/// the debug-mode checker in [`sink_checked`].
pub trait Sinkable: Sized {
    fn sinkability_proof(&self, rename: &dyn Fn(Name) -> Name) -> Self;
}

/// Carries a renaming of the outer scope across a single binder: the result
/// is the identity on the bound name and `rename` elsewhere.
pub fn extend_renaming_binder<'a>(
    rename: &'a dyn Fn(Name) -> Name,
    binder: NameBinder,
) -> (NameBinder, impl Fn(Name) -> Name + 'a) {
    let extended = move |name: Name| {
        if name.raw == binder.raw {
            name
        } else {
            rename(name)
        }
    };
    (binder, extended)
}

/// Moves an expression into a larger scope.  Free of cost.
#[inline(always)]
pub fn sink<E: Sinkable>(expr: E) -> E {
    expr
}

/// [`sink`] with runtime evidence: `source ⊆ target` and every free name of
/// `expr` is in `source`.  The checks only run when
/// [`scope_checks_enabled`]; the returned value is always `expr` itself.
pub fn sink_checked<E: Sinkable>(expr: E, source: &Scope, target: &Scope) -> E {
    if scope_checks_enabled() {
        assert!(
            source.is_subset(target),
            "cannot sink from {:?} into {:?}: not an extension",
            source,
            target
        );
        let _ = expr.sinkability_proof(&|name| {
            assert!(
                source.contains_name(name) && target.contains_name(name),
                "free name {} escapes scope {:?}",
                name,
                source
            );
            name
        });
    }
    expr
}

/// Expression types with a variable constructor.
pub trait VarInjection {
    fn var(name: Name) -> Self;
}

/// A substitution from names of an input scope to expressions of an output
/// scope.  Names without an entry map to themselves through
/// [`VarInjection::var`].
#[derive(Clone, PartialEq, Eq)]
pub struct Subst<E: Clone> {
    env: OrdMap<RawName, E>,
}

impl<E: Clone> Subst<E> {
    pub fn identity() -> Self {
        Subst { env: OrdMap::new() }
    }

    pub fn len(&self) -> usize {
        self.env.len()
    }

    pub fn is_empty(&self) -> bool {
        self.env.is_empty()
    }

    /// The stored entry for `name`, if any.
    pub fn get(&self, name: Name) -> Option<&E> {
        self.env.get(&name.raw)
    }

    /// Extends the substitution with `binder ↦ expr`, replacing any earlier
    /// entry for the same raw name.
    pub fn add_subst(&self, binder: NameBinder, expr: E) -> Self {
        Subst {
            env: self.env.update(binder.raw, expr),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (RawName, &E)> + '_ {
        self.env.iter().map(|(k, v)| (*k, v))
    }
}

impl<E: Clone + VarInjection> Subst<E> {
    pub fn lookup(&self, name: Name) -> E {
        match self.env.get(&name.raw) {
            Some(e) => e.clone(),
            None => E::var(name),
        }
    }

    /// `add_subst(binder, var(name))`.  The entry is always stored, so a
    /// stale entry for `binder` never survives.
    pub fn add_rename(&self, binder: NameBinder, name: Name) -> Self {
        self.add_subst(binder, E::var(name))
    }
}

impl<E: Clone> Default for Subst<E> {
    fn default() -> Self {
        Subst::identity()
    }
}

impl<E: Clone + fmt::Debug> fmt::Debug for Subst<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.env.iter().map(|(k, v)| (k.0, v))).finish()
    }
}

impl<E: Clone + Sinkable> Sinkable for Subst<E> {
    fn sinkability_proof(&self, rename: &dyn Fn(Name) -> Name) -> Self {
        Subst {
            env: self
                .env
                .iter()
                .map(|(k, v)| (*k, v.sinkability_proof(rename)))
                .collect(),
        }
    }
}

pub fn identity_subst<E: Clone>() -> Subst<E> {
    Subst::identity()
}

pub fn lookup_subst<E: Clone + VarInjection>(subst: &Subst<E>, name: Name) -> E {
    subst.lookup(name)
}

pub fn add_subst<E: Clone>(subst: &Subst<E>, binder: NameBinder, expr: E) -> Subst<E> {
    subst.add_subst(binder, expr)
}

pub fn add_rename<E: Clone + VarInjection>(subst: &Subst<E>, binder: NameBinder, name: Name) -> Subst<E> {
    subst.add_rename(binder, name)
}

/// Moves a substitution to a larger output scope.  Free of cost.
#[inline(always)]
pub fn sink_subst<E: Clone>(subst: Subst<E>) -> Subst<E> {
    subst
}
