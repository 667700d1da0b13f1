//! Scope-safe syntax with binders.
//!
//! [`foil`] provides names, scopes, binders and substitutions with the
//! rapier renaming discipline.  [`pattern`] extends binders to nested
//! patterns.  λΠ with pairs is implemented twice on top: directly
//! ([`direct`]) and as a sum of signatures over the generic [`free`] foil
//! ([`lambda_pi`]).  [`naive`] and [`syntax`] connect both to a
//! string-named surface language, [`nbe`] normalizes by evaluation, and
//! [`oracle`] holds the independent reference normalizers used by the
//! tests and by [`bench`].

pub mod bench;
pub mod direct;
pub mod encode;
pub mod foil;
pub mod free;
pub mod fuel;
pub mod lambda_pi;
pub mod naive;
pub mod nbe;
pub mod oracle;
pub mod pattern;
pub mod syntax;

pub use direct::{nf_direct, whnf_direct, DirectTerm};
pub use foil::{Name, NameBinder, RawName, Scope, Subst};
pub use fuel::{Fuel, NormalizeError};
pub use lambda_pi::{nf_free, whnf_free, FreeTerm};
pub use naive::{NaivePattern, NaiveTerm, VarIdent};
pub use nbe::nf_nbe;
pub use oracle::{alpha_eq, nf_debruijn, nf_named, DbTerm, ToDeBruijn};
pub use pattern::Pattern;
