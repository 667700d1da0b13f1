//! Normalization by evaluation on the free-foil λΠ terms.
//!
//! Evaluation never substitutes into syntax.  Binders become closures that
//! capture their environment; applying a closure extends the environment.
//! Arguments and pair components are evaluated on demand and at most once
//! (call by need), so `nf_nbe` terminates exactly where normal-order
//! reduction does.  Readback ([`quote`]) opens each closure with a fresh
//! neutral variable.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::foil::{
    extend_scope, scope_checks_enabled, with_refreshed, Name, NameBinder, Scope, ScopeCheck, Subst, VarInjection,
};
use crate::fuel::{Fuel, NormalizeError};
use crate::lambda_pi::{
    mk_app, mk_first, mk_lam, mk_pair, mk_pi, mk_second, mk_universe, mk_var, view, FreeTerm, View,
};

/// Captured variables.  A name without an entry evaluates to itself.
pub type Env = Subst<Thunk>;

#[derive(Clone)]
pub enum Value {
    Neutral(Head, Vec<Elim>),
    Lam(Env, NameBinder, FreeTerm),
    Pi(Arc<Value>, Env, NameBinder, FreeTerm),
    Pair(Thunk, Thunk),
    Universe,
}

/// What a neutral spine is stuck on.  `Rigid` holds a value that no
/// eliminator applies to, such as `U` in `U x`.
#[derive(Clone)]
pub enum Head {
    Var(Name),
    Rigid(Arc<Value>),
}

#[derive(Clone)]
pub enum Elim {
    App(Thunk),
    First,
    Second,
}

/// A term paired with its environment, evaluated at most once.
#[derive(Clone)]
pub struct Thunk(Arc<ThunkCell>);

struct ThunkCell {
    value: OnceLock<Value>,
    code: Option<(Env, FreeTerm)>,
}

impl Thunk {
    pub fn delay(env: Env, term: FreeTerm) -> Self {
        Thunk(Arc::new(ThunkCell {
            value: OnceLock::new(),
            code: Some((env, term)),
        }))
    }

    pub fn ready(value: Value) -> Self {
        Thunk(Arc::new(ThunkCell {
            value: OnceLock::from(value),
            code: None,
        }))
    }

    pub fn force(&self, fuel: &mut Fuel) -> Result<Value, NormalizeError> {
        if let Some(v) = self.0.value.get() {
            return Ok(v.clone());
        }
        let (env, term) = self.0.code.as_ref().expect("unevaluated thunk keeps its code");
        let v = eval_with_fuel(env, term, fuel)?;
        Ok(self.0.value.get_or_init(|| v).clone())
    }
}

impl VarInjection for Thunk {
    fn var(name: Name) -> Self {
        Thunk::ready(Value::var(name))
    }
}

impl VarInjection for Value {
    fn var(name: Name) -> Self {
        Value::Neutral(Head::Var(name), Vec::new())
    }
}

impl fmt::Debug for Thunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.value.get() {
            Some(v) => v.fmt(f),
            None => f.write_str("<thunk>"),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Neutral(Head::Var(n), spine) => write!(f, "{n}{spine:?}"),
            Value::Neutral(Head::Rigid(v), spine) => write!(f, "{v:?}{spine:?}"),
            Value::Lam(_, b, body) => write!(f, "<lam {b}. {body:?}>"),
            Value::Pi(dom, _, b, body) => write!(f, "<fun ({b} : {dom:?}) -> {body:?}>"),
            Value::Pair(l, r) => write!(f, "({l:?}, {r:?})"),
            Value::Universe => f.write_str("U"),
        }
    }
}

impl fmt::Debug for Elim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elim::App(t) => write!(f, " {t:?}"),
            Elim::First => f.write_str(".1"),
            Elim::Second => f.write_str(".2"),
        }
    }
}

pub fn eval(env: &Env, t: &FreeTerm) -> Value {
    match eval_with_fuel(env, t, &mut Fuel::unlimited()) {
        Ok(v) => v,
        Err(e) => unreachable!("unlimited fuel: {e}"),
    }
}

pub fn eval_with_fuel(env: &Env, t: &FreeTerm, fuel: &mut Fuel) -> Result<Value, NormalizeError> {
    Ok(match view(t) {
        View::Var(n) => env.lookup(n).force(fuel)?,
        View::App(f, x) => {
            let f = eval_with_fuel(env, f, fuel)?;
            apply(f, Thunk::delay(env.clone(), x.clone()), fuel)?
        }
        View::Lam(s) => Value::Lam(env.clone(), s.binder, s.body.clone()),
        View::Pi(dom, s) => {
            let dom = eval_with_fuel(env, dom, fuel)?;
            Value::Pi(Arc::new(dom), env.clone(), s.binder, s.body.clone())
        }
        View::Universe => Value::Universe,
        View::Pair(l, r) => Value::Pair(
            Thunk::delay(env.clone(), l.clone()),
            Thunk::delay(env.clone(), r.clone()),
        ),
        View::First(a) => project(eval_with_fuel(env, a, fuel)?, Elim::First, fuel)?,
        View::Second(a) => project(eval_with_fuel(env, a, fuel)?, Elim::Second, fuel)?,
    })
}

fn stuck(v: Value, elim: Elim) -> Value {
    match v {
        Value::Neutral(head, mut spine) => {
            spine.push(elim);
            Value::Neutral(head, spine)
        }
        other => Value::Neutral(Head::Rigid(Arc::new(other)), vec![elim]),
    }
}

fn apply(f: Value, arg: Thunk, fuel: &mut Fuel) -> Result<Value, NormalizeError> {
    match f {
        Value::Lam(env, binder, body) => {
            fuel.tick()?;
            eval_with_fuel(&env.add_subst(binder, arg), &body, fuel)
        }
        other => Ok(stuck(other, Elim::App(arg))),
    }
}

fn project(v: Value, elim: Elim, fuel: &mut Fuel) -> Result<Value, NormalizeError> {
    match (v, &elim) {
        (Value::Pair(l, _), Elim::First) => {
            fuel.tick()?;
            l.force(fuel)
        }
        (Value::Pair(_, r), Elim::Second) => {
            fuel.tick()?;
            r.force(fuel)
        }
        (other, _) => Ok(stuck(other, elim)),
    }
}

/// Reads a value back as a normal form in `scope`.
pub fn quote(scope: &Scope, v: &Value) -> FreeTerm {
    match quote_with_fuel(scope, v, &mut Fuel::unlimited()) {
        Ok(t) => t,
        Err(e) => unreachable!("unlimited fuel: {e}"),
    }
}

pub fn quote_with_fuel(scope: &Scope, v: &Value, fuel: &mut Fuel) -> Result<FreeTerm, NormalizeError> {
    Ok(match v {
        Value::Neutral(head, spine) => {
            let mut acc = match head {
                Head::Var(n) => mk_var(*n),
                Head::Rigid(v) => quote_with_fuel(scope, v, fuel)?,
            };
            for elim in spine {
                acc = match elim {
                    Elim::App(arg) => mk_app(acc, quote_with_fuel(scope, &arg.force(fuel)?, fuel)?),
                    Elim::First => mk_first(acc),
                    Elim::Second => mk_second(acc),
                };
            }
            acc
        }
        Value::Lam(env, binder, body) => {
            let (binder, body, _) = open_closure(scope, env, *binder, body, fuel)?;
            mk_lam(binder, body)
        }
        Value::Pi(dom, env, binder, body) => {
            let dom = quote_with_fuel(scope, dom, fuel)?;
            let (binder, body, _) = open_closure(scope, env, *binder, body, fuel)?;
            mk_pi(binder, dom, body)
        }
        Value::Pair(l, r) => {
            let l = quote_with_fuel(scope, &l.force(fuel)?, fuel)?;
            mk_pair(l, quote_with_fuel(scope, &r.force(fuel)?, fuel)?)
        }
        Value::Universe => mk_universe(),
    })
}

fn open_closure(
    scope: &Scope,
    env: &Env,
    binder: NameBinder,
    body: &FreeTerm,
    fuel: &mut Fuel,
) -> Result<(NameBinder, FreeTerm, Scope), NormalizeError> {
    let fresh = with_refreshed(scope, binder.name());
    let inner = extend_scope(fresh, scope);
    let env = env.add_subst(binder, Thunk::var(fresh.name()));
    let value = eval_with_fuel(&env, body, fuel)?;
    let body = quote_with_fuel(&inner, &value, fuel)?;
    Ok((fresh, body, inner))
}

pub fn nf_nbe(scope: &Scope, t: &FreeTerm) -> FreeTerm {
    match nf_nbe_with_fuel(scope, t, &mut Fuel::unlimited()) {
        Ok(t) => t,
        Err(e) => unreachable!("unlimited fuel: {e}"),
    }
}

/// `quote(scope, eval(identity, t))`.  Fuel counts closure applications
/// and pair projections.
pub fn nf_nbe_with_fuel(scope: &Scope, t: &FreeTerm, fuel: &mut Fuel) -> Result<FreeTerm, NormalizeError> {
    if scope_checks_enabled() {
        if let Err(err) = t.check_scope(scope) {
            panic!("term is not in scope {scope:?}: {err}");
        }
    }
    let v = eval_with_fuel(&Env::identity(), t, fuel)?;
    quote_with_fuel(scope, &v, fuel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foil::RawName;
    use crate::lambda_pi::{is_normal_free, nf_free};
    use crate::oracle::alpha_eq;

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
    fn eval_examples() {
        let t = mk_app(mk_lam(b(0), v(0)), mk_universe());
        assert!(matches!(eval(&Env::identity(), &t), Value::Universe));
        let t = mk_first(mk_pair(mk_universe(), v(0)));
        assert!(matches!(eval(&Env::identity(), &t), Value::Universe));
        match eval(&Env::identity(), &v(3)) {
            Value::Neutral(Head::Var(n), spine) => {
                assert_eq!(n.raw(), RawName(3));
                assert!(spine.is_empty());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn quote_examples() {
        assert_eq!(quote(&Scope::empty(), &Value::Universe), mk_universe());
        // lam x. (lam y. y) x
        let t = mk_lam(b(0), mk_app(mk_lam(b(1), v(1)), v(0)));
        let out = nf_nbe(&Scope::empty(), &t);
        assert!(alpha_eq(&out, &mk_lam(b(5), v(5))));
        assert!(is_normal_free(&out));
        assert!(alpha_eq(&nf_nbe(&Scope::empty(), &out), &out));
    }

    #[test]
    fn capture_avoidance() {
        // (lam x. lam y. x) y with y free
        let t = mk_app(mk_lam(b(1), mk_lam(b(0), v(1))), v(0));
        let out = nf_nbe(&scope(&[0]), &t);
        assert!(alpha_eq(&out, &mk_lam(b(7), v(0))));
        assert!(alpha_eq(&out, &nf_free(&scope(&[0]), &t)));
    }

    #[test]
    fn lazy_arguments() {
        // (lam x. U) omega
        let w = mk_lam(b(0), mk_app(v(0), v(0)));
        let omega = mk_app(w.clone(), w);
        let t = mk_app(mk_lam(b(1), mk_universe()), omega.clone());
        assert_eq!(nf_nbe(&Scope::empty(), &t), mk_universe());
        let t = mk_first(mk_pair(mk_universe(), omega.clone()));
        assert_eq!(nf_nbe(&Scope::empty(), &t), mk_universe());
        assert!(nf_nbe_with_fuel(&Scope::empty(), &omega, &mut Fuel::limited(100)).is_err());
    }

    #[test]
    fn stuck_eliminations() {
        let t = mk_app(mk_universe(), v(0));
        assert_eq!(nf_nbe(&scope(&[0]), &t), t);
        let t = mk_second(mk_app(v(0), mk_first(v(0))));
        assert_eq!(nf_nbe(&scope(&[0]), &t), t);
    }

    #[test]
    fn pi_domain_and_codomain() {
        // fun (x : (lam y. y) U) -> (lam z. z) x
        let t = mk_pi(
            b(0),
            mk_app(mk_lam(b(1), v(1)), mk_universe()),
            mk_app(mk_lam(b(2), v(2)), v(0)),
        );
        assert!(alpha_eq(
            &nf_nbe(&Scope::empty(), &t),
            &mk_pi(b(0), mk_universe(), v(0))
        ));
    }
}
