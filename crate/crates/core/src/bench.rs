//! Benchmark workloads and the timing harness.
//!
//! Every implementation normalizes the same closed naive terms.  Each
//! result is hashed through its de Bruijn form and compared with the de
//! Bruijn oracle before any timing is reported.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::direct::{nf_direct_with_fuel, DirectTerm};
use crate::encode::CanonicalEncode;
use crate::foil::Scope;
use crate::fuel::{Fuel, NormalizeError};
use crate::lambda_pi::{direct_to_free, nf_free_with_fuel, FreeTerm, UnsupportedPattern};
use crate::naive::{closed_to_foil, ConvertError, NaivePattern, NaiveTerm, VarIdent};
use crate::nbe::nf_nbe_with_fuel;
use crate::oracle::{nf_debruijn_with_fuel, DbTerm, NamedTerm, ToDeBruijn};

fn ident(s: &str) -> VarIdent {
    VarIdent::new(s).expect("builder identifiers are valid")
}

fn var(s: &str) -> NaiveTerm {
    NaiveTerm::Var(ident(s))
}

fn lam(x: &str, body: NaiveTerm) -> NaiveTerm {
    NaiveTerm::lam(NaivePattern::Var(ident(x)), body)
}

fn app(f: NaiveTerm, args: impl IntoIterator<Item = NaiveTerm>) -> NaiveTerm {
    NaiveTerm::apps(f, args)
}

/// `lam f . lam x . f (f (... x))` with `n` applications.
pub fn gen_church(n: usize) -> NaiveTerm {
    let body = (0..n).fold(var("x"), |acc, _| app(var("f"), [acc]));
    lam("f", lam("x", body))
}

/// `lam m . lam n . lam f . lam x . m f (n f x)`
pub fn plus_combinator() -> NaiveTerm {
    lam(
        "m",
        lam(
            "n",
            lam(
                "f",
                lam("x", app(var("m"), [var("f"), app(var("n"), [var("f"), var("x")])])),
            ),
        ),
    )
}

/// `lam m . lam n . lam f . m (n f)`
pub fn mult_combinator() -> NaiveTerm {
    lam("m", lam("n", lam("f", app(var("m"), [app(var("n"), [var("f")])]))))
}

/// `lam n . lam f . lam x . f (n f x)`
pub fn succ_combinator() -> NaiveTerm {
    lam(
        "n",
        lam("f", lam("x", app(var("f"), [app(var("n"), [var("f"), var("x")])]))),
    )
}

fn church_pair(a: NaiveTerm, b: NaiveTerm) -> NaiveTerm {
    lam("s", app(var("s"), [a, b]))
}

fn church_fst(p: NaiveTerm) -> NaiveTerm {
    app(p, [lam("a", lam("b", var("a")))])
}

fn church_snd(p: NaiveTerm) -> NaiveTerm {
    app(p, [lam("a", lam("b", var("b")))])
}

/// Factorial on Church numerals, iterating `(k, k!)` pairs built from
/// lambdas only.
pub fn fact_combinator() -> NaiveTerm {
    let k1 = app(succ_combinator(), [church_fst(var("p"))]);
    let step = lam(
        "p",
        church_pair(k1.clone(), app(mult_combinator(), [k1, church_snd(var("p"))])),
    );
    lam(
        "n",
        church_snd(app(var("n"), [step, church_pair(gen_church(0), gen_church(1))])),
    )
}

pub fn church_plus(m: usize, n: usize) -> NaiveTerm {
    app(plus_combinator(), [gen_church(m), gen_church(n)])
}

pub fn church_mult(m: usize, n: usize) -> NaiveTerm {
    app(mult_combinator(), [gen_church(m), gen_church(n)])
}

pub fn church_fact(n: usize) -> NaiveTerm {
    app(fact_combinator(), [gen_church(n)])
}

/// Binder names drawn by the random generator.  The pool is small on
/// purpose so that shadowing is common.
const NAME_POOL: [&str; 4] = ["a", "b", "c", "d"];

/// Acceptance filter of the random generator.
pub const FILTER_FUEL: u64 = 10_000;
pub const FILTER_MAX_NODES: usize = 10_000;
const ATTEMPTS_PER_SIZE: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomTerm {
    pub term: NaiveTerm,
    /// Lam + App nodes actually generated; below the request only if the
    /// generator had to shrink.
    pub size: usize,
    pub attempts: usize,
}

/// A closed Lam/App/Var term with exactly `size` Lam and App nodes that
/// normalizes within the filter budget.  Deterministic in `(seed, size)`.
pub fn gen_random(seed: u64, size: usize) -> NaiveTerm {
    gen_random_detailed(seed, 0, size).term
}

/// [`gen_random`] on an independent ChaCha stream.
pub fn gen_random_detailed(seed: u64, stream: u64, size: usize) -> RandomTerm {
    assert!(size >= 1, "random terms need at least one binder");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut size = size;
    let mut attempts = 0;
    loop {
        for _ in 0..ATTEMPTS_PER_SIZE {
            attempts += 1;
            let term = random_term(&mut rng, size, &mut Vec::new());
            if normalizes_within_filter(&term) {
                return RandomTerm { term, size, attempts };
            }
        }
        // size 1 is always `lam a . a`, which passes the filter
        size -= 1;
    }
}

fn normalizes_within_filter(t: &NaiveTerm) -> bool {
    nf_debruijn_with_fuel(&t.to_debruijn(), &mut Fuel::limited(FILTER_FUEL))
        .is_ok_and(|nf| nf.size() <= FILTER_MAX_NODES)
}

fn random_term(rng: &mut ChaCha8Rng, internal: usize, env: &mut Vec<&'static str>) -> NaiveTerm {
    if internal == 0 {
        return var(env[rng.random_range(0..env.len())]);
    }
    if env.is_empty() || rng.random_bool(0.5) {
        let x = NAME_POOL[rng.random_range(0..NAME_POOL.len())];
        env.push(x);
        let body = random_term(rng, internal - 1, env);
        env.pop();
        lam(x, body)
    } else {
        let left = rng.random_range(0..internal);
        let f = random_term(rng, left, env);
        NaiveTerm::app(f, random_term(rng, internal - 1 - left, env))
    }
}

/// Lam + App node count.
pub fn internal_nodes(t: &NaiveTerm) -> usize {
    match t {
        NaiveTerm::Var(_) | NaiveTerm::Universe => 0,
        NaiveTerm::App(f, x) => 1 + internal_nodes(f) + internal_nodes(x),
        NaiveTerm::Lam(_, b) => 1 + internal_nodes(&b.0),
        NaiveTerm::Pi(_, a, b) => 1 + internal_nodes(a) + internal_nodes(&b.0),
        NaiveTerm::Pair(a, b) => internal_nodes(a) + internal_nodes(b),
        NaiveTerm::First(a) | NaiveTerm::Second(a) => internal_nodes(a),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    Nf,
    Random15,
    Random20,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::Nf, Group::Random15, Group::Random20];

    pub fn name(self) -> &'static str {
        match self {
            Group::Nf => "nf",
            Group::Random15 => "random15",
            Group::Random20 => "random20",
        }
    }

    /// The group's terms.  `nf` always has exactly one.
    pub fn terms(self, seed: u64, count: usize) -> Vec<NaiveTerm> {
        match self {
            Group::Nf => vec![church_fact(6)],
            Group::Random15 => (0..count as u64)
                .map(|i| gen_random_detailed(seed, i, 15).term)
                .collect(),
            Group::Random20 => (0..count as u64)
                .map(|i| gen_random_detailed(seed, i, 20).term)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} `{name}`")]
pub struct UnknownName {
    pub kind: &'static str,
    pub name: String,
}

impl FromStr for Group {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Group::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| UnknownName {
                kind: "group",
                name: s.to_string(),
            })
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Implementation {
    Named,
    DeBruijn,
    FoilDirect,
    FreeFoil,
    Nbe,
}

impl Implementation {
    pub const ALL: [Implementation; 5] = [
        Implementation::Named,
        Implementation::DeBruijn,
        Implementation::FoilDirect,
        Implementation::FreeFoil,
        Implementation::Nbe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Implementation::Named => "named",
            Implementation::DeBruijn => "debruijn",
            Implementation::FoilDirect => "foil_direct",
            Implementation::FreeFoil => "free_foil",
            Implementation::Nbe => "nbe",
        }
    }
}

impl FromStr for Implementation {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Implementation::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| UnknownName {
                kind: "implementation",
                name: s.to_string(),
            })
    }
}

impl fmt::Display for Implementation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A normal form in whichever representation produced it.
#[derive(Debug, Clone)]
pub enum Normalized {
    Naive(NaiveTerm),
    DeBruijn(DbTerm),
    Direct(DirectTerm),
    Free(FreeTerm),
}

impl ToDeBruijn for Normalized {
    fn to_debruijn(&self) -> DbTerm {
        match self {
            Normalized::Naive(t) => t.to_debruijn(),
            Normalized::DeBruijn(t) => t.clone(),
            Normalized::Direct(t) => t.to_debruijn(),
            Normalized::Free(t) => t.to_debruijn(),
        }
    }
}

/// A term converted to an engine's representation, ready to be normalized
/// repeatedly.
pub trait Workload {
    fn run(&self, fuel: &mut Fuel) -> Result<Normalized, NormalizeError>;
}

pub trait Engine {
    fn name(&self) -> &str;

    /// Converts `term`; not timed.
    fn load(&self, term: &NaiveTerm) -> Result<Box<dyn Workload>, BenchError>;
}

struct Closure<F>(F);

impl<F: Fn(&mut Fuel) -> Result<Normalized, NormalizeError>> Workload for Closure<F> {
    fn run(&self, fuel: &mut Fuel) -> Result<Normalized, NormalizeError> {
        (self.0)(fuel)
    }
}

fn workload(f: impl Fn(&mut Fuel) -> Result<Normalized, NormalizeError> + 'static) -> Box<dyn Workload> {
    Box::new(Closure(f))
}

impl Engine for Implementation {
    fn name(&self) -> &str {
        Implementation::name(*self)
    }

    fn load(&self, term: &NaiveTerm) -> Result<Box<dyn Workload>, BenchError> {
        Ok(match self {
            Implementation::Named => {
                let t = NamedTerm::new(term);
                workload(move |fuel| t.normalize(fuel).map(Normalized::Naive))
            }
            Implementation::DeBruijn => {
                let t = term.to_debruijn();
                workload(move |fuel| nf_debruijn_with_fuel(&t, fuel).map(Normalized::DeBruijn))
            }
            Implementation::FoilDirect => {
                let t = closed_to_foil(term)?;
                workload(move |fuel| nf_direct_with_fuel(&Scope::empty(), &t, fuel).map(Normalized::Direct))
            }
            Implementation::FreeFoil => {
                let t = direct_to_free(&closed_to_foil(term)?)?;
                workload(move |fuel| nf_free_with_fuel(&Scope::empty(), &t, fuel).map(Normalized::Free))
            }
            Implementation::Nbe => {
                let t = direct_to_free(&closed_to_foil(term)?)?;
                workload(move |fuel| nf_nbe_with_fuel(&Scope::empty(), &t, fuel).map(Normalized::Free))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    pub groups: Vec<Group>,
    pub implementations: Vec<Implementation>,
    pub seed: u64,
    pub terms_per_random_group: usize,
    pub warmup_runs: usize,
    pub measured_runs: usize,
    /// Step budget per normalization; `None` is unlimited.
    pub fuel: Option<u64>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            groups: Group::ALL.to_vec(),
            implementations: Implementation::ALL.to_vec(),
            seed: 0,
            terms_per_random_group: 100,
            warmup_runs: 2,
            measured_runs: 5,
            fuel: None,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |what: &str| Err(BenchError::InvalidConfig(what.to_string()));
        if self.groups.is_empty() {
            return bad("at least one group is required");
        }
        if self.implementations.is_empty() {
            return bad("at least one implementation is required");
        }
        if self.terms_per_random_group == 0 {
            return bad("the number of terms must be positive");
        }
        if self.measured_runs == 0 {
            return bad("the number of measured runs must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub group: Group,
    pub implementation: String,
    pub term: usize,
    pub median_ns: u128,
    pub hash: String,
}

#[derive(Debug, Error)]
#[error(
    "result mismatch in group {group}, term {term}: {impl_a} gives {hash_a}, {impl_b} gives {hash_b}\n  {impl_a}: {nf_a}\n  {impl_b}: {nf_b}"
)]
pub struct Mismatch {
    pub group: Group,
    pub term: usize,
    pub impl_a: String,
    pub impl_b: String,
    pub hash_a: String,
    pub hash_b: String,
    pub nf_a: String,
    pub nf_b: String,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    ResultMismatch(Box<Mismatch>),
    #[error("{implementation} on group {group}, term {term}: {source}")]
    Normalize {
        group: Group,
        term: usize,
        implementation: String,
        source: NormalizeError,
    },
    #[error(transparent)]
    Convert(#[from] ConvertError),
    #[error(transparent)]
    Unsupported(#[from] UnsupportedPattern),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot write csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Hex of the first 8 bytes of the SHA-256 of the canonical encoding.
pub fn result_hash(t: &DbTerm) -> String {
    let digest = Sha256::digest(t.to_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn median(mut xs: Vec<u128>) -> u128 {
    xs.sort_unstable();
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2
    }
}

const REFERENCE: &str = "debruijn-reference";

pub fn run_benchmarks(config: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    let engines: Vec<&dyn Engine> = config.implementations.iter().map(|i| i as &dyn Engine).collect();
    run_benchmarks_with(config, &engines)
}

/// Runs `config` with arbitrary engines in place of
/// `config.implementations`.
pub fn run_benchmarks_with(config: &BenchConfig, engines: &[&dyn Engine]) -> Result<Vec<BenchRow>, BenchError> {
    config.validate()?;
    let mut rows = Vec::new();
    for &group in &config.groups {
        for (index, term) in group
            .terms(config.seed, config.terms_per_random_group)
            .iter()
            .enumerate()
        {
            let normalize_error = |implementation: &str, source| BenchError::Normalize {
                group,
                term: index,
                implementation: implementation.to_string(),
                source,
            };
            let reference = nf_debruijn_with_fuel(&term.to_debruijn(), &mut Fuel::from_option(config.fuel))
                .map_err(|e| normalize_error(REFERENCE, e))?;
            let expected = result_hash(&reference);
            for engine in engines {
                let work = engine.load(term)?;
                let mut result = None;
                for _ in 0..config.warmup_runs {
                    result = Some(work.run(&mut Fuel::from_option(config.fuel)));
                }
                let mut times = Vec::with_capacity(config.measured_runs);
                for _ in 0..config.measured_runs {
                    let mut fuel = Fuel::from_option(config.fuel);
                    let start = Instant::now();
                    let out = work.run(&mut fuel);
                    times.push(start.elapsed().as_nanos());
                    result = Some(out);
                }
                let nf = result
                    .expect("at least one measured run")
                    .map_err(|e| normalize_error(engine.name(), e))?
                    .to_debruijn();
                let hash = result_hash(&nf);
                if hash != expected {
                    return Err(BenchError::ResultMismatch(Box::new(Mismatch {
                        group,
                        term: index,
                        impl_a: REFERENCE.to_string(),
                        impl_b: engine.name().to_string(),
                        hash_a: expected,
                        hash_b: hash,
                        nf_a: crate::syntax::pretty_term(&crate::oracle::from_debruijn(&reference)),
                        nf_b: crate::syntax::pretty_term(&crate::oracle::from_debruijn(&nf)),
                    })));
                }
                rows.push(BenchRow {
                    group,
                    implementation: engine.name().to_string(),
                    term: index,
                    median_ns: median(times),
                    hash,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_csv_to<W: std::io::Write>(rows: &[BenchRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["group", "impl", "term", "median_ns", "hash"])?;
    for r in rows {
        w.write_record([
            r.group.name(),
            &r.implementation,
            &r.term.to_string(),
            &r.median_ns.to_string(),
            &r.hash,
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_csv(rows: &[BenchRow], path: &Path) -> Result<(), BenchError> {
    let file = std::fs::File::create(path).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_csv_to(rows, file)
}

/// Per group, implementations ordered by total median time, followed by
/// the foil against free foil comparison when both ran.
pub fn summary(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let mut groups: Vec<Group> = rows.iter().map(|r| r.group).collect();
    groups.dedup();
    for group in groups {
        let mut totals: Vec<(String, u128)> = Vec::new();
        for r in rows.iter().filter(|r| r.group == group) {
            match totals.iter_mut().find(|(name, _)| *name == r.implementation) {
                Some((_, total)) => *total += r.median_ns,
                None => totals.push((r.implementation.clone(), r.median_ns)),
            }
        }
        totals.sort_by_key(|(_, t)| *t);
        out.push_str(&format!("group {group}:\n"));
        for (name, total) in &totals {
            out.push_str(&format!("  {name:<12} {:>14.3} ms\n", *total as f64 / 1e6));
        }
        let time_of = |name: &str| totals.iter().find(|(n, _)| n == name).map(|(_, t)| *t);
        if let (Some(foil), Some(free)) = (time_of("foil_direct"), time_of("free_foil")) {
            let verdict = if foil <= free { "faster" } else { "slower" };
            out.push_str(&format!(
                "  foil_direct is {verdict} than free_foil ({:.2}x)\n",
                free as f64 / foil.max(1) as f64
            ));
        }
    }
    out
}
