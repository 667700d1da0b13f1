//! The `scopefoil` command line.

use std::io::{self, Read, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use scopefoil::bench::{run_benchmarks, summary, write_csv, BenchConfig, BenchError, Group, Implementation};
use scopefoil::direct::{nf_direct, whnf_direct, DirectTerm};
use scopefoil::foil::Scope;
use scopefoil::lambda_pi::{direct_to_free, free_to_direct, nf_free, whnf_free, FreeTerm};
use scopefoil::naive::{closed_to_foil, open_to_foil, ConvertError, NaiveTerm};
use scopefoil::nbe::nf_nbe;
use scopefoil::oracle::{direct_to_debruijn, from_debruijn, DbTerm};
use scopefoil::syntax::{
    first_free_occurrence, parse_program, parse_program_located, parse_term, pretty_program, pretty_term, Command,
    LocatedCommand, SyntaxError,
};
use scopefoil::RawName;

/// Stack size for the worker thread; normal forms of large Church numerals
/// are deep.
const STACK_BYTES: usize = 512 << 20;

#[derive(Debug, Parser)]
#[command(name = "scopefoil", version, about = "Normalize λΠ programs with scope-safe binders")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineName {
    Direct,
    Free,
    Nbe,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Run a program: `compute` prints normal forms, `check` scope-checks.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = EngineName::Free)]
        engine: EngineName,
    },
    /// Normalize a single term (free identifiers allowed); `-` reads stdin.
    Normalize {
        input: String,
        #[arg(long)]
        whnf: bool,
        #[arg(long, value_enum, default_value_t = EngineName::Free)]
        engine: EngineName,
    },
    /// Parse a program and print it back.
    Echo { file: PathBuf },
    /// Time all implementations on the benchmark groups.
    Bench {
        #[arg(long = "group", required = true)]
        groups: Vec<Group>,
        #[arg(long = "impl")]
        implementations: Vec<Implementation>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        terms: usize,
        #[arg(long, default_value = "bench.csv")]
        csv: PathBuf,
        #[arg(long)]
        fuel: Option<u64>,
        #[arg(long, default_value_t = 2)]
        warmup: usize,
        #[arg(long, default_value_t = 5)]
        runs: usize,
    },
}

#[derive(Debug)]
pub enum Failure {
    /// Bad input or usage; exit status 1.
    User(String),
    /// A broken internal invariant, such as disagreeing normalizers; exit
    /// status 2.
    Internal(String),
}

type Outcome = Result<(), Failure>;

fn user(msg: impl Into<String>) -> Failure {
    Failure::User(msg.into())
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| user(format!("{}: {e}", path.display())))
}

fn syntax_error(file: &str, e: &SyntaxError) -> Failure {
    user(format!(
        "{file}:{}:{}: syntax error: expected {}, found {}",
        e.line, e.col, e.expected, e.found
    ))
}

/// The canonical alpha-representative of a term, printed.  All engines
/// print through this, so their output is byte-identical.
fn canonical(t: &DbTerm) -> String {
    pretty_term(&from_debruijn(t))
}

fn unsupported(engine: EngineName) -> impl Fn(scopefoil::lambda_pi::UnsupportedPattern) -> Failure {
    move |e| user(format!("engine {} cannot run this input: {e}", engine_name(engine)))
}

fn engine_name(engine: EngineName) -> &'static str {
    match engine {
        EngineName::Direct => "direct",
        EngineName::Free => "free",
        EngineName::Nbe => "nbe",
    }
}

fn to_free(engine: EngineName, t: &DirectTerm) -> Result<FreeTerm, Failure> {
    direct_to_free(t).map_err(unsupported(engine))
}

fn normalize_closed(engine: EngineName, t: &DirectTerm) -> Result<DirectTerm, Failure> {
    let empty = Scope::empty();
    Ok(match engine {
        EngineName::Direct => nf_direct(&empty, t),
        EngineName::Free => free_to_direct(&nf_free(&empty, &to_free(engine, t)?)),
        EngineName::Nbe => free_to_direct(&nf_nbe(&empty, &to_free(engine, t)?)),
    })
}

fn convert_closed(file: &str, located: &LocatedCommand, t: &NaiveTerm) -> Result<DirectTerm, Failure> {
    closed_to_foil(t).map_err(|e| match (&e, first_free_occurrence(located)) {
        (ConvertError::UnboundVariable(_), Some((x, pos))) => {
            user(format!("{file}:{}:{}: unbound variable `{x}`", pos.line, pos.col))
        }
        _ => user(format!("{file}:{}:{}: {e}", located.pos.line, located.pos.col)),
    })
}

fn run(file: &Path, engine: EngineName, out: &mut dyn Write) -> Outcome {
    let name = file.display().to_string();
    let text = read_file(file)?;
    let program = parse_program_located(&text).map_err(|e| syntax_error(&name, &e))?;
    for located in &program {
        match &located.command {
            Command::Check(t, ty) => {
                convert_closed(&name, located, t)?;
                convert_closed(&name, located, ty)?;
                emit(out, "scope-ok")?;
            }
            Command::Compute(t, ty) => {
                let t = convert_closed(&name, located, t)?;
                convert_closed(&name, located, ty)?;
                let nf = normalize_closed(engine, &t)?;
                emit(
                    out,
                    &canonical(&direct_to_debruijn(&nf, &|r| {
                        panic!("closed normal form has free name {r}")
                    })),
                )?;
            }
        }
    }
    Ok(())
}

fn normalize(input: &str, whnf: bool, engine: EngineName, out: &mut dyn Write) -> Outcome {
    let (label, text) = if input == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| user(format!("<stdin>: {e}")))?;
        ("<stdin>".to_string(), text)
    } else {
        (input.to_string(), read_file(Path::new(input))?)
    };
    let term = parse_term(&text).map_err(|e| syntax_error(&label, &e))?;
    let open = open_to_foil(&term).map_err(|e| user(format!("{label}: {e}")))?;
    let scope = &open.scope;
    let result = match (engine, whnf) {
        (EngineName::Direct, false) => nf_direct(scope, &open.term),
        (EngineName::Direct, true) => whnf_direct(scope, &open.term),
        (EngineName::Free, false) => free_to_direct(&nf_free(scope, &to_free(engine, &open.term)?)),
        (EngineName::Free, true) => free_to_direct(&whnf_free(scope, &to_free(engine, &open.term)?)),
        (EngineName::Nbe, false) => free_to_direct(&nf_nbe(scope, &to_free(engine, &open.term)?)),
        (EngineName::Nbe, true) => {
            return Err(user(
                "--whnf is not available with --engine nbe: readback produces full normal forms",
            ))
        }
    };
    let ident_of = |r: RawName| open.ident_of(r);
    emit(out, &canonical(&direct_to_debruijn(&result, &ident_of)))
}

fn echo(file: &Path, out: &mut dyn Write) -> Outcome {
    let text = read_file(file)?;
    let program = parse_program(&text).map_err(|e| syntax_error(&file.display().to_string(), &e))?;
    out.write_all(pretty_program(&program).as_bytes()).map_err(io_error)
}

fn bench(config: BenchConfig, csv: &Path, out: &mut dyn Write) -> Outcome {
    let rows = run_benchmarks(&config).map_err(|e| match e {
        BenchError::ResultMismatch(_) | BenchError::Unsupported(_) | BenchError::Convert(_) => {
            Failure::Internal(e.to_string())
        }
        _ => user(e.to_string()),
    })?;
    write_csv(&rows, csv).map_err(|e| user(e.to_string()))?;
    out.write_all(summary(&rows).as_bytes()).map_err(io_error)?;
    emit(out, &format!("wrote {} rows to {}", rows.len(), csv.display()))
}

fn io_error(e: io::Error) -> Failure {
    user(format!("cannot write output: {e}"))
}

fn emit(out: &mut dyn Write, line: &str) -> Outcome {
    writeln!(out, "{line}").and_then(|_| out.flush()).map_err(io_error)
}

/// Runs one parsed command.
pub fn execute(cmd: CliCommand, out: &mut dyn Write) -> Outcome {
    match cmd {
        CliCommand::Run { file, engine } => run(&file, engine, out),
        CliCommand::Normalize { input, whnf, engine } => normalize(&input, whnf, engine, out),
        CliCommand::Echo { file } => echo(&file, out),
        CliCommand::Bench {
            groups,
            implementations,
            seed,
            terms,
            csv,
            fuel,
            warmup,
            runs,
        } => {
            let config = BenchConfig {
                groups,
                implementations: if implementations.is_empty() {
                    Implementation::ALL.to_vec()
                } else {
                    implementations
                },
                seed,
                terms_per_random_group: terms,
                warmup_runs: warmup,
                measured_runs: runs,
                fuel,
            };
            bench(config, &csv, out)
        }
    }
}

/// Parses `args`, runs the command on a large-stack thread and returns the
/// exit status: 0 on success, 1 on user error, 2 on an internal failure.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let worker = std::thread::Builder::new()
        .stack_size(STACK_BYTES)
        .spawn(move || {
            panic::catch_unwind(AssertUnwindSafe(|| {
                let stdout = io::stdout();
                let mut out = io::LineWriter::new(stdout.lock());
                execute(cli.command, &mut out)
            }))
        })
        .expect("spawning the worker thread");
    match worker.join() {
        Ok(Ok(Ok(()))) => 0,
        Ok(Ok(Err(Failure::User(msg)))) => {
            eprintln!("error: {msg}");
            1
        }
        Ok(Ok(Err(Failure::Internal(msg)))) => {
            eprintln!("internal error: {msg}");
            2
        }
        Ok(Err(_)) | Err(_) => {
            eprintln!("internal error: invariant violated (see panic message above)");
            2
        }
    }
}
