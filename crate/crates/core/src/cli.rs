//! Command-line front end: `check`, `eval` and `compare`.
//!
//! Exit codes: 0 success, 1 other failure, 2 parse or usage error, 3 type
//! error, 4 resource cap exceeded, 5 the two engines disagree.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::thread;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::apps::{self, Instance, ReachLattice, UnaryChoice};
use crate::eval::{EvalError, Mode};
use crate::gen::TermGen;
use crate::lattice::{Lattice, LatticeSpec, DEFAULT_DOMAIN_CAP};
use crate::signature::Signature;
use crate::syntax::parse_with_symbols;

#[derive(Parser, Debug)]
#[command(name = "muho", version, about = "Local and global evaluation of higher-order fixpoint terms over finite lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Type-check a term and print its type.
    Check(Source),
    /// Evaluate a term.
    Eval(EvalArgs),
    /// Evaluate with both engines and compare results and table sizes.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum App {
    Collatz,
    Reach,
    Indent,
    Hfl,
    Strictness,
    Worstcase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Local,
    Global,
}

#[derive(Args, Debug, Default)]
struct Source {
    /// File containing the term.
    #[arg(long, conflicts_with_all = ["expr", "app"])]
    term: Option<PathBuf>,
    /// The term itself.
    #[arg(long, conflicts_with = "app")]
    expr: Option<String>,
    /// A built-in example instead of a term.
    #[arg(long, value_enum)]
    app: Option<App>,
    /// Size parameter of the example.
    #[arg(long)]
    n: Option<usize>,
    /// Input word for `indent` (`_` or `␣` may stand for a space).
    #[arg(long)]
    word: Option<String>,
    /// Example arguments: bits `1,0,1` (least significant first) or a
    /// number for `collatz`, `f,p` for `strictness`.
    #[arg(long)]
    query: Option<String>,
    /// `two`, `bool`, `flat:K`, `powerset:K`, a JSON spec or a JSON file;
    /// for `reach`, `flat` or `powerset`.
    #[arg(long)]
    lattice: Option<String>,
    /// JSON signature file; defaults to the standard connectives.
    #[arg(long)]
    signature: Option<PathBuf>,
    /// For `reach`: remove the c-edge back into state 0.
    #[arg(long)]
    cut_loop: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value = "local")]
    mode: ModeArg,
    /// Write evaluation statistics as JSON.
    #[arg(long)]
    stats_out: Option<PathBuf>,
    /// Largest type domain the engines may enumerate.
    #[arg(long, default_value_t = DEFAULT_DOMAIN_CAP)]
    max_domain: usize,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    stats_out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_DOMAIN_CAP)]
    max_domain: usize,
    /// Compare on randomly generated terms instead, starting at this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of random terms for `--seed`.
    #[arg(long, default_value_t = 100)]
    count: u64,
}

#[derive(Debug)]
enum Failure {
    Other(String),
    Parse(String),
    Type(String),
    Resource(String),
    Disagree(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Other(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Type(_) => 3,
            Failure::Resource(_) => 4,
            Failure::Disagree(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Other(m)
            | Failure::Parse(m)
            | Failure::Type(m)
            | Failure::Resource(m)
            | Failure::Disagree(m) => m,
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Failure {
        match e {
            EvalError::Resource(_) => Failure::Resource(e.to_string()),
            EvalError::Type(_) | EvalError::NotClosed(_) => Failure::Type(e.to_string()),
            EvalError::Contract { .. } => Failure::Other(e.to_string()),
        }
    }
}

impl From<apps::AppError> for Failure {
    fn from(e: apps::AppError) -> Failure {
        Failure::Other(e.to_string())
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Check(src) => check(&src),
        Command::Eval(args) => eval(&args),
        Command::Compare(args) => compare(&args),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn parse_lattice(spec: &str) -> Result<Lattice, Failure> {
    let bad = |m: String| Failure::Parse(format!("lattice `{spec}`: {m}"));
    let count = |k: &str| k.parse::<usize>().map_err(|e| bad(e.to_string()));
    let lattice = match spec {
        "two" => Lattice::two(),
        "bool" | "boolean" => Lattice::boolean(),
        s if s.starts_with("flat:") => Lattice::flat(count(&s[5..])?),
        s if s.starts_with("powerset:") => {
            Lattice::powerset_n(count(&s[9..])?).map_err(|e| bad(e.to_string()))?
        }
        s => {
            let text = if s.trim_start().starts_with('{') {
                s.to_string()
            } else {
                fs::read_to_string(s).map_err(|e| bad(e.to_string()))?
            };
            let spec: LatticeSpec = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
            Lattice::from_spec(&spec).map_err(|e| bad(e.to_string()))?
        }
    };
    Ok(lattice)
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
}

fn collatz_query(q: &str, n: Option<usize>) -> Result<Instance, Failure> {
    if q.contains(',') {
        let bits = q
            .split(',')
            .map(|b| match b.trim() {
                "1" | "top" => Ok(true),
                "0" | "bot" => Ok(false),
                other => Err(Failure::Parse(format!("query bit `{other}`"))),
            })
            .collect::<Result<Vec<bool>, _>>()?;
        if n.is_some_and(|n| n != bits.len()) {
            return Err(Failure::Other(format!("--n does not match the {} query bits", bits.len())));
        }
        Ok(apps::collatz_bits(&bits)?)
    } else {
        let x = q.trim().parse::<u64>().map_err(|e| Failure::Parse(format!("query `{q}`: {e}")))?;
        Ok(apps::collatz(n.unwrap_or(3), x)?)
    }
}

fn load(src: &Source) -> Result<Instance, Failure> {
    if let Some(app) = src.app {
        return Ok(match app {
            App::Collatz => collatz_query(src.query.as_deref().unwrap_or("5"), src.n)?,
            App::Reach => {
                let kind = match src.lattice.as_deref().unwrap_or("flat") {
                    "flat" => ReachLattice::Flat,
                    "powerset" => ReachLattice::Powerset,
                    other => return Err(Failure::Parse(format!("reach lattice `{other}` (flat or powerset)"))),
                };
                let mut g = apps::reach_graph(src.n.unwrap_or(2))?;
                if src.cut_loop {
                    g = g.cut_c_loop();
                }
                apps::reach(&g, kind)?
            }
            App::Indent => apps::indent(src.word.as_deref().unwrap_or(apps::INDENT_EXAMPLE))?,
            App::Hfl => apps::hfl(src.n.unwrap_or(4))?,
            App::Strictness => {
                let q = src.query.as_deref().unwrap_or("const1,const1");
                let (f, p) = q
                    .split_once(',')
                    .ok_or_else(|| Failure::Parse(format!("strictness query `{q}` should be `f,p`")))?;
                apps::strictness(f.trim().parse()?, p.trim().parse::<UnaryChoice>()?)?
            }
            App::Worstcase => apps::worstcase(src.n.unwrap_or(3))?,
        });
    }
    let (name, text) = match (&src.term, &src.expr) {
        (Some(path), _) => (path.display().to_string(), read(path)?),
        (None, Some(e)) => ("expr".to_string(), e.clone()),
        (None, None) => return Err(Failure::Parse("one of --term, --expr or --app is required".into())),
    };
    let lattice = parse_lattice(src.lattice.as_deref().unwrap_or("bool"))?;
    let signature = match &src.signature {
        Some(path) => Signature::from_json(&read(path)?, &lattice).map_err(|e| Failure::Parse(e.to_string()))?,
        None => Signature::standard(&lattice),
    };
    let term = parse_with_symbols(&text, &signature.names()).map_err(|e| Failure::Parse(e.to_string()))?;
    Ok(Instance {
        name,
        lattice,
        signature,
        term,
        main_var: String::new(),
    })
}

fn check(src: &Source) -> Result<(), Failure> {
    let inst = load(src)?;
    let ty = inst.type_check().map_err(|e| Failure::Type(e.to_string()))?;
    println!("{ty}");
    Ok(())
}

fn mode(m: ModeArg) -> Mode {
    match m {
        ModeArg::Local => Mode::Local,
        ModeArg::Global => Mode::Global,
    }
}

fn eval(args: &EvalArgs) -> Result<(), Failure> {
    let inst = load(&args.source)?;
    let out = inst.evaluate(mode(args.mode), args.max_domain)?;
    println!("{}", out.value.render(&inst.lattice));
    for f in &out.stats.fixpoints {
        eprintln!(
            "{}: width {} arguments {} height {} rounds {}",
            f.var, f.width, f.arguments, f.height, f.rounds
        );
    }
    if let Some(path) = &args.stats_out {
        fs::write(path, out.stats.to_json()).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// What one engine run reports back across a thread boundary.
#[derive(Clone, Debug, Serialize)]
struct Report {
    result: String,
    duration_ms: f64,
    fixpoints: Vec<Row>,
    #[serde(skip)]
    stats: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
struct Row {
    var: String,
    width: usize,
    arguments: usize,
    height: usize,
    rounds: usize,
}

fn report(inst: &Instance, m: Mode, cap: usize) -> Result<Report, EvalError> {
    let out = inst.evaluate(m, cap)?;
    let stats = serde_json::to_value(&out.stats).expect("stats serialize");
    Ok(Report {
        result: out.value.render(&inst.lattice),
        duration_ms: out.stats.duration_ms,
        fixpoints: out
            .stats
            .fixpoints
            .iter()
            .map(|f| Row {
                var: f.var.clone(),
                width: f.width,
                arguments: f.arguments,
                height: f.height,
                rounds: f.rounds,
            })
            .collect(),
        stats,
    })
}

fn compare(args: &CompareArgs) -> Result<(), Failure> {
    if let Some(seed) = args.seed {
        if args.source.app.is_none() && args.source.term.is_none() && args.source.expr.is_none() {
            return compare_random(seed, args.count, args.max_domain);
        }
    }
    let inst = load(&args.source)?;
    let cap = args.max_domain;
    let (local, global) = thread::scope(|s| {
        let g = s.spawn(|| report(&inst, Mode::Global, cap));
        let l = report(&inst, Mode::Local, cap);
        (l, g.join().expect("global evaluation panicked"))
    });
    let local = local?;
    println!("instance {}", inst.name);
    let global = match global {
        Ok(g) => Some(g),
        Err(EvalError::Resource(e)) => {
            println!("notice: global evaluation skipped, {e}; local only");
            None
        }
        Err(e) => return Err(e.into()),
    };
    println!("{:<8} {:>12} {:>12}", "", "local", "global");
    let g_result = global.as_ref().map_or("-".to_string(), |g| g.result.clone());
    println!("{:<8} {:>12} {:>12}", "result", local.result, g_result);
    let g_ms = global.as_ref().map_or("-".to_string(), |g| format!("{:.2}ms", g.duration_ms));
    println!("{:<8} {:>12} {:>12}", "time", format!("{:.2}ms", local.duration_ms), g_ms);
    for row in &local.fixpoints {
        let other = global.as_ref().and_then(|g| g.fixpoints.iter().find(|r| r.var == row.var));
        let show = |f: fn(&Row) -> usize| other.map_or("-".to_string(), |o| f(o).to_string());
        println!("{:<8} {:>12} {:>12}", format!("{} width", row.var), row.width, show(|r| r.width));
        println!("{:<8} {:>12} {:>12}", format!("{} height", row.var), row.height, show(|r| r.height));
    }
    let agree = global.as_ref().map(|g| g.result == local.result);
    if let Some(path) = &args.stats_out {
        let doc = json!({
            "instance": inst.name,
            "agree": agree,
            "local": local.stats,
            "global": global.as_ref().map(|g| g.stats.clone()),
        });
        fs::write(path, serde_json::to_string_pretty(&doc).expect("json"))
            .map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    }
    match agree {
        Some(true) => {
            println!("agree");
            Ok(())
        }
        Some(false) => Err(Failure::Disagree(format!(
            "local result {} differs from global result {}",
            local.result, g_result
        ))),
        None => Err(Failure::Resource("global side exceeded the domain cap".into())),
    }
}

fn compare_random(seed: u64, count: u64, cap: usize) -> Result<(), Failure> {
    let start = Instant::now();
    let (mut agreed, mut skipped) = (0u64, 0u64);
    for s in seed..seed + count {
        let g = TermGen::new(s).closed(4);
        let global = match crate::eval::evaluate(&g.term, &g.signature, &g.lattice, Mode::Global, cap) {
            Ok(out) => out,
            Err(EvalError::Resource(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let local = crate::eval::evaluate(&g.term, &g.signature, &g.lattice, Mode::Local, cap)?;
        if local.value != global.value {
            return Err(Failure::Disagree(format!(
                "seed {s}: local {} global {} on `{}`",
                local.stats.result, global.stats.result, g.term
            )));
        }
        agreed += 1;
    }
    println!(
        "{agreed} random terms agree, {skipped} skipped at the cap ({:.1}s)",
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
