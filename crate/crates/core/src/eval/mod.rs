//! Evaluation of closed terms: a global Kleene-iteration oracle and a local,
//! demand-driven evaluator that only explores the fixpoint arguments a query
//! actually needs.

mod global;
mod local;
mod program;
mod stats;

use std::time::Instant;

use thiserror::Error;

use crate::lattice::{Domains, Lattice, ResourceError, Value};
use crate::signature::Signature;
use crate::syntax::Term;
use crate::typecheck::TypeError;

pub use program::{compile, FixId, Node, NodeId, NodeKind, Program, SlotId};
pub use stats::{EvalStats, FixStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("term has free variables: {}", .0.join(", "))]
    NotClosed(Vec<String>),
    #[error("base symbol `{symbol}`: {msg}")]
    Contract { symbol: String, msg: String },
}

impl EvalError {
    pub fn contract(symbol: &str, msg: impl Into<String>) -> EvalError {
        EvalError::Contract {
            symbol: symbol.to_string(),
            msg: msg.into(),
        }
    }

    /// Fills in the symbol name of a contract error raised without one.
    pub fn attribute(self, symbol: &str) -> EvalError {
        match self {
            EvalError::Contract { symbol: s, msg } if s == "?" => EvalError::Contract {
                symbol: symbol.to_string(),
                msg,
            },
            e => e,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Local,
    Global,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Local => "local",
            Mode::Global => "global",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub value: Value,
    pub stats: EvalStats,
}

impl Outcome {
    pub fn stats_for(&self, var: &str) -> Option<&FixStats> {
        self.stats.fixpoint(var)
    }
}

/// Evaluates a closed, well-typed term with the chosen engine. `cap` bounds
/// the size of any domain the engine has to enumerate.
pub fn evaluate(
    term: &Term,
    sig: &Signature,
    lattice: &Lattice,
    mode: Mode,
    cap: usize,
) -> Result<Outcome, EvalError> {
    let start = Instant::now();
    let program = compile(term, sig)?;
    let domains = Domains::new(lattice, cap);
    let (value, mut stats) = match mode {
        Mode::Local => local::run(&program, &domains)?,
        Mode::Global => global::run(&program, &domains)?,
    };
    stats.mode = mode.name().to_string();
    stats.result = value.render(lattice);
    stats.duration_ms = start.elapsed().as_secs_f64() * 1000.0;
    Ok(Outcome { value, stats })
}

pub fn eval_local(term: &Term, sig: &Signature, lattice: &Lattice, cap: usize) -> Result<Outcome, EvalError> {
    evaluate(term, sig, lattice, Mode::Local, cap)
}

pub fn eval_global(term: &Term, sig: &Signature, lattice: &Lattice, cap: usize) -> Result<Outcome, EvalError> {
    evaluate(term, sig, lattice, Mode::Global, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_with_symbols;

    fn both(src: &str, lattice: &Lattice) -> (Outcome, Outcome) {
        let sig = Signature::standard(lattice);
        let t = parse_with_symbols(src, &sig.names()).unwrap();
        let l = eval_local(&t, &sig, lattice, 1 << 16).unwrap();
        let g = eval_global(&t, &sig, lattice, 1 << 16).unwrap();
        assert_eq!(l.value, g.value, "{src}");
        (l, g)
    }

    fn result(src: &str, lattice: &Lattice) -> String {
        both(src, lattice).0.stats.result
    }

    #[test]
    fn trivial_fixpoints() {
        let b = Lattice::boolean();
        assert_eq!(result("mu x . x", &b), "bot");
        assert_eq!(result("nu x . x", &b), "top");
        assert_eq!(result("mu x . or(x, top)", &b), "top");
        assert_eq!(result("nu x . and(x, bot)", &b), "bot");
    }

    #[test]
    fn redexes_and_nested_fixpoints() {
        let b = Lattice::powerset_n(2).unwrap();
        assert_eq!(result("(\\y+ : o . or(y, bot))(top)", &b), "{0,1}");
        assert_eq!(result("mu x . nu y . and(y, or(x, top))", &b), "{0,1}");
        assert_eq!(result("mu x . nu y . and(y, not(bot))", &b), "{0,1}");
        assert_eq!(
            result("(mu F(f+ : (o+) -> o) . f(bot))(\\z+ : o . not(not(z)))", &b),
            "{}"
        );
    }

    #[test]
    fn function_results_render_as_tables() {
        let b = Lattice::boolean();
        let (l, g) = both("\\y+ : o . or(y, bot)", &b);
        assert_eq!(l.stats.result, g.stats.result);
        assert!(l.stats.result.contains("top"));
    }

    #[test]
    fn short_circuit_skips_unneeded_fixpoints() {
        let b = Lattice::boolean();
        let (l, g) = both("and(bot, mu z . or(z, top))", &b);
        assert_eq!(l.stats.fixpoint("z").unwrap().entries, 0);
        assert_eq!(g.stats.fixpoint("z").unwrap().entries, 1);
    }

    #[test]
    fn iteration_chains_are_monotone() {
        let b = Lattice::powerset_n(2).unwrap();
        let (l, g) = both("(mu F(x+- : o) . or(x, F(not(x))))(bot)", &b);
        assert_eq!(l.stats.result, "{0,1}");
        assert_eq!(l.stats.chain_violations(), 0);
        assert_eq!(g.stats.chain_violations(), 0);
        let f = l.stats.fixpoint("F").unwrap();
        assert_eq!(f.width, 2);
        assert_eq!(g.stats.fixpoint("F").unwrap().width, 4);
    }

    #[test]
    fn open_and_ill_typed_terms_are_rejected() {
        let b = Lattice::boolean();
        let sig = Signature::standard(&b);
        let open = Term::var("y");
        assert!(matches!(eval_local(&open, &sig, &b, 16), Err(EvalError::NotClosed(_))));
        let bad = parse_with_symbols("mu x . not(x)", &sig.names()).unwrap();
        assert!(matches!(eval_global(&bad, &sig, &b, 16), Err(EvalError::Type(_))));
    }

    #[test]
    fn caps_are_reported_as_resource_errors() {
        let l = Lattice::flat(6);
        let sig = Signature::standard(&l);
        let t = parse_with_symbols(
            "(mu F(f+ : (o+) -> o) . f(bot))(\\z+ : o . z)",
            &sig.names(),
        )
        .unwrap();
        assert!(matches!(eval_global(&t, &sig, &l, 100), Err(EvalError::Resource(_))));
    }
}
