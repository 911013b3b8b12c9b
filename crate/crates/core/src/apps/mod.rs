//! Generators for the worked examples: each produces a lattice, a signature
//! with interpretations, and a closed ground term whose value answers the
//! example's question.

mod collatz;
mod hfl;
mod indent;
mod reach;
mod strictness;
mod worstcase;

use thiserror::Error;

use crate::eval::{evaluate, EvalError, Mode, Outcome};
use crate::lattice::Lattice;
use crate::signature::Signature;
use crate::syntax::{Term, Type};
use crate::typecheck::{typecheck_closed, TypeError};

pub use collatz::{collatz, collatz_bits};
pub use hfl::{hfl, hfl_edges};
pub use indent::{indent, INDENT_EXAMPLE};
pub use reach::{reach, reach_graph, ReachGraph, ReachLattice};
pub use strictness::{strictness, UnaryChoice};
pub use worstcase::worstcase;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AppError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// A lattice, signature and closed term bundled for evaluation.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub lattice: Lattice,
    pub signature: Signature,
    pub term: Term,
    /// Name of the fixpoint variable whose table the example is about.
    pub main_var: String,
}

impl Instance {
    pub fn type_check(&self) -> Result<Type, TypeError> {
        typecheck_closed(&self.term, &self.signature)
    }

    pub fn evaluate(&self, mode: Mode, cap: usize) -> Result<Outcome, EvalError> {
        evaluate(&self.term, &self.signature, &self.lattice, mode, cap)
    }
}

fn app(head: &str, args: Vec<Term>) -> Term {
    Term::app(Term::base(head), args)
}
