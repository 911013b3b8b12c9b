//! Types with variances, terms, concrete syntax and β-normalization.

mod beta;
mod parser;
mod term;
mod types;

pub use beta::{beta_normalize, is_beta_normal};
pub use parser::{parse_term, parse_type, parse_with_symbols, ParseError};
pub use term::{FixKind, Param, Term};
pub use types::{Type, Variance};
