//! Local and global evaluation for a typed higher-order fixpoint algebra over
//! finite lattices.

pub mod apps;
pub mod cli;
pub mod eval;
pub mod gen;
pub mod lattice;
pub mod signature;
pub mod syntax;
pub mod typecheck;
