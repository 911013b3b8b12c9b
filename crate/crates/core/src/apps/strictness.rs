//! Strictness of an iteration combinator over the two-point domain, where
//! `0` means definitely undefined and `1` means possibly defined.
//!
//! `I(f, p, x)` applies `f` to `x` until `p` holds; the result at `x = 0`
//! tells whether the combinator is strict in `x` for the chosen `f`, `p`.

use std::str::FromStr;

use super::{AppError, Instance};
use crate::lattice::Lattice;
use crate::signature::{Signature, Symbol};
use crate::syntax::{parse_with_symbols, Type, Variance};

/// The monotone unary functions on the two-point domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryChoice {
    Const0,
    Const1,
    Identity,
}

impl UnaryChoice {
    pub const ALL: [UnaryChoice; 3] = [UnaryChoice::Const0, UnaryChoice::Const1, UnaryChoice::Identity];

    pub fn name(self) -> &'static str {
        match self {
            UnaryChoice::Const0 => "const0",
            UnaryChoice::Const1 => "const1",
            UnaryChoice::Identity => "identity",
        }
    }

    fn symbol(self, name: &str) -> Symbol {
        Symbol::new(name, Type::first_order(1, Variance::Plus), false, move |l, d| {
            Ok(match self {
                UnaryChoice::Const0 => l.bot(),
                UnaryChoice::Const1 => l.top(),
                UnaryChoice::Identity => d.elem(0)?,
            })
        })
    }
}

impl FromStr for UnaryChoice {
    type Err = AppError;

    fn from_str(s: &str) -> Result<Self, AppError> {
        UnaryChoice::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                AppError::InvalidParameter(format!(
                    "unknown function `{s}` (expected const0, const1 or identity)"
                ))
            })
    }
}

/// `(mu I(f, p, x) . ite(p(x), I(f, p, f(x)), x))(f0, p0, zero)` with
/// `ite(x, y, z) = x and (y or z)`.
pub fn strictness(f: UnaryChoice, p: UnaryChoice) -> Result<Instance, AppError> {
    let mut sig = Signature::new();
    sig.insert(Symbol::new("ite", Type::first_order(3, Variance::Plus), false, |l, d| {
        let (x, y, z) = (d.elem(0)?, d.elem(1)?, d.elem(2)?);
        Ok(l.meet(x, l.join(y, z)))
    }));
    sig.insert(f.symbol("f0"));
    sig.insert(p.symbol("p0"));
    sig.insert(Symbol::new("zero", Type::Ground, false, |l, _| Ok(l.bot())));
    let src = "(mu I(f+ : (o+) -> o, p+ : (o+) -> o, x+ : o) . \
               ite(p(x), I(f, p, f(x)), x))(f0, p0, zero)";
    let term = parse_with_symbols(src, &sig.names()).expect("strictness term parses");
    Ok(Instance {
        name: format!("strictness-{}-{}", f.name(), p.name()),
        lattice: Lattice::two(),
        signature: sig,
        term,
        main_var: "I".into(),
    })
}
