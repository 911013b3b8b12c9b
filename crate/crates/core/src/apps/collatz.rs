//! Whether the 3x+1 sequence from an n-bit number reaches 0, modulo 2^n.
//!
//! Numbers are tuples of Boolean lattice elements, least significant bit
//! first. Arithmetic is provided bitwise: `half_i`, `dbl_i` and `add_i`
//! return bit `i` of their result and are computed directly from the
//! argument bits rather than tabulated.

use super::{app, AppError, Instance};
use crate::lattice::{Elem, Lattice};
use crate::eval::EvalError;
use crate::signature::{builtin, Demands, Signature, Symbol};
use crate::syntax::{FixKind, Param, Term, Type, Variance};

fn number(l: &Lattice, bits: &[Elem]) -> u64 {
    bits.iter()
        .enumerate()
        .filter(|(_, b)| **b == l.top())
        .map(|(i, _)| 1u64 << i)
        .sum()
}

fn bit(l: &Lattice, x: u64, i: usize) -> Elem {
    if x >> i & 1 == 1 {
        l.top()
    } else {
        l.bot()
    }
}

fn bits_of(d: &mut dyn Demands, from: usize, n: usize) -> Result<Vec<Elem>, EvalError> {
    (from..from + n).map(|i| d.elem(i)).collect()
}

fn signature(n: usize) -> Signature {
    let mut sig = Signature::new();
    let word = Type::first_order(n, Variance::Both);
    let pair = Type::first_order(2 * n, Variance::Both);
    sig.insert(builtin("and", Type::first_order(2, Variance::Plus), true).expect("builtin"));
    sig.insert(builtin("or", Type::first_order(2, Variance::Plus), false).expect("builtin"));
    sig.insert(builtin("not", Type::first_order(1, Variance::Minus), false).expect("builtin"));
    sig.insert(Symbol::new("tt", Type::Ground, false, |l, _| Ok(l.top())));
    sig.insert(Symbol::new("ff", Type::Ground, false, |l, _| Ok(l.bot())));
    sig.insert(Symbol::new("null", word.clone(), false, move |l, d| {
        let x = bits_of(d, 0, n)?;
        Ok(if x.iter().all(|b| *b == l.bot()) { l.top() } else { l.bot() })
    }));
    sig.insert(Symbol::new("even", word.clone(), false, |l, d| {
        Ok(if d.elem(0)? == l.bot() { l.top() } else { l.bot() })
    }));
    let mask = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    for i in 0..n {
        sig.insert(Symbol::new(format!("half_{i}"), word.clone(), false, move |l, d| {
            let x = number(l, &bits_of(d, 0, n)?);
            Ok(bit(l, x >> 1, i))
        }));
        sig.insert(Symbol::new(format!("dbl_{i}"), word.clone(), false, move |l, d| {
            let x = number(l, &bits_of(d, 0, n)?);
            Ok(bit(l, (x << 1) & mask, i))
        }));
        sig.insert(Symbol::new(format!("add_{i}"), pair.clone(), false, move |l, d| {
            let x = number(l, &bits_of(d, 0, n)?);
            let y = number(l, &bits_of(d, n, n)?);
            Ok(bit(l, x.wrapping_add(y) & mask, i))
        }));
    }
    sig
}

/// `(mu F(x_0, ..., x_{n-1}) . null(x) or (even(x) and F(x/2)) or (not even(x) and F(3x+1)))(query)`
pub fn collatz_bits(bits: &[bool]) -> Result<Instance, AppError> {
    let n = bits.len();
    if n == 0 || n > 32 {
        return Err(AppError::InvalidParameter(format!(
            "collatz needs between 1 and 32 bits, got {n}"
        )));
    }
    let xs: Vec<Term> = (0..n).map(|i| Term::var(format!("x_{i}"))).collect();
    let each = |prefix: &str, args: &[Term]| -> Vec<Term> {
        (0..n).map(|i| app(&format!("{prefix}_{i}"), args.to_vec())).collect()
    };
    let halved = each("half", &xs);
    let doubled = each("dbl", &xs);
    let triple: Vec<Term> = each("add", &[xs.clone(), doubled].concat());
    let one: Vec<Term> = (0..n).map(|i| Term::base(if i == 0 { "tt" } else { "ff" })).collect();
    let succ = each("add", &[triple, one].concat());
    let even = app("even", xs.clone());
    let body = app(
        "or",
        vec![
            app("null", xs.clone()),
            app(
                "or",
                vec![
                    app("and", vec![even.clone(), Term::app(Term::var("F"), halved)]),
                    app("and", vec![app("not", vec![even]), Term::app(Term::var("F"), succ)]),
                ],
            ),
        ],
    );
    let params: Vec<Param> = (0..n)
        .map(|i| Param::new(format!("x_{i}"), Variance::Both, Type::Ground))
        .collect();
    let fty = Type::first_order(n, Variance::Both);
    let fix = Term::fix(FixKind::Mu, "F", fty, Term::lam(params, body));
    let query = bits
        .iter()
        .map(|b| Term::base(if *b { "tt" } else { "ff" }))
        .collect();
    Ok(Instance {
        name: format!("collatz-{n}"),
        lattice: Lattice::boolean(),
        signature: signature(n),
        term: Term::app(fix, query),
        main_var: "F".into(),
    })
}

/// The instance for `n` bits started at `query`.
pub fn collatz(n: usize, query: u64) -> Result<Instance, AppError> {
    if n == 0 || n > 32 || (n < 64 && query >> n != 0) {
        return Err(AppError::InvalidParameter(format!(
            "query {query} does not fit in {n} bits"
        )));
    }
    let bits: Vec<bool> = (0..n).map(|i| query >> i & 1 == 1).collect();
    collatz_bits(&bits)
}
