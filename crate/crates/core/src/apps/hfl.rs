//! A higher-order modal property over a small labelled transition system.
//!
//! States are `0..n`. `a`-edges connect neighbours in both directions and
//! every state has a `b`-edge to 0. The formula
//!
//! ```text
//! (nu F f . f(p) and <b> F(f . f)) (<a>)
//! ```
//!
//! holds where `p` is reachable by `2^k` `a`-steps for every `k`, after `k`
//! `b`-steps. Sets of states form a powerset lattice.

use super::{AppError, Instance};
use crate::lattice::{Elem, Lattice};
use crate::signature::{builtin, Signature, Symbol};
use crate::syntax::{parse_with_symbols, Type, Variance};

fn diamond(name: &str, edges: Vec<(usize, usize)>) -> Symbol {
    Symbol::new(name, Type::first_order(1, Variance::Plus), false, move |_, d| {
        let x = d.elem(0)?.0;
        let mut out = 0u32;
        for &(u, v) in &edges {
            if x >> v & 1 == 1 {
                out |= 1 << u;
            }
        }
        Ok(Elem(out))
    })
}

/// Labelled edges `(source, label, target)` of the system on `n` states.
pub fn hfl_edges(n: usize) -> Vec<(usize, char, usize)> {
    let mut edges = Vec::new();
    for i in 0..n.saturating_sub(1) {
        edges.push((i, 'a', i + 1));
        edges.push((i + 1, 'a', i));
    }
    for i in 0..n {
        edges.push((i, 'b', 0));
    }
    edges
}

fn signature(n: usize) -> Signature {
    let mut sig = Signature::new();
    let edges = hfl_edges(n);
    let labelled = |l: char| -> Vec<(usize, usize)> {
        edges.iter().filter(|e| e.1 == l).map(|e| (e.0, e.2)).collect()
    };
    sig.insert(builtin("and", Type::first_order(2, Variance::Plus), true).expect("builtin"));
    sig.insert(builtin("or", Type::first_order(2, Variance::Plus), true).expect("builtin"));
    sig.insert(diamond("dia_a", labelled('a')));
    sig.insert(diamond("dia_b", labelled('b')));
    sig.insert(Symbol::constant("p", Elem(1)));
    let unary = Type::first_order(1, Variance::Plus);
    let comp_ty = Type::fun(
        vec![(unary.clone(), Variance::Plus), (unary.clone(), Variance::Plus)],
        unary,
    );
    sig.insert(Symbol::new("comp", comp_ty, true, |_, d| {
        let x = d.elem(2)?;
        let inner = d.call(1, &[x])?;
        d.call(0, &[inner])
    }));
    sig
}

/// The formula on `n` states; the result is the set of states satisfying it.
pub fn hfl(n: usize) -> Result<Instance, AppError> {
    if n == 0 {
        return Err(AppError::InvalidParameter("hfl needs at least one state".into()));
    }
    let lattice = Lattice::powerset_n(n).map_err(|e| AppError::InvalidParameter(e.to_string()))?;
    let signature = signature(n);
    let src = "(nu F : (((o+) -> o)+) -> o . \\f+ : (o+) -> o . \
               and(f(p), dia_b(F(comp(f, f)))))(\\x+ : o . dia_a(x))";
    let term = parse_with_symbols(src, &signature.names()).expect("hfl term parses");
    Ok(Instance {
        name: format!("hfl-{n}"),
        lattice,
        signature,
        term,
        main_var: "F".into(),
    })
}
