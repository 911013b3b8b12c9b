//! Non-regular reachability: is there a `k >= 1` such that the word
//! `a^k b^k c^k` leads from state 0 back to state 0?
//!
//! The graph consists of three cycles through state 0: an `a`-cycle of
//! length `n`, a `b`-cycle of length `n + 1` and a `c`-cycle of length
//! `n + 2`. The term walks the three cycles backwards in lock step, carrying
//! `a^k` and `b^k` as function-valued fixpoint arguments.

use super::{AppError, Instance};
use crate::lattice::{Elem, Lattice};
use crate::signature::{Signature, Symbol};
use crate::syntax::{parse_with_symbols, Type, Variance};

/// Which lattice encodes states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReachLattice {
    /// Flat lattice over the states; predecessor maps are deterministic.
    Flat,
    /// Sets of states; predecessor maps are images under the reversed edges.
    Powerset,
}

/// Labelled graph with one predecessor per label and state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachGraph {
    pub n: usize,
    pub states: usize,
    /// `pred[l][v]` is the source of the `l`-labelled edge into `v`, labels
    /// ordered `a`, `b`, `c`.
    pub pred: [Vec<Option<usize>>; 3],
}

impl ReachGraph {
    /// Forward edges `(source, label, target)`.
    pub fn edges(&self) -> Vec<(usize, char, usize)> {
        let mut out = Vec::new();
        for (l, label) in ['a', 'b', 'c'].into_iter().enumerate() {
            for (v, p) in self.pred[l].iter().enumerate() {
                if let Some(u) = p {
                    out.push((*u, label, v));
                }
            }
        }
        out
    }

    /// Removes the `c`-edge into state 0, so no word of the shape returns.
    pub fn cut_c_loop(mut self) -> ReachGraph {
        self.pred[2][0] = None;
        self
    }
}

/// The three-cycle graph on `3n + 1` states, `n >= 2`.
pub fn reach_graph(n: usize) -> Result<ReachGraph, AppError> {
    if n < 2 {
        return Err(AppError::InvalidParameter(format!("reach needs n >= 2, got {n}")));
    }
    let states = 3 * n + 1;
    let mut pred = [vec![None; states], vec![None; states], vec![None; states]];
    // cycle 0 -> first -> ... -> last -> 0
    let cycle = |pred: &mut [Vec<Option<usize>>; 3], l: usize, first: usize, last: usize| {
        pred[l][first] = Some(0);
        for v in first + 1..=last {
            pred[l][v] = Some(v - 1);
        }
        pred[l][0] = Some(last);
    };
    cycle(&mut pred, 0, 1, n - 1);
    cycle(&mut pred, 1, n, 2 * n - 1);
    cycle(&mut pred, 2, 2 * n, 3 * n);
    Ok(ReachGraph { n, states, pred })
}

fn predecessor(g: &ReachGraph, kind: ReachLattice, label: usize) -> Symbol {
    let name = ["a", "b", "c"][label];
    let pred = g.pred[label].clone();
    let ty = Type::first_order(1, Variance::Plus);
    Symbol::new(name, ty, false, move |l, d| {
        let x = d.elem(0)?;
        Ok(match kind {
            ReachLattice::Flat => match l.atom_index(x) {
                Some(v) => pred[v].and_then(|u| l.atom(u)).unwrap_or(l.bot()),
                None => x,
            },
            ReachLattice::Powerset => {
                let mut bits = 0u32;
                for (v, p) in pred.iter().enumerate() {
                    if x.0 >> v & 1 == 1 {
                        if let Some(u) = p {
                            bits |= 1 << u;
                        }
                    }
                }
                Elem(bits)
            }
        })
    })
}

fn signature(g: &ReachGraph, kind: ReachLattice) -> Signature {
    let mut sig = Signature::new();
    for label in 0..3 {
        sig.insert(predecessor(g, kind, label));
    }
    let unary = Type::first_order(1, Variance::Plus);
    let ite_ty = Type::fun(
        vec![(Type::Ground, Variance::Both), (Type::Ground, Variance::Plus)],
        Type::Ground,
    );
    sig.insert(match kind {
        // top when the walk is back at 0, otherwise keep looking
        ReachLattice::Flat => Symbol::new("ite", ite_ty, true, |l, d| {
            let x = d.elem(0)?;
            if l.atom_index(x) == Some(0) {
                Ok(l.top())
            } else {
                d.elem(1)
            }
        }),
        // collect every start state found so far
        ReachLattice::Powerset => Symbol::new("ite", ite_ty, false, |l, d| {
            let x = d.elem(0)?;
            Ok(l.join(x, d.elem(1)?))
        }),
    });
    let comp_ty = Type::fun(
        vec![(unary.clone(), Variance::Plus), (unary.clone(), Variance::Plus)],
        unary,
    );
    sig.insert(Symbol::new("comp", comp_ty, true, |_, d| {
        let x = d.elem(2)?;
        let inner = d.call(1, &[x])?;
        d.call(0, &[inner])
    }));
    let zero = Symbol::new("zero", Type::Ground, false, move |l, _| {
        Ok(match kind {
            ReachLattice::Flat => l.atom(0).expect("state 0"),
            ReachLattice::Powerset => l.singleton(0).expect("state 0"),
        })
    });
    sig.insert(zero);
    sig
}

/// The reachability term over `graph`. With the flat lattice the result is
/// `top` exactly when some `a^k b^k c^k` returns to 0; with the powerset
/// lattice the result is the set of states from which such a word reaches
/// 0, so the answer is whether it contains 0.
pub fn reach(graph: &ReachGraph, kind: ReachLattice) -> Result<Instance, AppError> {
    if graph.n < 2 {
        return Err(AppError::InvalidParameter("reach needs n >= 2".into()));
    }
    let lattice = match kind {
        ReachLattice::Flat => Lattice::flat(graph.states),
        ReachLattice::Powerset => Lattice::powerset_n(graph.states)
            .map_err(|e| AppError::InvalidParameter(e.to_string()))?,
    };
    let signature = signature(graph, kind);
    let src = "(mu F(f+- : (o+) -> o, g+- : (o+) -> o, x+- : o) . \
               ite(f(g(x)), F(comp(a, f), comp(b, g), c(x))))(a, b, c(zero))";
    let term = parse_with_symbols(src, &signature.names()).expect("reach term parses");
    Ok(Instance {
        name: format!("reach-{}", graph.n),
        lattice,
        signature,
        term,
        main_var: "F".into(),
    })
}
