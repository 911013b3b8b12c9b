//! A term on which local iteration has to discover every argument.
//!
//! States `0..n` with an edge from `i` to every `j < i`. The argument of `F`
//! walks through all subsets of states before the greatest fixpoint is
//! reached.

use super::{AppError, Instance};
use crate::lattice::{Elem, Lattice};
use crate::signature::{builtin, Signature, Symbol};
use crate::syntax::{parse_with_symbols, Type, Variance};

fn signature(n: usize) -> Signature {
    let mut sig = Signature::new();
    let bin = Type::first_order(2, Variance::Plus);
    sig.insert(builtin("and", bin.clone(), true).expect("builtin"));
    sig.insert(builtin("or", bin, true).expect("builtin"));
    sig.insert(builtin("not", Type::first_order(1, Variance::Minus), false).expect("builtin"));
    sig.insert(Symbol::constant("ff", Elem(0)));
    let unary = Type::first_order(1, Variance::Plus);
    // i has a successor in x
    sig.insert(Symbol::new("dia", unary.clone(), false, move |_, d| {
        let x = d.elem(0)?.0;
        let out = (0..n).filter(|&i| x & ((1u32 << i) - 1) != 0).fold(0, |s, i| s | 1 << i);
        Ok(Elem(out))
    }));
    // every successor of i is in x
    sig.insert(Symbol::new("box", unary, false, move |_, d| {
        let x = d.elem(0)?.0;
        let out = (0..n)
            .filter(|&i| {
                let below = (1u32 << i) - 1;
                x & below == below
            })
            .fold(0, |s, i| s | 1 << i);
        Ok(Elem(out))
    }));
    sig
}

/// `(nu F(x) . F((x and dia(not x)) or (not x and box(x))))(ff)` on `n` states.
pub fn worstcase(n: usize) -> Result<Instance, AppError> {
    if n == 0 || n > 16 {
        return Err(AppError::InvalidParameter(format!(
            "worst case needs between 1 and 16 states, got {n}"
        )));
    }
    let signature = signature(n);
    let src = "(nu F(x+- : o) . F(or(and(x, dia(not(x))), and(not(x), box(x)))))(ff)";
    let term = parse_with_symbols(src, &signature.names()).expect("worst-case term parses");
    Ok(Instance {
        name: format!("worstcase-{n}"),
        lattice: Lattice::powerset_n(n).map_err(|e| AppError::InvalidParameter(e.to_string()))?,
        signature,
        term,
        main_var: "F".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Mode;

    #[test]
    fn modal_operators_on_the_chain() {
        let sig = signature(3);
        let l = Lattice::powerset_n(3).unwrap();
        let at = |name: &str, x: u32| sig.get(name).unwrap().eval(&l, &[crate::lattice::Value::Elem(Elem(x))]).unwrap().0;
        // {0}: states 1 and 2 see it, state 0 has no successors so box holds there
        assert_eq!(at("dia", 0b001), 0b110);
        assert_eq!(at("box", 0b001), 0b011);
        assert_eq!(at("box", 0b000), 0b001);
    }

    #[test]
    fn every_subset_is_discovered() {
        for n in 1..=4 {
            let inst = worstcase(n).unwrap();
            let out = inst.evaluate(Mode::Local, 1 << 20).unwrap();
            assert_eq!(out.value.as_elem(), Some(inst.lattice.top()));
            assert_eq!(out.stats.fixpoint("F").unwrap().width, 1 << n);
        }
    }
}
