//! Indentation-sensitive block structure.
//!
//! A word over `b`, `c` and space is a program: `b` opens a block, `c` is a
//! plain statement, and every statement in a block is preceded by the
//! block's indentation. Languages are binary relations on word positions,
//! so a language value has type `(o+-, o+-) -> o` over the flat lattice of
//! positions `0..=n`. The block nonterminal takes the current indentation as
//! a language-valued argument:
//!
//! ```text
//! B(I) = eps | I c B(I) | I b B(I S)        S = sp | sp S
//! ```
//!
//! and the word is accepted when `b B(S)` relates `start` to `end`.

use super::{AppError, Instance};
use crate::lattice::{Elem, Lattice};
use crate::signature::{Signature, Symbol};
use crate::syntax::{parse_with_symbols, Type, Variance};

/// A small nested program, spaces written out.
pub const INDENT_EXAMPLE: &str = "b  c  b   c   c  c";

fn relation() -> Type {
    Type::first_order(2, Variance::Both)
}

fn letter(name: &str, word: Vec<char>, ch: char) -> Symbol {
    Symbol::new(name, relation(), false, move |l, d| {
        let (i, j) = (d.elem(0)?, d.elem(1)?);
        Ok(match (l.atom_index(i), l.atom_index(j)) {
            (Some(i), Some(j)) if j == i + 1 && word.get(i) == Some(&ch) => l.top(),
            _ => l.bot(),
        })
    })
}

fn signature(word: &[char]) -> Signature {
    let n = word.len();
    let mut sig = Signature::new();
    sig.insert(letter("b", word.to_vec(), 'b'));
    sig.insert(letter("c", word.to_vec(), 'c'));
    sig.insert(letter("sp", word.to_vec(), ' '));
    sig.insert(Symbol::new("eps", relation(), false, |l, d| {
        let (i, j) = (d.elem(0)?, d.elem(1)?);
        Ok(match l.atom_index(i) {
            Some(_) if i == j => l.top(),
            _ => l.bot(),
        })
    }));
    let op = Type::fun(vec![(relation(), Variance::Plus), (relation(), Variance::Plus)], relation());
    sig.insert(Symbol::new("alt", op.clone(), true, |l, d| {
        let (i, j) = (d.elem(2)?, d.elem(3)?);
        let first = d.call(0, &[i, j])?;
        if first == l.top() {
            return Ok(first);
        }
        Ok(l.join(first, d.call(1, &[i, j])?))
    }));
    sig.insert(Symbol::new("cat", op, true, move |l, d| {
        let (i, j) = (d.elem(2)?, d.elem(3)?);
        let mut acc = l.bot();
        for k in 0..=n {
            let k = l.atom(k).expect("position");
            let left = d.call(0, &[i, k])?;
            if left == l.bot() {
                continue;
            }
            acc = l.join(acc, l.meet(left, d.call(1, &[k, j])?));
            if acc == l.top() {
                break;
            }
        }
        Ok(acc)
    }));
    sig.insert(Symbol::constant("start", Elem(1)));
    sig.insert(Symbol::constant("end", Elem(n as u32 + 1)));
    sig
}

/// Normalizes the visible-space character `␣` and `_` to a space.
fn normalize(word: &str) -> Result<Vec<char>, AppError> {
    word.chars()
        .map(|c| match c {
            '␣' | '_' | ' ' => Ok(' '),
            'b' | 'c' => Ok(c),
            other => Err(AppError::InvalidParameter(format!(
                "indent words use `b`, `c` and spaces, found {other:?}"
            ))),
        })
        .collect()
}

/// The acceptance term for `word`; `top` means the word is well indented.
pub fn indent(word: &str) -> Result<Instance, AppError> {
    let word = normalize(word)?;
    let signature = signature(&word);
    // the spaces language is closed, so it is inlined at both uses
    let spaces = "(mu S : (o+-, o+-) -> o . alt(sp, cat(sp, S)))";
    let src = format!(
        "cat(b, (mu B(I+ : (o+-, o+-) -> o) : (o+-, o+-) -> o . \
           alt(eps, alt(cat(I, cat(c, B(I))), cat(I, cat(b, B(cat({spaces}, I))))))) \
         ({spaces}))(start, end)"
    );
    let term = parse_with_symbols(&src, &signature.names()).expect("indent term parses");
    Ok(Instance {
        name: format!("indent-{}", word.len()),
        lattice: Lattice::flat(word.len() + 1),
        signature,
        term,
        main_var: "B".into(),
    })
}
