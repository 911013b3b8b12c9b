use std::collections::BTreeMap;

use super::Term;

/// Normalizes every λ-redex, then restores well-naming.
///
/// A redex is an application whose operator is a λ-abstraction with exactly
/// as many parameters as there are operands. Simply typed terms normalize.
pub fn beta_normalize(t: &Term) -> Term {
    normalize(t).ensure_well_named()
}

fn normalize(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::Base(_) => t.clone(),
        Term::App(head, args) => {
            let head = normalize(head);
            let args: Vec<Term> = args.iter().map(normalize).collect();
            match head {
                Term::Lam(params, body) if params.len() == args.len() => {
                    let map: BTreeMap<String, Term> = params
                        .iter()
                        .map(|p| p.name.clone())
                        .zip(args)
                        .collect();
                    normalize(&body.substitute(&map))
                }
                head => Term::app(head, args),
            }
        }
        Term::Lam(params, body) => Term::lam(params.clone(), normalize(body)),
        Term::Fix { kind, var, ty, body } => Term::fix(*kind, var.clone(), ty.clone(), normalize(body)),
    }
}

/// True if no λ-abstraction occurs in operator position.
pub fn is_beta_normal(t: &Term) -> bool {
    let mut ok = true;
    t.visit(&mut |s| {
        if let Term::App(h, _) = s {
            if matches!(**h, Term::Lam(..)) {
                ok = false;
            }
        }
    });
    ok
}
