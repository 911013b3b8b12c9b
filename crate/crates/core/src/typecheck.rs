//! The variance-tracking typing judgment `Γ ⊢ t : τ`.
//!
//! Contexts record, per variable, its declared type and a variance
//! hypothesis. Checking an operand in an argument position of variance `v`
//! uses `Γ` (for `+`), the flipped context (for `-`) or the flattened context
//! (for `+-`). A variable may only be used under a `+` or `+-` hypothesis,
//! which is what makes fixpoint bodies monotone in their bound variable.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::signature::Signature;
use crate::syntax::{Term, Type, Variance};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypingContext {
    hyps: BTreeMap<String, (Type, Variance)>,
}

impl TypingContext {
    pub fn new() -> TypingContext {
        TypingContext::default()
    }

    pub fn get(&self, x: &str) -> Option<&(Type, Variance)> {
        self.hyps.get(x)
    }

    pub fn len(&self) -> usize {
        self.hyps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyps.is_empty()
    }

    /// Swaps `+` and `-` hypotheses.
    pub fn flip(&self) -> TypingContext {
        let hyps = self
            .hyps
            .iter()
            .map(|(x, (t, v))| {
                let v = match v {
                    Variance::Plus => Variance::Minus,
                    Variance::Minus => Variance::Plus,
                    Variance::Both => Variance::Both,
                };
                (x.clone(), (t.clone(), v))
            })
            .collect();
        TypingContext { hyps }
    }

    /// Keeps only `+-` hypotheses.
    pub fn flatten(&self) -> TypingContext {
        let hyps = self
            .hyps
            .iter()
            .filter(|(_, (_, v))| *v == Variance::Both)
            .map(|(x, h)| (x.clone(), h.clone()))
            .collect();
        TypingContext { hyps }
    }

    /// Replaces any hypothesis on `x`.
    pub fn update(&self, x: &str, v: Variance, ty: Type) -> TypingContext {
        let mut out = self.clone();
        out.hyps.insert(x.to_string(), (ty, v));
        out
    }

    /// Context for an operand in an argument position of variance `v`.
    pub fn at(&self, v: Variance) -> TypingContext {
        match v {
            Variance::Plus => self.clone(),
            Variance::Minus => self.flip(),
            Variance::Both => self.flatten(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &(Type, Variance))> {
        self.hyps.iter()
    }
}

impl FromIterator<(String, Type, Variance)> for TypingContext {
    fn from_iter<I: IntoIterator<Item = (String, Type, Variance)>>(iter: I) -> Self {
        TypingContext {
            hyps: iter.into_iter().map(|(x, t, v)| (x, (t, v))).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeErrorKind {
    UnknownSymbol(String),
    UnboundVariable(String),
    /// The variable is only available under a `-` hypothesis here.
    VarianceViolation(String),
    NotAFunction(Type),
    ArityMismatch { expected: usize, found: usize },
    ArgumentMismatch { index: usize, expected: Type, found: Type },
    FixpointMismatch { declared: Type, body: Type },
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeErrorKind::UnknownSymbol(s) => write!(f, "unknown base symbol `{s}`"),
            TypeErrorKind::UnboundVariable(x) => write!(f, "unbound variable `{x}`"),
            TypeErrorKind::VarianceViolation(x) => write!(
                f,
                "variance violation: `{x}` occurs in an antitone position"
            ),
            TypeErrorKind::NotAFunction(t) => write!(f, "operator of type `{t}` is not a function"),
            TypeErrorKind::ArityMismatch { expected, found } => write!(
                f,
                "operator takes {expected} argument(s) in its first group, applied to {found}"
            ),
            TypeErrorKind::ArgumentMismatch {
                index,
                expected,
                found,
            } => write!(f, "argument {index} has type `{found}`, expected `{expected}`"),
            TypeErrorKind::FixpointMismatch { declared, body } => write!(
                f,
                "fixpoint variable declared `{declared}` but body has type `{body}`"
            ),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{kind} (in `{subterm}`)")]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub subterm: String,
}

fn fail<T>(kind: TypeErrorKind, t: &Term) -> Result<T, TypeError> {
    let mut subterm = t.to_string();
    if subterm.chars().count() > 120 {
        subterm = subterm.chars().take(117).collect::<String>() + "...";
    }
    Err(TypeError { kind, subterm })
}

/// Derives the type of `t` under `ctx`, or reports the first rule that fails.
pub fn typecheck(t: &Term, ctx: &TypingContext, sig: &Signature) -> Result<Type, TypeError> {
    match t {
        Term::Base(f) => match sig.get(f) {
            Some(s) => Ok(s.ty.clone()),
            None => fail(TypeErrorKind::UnknownSymbol(f.clone()), t),
        },
        Term::Var(x) => match ctx.get(x) {
            Some((ty, Variance::Plus | Variance::Both)) => Ok(ty.clone()),
            Some((_, Variance::Minus)) => fail(TypeErrorKind::VarianceViolation(x.clone()), t),
            None => fail(TypeErrorKind::UnboundVariable(x.clone()), t),
        },
        Term::App(head, args) => {
            let ht = typecheck(head, ctx, sig)?;
            let Type::Fun(params, res) = ht else {
                return fail(TypeErrorKind::NotAFunction(ht), t);
            };
            if params.len() != args.len() {
                return fail(
                    TypeErrorKind::ArityMismatch {
                        expected: params.len(),
                        found: args.len(),
                    },
                    t,
                );
            }
            for (i, ((pt, v), arg)) in params.iter().zip(args).enumerate() {
                let at = typecheck(arg, &ctx.at(*v), sig)?;
                if at != *pt {
                    return fail(
                        TypeErrorKind::ArgumentMismatch {
                            index: i + 1,
                            expected: pt.clone(),
                            found: at,
                        },
                        t,
                    );
                }
            }
            Ok(*res)
        }
        Term::Lam(params, body) => {
            let inner = params
                .iter()
                .fold(ctx.clone(), |c, p| c.update(&p.name, p.variance, p.ty.clone()));
            let res = typecheck(body, &inner, sig)?;
            Ok(Type::fun(
                params.iter().map(|p| (p.ty.clone(), p.variance)).collect(),
                res,
            ))
        }
        Term::Fix { var, ty, body, .. } => {
            let bt = typecheck(body, &ctx.update(var, Variance::Plus, ty.clone()), sig)?;
            if bt != *ty {
                return fail(
                    TypeErrorKind::FixpointMismatch {
                        declared: ty.clone(),
                        body: bt,
                    },
                    t,
                );
            }
            Ok(ty.clone())
        }
    }
}

/// Type of a closed term.
pub fn typecheck_closed(t: &Term, sig: &Signature) -> Result<Type, TypeError> {
    typecheck(t, &TypingContext::new(), sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::{builtin, Signature};
    use crate::syntax::{parse_term, Variance::*};

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.insert(builtin("and", Type::first_order(2, Plus), true).unwrap());
        s.insert(builtin("not", Type::first_order(1, Minus), false).unwrap());
        s
    }

    fn check(src: &str) -> Result<Type, TypeError> {
        let s = sig();
        let t = parse_term(src, &|n| s.get(n).is_some()).unwrap();
        typecheck_closed(&t, &s)
    }

    #[test]
    fn context_operations() {
        let g: TypingContext = [
            ("x".to_string(), Type::Ground, Plus),
            ("y".to_string(), Type::Ground, Minus),
            ("z".to_string(), Type::Ground, Both),
        ]
        .into_iter()
        .collect();
        let flipped = g.flip();
        assert_eq!(flipped.get("x").unwrap().1, Minus);
        assert_eq!(flipped.get("y").unwrap().1, Plus);
        assert_eq!(flipped.get("z").unwrap().1, Both);
        assert_eq!(flipped.flip(), g);
        let flat = g.flatten();
        assert_eq!(flat.len(), 1);
        assert_eq!(flat.get("z").unwrap().1, Both);
        assert_eq!(flat.flatten(), flat);
        assert_eq!(g.flip().flatten(), g.flatten());
        let single: TypingContext = [("x".to_string(), Type::Ground, Plus)].into_iter().collect();
        assert_eq!(single.update("x", Minus, Type::Ground).get("x").unwrap().1, Minus);
    }

    #[test]
    fn least_fixpoint_of_identity() {
        assert_eq!(check("mu x . x").unwrap(), Type::Ground);
    }

    #[test]
    fn negation_under_fixpoint_is_rejected() {
        let e = check("mu x . not(x)").unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::VarianceViolation("x".into()));
        assert_eq!(e.subterm, "x");
    }

    #[test]
    fn double_negation_is_monotone() {
        assert_eq!(check("mu x . not(not(x))").unwrap(), Type::Ground);
    }

    #[test]
    fn flattened_arguments_admit_both_variances() {
        assert!(check("mu F(y+-) . F(not(y))").is_ok());
        // but a + parameter may not pass through a - position
        assert!(check("mu F(y+) . F(not(y))").is_err());
    }

    #[test]
    fn arity_and_type_mismatches() {
        let e = check("and(mu x . x)").unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::ArityMismatch { expected: 2, found: 1 }));
        let e = check("and(\\y+ . y, mu x . x)").unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::ArgumentMismatch { index: 1, .. }));
        let e = check("mu x : (o+) -> o . and(x, x)").unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::ArgumentMismatch { .. }));
        let e = check("mu x : (o+) -> o . mu y . y").unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::FixpointMismatch { .. }));
        let e = check("mu x . q").unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::UnboundVariable("q".into()));
    }
}
