//! Seeded random generation of small lattices, signatures and well-typed
//! terms of order at most 2, for differential testing of the two engines.
//!
//! Terms are built type-directed: an operand at variance `v` is generated in
//! the context `Γ` adjusted for `v`, so only variables the typing rules admit
//! can appear. Every generated term is expected to type-check.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{product, Domains, Elem, Lattice, LatticeSpec};
use crate::signature::{Signature, Symbol};
use crate::syntax::{FixKind, Param, Term, Type, Variance};
use crate::typecheck::TypingContext;

const PLUS: Variance = Variance::Plus;
const MINUS: Variance = Variance::Minus;
const BOTH: Variance = Variance::Both;

/// Cap on the domain of a randomly tabulated base symbol.
const TABLE_CAP: usize = 20_000;

/// Lattices with at most four elements.
pub fn small_lattices() -> Vec<Lattice> {
    let chain = |names: &[&str]| {
        let elements: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let order = elements.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        Lattice::from_spec(&LatticeSpec::Explicit { elements, order }).expect("chain")
    };
    vec![
        Lattice::two(),
        Lattice::boolean(),
        chain(&["lo", "mid", "hi"]),
        chain(&["c0", "c1", "c2", "c3"]),
        Lattice::powerset_n(2).expect("diamond"),
    ]
}

fn unary(v: Variance) -> Type {
    Type::first_order(1, v)
}

/// A closed term together with the lattice and signature it is meant for.
#[derive(Clone, Debug)]
pub struct Generated {
    pub lattice: Lattice,
    pub signature: Signature,
    pub term: Term,
}

pub struct TermGen {
    rng: ChaCha8Rng,
    fresh: usize,
    symbols: Vec<(String, Type)>,
}

impl TermGen {
    pub fn new(seed: u64) -> TermGen {
        TermGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            fresh: 0,
            symbols: Vec::new(),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Standard connectives plus random tables of each first-order shape and
    /// a pointwise higher-order application symbol.
    pub fn signature(&mut self, lattice: &Lattice) -> Signature {
        let mut sig = Signature::standard(lattice);
        let d = Domains::new(lattice, TABLE_CAP);
        let k = Elem(self.rng.gen_range(0..lattice.size()) as u32);
        sig.insert(Symbol::constant("k", k));
        let shapes = [
            ("m", unary(PLUS)),
            ("a", unary(MINUS)),
            ("u", unary(BOTH)),
            ("b", Type::fun(vec![(Type::Ground, PLUS), (Type::Ground, MINUS)], Type::Ground)),
        ];
        for (name, ty) in shapes {
            let Ok(dom) = d.get(&ty) else { continue };
            let Some(v) = dom.values().choose(&mut self.rng) else { continue };
            let table = v.as_table().expect("function value");
            let graph: BTreeMap<Vec<Elem>, Elem> = product(table.params())
                .zip(table.entries())
                .map(|(args, res)| {
                    let args = args.iter().map(|a| a.as_elem().expect("ground")).collect();
                    (args, res.as_elem().expect("ground"))
                })
                .collect();
            sig.insert(Symbol::table(name, ty, graph));
        }
        let ap_ty = Type::fun(vec![(unary(PLUS), PLUS), (Type::Ground, PLUS)], Type::Ground);
        sig.insert(Symbol::new("ap", ap_ty, true, |_, d| {
            let x = d.elem(1)?;
            d.call(0, &[x])
        }));
        self.symbols = sig.iter().map(|s| (s.name.clone(), s.ty.clone())).collect();
        sig
    }

    fn name(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    /// A term of type `ty` in context `ctx` of nesting at most `depth`.
    pub fn term(&mut self, ty: &Type, ctx: &TypingContext, depth: usize) -> Term {
        // heads whose spine ends in `ty`, with the argument groups to supply
        let mut heads: Vec<(Term, Vec<Vec<(Type, Variance)>>)> = Vec::new();
        // variables are weighted up so that binders are actually used, and
        // constants down so that terms do not collapse early
        let usable = ctx
            .iter()
            .filter(|(_, (_, v))| *v != MINUS)
            .map(|(x, (t, _))| (Term::var(x.clone()), t.clone(), 8));
        let bases = self.symbols.iter().map(|(s, t)| (Term::base(s.clone()), t.clone(), 2));
        for (head, hty, weight) in usable.chain(bases) {
            if let Some(groups) = groups_to(&hty, ty) {
                if depth > 0 || groups.is_empty() {
                    let weight = if groups.is_empty() && depth > 0 { weight / 4 } else { weight };
                    for _ in 0..weight {
                        heads.push((head.clone(), groups.clone()));
                    }
                }
            }
        }
        let mut options = heads.len();
        let structural = depth > 0;
        if structural {
            // lambda, fixpoint, applied abstraction
            options += 3;
        } else if !ty.is_ground() {
            options += 1;
        }
        let mut pick = self.rng.gen_range(0..options.max(1));
        if pick < heads.len() {
            let (head, groups) = heads.swap_remove(pick);
            return self.spine(head, &groups, ctx, depth.saturating_sub(1));
        }
        pick -= heads.len();
        match (ty, pick, structural) {
            (Type::Fun(args, res), 0, _) | (Type::Fun(args, res), _, false) => {
                let mut inner = ctx.clone();
                let params: Vec<Param> = args
                    .iter()
                    .map(|(t, v)| {
                        let x = self.name(if t.is_ground() { "x" } else { "f" });
                        inner = inner.update(&x, *v, t.clone());
                        Param::new(x, *v, t.clone())
                    })
                    .collect();
                let body = self.term(res, &inner, depth.saturating_sub(1));
                Term::lam(params, body)
            }
            (_, 1, true) | (Type::Ground, 0, true) => {
                let kind = if self.rng.gen_bool(0.5) { FixKind::Mu } else { FixKind::Nu };
                let x = self.name("F");
                let inner = ctx.update(&x, PLUS, ty.clone());
                let body = self.term(ty, &inner, depth - 1);
                Term::fix(kind, x, ty.clone(), body)
            }
            (_, _, true) => {
                let arg_ty = if ty.is_ground() {
                    [Type::Ground, unary(PLUS), unary(BOTH)].choose(&mut self.rng).unwrap().clone()
                } else {
                    Type::Ground
                };
                let v = *[PLUS, MINUS, BOTH].choose(&mut self.rng).unwrap();
                let head_ty = Type::fun(vec![(arg_ty.clone(), v)], ty.clone());
                let head = self.term(&head_ty, ctx, depth - 1);
                let arg = self.term(&arg_ty, &ctx.at(v), depth - 1);
                Term::app(head, vec![arg])
            }
            _ => self.constant(),
        }
    }

    fn constant(&mut self) -> Term {
        Term::base(*["bot", "top", "k"].choose(&mut self.rng).unwrap())
    }

    fn spine(
        &mut self,
        head: Term,
        groups: &[Vec<(Type, Variance)>],
        ctx: &TypingContext,
        depth: usize,
    ) -> Term {
        let mut t = head;
        for group in groups {
            let args = group
                .iter()
                .map(|(aty, v)| self.term(aty, &ctx.at(*v), depth))
                .collect();
            t = Term::app(t, args);
        }
        t
    }

    /// A closed ground term on a random small lattice.
    pub fn closed(&mut self, max_depth: usize) -> Generated {
        let lattices = small_lattices();
        let lattice = lattices.choose(&mut self.rng).unwrap().clone();
        let signature = self.signature(&lattice);
        let depth = self.rng.gen_range(2.min(max_depth)..=max_depth);
        let term = self.term(&Type::Ground, &TypingContext::new(), depth);
        Generated { lattice, signature, term }
    }

    /// A ground term over `signature` in which `x : ty` at variance `v` is
    /// the only free variable, retrying until `x` actually occurs.
    pub fn open(&mut self, x: &str, ty: &Type, v: Variance, max_depth: usize) -> Term {
        let ctx = TypingContext::new().update(x, v, ty.clone());
        let mut last = None;
        for _ in 0..20 {
            let depth = self.rng.gen_range(1..=max_depth);
            let t = self.term(&Type::Ground, &ctx, depth);
            if t.free_vars().contains(x) {
                return t;
            }
            last = Some(t);
        }
        last.expect("at least one attempt")
    }
}

/// Argument groups that take a head of type `from` to type `to`, if any.
fn groups_to(from: &Type, to: &Type) -> Option<Vec<Vec<(Type, Variance)>>> {
    let mut groups = Vec::new();
    let mut t = from;
    loop {
        if t == to {
            return Some(groups);
        }
        match t {
            Type::Fun(args, res) => {
                groups.push(args.clone());
                t = res;
            }
            Type::Ground => return None,
        }
    }
}
