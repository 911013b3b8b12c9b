//! Reference semantics: every subterm denotes a full table and fixpoints are
//! computed by Kleene iteration from the constant bottom (or top) table.

use super::program::{NodeKind, Program};
use super::stats::{EvalStats, FixStats};
use super::EvalError;
use crate::lattice::{value_leq, Domains, Value};
use crate::syntax::{FixKind, Type};

struct Global<'a, 'l> {
    p: &'a Program,
    d: &'a Domains<'l>,
    slots: Vec<Option<Value>>,
    fixes: Vec<Option<Value>>,
    stats: Vec<FixStats>,
}

pub(super) fn run(p: &Program, d: &Domains<'_>) -> Result<(Value, EvalStats), EvalError> {
    let mut g = Global {
        p,
        d,
        slots: vec![None; p.slot_names.len()],
        fixes: vec![None; p.fixes.len()],
        stats: p
            .fixes
            .iter()
            .map(|f| FixStats {
                var: f.name.clone(),
                ..FixStats::default()
            })
            .collect(),
    };
    let v = g.eval(p.root)?;
    let stats = EvalStats {
        fixpoints: g.stats,
        ..EvalStats::default()
    };
    Ok((v, stats))
}

impl Global<'_, '_> {
    fn eval(&mut self, id: usize) -> Result<Value, EvalError> {
        let p = self.p;
        let node = p.node(id);
        match &node.kind {
            NodeKind::Base(s) => self.base_value(*s, Vec::new(), &node.ty),
            NodeKind::LamVar(s) => Ok(self.slots[*s].clone().expect("bound slot")),
            NodeKind::FixVar(f) => Ok(self.fixes[*f].clone().expect("bound fixpoint")),
            NodeKind::App(..) => {
                let (head, args) = p.spine(id);
                let vals = args
                    .iter()
                    .map(|a| self.eval(*a))
                    .collect::<Result<Vec<_>, _>>()?;
                if let NodeKind::Base(s) = p.node(head).kind {
                    return self.base_value(s, vals, &node.ty);
                }
                let hv = self.eval(head)?;
                hv.apply(&vals)
                    .ok_or_else(|| EvalError::contract("?", "operand outside its parameter domain"))
            }
            NodeKind::Lam(params, body) => {
                let (params, body) = (params.clone(), *body);
                let saved: Vec<Option<Value>> = params.iter().map(|s| self.slots[*s].clone()).collect();
                let d = self.d;
                let v = d.tabulate(&node.ty, |tuple| {
                    for (s, v) in params.iter().zip(tuple) {
                        self.slots[*s] = Some(v.clone());
                    }
                    self.eval(body)
                });
                for (s, v) in params.iter().zip(saved) {
                    self.slots[*s] = v;
                }
                v
            }
            NodeKind::Fix(f, body) => self.fixpoint(*f, *body, &node.ty),
        }
    }

    fn base_value(&mut self, s: usize, prefix: Vec<Value>, ty: &Type) -> Result<Value, EvalError> {
        let (p, d) = (self.p, self.d);
        let sym = &p.symbols[s];
        match ty {
            Type::Ground => {
                let e = sym.eval(self.d.lattice(), &prefix)?;
                let e = self
                    .d
                    .lattice()
                    .check(e)
                    .map_err(|err| EvalError::contract(&sym.name, err.to_string()))?;
                Ok(Value::Elem(e))
            }
            Type::Fun(_, res) => d.tabulate(ty, |tuple| {
                let mut args = prefix.clone();
                args.extend_from_slice(tuple);
                self.base_value(s, args, res)
            }),
        }
    }

    fn fixpoint(&mut self, f: usize, body: usize, ty: &Type) -> Result<Value, EvalError> {
        let lattice = self.d.lattice();
        let kind = self.p.fixes[f].kind;
        let start = match kind {
            FixKind::Mu => lattice.bot(),
            FixKind::Nu => lattice.top(),
        };
        let saved = self.fixes[f].take();
        let mut x = self.d.constant(ty, start)?;
        let mut passes = 0;
        let result = loop {
            self.fixes[f] = Some(x.clone());
            passes += 1;
            let next = match self.eval(body) {
                Ok(v) => v,
                Err(e) => {
                    self.fixes[f] = saved;
                    return Err(e);
                }
            };
            if next == x {
                break x;
            }
            let forward = match kind {
                FixKind::Mu => value_leq(lattice, &x, &next),
                FixKind::Nu => value_leq(lattice, &next, &x),
            };
            if !forward {
                self.stats[f].chain_violations += 1;
            }
            x = next;
        };
        self.fixes[f] = saved;
        let width = ty
            .spine()
            .iter()
            .map(|(t, _)| self.d.get(t).map(|d| d.len()))
            .product::<Result<usize, _>>()?;
        let arguments = self.d.group_size(ty)?;
        let st = &mut self.stats[f];
        st.width = st.width.max(width);
        st.arguments = st.arguments.max(arguments);
        st.height = st.height.max(passes + 1);
        st.rounds += passes;
        st.entries += 1;
        st.body_evals += passes as u64;
        Ok(result)
    }
}
