//! Demand-driven evaluation.
//!
//! Every fixpoint keeps a table from argument tuples to current
//! approximations. Entering a fixpoint starts a fresh table holding only the
//! queried tuple; looking up an unknown tuple registers it with the initial
//! approximation. A round re-evaluates the body at every tuple registered
//! before the round began, newest first; tuples discovered during a round
//! wait for the next one. Iteration stops after a round that neither changed
//! a value nor discovered a tuple.
//!
//! Operands are passed unevaluated and memoized point by point. An operand
//! is tabulated over its whole domain only when its complete value is
//! required: as part of a fixpoint argument tuple, or when a base function
//! asks for it.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use indexmap::{IndexMap, IndexSet};

use super::program::{NodeId, NodeKind, Program};
use super::stats::{EvalStats, FixStats};
use super::EvalError;
use crate::lattice::{Domains, Elem, Value};
use crate::signature::Demands;
use crate::syntax::{FixKind, Type};

#[derive(Clone)]
enum Arg {
    Val(Value),
    Lazy(Rc<Thunk>),
}

struct Thunk {
    node: NodeId,
    scope: Scope,
    full: RefCell<Option<Value>>,
    points: RefCell<HashMap<Vec<Value>, Elem>>,
}

impl Thunk {
    fn new(node: NodeId, scope: Scope) -> Rc<Thunk> {
        Rc::new(Thunk {
            node,
            scope,
            full: RefCell::new(None),
            points: RefCell::new(HashMap::new()),
        })
    }
}

type Scope = Rc<Vec<Option<Arg>>>;

type Table = IndexMap<Vec<Value>, Elem>;

struct CacheEntry {
    versions: Vec<u64>,
    value: Value,
}

struct Local<'a, 'l> {
    p: &'a Program,
    d: &'a Domains<'l>,
    tables: Vec<Option<Table>>,
    versions: Vec<u64>,
    clock: u64,
    /// Every tuple ever registered, with its number of body evaluations.
    seen: Vec<IndexMap<Vec<Value>, u64>>,
    seen_first: Vec<IndexSet<Vec<Value>>>,
    stats: Vec<FixStats>,
    cache: HashMap<(NodeId, Vec<Value>), CacheEntry>,
    point_cache: HashMap<(NodeId, Vec<Value>, Vec<Value>), (Vec<u64>, Elem)>,
    point_hits: u64,
    tabulations: u64,
    hits: u64,
    points: u64,
}

pub(super) fn run(p: &Program, d: &Domains<'_>) -> Result<(Value, EvalStats), EvalError> {
    let n = p.fixes.len();
    let mut ev = Local {
        p,
        d,
        tables: vec![None; n],
        versions: vec![0; n],
        clock: 0,
        seen: vec![IndexMap::new(); n],
        seen_first: vec![IndexSet::new(); n],
        stats: p
            .fixes
            .iter()
            .map(|f| FixStats {
                var: f.name.clone(),
                ..FixStats::default()
            })
            .collect(),
        cache: HashMap::new(),
        point_cache: HashMap::new(),
        point_hits: 0,
        tabulations: 0,
        hits: 0,
        points: 0,
    };
    let root = Thunk::new(p.root, Rc::new(vec![None; p.slot_names.len()]));
    let value = ev.table_of(&root, Vec::new(), p.root_type())?;
    for (i, st) in ev.stats.iter_mut().enumerate() {
        st.width = ev.seen[i].len();
        st.arguments = ev.seen_first[i].len();
        st.tuples = std::mem::take(&mut ev.seen[i]).into_iter().collect();
    }
    let stats = EvalStats {
        fixpoints: ev.stats,
        operand_tabulations: ev.tabulations,
        operand_cache_hits: ev.hits,
        operand_points: ev.points,
        operand_point_hits: ev.point_hits,
        ..EvalStats::default()
    };
    Ok((value, stats))
}

struct LazyOperands<'e, 'a, 'l> {
    ev: &'e mut Local<'a, 'l>,
    args: &'e [Arg],
}

impl Demands for LazyOperands<'_, '_, '_> {
    fn len(&self) -> usize {
        self.args.len()
    }

    fn value(&mut self, i: usize) -> Result<Value, EvalError> {
        match self.args.get(i) {
            Some(a) => self.ev.force(a),
            None => Err(EvalError::contract("?", format!("no operand {i}"))),
        }
    }

    fn point(&mut self, i: usize, args: &[Value]) -> Result<Elem, EvalError> {
        match self.args.get(i) {
            Some(a) => self.ev.apply_arg(a, args),
            None => Err(EvalError::contract("?", format!("no operand {i}"))),
        }
    }
}

fn outside_domain() -> EvalError {
    EvalError::contract("?", "operand outside its parameter domain")
}

impl<'a, 'l> Local<'a, 'l> {
    fn bump(&mut self, f: usize) {
        self.clock += 1;
        self.versions[f] = self.clock;
    }

    fn initial(&self, f: usize) -> Elem {
        let l = self.d.lattice();
        match self.p.fixes[f].kind {
            FixKind::Mu => l.bot(),
            FixKind::Nu => l.top(),
        }
    }

    fn note_tuple(&mut self, f: usize, key: &[Value]) {
        if self.seen[f].insert(key.to_vec(), 0).is_none() {
            let g = self.p.fixes[f].ty.group_len();
            self.seen_first[f].insert(key[..g.min(key.len())].to_vec());
        }
    }

    fn force_all(&mut self, args: &[Arg]) -> Result<Vec<Value>, EvalError> {
        args.iter().map(|a| self.force(a)).collect()
    }

    /// Operand applied to a complete spine of argument values.
    fn apply_arg(&mut self, arg: &Arg, args: &[Value]) -> Result<Elem, EvalError> {
        match arg {
            Arg::Val(v) => v.apply(args).and_then(|v| v.as_elem()).ok_or_else(outside_domain),
            Arg::Lazy(t) => self.point(t, args),
        }
    }

    fn point(&mut self, t: &Rc<Thunk>, args: &[Value]) -> Result<Elem, EvalError> {
        if let Some(v) = t.full.borrow().as_ref() {
            return v.apply(args).and_then(|v| v.as_elem()).ok_or_else(outside_domain);
        }
        if let Some(e) = t.points.borrow().get(args) {
            return Ok(*e);
        }
        let node = self.p.node(t.node);
        let key = self.environment(t).map(|env| (t.node, env, args.to_vec()));
        if let Some((versions, e)) = key.as_ref().and_then(|k| self.point_cache.get(k)) {
            if node.free_fixes.iter().zip(versions).all(|(f, v)| self.versions[*f] == *v) {
                self.point_hits += 1;
                let e = *e;
                t.points.borrow_mut().insert(args.to_vec(), e);
                return Ok(e);
            }
        }
        self.points += 1;
        let e = self.eval(t.node, &t.scope, args.iter().cloned().map(Arg::Val).collect())?;
        t.points.borrow_mut().insert(args.to_vec(), e);
        if let Some(key) = key {
            let versions = node.free_fixes.iter().map(|f| self.versions[*f]).collect();
            self.point_cache.insert(key, (versions, e));
        }
        Ok(e)
    }

    /// Values of the free variables of a thunk's node, or `None` while one
    /// of them is still unevaluated: forcing it just to build a cache key
    /// could evaluate something the query never needs.
    fn environment(&self, t: &Thunk) -> Option<Vec<Value>> {
        self.p
            .node(t.node)
            .free_slots
            .iter()
            .map(|s| match t.scope[*s].as_ref().expect("bound slot") {
                Arg::Val(v) => Some(v.clone()),
                Arg::Lazy(u) => u.full.borrow().clone(),
            })
            .collect()
    }

    fn force(&mut self, arg: &Arg) -> Result<Value, EvalError> {
        let t = match arg {
            Arg::Val(v) => return Ok(v.clone()),
            Arg::Lazy(t) => t,
        };
        if let Some(v) = t.full.borrow().as_ref() {
            return Ok(v.clone());
        }
        let v = self.tabulate_operand(t)?;
        *t.full.borrow_mut() = Some(v.clone());
        t.points.borrow_mut().clear();
        Ok(v)
    }

    /// Full value of an operand, reusing an earlier tabulation of the same
    /// node when its free variables are bound to the same values and none of
    /// the fixpoint tables it reads has changed since.
    fn tabulate_operand(&mut self, t: &Rc<Thunk>) -> Result<Value, EvalError> {
        let p = self.p;
        let node = p.node(t.node);
        let key = self.environment(t).map(|env| (t.node, env));
        if let Some(hit) = key.as_ref().and_then(|k| self.cache.get(k)) {
            if node.free_fixes.iter().zip(&hit.versions).all(|(f, v)| self.versions[*f] == *v) {
                self.hits += 1;
                return Ok(hit.value.clone());
            }
        }
        self.tabulations += 1;
        let value = self.table_of(t, Vec::new(), &node.ty)?;
        if let Some(key) = key {
            let versions = node.free_fixes.iter().map(|f| self.versions[*f]).collect();
            self.cache.insert(
                key,
                CacheEntry {
                    versions,
                    value: value.clone(),
                },
            );
        }
        Ok(value)
    }

    /// Tabulates the operand applied to `prefix` over the remaining spine.
    fn table_of(&mut self, t: &Rc<Thunk>, prefix: Vec<Value>, ty: &Type) -> Result<Value, EvalError> {
        let d = self.d;
        match ty {
            Type::Ground => Ok(Value::Elem(self.point(t, &prefix)?)),
            Type::Fun(_, res) => d.tabulate(ty, |tuple| {
                let mut args = prefix.clone();
                args.extend_from_slice(tuple);
                self.table_of(t, args, res)
            }),
        }
    }

    /// Evaluates `node` applied to its whole remaining spine.
    fn eval(&mut self, id: NodeId, scope: &Scope, args: Vec<Arg>) -> Result<Elem, EvalError> {
        let p = self.p;
        match &p.node(id).kind {
            NodeKind::Base(s) => {
                let sym = &p.symbols[*s];
                let lattice = self.d.lattice();
                let e = if sym.short_circuit {
                    let mut ops = LazyOperands { ev: self, args: &args };
                    (sym.interp)(lattice, &mut ops).map_err(|e| e.attribute(&sym.name))?
                } else {
                    let vals = self.force_all(&args)?;
                    sym.eval(lattice, &vals)?
                };
                lattice
                    .check(e)
                    .map_err(|err| EvalError::contract(&sym.name, err.to_string()))
            }
            NodeKind::LamVar(s) => {
                let vals = self.force_all(&args)?;
                self.apply_arg(scope[*s].as_ref().expect("bound slot"), &vals)
            }
            NodeKind::FixVar(f) => {
                let key = self.force_all(&args)?;
                self.lookup(*f, key)
            }
            NodeKind::App(h, ops) => {
                let mut spine = Vec::with_capacity(ops.len() + args.len());
                for o in ops {
                    spine.push(match &p.node(*o).kind {
                        NodeKind::LamVar(s) => scope[*s].clone().expect("bound slot"),
                        _ => Arg::Lazy(Thunk::new(*o, scope.clone())),
                    });
                }
                spine.extend(args);
                self.eval(*h, scope, spine)
            }
            NodeKind::Lam(slots, body) => {
                let mut inner = (**scope).clone();
                let mut rest = args.into_iter();
                for s in slots {
                    inner[*s] = rest.next();
                }
                self.eval(*body, &Rc::new(inner), rest.collect())
            }
            NodeKind::Fix(f, body) => {
                let key = self.force_all(&args)?;
                self.fixpoint(*f, *body, scope, key)
            }
        }
    }

    fn lookup(&mut self, f: usize, key: Vec<Value>) -> Result<Elem, EvalError> {
        let init = self.initial(f);
        let Some(table) = self.tables[f].as_mut() else {
            return Err(EvalError::contract(
                &self.p.fixes[f].name,
                "fixpoint variable read outside its binder",
            ));
        };
        if let Some(e) = table.get(&key) {
            return Ok(*e);
        }
        table.insert(key.clone(), init);
        self.bump(f);
        self.note_tuple(f, &key);
        Ok(init)
    }

    fn fixpoint(&mut self, f: usize, body: NodeId, scope: &Scope, key: Vec<Value>) -> Result<Elem, EvalError> {
        let init = self.initial(f);
        let lattice = self.d.lattice();
        let kind = self.p.fixes[f].kind;
        let saved = self.tables[f].take();
        let mut table = Table::new();
        table.insert(key.clone(), init);
        self.tables[f] = Some(table);
        self.bump(f);
        self.note_tuple(f, &key);
        let mut rounds = 0;
        let outcome = loop {
            rounds += 1;
            let known = self.tables[f].as_ref().expect("active table").len();
            let mut changed = false;
            let mut failed = None;
            for i in (0..known).rev() {
                let (k, old) = {
                    let table = self.tables[f].as_ref().expect("active table");
                    let (k, e) = table.get_index(i).expect("known tuple");
                    (k.clone(), *e)
                };
                self.stats[f].body_evals += 1;
                *self.seen[f].get_mut(&k).expect("registered tuple") += 1;
                let new = match self.eval(body, scope, k.iter().cloned().map(Arg::Val).collect()) {
                    Ok(e) => e,
                    Err(e) => {
                        failed = Some(e);
                        break;
                    }
                };
                if new != old {
                    let forward = match kind {
                        FixKind::Mu => lattice.leq(old, new),
                        FixKind::Nu => lattice.leq(new, old),
                    };
                    if !forward {
                        self.stats[f].chain_violations += 1;
                    }
                    self.tables[f].as_mut().expect("active table")[i] = new;
                    self.bump(f);
                    changed = true;
                }
            }
            if let Some(e) = failed {
                break Err(e);
            }
            let table = self.tables[f].as_ref().expect("active table");
            if !changed && table.len() == known {
                break Ok(table[&key]);
            }
        };
        let restore = saved.is_some();
        self.tables[f] = saved;
        if restore {
            self.bump(f);
        }
        let st = &mut self.stats[f];
        st.height = st.height.max(rounds + 1);
        st.rounds += rounds;
        st.entries += 1;
        outcome
    }
}
