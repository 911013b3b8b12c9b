//! Base symbols: their types and interpretations.
//!
//! A base function receives its whole curried spine as a [`Demands`] handle
//! and pulls the operands it needs. Strict symbols are handed operands that
//! are already evaluated; short-circuit symbols see lazy operands, so an
//! operand they never read is never evaluated.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::Deserialize;
use thiserror::Error;

use crate::eval::EvalError;
use crate::lattice::{Elem, Lattice, Value};
use crate::syntax::{parse_type, Type, Variance};

/// Access to the spine operands of one base-function call.
pub trait Demands {
    fn len(&self) -> usize;

    /// The whole value of operand `i`.
    fn value(&mut self, i: usize) -> Result<Value, EvalError>;

    /// Operand `i` applied to its complete argument spine.
    fn point(&mut self, i: usize, args: &[Value]) -> Result<Elem, EvalError> {
        self.value(i)?
            .apply(args)
            .and_then(|v| v.as_elem())
            .ok_or_else(|| EvalError::contract("?", format!("operand {i} rejected {args:?}")))
    }
}

impl dyn Demands + '_ {
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// A ground operand.
    pub fn elem(&mut self, i: usize) -> Result<Elem, EvalError> {
        self.point(i, &[])
    }

    /// Applies a function-typed operand to ground arguments.
    pub fn call(&mut self, i: usize, args: &[Elem]) -> Result<Elem, EvalError> {
        let args: Vec<Value> = args.iter().map(|e| Value::Elem(*e)).collect();
        self.point(i, &args)
    }
}

/// Operands given up front; used by oracles and table checks.
pub struct Ready<'a>(pub &'a [Value]);

impl Demands for Ready<'_> {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn value(&mut self, i: usize) -> Result<Value, EvalError> {
        self.0
            .get(i)
            .cloned()
            .ok_or_else(|| EvalError::contract("?", format!("no operand {i}")))
    }
}

pub type Interp = Arc<dyn Fn(&Lattice, &mut dyn Demands) -> Result<Elem, EvalError> + Send + Sync>;

#[derive(Clone)]
pub struct Symbol {
    pub name: String,
    pub ty: Type,
    /// Receives lazy operands instead of evaluated ones.
    pub short_circuit: bool,
    pub interp: Interp,
}

impl Symbol {
    pub fn new<F>(name: impl Into<String>, ty: Type, short_circuit: bool, f: F) -> Symbol
    where
        F: Fn(&Lattice, &mut dyn Demands) -> Result<Elem, EvalError> + Send + Sync + 'static,
    {
        Symbol {
            name: name.into(),
            ty,
            short_circuit,
            interp: Arc::new(f),
        }
    }

    pub fn constant(name: impl Into<String>, e: Elem) -> Symbol {
        Symbol::new(name, Type::Ground, false, move |_, _| Ok(e))
    }

    /// A first-order symbol given by its graph over ground arguments.
    pub fn table(name: impl Into<String>, ty: Type, graph: BTreeMap<Vec<Elem>, Elem>) -> Symbol {
        let name = name.into();
        let who = name.clone();
        Symbol::new(name, ty, false, move |_, d| {
            let args = (0..d.len())
                .map(|i| d.elem(i))
                .collect::<Result<Vec<_>, _>>()?;
            graph
                .get(&args)
                .copied()
                .ok_or_else(|| EvalError::contract(&who, format!("no entry for {args:?}")))
        })
    }

    /// Applies the interpretation to evaluated operands.
    pub fn eval(&self, lattice: &Lattice, args: &[Value]) -> Result<Elem, EvalError> {
        (self.interp)(lattice, &mut Ready(args)).map_err(|e| e.attribute(&self.name))
    }

    /// Checks that a first-order interpretation is total and respects its
    /// declared variances on every argument tuple.
    pub fn check_first_order(&self, lattice: &Lattice) -> Result<(), SignatureError> {
        let spine = self.ty.spine();
        if spine.iter().any(|(t, _)| !t.is_ground()) {
            return Ok(());
        }
        let n = spine.len();
        let total = (lattice.size() as f64).powi(n as i32);
        if total > 1e6 {
            return Ok(());
        }
        let bad = |msg: String| SignatureError::Invalid {
            symbol: self.name.clone(),
            msg,
        };
        let mut graph = BTreeMap::new();
        for tuple in tuples(lattice, n) {
            let vals: Vec<Value> = tuple.iter().map(|e| Value::Elem(*e)).collect();
            let r = self.eval(lattice, &vals).map_err(|e| bad(e.to_string()))?;
            lattice.check(r).map_err(|e| bad(e.to_string()))?;
            graph.insert(tuple, r);
        }
        for (tuple, r) in &graph {
            for (i, (_, v)) in spine.iter().enumerate() {
                for b in lattice.elements() {
                    let a = tuple[i];
                    if a == b || !lattice.leq(a, b) {
                        continue;
                    }
                    let mut up = tuple.clone();
                    up[i] = b;
                    let s = graph[&up];
                    let ok = match v {
                        Variance::Plus => lattice.leq(*r, s),
                        Variance::Minus => lattice.leq(s, *r),
                        Variance::Both => true,
                    };
                    if !ok {
                        let shown: Vec<String> = tuple.iter().map(|e| lattice.name(*e)).collect();
                        return Err(bad(format!(
                            "not {} in argument {} at ({})",
                            match v {
                                Variance::Minus => "antitone",
                                _ => "monotone",
                            },
                            i + 1,
                            shown.join(", ")
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.name, self.ty)
    }
}

fn tuples(lattice: &Lattice, n: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                lattice.elements().map(move |e| {
                    let mut t = t.clone();
                    t.push(e);
                    t
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("malformed signature: {0}")]
    Json(String),
    #[error("symbol `{symbol}`: {msg}")]
    Invalid { symbol: String, msg: String },
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("duplicate symbol `{0}`")]
    Duplicate(String),
}

/// Builtin first-order interpretations available by name.
///
/// `and`/`or` are meet/join of any number of ground operands, `not` is the
/// lattice complement, `bot`/`top` are constants.
pub fn builtin(name: &str, ty: Type, short_circuit: bool) -> Result<Symbol, SignatureError> {
    let key = name.strip_prefix("builtin:").unwrap_or(name);
    let invalid = |msg: &str| SignatureError::Invalid {
        symbol: name.to_string(),
        msg: msg.to_string(),
    };
    let spine: Vec<(Type, Variance)> = ty.spine().into_iter().map(|(t, v)| (t.clone(), v)).collect();
    let ground_args = spine.iter().all(|(t, _)| t.is_ground());
    match key {
        "and" | "or" => {
            if spine.is_empty() || !ground_args || spine.iter().any(|(_, v)| *v != Variance::Plus) {
                return Err(invalid("expects monotone ground arguments"));
            }
            let is_and = key == "and";
            Ok(Symbol::new(name, ty, short_circuit, move |l, d| {
                let stop = if is_and { l.bot() } else { l.top() };
                let mut acc = if is_and { l.top() } else { l.bot() };
                for i in 0..d.len() {
                    let e = d.elem(i)?;
                    acc = if is_and { l.meet(acc, e) } else { l.join(acc, e) };
                    if acc == stop {
                        break;
                    }
                }
                Ok(acc)
            }))
        }
        "not" => {
            if spine.len() != 1 || !ground_args || spine[0].1 != Variance::Minus {
                return Err(invalid("expects type (o-) -> o"));
            }
            Ok(Symbol::new(name, ty, false, |l, d| {
                let e = d.elem(0)?;
                l.complement(e)
                    .ok_or_else(|| EvalError::contract("not", format!("{} has no unique complement", l.name(e))))
            }))
        }
        "bot" | "top" => {
            if !ty.is_ground() {
                return Err(invalid("constants have type o"));
            }
            let is_top = key == "top";
            Ok(Symbol::new(name, ty, false, move |l, _| {
                Ok(if is_top { l.top() } else { l.bot() })
            }))
        }
        _ => Err(SignatureError::UnknownBuiltin(key.to_string())),
    }
}

#[derive(Clone, Default)]
pub struct Signature {
    symbols: IndexMap<String, Symbol>,
}

#[derive(Deserialize)]
struct SignatureFile {
    symbols: Vec<SymbolEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolEntry {
    name: String,
    #[serde(rename = "type", default)]
    ty: Option<String>,
    #[serde(rename = "impl", default)]
    builtin: Option<String>,
    #[serde(default)]
    shortcircuit: bool,
    #[serde(default)]
    table: Option<BTreeMap<String, String>>,
    #[serde(default)]
    value: Option<String>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    /// `and`, `or`, `bot`, `top`, and `not` when every element has a unique
    /// complement.
    pub fn standard(lattice: &Lattice) -> Signature {
        let mut s = Signature::new();
        let bin = Type::first_order(2, Variance::Plus);
        s.insert(builtin("and", bin.clone(), true).expect("builtin"));
        s.insert(builtin("or", bin, true).expect("builtin"));
        s.insert(builtin("bot", Type::Ground, false).expect("builtin"));
        s.insert(builtin("top", Type::Ground, false).expect("builtin"));
        if lattice.elements().all(|e| lattice.complement(e).is_some()) {
            s.insert(builtin("not", Type::first_order(1, Variance::Minus), false).expect("builtin"));
        }
        s
    }

    /// Adds or replaces a symbol.
    pub fn insert(&mut self, sym: Symbol) {
        self.symbols.insert(sym.name.clone(), sym);
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    pub fn names(&self) -> HashSet<String> {
        self.symbols.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.values()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Loads a signature file. Table entries are keyed by comma-separated
    /// element names; every tuple must be present and the graph must respect
    /// the declared variances.
    pub fn from_json(src: &str, lattice: &Lattice) -> Result<Signature, SignatureError> {
        let file: SignatureFile =
            serde_json::from_str(src).map_err(|e| SignatureError::Json(e.to_string()))?;
        let mut sig = Signature::new();
        for entry in file.symbols {
            if sig.contains(&entry.name) {
                return Err(SignatureError::Duplicate(entry.name));
            }
            let sym = Signature::load_entry(entry, lattice)?;
            sym.check_first_order(lattice)?;
            sig.insert(sym);
        }
        Ok(sig)
    }

    fn load_entry(entry: SymbolEntry, lattice: &Lattice) -> Result<Symbol, SignatureError> {
        let invalid = |msg: String| SignatureError::Invalid {
            symbol: entry.name.clone(),
            msg,
        };
        let ty = match &entry.ty {
            Some(src) => parse_type(src).map_err(|e| invalid(e.to_string()))?,
            None => Type::Ground,
        };
        let elem = |s: &str| lattice.elem(s.trim()).map_err(|e| invalid(e.to_string()));
        match (&entry.builtin, &entry.table, &entry.value) {
            (Some(b), None, None) => builtin(b, ty, entry.shortcircuit).map(|mut s| {
                s.name = entry.name.clone();
                s
            }),
            (None, None, Some(v)) => {
                if !ty.is_ground() {
                    return Err(invalid("`value` requires type o".into()));
                }
                Ok(Symbol::constant(entry.name.clone(), elem(v)?))
            }
            (None, Some(table), None) => {
                let spine = ty.spine();
                if spine.is_empty() || spine.iter().any(|(t, _)| !t.is_ground()) {
                    return Err(invalid("tables must have ground arguments".into()));
                }
                let n = spine.len();
                let mut graph = BTreeMap::new();
                for (k, v) in table {
                    let args = k.split(',').map(elem).collect::<Result<Vec<_>, _>>()?;
                    if args.len() != n {
                        return Err(invalid(format!("entry `{k}` has {} arguments, expected {n}", args.len())));
                    }
                    graph.insert(args, elem(v)?);
                }
                let missing = tuples(lattice, n).into_iter().find(|t| !graph.contains_key(t));
                if let Some(t) = missing {
                    let shown: Vec<String> = t.iter().map(|e| lattice.name(*e)).collect();
                    return Err(invalid(format!("table has no entry for `{}`", shown.join(","))));
                }
                Ok(Symbol::table(entry.name.clone(), ty, graph))
            }
            _ => Err(invalid("give exactly one of `impl`, `table`, `value`".into())),
        }
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.symbols.values()).finish()
    }
}
