use std::cell::{OnceCell, RefCell};
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::rc::Rc;

use thiserror::Error;

use super::{Elem, Lattice};
use crate::syntax::{Type, Variance};

/// Default bound on the number of values a single domain may enumerate.
pub const DEFAULT_DOMAIN_CAP: usize = 1_000_000;

/// Bound on stored table cells (values times tuples) for one domain.
const CELL_BUDGET: usize = 1 << 25;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("domain of type `{ty}` exceeds the enumeration cap of {cap} (naive size bound {bound:.3e})")]
pub struct ResourceError {
    pub ty: Type,
    pub bound: f64,
    pub cap: usize,
}

/// An inhabitant of some type domain: a ground element or a total function
/// table over the first argument group.
#[derive(Clone)]
pub enum Value {
    Elem(Elem),
    Fun(Rc<FunTable>),
}

/// Total table for `(t1, ..., tn) -> t`. Entries are indexed by argument
/// tuples in lexicographic order of their domain indices.
pub struct FunTable {
    params: Rc<[Rc<TypeDomain>]>,
    entries: Vec<Value>,
    hash: u64,
}

impl FunTable {
    pub fn new(params: Rc<[Rc<TypeDomain>]>, entries: Vec<Value>) -> FunTable {
        debug_assert_eq!(
            entries.len(),
            params.iter().map(|d| d.len()).product::<usize>()
        );
        let mut h = DefaultHasher::new();
        entries.hash(&mut h);
        FunTable {
            params,
            entries,
            hash: h.finish(),
        }
    }

    pub fn params(&self) -> &[Rc<TypeDomain>] {
        &self.params
    }

    pub fn entries(&self) -> &[Value] {
        &self.entries
    }

    /// Position of an argument tuple, or `None` if some argument lies outside
    /// its parameter domain.
    pub fn position(&self, group: &[Value]) -> Option<usize> {
        if group.len() != self.params.len() {
            return None;
        }
        let mut pos = 0;
        for (d, v) in self.params.iter().zip(group) {
            pos = pos * d.len() + d.index_of(v)?;
        }
        Some(pos)
    }

    pub fn lookup(&self, group: &[Value]) -> Option<&Value> {
        self.position(group).map(|p| &self.entries[p])
    }
}

impl Value {
    pub fn as_elem(&self) -> Option<Elem> {
        match self {
            Value::Elem(e) => Some(*e),
            Value::Fun(_) => None,
        }
    }

    pub fn as_table(&self) -> Option<&FunTable> {
        match self {
            Value::Fun(t) => Some(t),
            Value::Elem(_) => None,
        }
    }

    /// Applies the value to a flattened spine of arguments, group by group.
    pub fn apply(&self, args: &[Value]) -> Option<Value> {
        let mut cur = self.clone();
        let mut rest = args;
        while !rest.is_empty() {
            let next = {
                let table = cur.as_table()?;
                let n = table.params.len();
                if rest.len() < n {
                    return None;
                }
                let v = table.lookup(&rest[..n])?.clone();
                rest = &rest[n..];
                v
            };
            cur = next;
        }
        Some(cur)
    }

    pub fn apply_elems(&self, args: &[Elem]) -> Option<Elem> {
        let args: Vec<Value> = args.iter().map(|e| Value::Elem(*e)).collect();
        self.apply(&args)?.as_elem()
    }

    /// Human-readable rendering.
    pub fn render(&self, lattice: &Lattice) -> String {
        match self {
            Value::Elem(e) => lattice.name(*e),
            Value::Fun(t) => {
                let mut parts = Vec::with_capacity(t.entries.len());
                for (tuple, v) in product(&t.params).zip(&t.entries) {
                    let args: Vec<String> = tuple.iter().map(|a| a.render(lattice)).collect();
                    parts.push(format!("({}) -> {}", args.join(", "), v.render(lattice)));
                }
                format!("[{}]", parts.join("; "))
            }
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Elem(a), Value::Elem(b)) => a == b,
            (Value::Fun(a), Value::Fun(b)) => {
                Rc::ptr_eq(a, b) || (a.hash == b.hash && a.entries == b.entries)
            }
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Value::Elem(e) => {
                state.write_u8(0);
                e.hash(state);
            }
            Value::Fun(t) => {
                state.write_u8(1);
                state.write_u64(t.hash);
            }
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Elem(e) => write!(f, "#{}", e.0),
            Value::Fun(t) => f.debug_list().entries(t.entries.iter()).finish(),
        }
    }
}

/// Pointwise order. Both values must inhabit the same type.
pub fn value_leq(lattice: &Lattice, f: &Value, g: &Value) -> bool {
    match (f, g) {
        (Value::Elem(a), Value::Elem(b)) => lattice.leq(*a, *b),
        (Value::Fun(a), Value::Fun(b)) => {
            a.entries.len() == b.entries.len()
                && a.entries
                    .iter()
                    .zip(&b.entries)
                    .all(|(x, y)| value_leq(lattice, x, y))
        }
        _ => false,
    }
}

/// All inhabitants of a type's interpretation, in canonical order.
pub struct TypeDomain {
    ty: Type,
    values: Vec<Value>,
    index: HashMap<Value, usize>,
    leq: OnceCell<Vec<bool>>,
}

impl fmt::Debug for TypeDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TypeDomain({}, {} values)", self.ty, self.values.len())
    }
}

impl TypeDomain {
    pub fn ty(&self) -> &Type {
        &self.ty
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn index_of(&self, v: &Value) -> Option<usize> {
        match (v, self.ty.is_ground()) {
            (Value::Elem(e), true) if e.index() < self.values.len() => Some(e.index()),
            (Value::Fun(_), false) => self.index.get(v).copied(),
            _ => None,
        }
    }

    /// Order between the i-th and j-th values.
    pub fn leq(&self, lattice: &Lattice, i: usize, j: usize) -> bool {
        if self.ty.is_ground() {
            return lattice.leq(Elem(i as u32), Elem(j as u32));
        }
        let n = self.values.len();
        if n > 4096 {
            return value_leq(lattice, &self.values[i], &self.values[j]);
        }
        let m = self.leq.get_or_init(|| {
            let mut m = vec![false; n * n];
            for a in 0..n {
                for b in 0..n {
                    m[a * n + b] = value_leq(lattice, &self.values[a], &self.values[b]);
                }
            }
            m
        });
        m[i * n + j]
    }

    fn related(&self, lattice: &Lattice, v: Variance, i: usize, j: usize) -> bool {
        match v {
            Variance::Plus => self.leq(lattice, i, j),
            Variance::Minus => self.leq(lattice, j, i),
            Variance::Both => i == j,
        }
    }
}

/// Iterates argument tuples of a parameter list in lexicographic order.
pub fn product(params: &[Rc<TypeDomain>]) -> impl Iterator<Item = Vec<Value>> + '_ {
    product_indices(params.iter().map(|d| d.len()).collect())
        .map(move |ix| ix.iter().zip(params).map(|(&i, d)| d.values[i].clone()).collect())
}

fn product_indices(sizes: Vec<usize>) -> impl Iterator<Item = Vec<usize>> {
    let total: usize = sizes.iter().product();
    let mut cur = vec![0usize; sizes.len()];
    let mut emitted = 0usize;
    std::iter::from_fn(move || {
        if emitted == total {
            return None;
        }
        let out = cur.clone();
        emitted += 1;
        for k in (0..sizes.len()).rev() {
            cur[k] += 1;
            if cur[k] < sizes[k] {
                break;
            }
            cur[k] = 0;
        }
        Some(out)
    })
}

/// Memoizing factory for type domains over one lattice.
pub struct Domains<'l> {
    lattice: &'l Lattice,
    cap: usize,
    cache: RefCell<HashMap<Type, Rc<TypeDomain>>>,
}

impl<'l> Domains<'l> {
    pub fn new(lattice: &'l Lattice, cap: usize) -> Domains<'l> {
        Domains {
            lattice,
            cap,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn lattice(&self) -> &'l Lattice {
        self.lattice
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn get(&self, ty: &Type) -> Result<Rc<TypeDomain>, ResourceError> {
        if let Some(d) = self.cache.borrow().get(ty) {
            return Ok(d.clone());
        }
        let d = Rc::new(self.build(ty)?);
        self.cache.borrow_mut().insert(ty.clone(), d.clone());
        Ok(d)
    }

    /// Domains of the first argument group of a function type.
    pub fn params(&self, ty: &Type) -> Result<Rc<[Rc<TypeDomain>]>, ResourceError> {
        match ty {
            Type::Ground => Ok(Rc::from(Vec::new())),
            Type::Fun(args, _) => Ok(args
                .iter()
                .map(|(t, _)| self.get(t))
                .collect::<Result<Vec<_>, _>>()?
                .into()),
        }
    }

    /// Number of argument tuples of the first group, without enumerating
    /// anything beyond the parameter domains.
    pub fn group_size(&self, ty: &Type) -> Result<usize, ResourceError> {
        Ok(self.params(ty)?.iter().map(|d| d.len()).product())
    }

    /// Builds the value of type `ty` whose result at every spine tuple is `f`
    /// applied to the first-group tuple.
    pub fn tabulate<E, F>(&self, ty: &Type, mut f: F) -> Result<Value, E>
    where
        E: From<ResourceError>,
        F: FnMut(&[Value]) -> Result<Value, E>,
    {
        let params = self.params(ty)?;
        let entries = product(&params)
            .map(|tuple| f(&tuple))
            .collect::<Result<Vec<_>, E>>()?;
        Ok(Value::Fun(Rc::new(FunTable::new(params, entries))))
    }

    /// The constant function of type `ty` returning `e` on every spine.
    pub fn constant(&self, ty: &Type, e: Elem) -> Result<Value, ResourceError> {
        match ty {
            Type::Ground => Ok(Value::Elem(e)),
            Type::Fun(_, res) => {
                let inner = self.constant(res, e)?;
                self.tabulate(ty, |_| Ok::<_, ResourceError>(inner.clone()))
            }
        }
    }

    fn build(&self, ty: &Type) -> Result<TypeDomain, ResourceError> {
        let (args, res) = match ty {
            Type::Ground => {
                return Ok(TypeDomain {
                    ty: ty.clone(),
                    values: self.lattice.elements().map(Value::Elem).collect(),
                    index: HashMap::new(),
                    leq: OnceCell::new(),
                })
            }
            Type::Fun(args, res) => (args, res),
        };
        let params = self.params(ty)?;
        let result = self.get(res)?;
        let tuples = params.iter().map(|d| d.len() as f64).product::<f64>();
        let bound = (result.len() as f64).powf(tuples);
        let too_big = |bound: f64| ResourceError {
            ty: ty.clone(),
            bound,
            cap: self.cap,
        };
        if tuples > 4096.0 || tuples > self.cap as f64 {
            return Err(too_big(bound));
        }
        let tuples = tuples as usize;
        let sizes: Vec<usize> = params.iter().map(|d| d.len()).collect();
        let index_tuples: Vec<Vec<usize>> = product_indices(sizes).collect();

        // constraints[k]: earlier positions j with (j <= k) or (k <= j) in the
        // variance-adjusted product order.
        let mut constraints: Vec<Vec<(usize, bool)>> = vec![Vec::new(); tuples];
        for k in 0..tuples {
            for j in 0..k {
                let below = index_tuples[j]
                    .iter()
                    .zip(&index_tuples[k])
                    .zip(args)
                    .enumerate()
                    .all(|(p, ((&a, &b), (_, v)))| params[p].related(self.lattice, *v, a, b));
                let above = index_tuples[j]
                    .iter()
                    .zip(&index_tuples[k])
                    .zip(args)
                    .enumerate()
                    .all(|(p, ((&a, &b), (_, v)))| params[p].related(self.lattice, *v, b, a));
                if below {
                    constraints[k].push((j, true));
                }
                if above {
                    constraints[k].push((j, false));
                }
            }
        }

        // Lexicographic generate-and-filter, with the filter applied to each
        // prefix so dead branches are cut early.
        let r = result.len();
        let mut choice = vec![0usize; tuples];
        let mut values = Vec::new();
        let mut k = 0usize;
        let ok = |choice: &[usize], k: usize| {
            constraints[k].iter().all(|&(j, j_below)| {
                if j_below {
                    result.leq(self.lattice, choice[j], choice[k])
                } else {
                    result.leq(self.lattice, choice[k], choice[j])
                }
            })
        };
        if tuples == 0 {
            // Nullary group: one table per result value.
            for v in result.values() {
                values.push(Value::Fun(Rc::new(FunTable::new(params.clone(), vec![v.clone()]))));
            }
        } else {
            loop {
                if choice[k] < r && ok(&choice, k) {
                    if k + 1 == tuples {
                        if values.len() >= self.cap || (values.len() + 1) * tuples > CELL_BUDGET {
                            return Err(too_big(bound));
                        }
                        let entries = choice.iter().map(|&c| result.values[c].clone()).collect();
                        values.push(Value::Fun(Rc::new(FunTable::new(params.clone(), entries))));
                        choice[k] += 1;
                    } else {
                        k += 1;
                        choice[k] = 0;
                    }
                    continue;
                }
                if choice[k] < r {
                    choice[k] += 1;
                    continue;
                }
                // exhausted this position
                if k == 0 {
                    break;
                }
                k -= 1;
                choice[k] += 1;
            }
        }
        let index = values
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        Ok(TypeDomain {
            ty: ty.clone(),
            values,
            index,
            leq: OnceCell::new(),
        })
    }
}

/// Enumerates all inhabitants of `ty` over `lattice`, respecting variances.
pub fn enumerate_domain(
    ty: &Type,
    lattice: &Lattice,
    cap: usize,
) -> Result<Rc<TypeDomain>, ResourceError> {
    Domains::new(lattice, cap).get(ty)
}
