//! Finite lattices interpreting the ground type, and the higher-order
//! domains built over them.

mod domain;

pub use domain::{
    enumerate_domain, product, value_leq, Domains, FunTable, ResourceError, TypeDomain, Value,
    DEFAULT_DOMAIN_CAP,
};

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense index of a lattice element, in construction order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

impl Elem {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("unknown lattice element `{0}`")]
    UnknownElement(String),
    #[error("element id {0} out of range for lattice of size {1}")]
    OutOfRange(u32, usize),
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
    #[error("order is not antisymmetric: `{0}` <= `{1}` and `{1}` <= `{0}`")]
    NotAntisymmetric(String, String),
    #[error("`{0}` and `{1}` have no unique least upper bound")]
    NoJoin(String, String),
    #[error("`{0}` and `{1}` have no unique greatest lower bound")]
    NoMeet(String, String),
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("lattice too large: {0}")]
    TooLarge(String),
}

/// JSON description of a lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LatticeSpec {
    /// The two-point strictness domain `0 <= 1`.
    Two,
    /// Booleans `bot <= top`.
    Bool,
    /// `atoms` pairwise incomparable elements between a bottom and a top.
    Flat { atoms: usize },
    /// Subsets of `base` ordered by inclusion.
    Powerset { base: Vec<String> },
    /// Elements with a covering relation; the order is its reflexive-transitive closure.
    Explicit {
        elements: Vec<String>,
        order: Vec<(String, String)>,
    },
}

#[derive(Clone, Debug)]
enum Order {
    Table {
        names: Vec<String>,
        leq: Vec<bool>,
        join: Vec<Elem>,
        meet: Vec<Elem>,
    },
    Flat {
        atoms: usize,
        names: Vec<String>,
    },
    Powerset {
        base: Vec<String>,
    },
}

/// A finite complete lattice with elements `0..size()`.
#[derive(Clone, Debug)]
pub struct Lattice {
    order: Order,
    size: usize,
    bot: Elem,
    top: Elem,
    by_name: HashMap<String, Elem>,
}

const MAX_POWERSET_BASE: usize = 20;

impl Lattice {
    pub fn from_spec(spec: &LatticeSpec) -> Result<Lattice, LatticeError> {
        match spec {
            LatticeSpec::Two => Ok(Lattice::two()),
            LatticeSpec::Bool => Ok(Lattice::boolean()),
            LatticeSpec::Flat { atoms } => Ok(Lattice::flat(*atoms)),
            LatticeSpec::Powerset { base } => Lattice::powerset(base.clone()),
            LatticeSpec::Explicit { elements, order } => Lattice::explicit(elements, order),
        }
    }

    /// `0 <= 1`, the abstract domain of strictness analysis.
    pub fn two() -> Lattice {
        Lattice::chain(&["0", "1"])
    }

    pub fn boolean() -> Lattice {
        Lattice::chain(&["bot", "top"])
    }

    fn chain(names: &[&str]) -> Lattice {
        let elements: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let covers: Vec<(String, String)> = elements
            .windows(2)
            .map(|w| (w[0].clone(), w[1].clone()))
            .collect();
        Lattice::explicit(&elements, &covers).expect("chains are lattices")
    }

    /// `bot`, atoms `0..atoms`, `top`, in that index order.
    pub fn flat(atoms: usize) -> Lattice {
        let mut names = Vec::with_capacity(atoms + 2);
        names.push("bot".to_string());
        names.extend((0..atoms).map(|i| i.to_string()));
        names.push("top".to_string());
        let by_name = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), Elem(i as u32)))
            .collect();
        Lattice {
            size: atoms + 2,
            bot: Elem(0),
            top: Elem(atoms as u32 + 1),
            order: Order::Flat { atoms, names },
            by_name,
        }
    }

    /// Subsets of `base`; the element index is the membership bitmask.
    pub fn powerset(base: Vec<String>) -> Result<Lattice, LatticeError> {
        if base.len() > MAX_POWERSET_BASE {
            return Err(LatticeError::TooLarge(format!(
                "powerset of {} points",
                base.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for b in &base {
            if !seen.insert(b) {
                return Err(LatticeError::DuplicateName(b.clone()));
            }
        }
        let size = 1usize << base.len();
        let mut lattice = Lattice {
            size,
            bot: Elem(0),
            top: Elem(size as u32 - 1),
            order: Order::Powerset { base },
            by_name: HashMap::new(),
        };
        if size <= 1 << 12 {
            lattice.by_name = (0..size as u32)
                .map(|i| (lattice.name(Elem(i)), Elem(i)))
                .collect();
        }
        Ok(lattice)
    }

    /// Powerset over the points `0..n`.
    pub fn powerset_n(n: usize) -> Result<Lattice, LatticeError> {
        Lattice::powerset((0..n).map(|i| i.to_string()).collect())
    }

    pub fn explicit(
        elements: &[String],
        covers: &[(String, String)],
    ) -> Result<Lattice, LatticeError> {
        let n = elements.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        let mut by_name = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            if by_name.insert(e.clone(), Elem(i as u32)).is_some() {
                return Err(LatticeError::DuplicateName(e.clone()));
            }
        }
        let lookup = |s: &String| {
            by_name
                .get(s)
                .copied()
                .ok_or_else(|| LatticeError::UnknownElement(s.clone()))
        };
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (a, b) in covers {
            let (a, b) = (lookup(a)?, lookup(b)?);
            leq[a.index() * n + b.index()] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(LatticeError::NotAntisymmetric(
                        elements[i].clone(),
                        elements[j].clone(),
                    ));
                }
            }
        }
        let bound = |i: usize, j: usize, upper: bool| -> Option<Elem> {
            let le = |a: usize, b: usize| if upper { leq[a * n + b] } else { leq[b * n + a] };
            let candidates: Vec<usize> = (0..n).filter(|&c| le(i, c) && le(j, c)).collect();
            candidates
                .iter()
                .copied()
                .find(|&c| candidates.iter().all(|&d| le(c, d)))
                .map(|c| Elem(c as u32))
        };
        let mut join = vec![Elem(0); n * n];
        let mut meet = vec![Elem(0); n * n];
        for i in 0..n {
            for j in 0..n {
                join[i * n + j] = bound(i, j, true).ok_or_else(|| {
                    LatticeError::NoJoin(elements[i].clone(), elements[j].clone())
                })?;
                meet[i * n + j] = bound(i, j, false).ok_or_else(|| {
                    LatticeError::NoMeet(elements[i].clone(), elements[j].clone())
                })?;
            }
        }
        let bot = (1..n).fold(Elem(0), |acc, i| meet[acc.index() * n + i]);
        let top = (1..n).fold(Elem(0), |acc, i| join[acc.index() * n + i]);
        Ok(Lattice {
            order: Order::Table {
                names: elements.to_vec(),
                leq,
                join,
                meet,
            },
            size: n,
            bot,
            top,
            by_name,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.size as u32).map(Elem)
    }

    pub fn bot(&self) -> Elem {
        self.bot
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn check(&self, e: Elem) -> Result<Elem, LatticeError> {
        if e.index() < self.size {
            Ok(e)
        } else {
            Err(LatticeError::OutOfRange(e.0, self.size))
        }
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        debug_assert!(a.index() < self.size && b.index() < self.size);
        match &self.order {
            Order::Table { leq, .. } => leq[a.index() * self.size + b.index()],
            Order::Flat { .. } => a == b || a == self.bot || b == self.top,
            Order::Powerset { .. } => a.0 & !b.0 == 0,
        }
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        match &self.order {
            Order::Table { join, .. } => join[a.index() * self.size + b.index()],
            Order::Flat { .. } => {
                if self.leq(a, b) {
                    b
                } else if self.leq(b, a) {
                    a
                } else {
                    self.top
                }
            }
            Order::Powerset { .. } => Elem(a.0 | b.0),
        }
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        match &self.order {
            Order::Table { meet, .. } => meet[a.index() * self.size + b.index()],
            Order::Flat { .. } => {
                if self.leq(a, b) {
                    a
                } else if self.leq(b, a) {
                    b
                } else {
                    self.bot
                }
            }
            Order::Powerset { .. } => Elem(a.0 & b.0),
        }
    }

    pub fn checked_leq(&self, a: Elem, b: Elem) -> Result<bool, LatticeError> {
        Ok(self.leq(self.check(a)?, self.check(b)?))
    }

    pub fn checked_join(&self, a: Elem, b: Elem) -> Result<Elem, LatticeError> {
        Ok(self.join(self.check(a)?, self.check(b)?))
    }

    pub fn checked_meet(&self, a: Elem, b: Elem) -> Result<Elem, LatticeError> {
        Ok(self.meet(self.check(a)?, self.check(b)?))
    }

    pub fn name(&self, e: Elem) -> String {
        match &self.order {
            Order::Table { names, .. } | Order::Flat { names, .. } => names[e.index()].clone(),
            Order::Powerset { base } => {
                let members: Vec<&str> = base
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| e.0 >> i & 1 == 1)
                    .map(|(_, b)| b.as_str())
                    .collect();
                format!("{{{}}}", members.join(","))
            }
        }
    }

    pub fn elem(&self, name: &str) -> Result<Elem, LatticeError> {
        if let Some(e) = self.by_name.get(name) {
            return Ok(*e);
        }
        if let Order::Powerset { base } = &self.order {
            let inner = name
                .trim()
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| LatticeError::UnknownElement(name.to_string()))?;
            let mut mask = 0u32;
            for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let i = base
                    .iter()
                    .position(|b| b == part)
                    .ok_or_else(|| LatticeError::UnknownElement(name.to_string()))?;
                mask |= 1 << i;
            }
            return Ok(Elem(mask));
        }
        Err(LatticeError::UnknownElement(name.to_string()))
    }

    /// Atom `i` of a flat lattice.
    pub fn atom(&self, i: usize) -> Option<Elem> {
        match &self.order {
            Order::Flat { atoms, .. } if i < *atoms => Some(Elem(i as u32 + 1)),
            _ => None,
        }
    }

    /// Inverse of [`Lattice::atom`].
    pub fn atom_index(&self, e: Elem) -> Option<usize> {
        match &self.order {
            Order::Flat { atoms, .. } if e.0 >= 1 && (e.0 as usize) <= *atoms => {
                Some(e.index() - 1)
            }
            _ => None,
        }
    }

    /// The unique complement of `e`, if it has exactly one.
    pub fn complement(&self, e: Elem) -> Option<Elem> {
        if let Order::Powerset { base } = &self.order {
            let full = if base.len() == 32 { u32::MAX } else { (1u32 << base.len()) - 1 };
            return Some(Elem(!e.0 & full));
        }
        let mut found = None;
        for c in self.elements() {
            if self.meet(e, c) == self.bot && self.join(e, c) == self.top {
                if found.is_some() {
                    return None;
                }
                found = Some(c);
            }
        }
        found
    }

    /// Number of points of a powerset lattice's base set.
    pub fn powerset_base(&self) -> Option<usize> {
        match &self.order {
            Order::Powerset { base } => Some(base.len()),
            _ => None,
        }
    }

    /// The singleton set `{i}` of a powerset lattice.
    pub fn singleton(&self, i: usize) -> Option<Elem> {
        match &self.order {
            Order::Powerset { base } if i < base.len() => Some(Elem(1 << i)),
            _ => None,
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.order {
            Order::Table { names, .. } => write!(f, "lattice{{{}}}", names.join(",")),
            Order::Flat { atoms, .. } => write!(f, "flat({atoms})"),
            Order::Powerset { base } => write!(f, "powerset({})", base.len()),
        }
    }
}
