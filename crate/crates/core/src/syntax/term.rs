use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use super::{Type, Variance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FixKind {
    /// Least fixpoint.
    Mu,
    /// Greatest fixpoint.
    Nu,
}

impl FixKind {
    pub fn keyword(self) -> &'static str {
        match self {
            FixKind::Mu => "mu",
            FixKind::Nu => "nu",
        }
    }
}

/// A λ-parameter with its variance and declared type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: String,
    pub variance: Variance,
    pub ty: Type,
}

impl Param {
    pub fn new(name: impl Into<String>, variance: Variance, ty: Type) -> Param {
        Param {
            name: name.into(),
            variance,
            ty,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Base(String),
    App(Box<Term>, Vec<Term>),
    Lam(Vec<Param>, Box<Term>),
    Fix {
        kind: FixKind,
        var: String,
        ty: Type,
        body: Box<Term>,
    },
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn base(name: impl Into<String>) -> Term {
        Term::Base(name.into())
    }

    pub fn app(head: Term, args: Vec<Term>) -> Term {
        Term::App(Box::new(head), args)
    }

    pub fn lam(params: Vec<Param>, body: Term) -> Term {
        Term::Lam(params, Box::new(body))
    }

    pub fn fix(kind: FixKind, var: impl Into<String>, ty: Type, body: Term) -> Term {
        Term::Fix {
            kind,
            var: var.into(),
            ty,
            body: Box::new(body),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(&x.as_str()) {
                    out.insert(x.clone());
                }
            }
            Term::Base(_) => {}
            Term::App(h, args) => {
                h.collect_free(bound, out);
                for a in args {
                    a.collect_free(bound, out);
                }
            }
            Term::Lam(params, body) => {
                let n = bound.len();
                bound.extend(params.iter().map(|p| p.name.as_str()));
                body.collect_free(bound, out);
                bound.truncate(n);
            }
            Term::Fix { var, body, .. } => {
                bound.push(var);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_names(&self) -> HashSet<String> {
        let mut out = HashSet::new();
        self.visit(&mut |t| match t {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Lam(ps, _) => out.extend(ps.iter().map(|p| p.name.clone())),
            Term::Fix { var, .. } => {
                out.insert(var.clone());
            }
            _ => {}
        });
        out
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Term)) {
        f(self);
        match self {
            Term::App(h, args) => {
                h.visit(f);
                for a in args {
                    a.visit(f);
                }
            }
            Term::Lam(_, b) | Term::Fix { body: b, .. } => b.visit(f),
            Term::Var(_) | Term::Base(_) => {}
        }
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn is_well_named(&self) -> bool {
        let mut seen = HashSet::new();
        let free = self.free_vars();
        let mut ok = true;
        self.visit(&mut |t| {
            let names: Vec<&String> = match t {
                Term::Lam(ps, _) => ps.iter().map(|p| &p.name).collect(),
                Term::Fix { var, .. } => vec![var],
                _ => vec![],
            };
            for n in names {
                if free.contains(n) || !seen.insert(n.clone()) {
                    ok = false;
                }
            }
        });
        ok
    }

    /// α-renames bound variables so that each is bound exactly once and no
    /// binder reuses a free name. Already well-named terms come back unchanged.
    pub fn ensure_well_named(&self) -> Term {
        let mut used: BTreeSet<String> = self.free_vars();
        let mut renamer = Renamer {
            taken: self.all_names(),
            used: &mut used,
        };
        renamer.rename(self, &BTreeMap::new())
    }

    /// Capture-avoiding simultaneous substitution of free variables.
    pub fn substitute(&self, map: &BTreeMap<String, Term>) -> Term {
        let mut taken = self.all_names();
        for t in map.values() {
            taken.extend(t.all_names());
        }
        subst(self, map, &mut taken)
    }
}

struct Renamer<'a> {
    taken: HashSet<String>,
    used: &'a mut BTreeSet<String>,
}

impl Renamer<'_> {
    fn bind(&mut self, name: &str) -> String {
        if self.used.insert(name.to_string()) {
            return name.to_string();
        }
        let fresh = fresh_name(name, &self.taken, self.used);
        self.taken.insert(fresh.clone());
        self.used.insert(fresh.clone());
        fresh
    }

    fn rename(&mut self, t: &Term, env: &BTreeMap<String, String>) -> Term {
        match t {
            Term::Var(x) => Term::Var(env.get(x).cloned().unwrap_or_else(|| x.clone())),
            Term::Base(f) => Term::Base(f.clone()),
            Term::App(h, args) => Term::app(
                self.rename(h, env),
                args.iter().map(|a| self.rename(a, env)).collect(),
            ),
            Term::Lam(params, body) => {
                let mut env = env.clone();
                let params = params
                    .iter()
                    .map(|p| {
                        let n = self.bind(&p.name);
                        env.insert(p.name.clone(), n.clone());
                        Param::new(n, p.variance, p.ty.clone())
                    })
                    .collect();
                Term::lam(params, self.rename(body, &env))
            }
            Term::Fix { kind, var, ty, body } => {
                let mut env = env.clone();
                let n = self.bind(var);
                env.insert(var.clone(), n.clone());
                Term::fix(*kind, n, ty.clone(), self.rename(body, &env))
            }
        }
    }
}

fn fresh_name(base: &str, taken: &HashSet<String>, used: &BTreeSet<String>) -> String {
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|c| !taken.contains(c) && !used.contains(c))
        .expect("unbounded supply of names")
}

fn subst(t: &Term, map: &BTreeMap<String, Term>, taken: &mut HashSet<String>) -> Term {
    match t {
        Term::Var(x) => map.get(x).cloned().unwrap_or_else(|| t.clone()),
        Term::Base(_) => t.clone(),
        Term::App(h, args) => Term::app(
            subst(h, map, taken),
            args.iter().map(|a| subst(a, map, taken)).collect(),
        ),
        Term::Lam(params, body) => {
            let mut inner = map.clone();
            let mut new_params = Vec::with_capacity(params.len());
            for p in params {
                inner.remove(&p.name);
            }
            let captured: BTreeSet<String> =
                inner.values().flat_map(|v| v.free_vars()).collect();
            for p in params {
                if captured.contains(&p.name) {
                    let fresh = fresh_name(&p.name, taken, &BTreeSet::new());
                    taken.insert(fresh.clone());
                    inner.insert(p.name.clone(), Term::Var(fresh.clone()));
                    new_params.push(Param::new(fresh, p.variance, p.ty.clone()));
                } else {
                    new_params.push(p.clone());
                }
            }
            Term::lam(new_params, subst(body, &inner, taken))
        }
        Term::Fix { kind, var, ty, body } => {
            let mut inner = map.clone();
            inner.remove(var);
            let captured = inner.values().any(|v| v.free_vars().contains(var));
            let var = if captured {
                let fresh = fresh_name(var, taken, &BTreeSet::new());
                taken.insert(fresh.clone());
                inner.insert(var.clone(), Term::Var(fresh.clone()));
                fresh
            } else {
                var.clone()
            };
            Term::fix(*kind, var, ty.clone(), subst(body, &inner, taken))
        }
    }
}

/// Fully annotated concrete syntax, accepted back by the parser.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) | Term::Base(x) => f.write_str(x),
            Term::App(h, args) => {
                if matches!(**h, Term::Lam(..) | Term::Fix { .. }) {
                    write!(f, "({h})")?;
                } else {
                    write!(f, "{h}")?;
                }
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::Lam(params, body) => {
                f.write_str("\\")?;
                for (i, p) in params.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}{} : {}", p.name, p.variance, p.ty)?;
                }
                write!(f, " . {body}")
            }
            Term::Fix { kind, var, ty, body } => {
                write!(f, "{} {var} : {ty} . {body}", kind.keyword())
            }
        }
    }
}
