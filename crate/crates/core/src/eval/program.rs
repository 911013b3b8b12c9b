use std::collections::{BTreeSet, HashMap};

use super::EvalError;
use crate::signature::{Signature, Symbol};
use crate::syntax::{FixKind, Term, Type};
use crate::typecheck::typecheck_closed;

pub type NodeId = usize;
/// Index of a λ-bound variable; every binder gets its own slot.
pub type SlotId = usize;
/// Index of a fixpoint binder.
pub type FixId = usize;

#[derive(Clone, Debug)]
pub enum NodeKind {
    Base(usize),
    LamVar(SlotId),
    FixVar(FixId),
    App(NodeId, Vec<NodeId>),
    Lam(Vec<SlotId>, NodeId),
    Fix(FixId, NodeId),
}

#[derive(Clone, Debug)]
pub struct Node {
    pub kind: NodeKind,
    pub ty: Type,
    /// Free λ-slots, sorted.
    pub free_slots: Vec<SlotId>,
    /// Free fixpoint variables, sorted.
    pub free_fixes: Vec<FixId>,
}

#[derive(Clone, Debug)]
pub struct FixInfo {
    pub name: String,
    pub kind: FixKind,
    pub ty: Type,
}

/// A closed term resolved into an arena: variables point at their binders
/// and every node carries its type.
#[derive(Clone, Debug)]
pub struct Program {
    pub nodes: Vec<Node>,
    pub root: NodeId,
    pub fixes: Vec<FixInfo>,
    pub slot_names: Vec<String>,
    pub symbols: Vec<Symbol>,
}

impl Program {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn root_type(&self) -> &Type {
        &self.nodes[self.root].ty
    }

    /// Strips nested applications: the head and all operand groups in order.
    pub fn spine(&self, mut id: NodeId) -> (NodeId, Vec<NodeId>) {
        let mut groups: Vec<&[NodeId]> = Vec::new();
        while let NodeKind::App(h, args) = &self.nodes[id].kind {
            groups.push(args);
            id = *h;
        }
        let args = groups.into_iter().rev().flatten().copied().collect();
        (id, args)
    }
}

#[derive(Clone)]
enum Binding {
    Slot(SlotId),
    Fix(FixId),
}

struct Builder<'s> {
    sig: &'s Signature,
    nodes: Vec<Node>,
    fixes: Vec<FixInfo>,
    slot_names: Vec<String>,
    slot_types: Vec<Type>,
    symbols: Vec<Symbol>,
    symbol_ids: HashMap<String, usize>,
}

/// Type-checks and resolves a closed term.
pub fn compile(term: &Term, sig: &Signature) -> Result<Program, EvalError> {
    let free = term.free_vars();
    if !free.is_empty() {
        return Err(EvalError::NotClosed(free.into_iter().collect()));
    }
    typecheck_closed(term, sig)?;
    let term = term.ensure_well_named();
    let mut b = Builder {
        sig,
        nodes: Vec::new(),
        fixes: Vec::new(),
        slot_names: Vec::new(),
        slot_types: Vec::new(),
        symbols: Vec::new(),
        symbol_ids: HashMap::new(),
    };
    let root = b.build(&term, &HashMap::new());
    Ok(Program {
        nodes: b.nodes,
        root,
        fixes: b.fixes,
        slot_names: b.slot_names,
        symbols: b.symbols,
    })
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect::<BTreeSet<_>>().into_iter().collect()
}

impl Builder<'_> {
    fn push(&mut self, kind: NodeKind, ty: Type, free_slots: Vec<SlotId>, free_fixes: Vec<FixId>) -> NodeId {
        self.nodes.push(Node {
            kind,
            ty,
            free_slots,
            free_fixes,
        });
        self.nodes.len() - 1
    }

    // The term has already been type-checked, so lookups cannot fail.
    fn build(&mut self, t: &Term, env: &HashMap<String, Binding>) -> NodeId {
        match t {
            Term::Base(f) => {
                let id = match self.symbol_ids.get(f) {
                    Some(id) => *id,
                    None => {
                        let sym = self.sig.get(f).expect("checked symbol").clone();
                        self.symbols.push(sym);
                        self.symbol_ids.insert(f.clone(), self.symbols.len() - 1);
                        self.symbols.len() - 1
                    }
                };
                let ty = self.symbols[id].ty.clone();
                self.push(NodeKind::Base(id), ty, vec![], vec![])
            }
            Term::Var(x) => match env.get(x).expect("checked variable") {
                Binding::Slot(s) => {
                    let ty = self.slot_types[*s].clone();
                    self.push(NodeKind::LamVar(*s), ty, vec![*s], vec![])
                }
                Binding::Fix(f) => {
                    let ty = self.fixes[*f].ty.clone();
                    self.push(NodeKind::FixVar(*f), ty, vec![], vec![*f])
                }
            },
            Term::App(h, args) => {
                let h = self.build(h, env);
                let args: Vec<NodeId> = args.iter().map(|a| self.build(a, env)).collect();
                let ty = match &self.nodes[h].ty {
                    Type::Fun(_, res) => (**res).clone(),
                    Type::Ground => unreachable!("checked application"),
                };
                let mut slots = self.nodes[h].free_slots.clone();
                let mut fixes = self.nodes[h].free_fixes.clone();
                for a in &args {
                    slots = union(&slots, &self.nodes[*a].free_slots);
                    fixes = union(&fixes, &self.nodes[*a].free_fixes);
                }
                self.push(NodeKind::App(h, args), ty, slots, fixes)
            }
            Term::Lam(params, body) => {
                let mut inner = env.clone();
                let mut slots = Vec::with_capacity(params.len());
                for p in params {
                    self.slot_names.push(p.name.clone());
                    self.slot_types.push(p.ty.clone());
                    let s = self.slot_names.len() - 1;
                    inner.insert(p.name.clone(), Binding::Slot(s));
                    slots.push(s);
                }
                let body = self.build(body, &inner);
                let ty = Type::fun(
                    params.iter().map(|p| (p.ty.clone(), p.variance)).collect(),
                    self.nodes[body].ty.clone(),
                );
                let free_slots = self.nodes[body]
                    .free_slots
                    .iter()
                    .copied()
                    .filter(|s| !slots.contains(s))
                    .collect();
                let free_fixes = self.nodes[body].free_fixes.clone();
                self.push(NodeKind::Lam(slots, body), ty, free_slots, free_fixes)
            }
            Term::Fix { kind, var, ty, body } => {
                self.fixes.push(FixInfo {
                    name: var.clone(),
                    kind: *kind,
                    ty: ty.clone(),
                });
                let f = self.fixes.len() - 1;
                let mut inner = env.clone();
                inner.insert(var.clone(), Binding::Fix(f));
                let body = self.build(body, &inner);
                let free_slots = self.nodes[body].free_slots.clone();
                let free_fixes = self.nodes[body]
                    .free_fixes
                    .iter()
                    .copied()
                    .filter(|g| *g != f)
                    .collect();
                self.push(NodeKind::Fix(f, body), ty.clone(), free_slots, free_fixes)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::syntax::parse_term;

    #[test]
    fn resolves_binders_and_free_sets() {
        let sig = Signature::standard(&Lattice::boolean());
        let t = parse_term(
            "(\\y+ : o . mu x . and(y, x))(top)",
            &|n| sig.contains(n),
        )
        .unwrap();
        let p = compile(&t, &sig).unwrap();
        assert_eq!(p.fixes.len(), 1);
        assert_eq!(p.slot_names, vec!["y".to_string()]);
        let fix = p
            .nodes
            .iter()
            .find(|n| matches!(n.kind, NodeKind::Fix(..)))
            .unwrap();
        assert_eq!(fix.free_slots, vec![0]);
        assert!(fix.free_fixes.is_empty());
        assert!(p.root_type().is_ground());
        let root = p.node(p.root);
        assert!(root.free_slots.is_empty() && root.free_fixes.is_empty());
    }

    #[test]
    fn open_terms_are_refused() {
        let sig = Signature::standard(&Lattice::boolean());
        let t = parse_term("and(q, top)", &|n| sig.contains(n)).unwrap();
        assert!(matches!(compile(&t, &sig), Err(EvalError::NotClosed(_))));
    }

    #[test]
    fn spine_collects_groups() {
        let sig = Signature::standard(&Lattice::boolean());
        let t = parse_term(
            "(\\f+ : (o+) -> o . \\x+ : o . f(x))(\\y+ : o . y)(top)",
            &|n| sig.contains(n),
        )
        .unwrap();
        let p = compile(&t, &sig).unwrap();
        let (head, args) = p.spine(p.root);
        assert!(matches!(p.node(head).kind, NodeKind::Lam(..)));
        assert_eq!(args.len(), 2);
    }
}
