use std::fmt;

/// How a function depends on one of its arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variance {
    /// Monotone.
    Plus,
    /// Antitone.
    Minus,
    /// Unconstrained; the argument side carries the flat (equality) order.
    Both,
}

impl Variance {
    /// Composition of variances: checking an operand at variance `inner` inside
    /// a context already at variance `self`.
    pub fn compose(self, inner: Variance) -> Variance {
        match (self, inner) {
            (Variance::Both, _) | (_, Variance::Both) => Variance::Both,
            (Variance::Plus, v) => v,
            (Variance::Minus, Variance::Plus) => Variance::Minus,
            (Variance::Minus, Variance::Minus) => Variance::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Variance::Plus => "+",
            Variance::Minus => "-",
            Variance::Both => "+-",
        }
    }
}

impl fmt::Display for Variance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `o`, or `(t1 v1, ..., tn vn) -> t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Ground,
    Fun(Vec<(Type, Variance)>, Box<Type>),
}

impl Type {
    pub fn fun(args: Vec<(Type, Variance)>, result: Type) -> Type {
        Type::Fun(args, Box::new(result))
    }

    /// `(o v, ..., o v) -> o` with `n` arguments.
    pub fn first_order(n: usize, v: Variance) -> Type {
        Type::fun(vec![(Type::Ground, v); n], Type::Ground)
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, Type::Ground)
    }

    pub fn order(&self) -> usize {
        match self {
            Type::Ground => 0,
            Type::Fun(args, res) => args
                .iter()
                .map(|(t, _)| t.order() + 1)
                .chain(std::iter::once(res.order()))
                .max()
                .unwrap_or(0),
        }
    }

    /// Argument types of the whole curried spine down to ground, flattened.
    pub fn spine(&self) -> Vec<(&Type, Variance)> {
        let mut out = Vec::new();
        let mut t = self;
        while let Type::Fun(args, res) = t {
            out.extend(args.iter().map(|(a, v)| (a, *v)));
            t = res;
        }
        out
    }

    pub fn spine_len(&self) -> usize {
        match self {
            Type::Ground => 0,
            Type::Fun(args, res) => args.len() + res.spine_len(),
        }
    }

    /// Arity of the first argument group, 0 for ground.
    pub fn group_len(&self) -> usize {
        match self {
            Type::Ground => 0,
            Type::Fun(args, _) => args.len(),
        }
    }

    /// The type left after supplying `n` leading spine arguments, provided `n`
    /// ends on a group boundary.
    pub fn after_args(&self, n: usize) -> Option<&Type> {
        let mut t = self;
        let mut left = n;
        while left > 0 {
            match t {
                Type::Fun(args, res) if args.len() <= left => {
                    left -= args.len();
                    t = res;
                }
                _ => return None,
            }
        }
        Some(t)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Ground => f.write_str("o"),
            Type::Fun(args, res) => {
                f.write_str("(")?;
                for (i, (t, v)) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    if t.is_ground() {
                        write!(f, "{t}{v}")?;
                    } else {
                        write!(f, "({t}){v}")?;
                    }
                }
                write!(f, ") -> {res}")
            }
        }
    }
}
