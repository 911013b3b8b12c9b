//! Concrete syntax.
//!
//! ```text
//! type  ::= o | (type var, ..., type var) -> type | (type)
//! var   ::= + | - | +-
//! term  ::= \x var [: type], ... . term
//!         | mu x [: type] . term | nu x [: type] . term
//!         | mu x(y var [: type], ...) [: type] . term      (sugar for mu x . \y ... . term)
//!         | atom (term, ..., term)*
//! atom  ::= ident | (term)
//! ```
//! Omitted annotations default to `o`. `#` starts a line comment.

use std::collections::HashSet;

use thiserror::Error;

use super::{FixKind, Param, Term, Type, Variance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Arrow,
    Lambda,
    Var(Variance),
    Fix(FixKind),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Lambda => "`\\`".into(),
            Tok::Var(v) => format!("`{v}`"),
            Tok::Fix(k) => format!("`{}`", k.keyword()),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| ParseError { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                advance(1, &mut i);
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => {
                out.push((Tok::LParen, l0, c0));
                advance(1, &mut i);
            }
            ')' => {
                out.push((Tok::RParen, l0, c0));
                advance(1, &mut i);
            }
            ',' => {
                out.push((Tok::Comma, l0, c0));
                advance(1, &mut i);
            }
            '.' => {
                out.push((Tok::Dot, l0, c0));
                advance(1, &mut i);
            }
            ':' => {
                out.push((Tok::Colon, l0, c0));
                advance(1, &mut i);
            }
            '\\' | 'λ' => {
                out.push((Tok::Lambda, l0, c0));
                advance(1, &mut i);
            }
            'μ' => {
                out.push((Tok::Fix(FixKind::Mu), l0, c0));
                advance(1, &mut i);
            }
            'ν' => {
                out.push((Tok::Fix(FixKind::Nu), l0, c0));
                advance(1, &mut i);
            }
            '±' => {
                out.push((Tok::Var(Variance::Both), l0, c0));
                advance(1, &mut i);
            }
            '+' => {
                if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) != Some(&'>') {
                    out.push((Tok::Var(Variance::Both), l0, c0));
                    advance(2, &mut i);
                } else {
                    out.push((Tok::Var(Variance::Plus), l0, c0));
                    advance(1, &mut i);
                }
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    out.push((Tok::Arrow, l0, c0));
                    advance(2, &mut i);
                } else {
                    out.push((Tok::Var(Variance::Minus), l0, c0));
                    advance(1, &mut i);
                }
            }
            '→' => {
                out.push((Tok::Arrow, l0, c0));
                advance(1, &mut i);
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                let tok = match word.as_str() {
                    "mu" => Tok::Fix(FixKind::Mu),
                    "nu" => Tok::Fix(FixKind::Nu),
                    _ => Tok::Ident(word),
                };
                out.push((tok, l0, c0));
            }
            other => return Err(err(l0, c0, format!("unexpected character `{other}`"))),
        }
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    base: &'a dyn Fn(&str) -> bool,
    scope: Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (_, line, col) = self.toks[self.pos];
        Err(ParseError {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            self.error(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            ))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            t => self.error(format!("expected identifier, found {}", t.describe())),
        }
    }

    fn variance(&mut self) -> Result<Variance, ParseError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.next();
                Ok(v)
            }
            t => self.error(format!("expected variance (+, -, +-), found {}", t.describe())),
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "o" => {
                self.next();
                if *self.peek() == Tok::Arrow {
                    return self.error("function argument lists must be parenthesized: `(o+) -> o`");
                }
                Ok(Type::Ground)
            }
            Tok::LParen => {
                self.next();
                let first = self.ty()?;
                if *self.peek() == Tok::RParen {
                    self.next();
                    if *self.peek() == Tok::Arrow {
                        return self.error("argument type is missing a variance");
                    }
                    return Ok(first);
                }
                let mut args = vec![(first, self.variance()?)];
                while *self.peek() == Tok::Comma {
                    self.next();
                    let t = self.ty()?;
                    args.push((t, self.variance()?));
                }
                self.expect(Tok::RParen)?;
                self.expect(Tok::Arrow)?;
                let res = self.ty()?;
                Ok(Type::fun(args, res))
            }
            t => self.error(format!("expected a type, found {}", t.describe())),
        }
    }

    fn annotation(&mut self) -> Result<Type, ParseError> {
        if *self.peek() == Tok::Colon {
            self.next();
            self.ty()
        } else {
            Ok(Type::Ground)
        }
    }

    fn params(&mut self) -> Result<Vec<Param>, ParseError> {
        let mut out = Vec::new();
        loop {
            let name = self.ident()?;
            let v = self.variance()?;
            let ty = self.annotation()?;
            out.push(Param::new(name, v, ty));
            if *self.peek() != Tok::Comma {
                return Ok(out);
            }
            self.next();
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Lambda => {
                self.next();
                let params = self.params()?;
                self.expect(Tok::Dot)?;
                self.with_bound(params.iter().map(|p| p.name.clone()).collect(), |p| {
                    Ok(Term::lam(params.clone(), p.term()?))
                })
            }
            Tok::Fix(kind) => {
                self.next();
                let var = self.ident()?;
                if *self.peek() == Tok::LParen {
                    self.next();
                    let params = self.params()?;
                    self.expect(Tok::RParen)?;
                    let res = self.annotation()?;
                    self.expect(Tok::Dot)?;
                    let ty = Type::fun(
                        params.iter().map(|p| (p.ty.clone(), p.variance)).collect(),
                        res,
                    );
                    let mut names = vec![var.clone()];
                    names.extend(params.iter().map(|p| p.name.clone()));
                    self.with_bound(names, |p| {
                        let body = p.term()?;
                        Ok(Term::fix(kind, var.clone(), ty.clone(), Term::lam(params.clone(), body)))
                    })
                } else {
                    let ty = self.annotation()?;
                    self.expect(Tok::Dot)?;
                    self.with_bound(vec![var.clone()], |p| {
                        Ok(Term::fix(kind, var.clone(), ty.clone(), p.term()?))
                    })
                }
            }
            _ => self.application(),
        }
    }

    fn with_bound<T>(
        &mut self,
        names: Vec<String>,
        f: impl FnOnce(&mut Self) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        let n = self.scope.len();
        self.scope.extend(names);
        let r = f(self);
        self.scope.truncate(n);
        r
    }

    fn application(&mut self) -> Result<Term, ParseError> {
        let mut head = self.atom()?;
        while *self.peek() == Tok::LParen {
            self.next();
            let mut args = vec![self.term()?];
            while *self.peek() == Tok::Comma {
                self.next();
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
            head = Term::app(head, args);
        }
        Ok(head)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.next();
                if self.scope.contains(&name) || !(self.base)(&name) {
                    Ok(Term::Var(name))
                } else {
                    Ok(Term::Base(name))
                }
            }
            Tok::LParen => {
                self.next();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            t => self.error(format!("expected a term, found {}", t.describe())),
        }
    }
}

/// Parses a term. Identifiers that are not bound and satisfy `is_base` become
/// base symbols; any other unbound identifier is a free variable.
pub fn parse_term(src: &str, is_base: &dyn Fn(&str) -> bool) -> Result<Term, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        base: is_base,
        scope: Vec::new(),
    };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after term", p.peek().describe()));
    }
    Ok(t)
}

/// Parses against a fixed set of base symbol names.
pub fn parse_with_symbols(src: &str, symbols: &HashSet<String>) -> Result<Term, ParseError> {
    parse_term(src, &|s| symbols.contains(s))
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        base: &|_| false,
        scope: Vec::new(),
    };
    let t = p.ty()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after type", p.peek().describe()));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Variance::*;

    fn symbols(names: &[&str]) -> HashSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_simple_fixpoint() {
        let t = parse_with_symbols("mu x . x", &symbols(&[])).unwrap();
        assert_eq!(t, Term::fix(FixKind::Mu, "x", Type::Ground, Term::var("x")));
        assert!(t.is_closed());
    }

    #[test]
    fn free_identifiers_are_accepted() {
        let t = parse_with_symbols("mu x . y", &symbols(&[])).unwrap();
        assert!(!t.is_closed());
    }

    #[test]
    fn reach_body_shape() {
        let sig = symbols(&["ite", "comp", "a", "b", "c"]);
        let t = parse_with_symbols(
            "mu F(f+-, g+-, x+-). ite(f(g(x)), F(comp(a,f), comp(b,g), c(x)))",
            &sig,
        )
        .unwrap();
        let Term::Fix { kind: FixKind::Mu, var, body, .. } = &t else { panic!() };
        assert_eq!(var, "F");
        let Term::Lam(params, body) = &**body else { panic!() };
        assert_eq!(params.len(), 3);
        assert!(params.iter().all(|p| p.variance == Both));
        let Term::App(head, args) = &**body else { panic!() };
        assert_eq!(**head, Term::base("ite"));
        assert_eq!(args.len(), 2);
        assert!(t.is_closed());
    }

    #[test]
    fn types_round_trip() {
        for src in ["o", "(o+) -> o", "(((o+) -> o)+, o+-) -> o", "(o-) -> (o+) -> o"] {
            let t = parse_type(src).unwrap();
            assert_eq!(t.to_string(), src);
        }
        assert_eq!(parse_type("(o+, o-) -> o").unwrap(), Type::fun(
            vec![(Type::Ground, Plus), (Type::Ground, Minus)],
            Type::Ground
        ));
        assert!(parse_type("(o) -> o").is_err());
    }

    #[test]
    fn errors_carry_locations() {
        let e = parse_with_symbols("", &symbols(&[])).unwrap_err();
        assert_eq!((e.line, e.col), (1, 1));
        let e = parse_with_symbols("mu x .\n  f(x,", &symbols(&["f"])).unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_with_symbols("f $", &symbols(&["f"])).unwrap_err();
        assert_eq!((e.line, e.col), (1, 3));
    }

    #[test]
    fn unicode_forms() {
        let t = parse_with_symbols("νx . λy± . x", &symbols(&[])).unwrap();
        assert_eq!(t.to_string(), "nu x : o . \\y+- : o . x");
    }
}
