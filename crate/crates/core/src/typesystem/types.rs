use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::lex::{Cursor, Tok};
use crate::syntax::{fresh_name, name, Name, SyntaxError};

/// Types of extended System F, with products as an extension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Var(Name),
    Boole,
    Nat,
    List(Box<Type>),
    Arrow(Box<Type>, Box<Type>),
    Forall(Name, Box<Type>),
    Prod(Box<Type>, Box<Type>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum TCanon {
    Free(Name),
    Bound(usize),
    Boole,
    Nat,
    List(Box<TCanon>),
    Arrow(Box<TCanon>, Box<TCanon>),
    Forall(Box<TCanon>),
    Prod(Box<TCanon>, Box<TCanon>),
}

impl Type {
    pub fn var(p: &str) -> Type {
        Type::Var(name(p))
    }

    pub fn list(t: Type) -> Type {
        Type::List(Box::new(t))
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    /// `a₁ → … → aₙ → result`.
    pub fn arrows(args: impl IntoIterator<Item = Type>, result: Type) -> Type {
        let args: Vec<Type> = args.into_iter().collect();
        args.into_iter().rev().fold(result, |r, a| Type::arrow(a, r))
    }

    pub fn forall(p: &str, body: Type) -> Type {
        Type::Forall(name(p), Box::new(body))
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Box::new(a), Box::new(b))
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Type::Var(p) => {
                if !bound.contains(p) {
                    out.insert(p.clone());
                }
            }
            Type::Boole | Type::Nat => {}
            Type::List(t) => t.collect_free(bound, out),
            Type::Arrow(a, b) | Type::Prod(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Type::Forall(p, body) => {
                bound.push(p.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    fn all_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Type::Var(p) => {
                out.insert(p.clone());
            }
            Type::Boole | Type::Nat => {}
            Type::List(t) => t.all_vars(out),
            Type::Arrow(a, b) | Type::Prod(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            Type::Forall(p, body) => {
                out.insert(p.clone());
                body.all_vars(out);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Capture-avoiding `self[sigma/p]`.
    pub fn subst(&self, p: &str, sigma: &Type) -> Type {
        match self {
            Type::Var(q) if &**q == p => sigma.clone(),
            Type::Var(_) | Type::Boole | Type::Nat => self.clone(),
            Type::List(t) => Type::List(Box::new(t.subst(p, sigma))),
            Type::Arrow(a, b) => Type::Arrow(Box::new(a.subst(p, sigma)), Box::new(b.subst(p, sigma))),
            Type::Prod(a, b) => Type::Prod(Box::new(a.subst(p, sigma)), Box::new(b.subst(p, sigma))),
            Type::Forall(q, body) => {
                if &**q == p || !body.free_vars().contains(p) {
                    return self.clone();
                }
                let sigma_free = sigma.free_vars();
                if sigma_free.contains(q) {
                    let mut avoid = sigma_free;
                    body.all_vars(&mut avoid);
                    avoid.insert(name(p));
                    let q2 = fresh_name(q, &avoid);
                    let renamed = body.subst(q, &Type::Var(q2.clone()));
                    Type::Forall(q2, Box::new(renamed.subst(p, sigma)))
                } else {
                    Type::Forall(q.clone(), Box::new(body.subst(p, sigma)))
                }
            }
        }
    }

    fn canon(&self, bound: &mut Vec<Name>) -> TCanon {
        match self {
            Type::Var(p) => match bound.iter().rposition(|b| b == p) {
                Some(i) => TCanon::Bound(bound.len() - 1 - i),
                None => TCanon::Free(p.clone()),
            },
            Type::Boole => TCanon::Boole,
            Type::Nat => TCanon::Nat,
            Type::List(t) => TCanon::List(Box::new(t.canon(bound))),
            Type::Arrow(a, b) => TCanon::Arrow(Box::new(a.canon(bound)), Box::new(b.canon(bound))),
            Type::Prod(a, b) => TCanon::Prod(Box::new(a.canon(bound)), Box::new(b.canon(bound))),
            Type::Forall(p, body) => {
                bound.push(p.clone());
                let c = body.canon(bound);
                bound.pop();
                TCanon::Forall(Box::new(c))
            }
        }
    }

    pub fn alpha_eq(&self, other: &Type) -> bool {
        self.canon(&mut Vec::new()) == other.canon(&mut Vec::new())
    }
}

const RESERVED: [&str; 4] = ["forall", "list", "boole", "nat"];

pub fn parse_type(text: &str) -> Result<Type, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let t = parse_type_at(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.error(format!("unexpected {} after type", cur.peek().describe())));
    }
    Ok(t)
}

/// Parses a type at the cursor; stops before any token that cannot continue it.
pub fn parse_type_at(cur: &mut Cursor) -> Result<Type, SyntaxError> {
    if matches!(cur.peek(), Tok::Ident(k, None) if k == "forall") {
        cur.bump();
        let mut vars = Vec::new();
        loop {
            match cur.bump() {
                Tok::Ident(p, None) if !RESERVED.contains(&p.as_str()) => vars.push(p),
                Tok::Dot if !vars.is_empty() => break,
                other => return Err(cur.error(format!("expected a type variable, found {}", other.describe()))),
            }
        }
        let body = parse_type_at(cur)?;
        return Ok(vars.iter().rev().fold(body, |b, p| Type::forall(p, b)));
    }
    let left = parse_prod(cur)?;
    if cur.eat(&Tok::Arrow) {
        let right = parse_type_at(cur)?;
        return Ok(Type::arrow(left, right));
    }
    Ok(left)
}

fn parse_prod(cur: &mut Cursor) -> Result<Type, SyntaxError> {
    let left = parse_app(cur)?;
    if matches!(cur.peek(), Tok::Sym(s, None) if s == "*") {
        cur.bump();
        let right = parse_prod(cur)?;
        return Ok(Type::prod(left, right));
    }
    Ok(left)
}

fn parse_app(cur: &mut Cursor) -> Result<Type, SyntaxError> {
    if matches!(cur.peek(), Tok::Ident(k, None) if k == "list") {
        cur.bump();
        return Ok(Type::list(parse_app(cur)?));
    }
    match cur.peek().clone() {
        Tok::Ident(k, None) if k == "boole" => {
            cur.bump();
            Ok(Type::Boole)
        }
        Tok::Ident(k, None) if k == "nat" => {
            cur.bump();
            Ok(Type::Nat)
        }
        Tok::Ident(k, None) if k == "forall" => Err(cur.error("`forall` inside a type must be parenthesised")),
        Tok::Ident(p, None) => {
            cur.bump();
            Ok(Type::var(&p))
        }
        Tok::LParen => {
            cur.bump();
            let t = parse_type_at(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(t)
        }
        other => Err(cur.error(format!("expected a type, found {}", other.describe()))),
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Forall(p, body) => write!(f, "forall {p}. {body}"),
            Type::Arrow(a, b) => {
                match **a {
                    Type::Arrow(..) | Type::Forall(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " -> {b}")
            }
            Type::Prod(a, b) => {
                match **a {
                    Type::Arrow(..) | Type::Forall(..) | Type::Prod(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                f.write_str(" * ")?;
                match **b {
                    Type::Arrow(..) | Type::Forall(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            Type::List(t) => match **t {
                Type::Var(_) | Type::Boole | Type::Nat | Type::List(_) => write!(f, "list {t}"),
                _ => write!(f, "list ({t})"),
            },
            Type::Var(p) => f.write_str(p),
            Type::Boole => f.write_str("boole"),
            Type::Nat => f.write_str("nat"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    #[test]
    fn substitution() {
        assert_eq!(t("p -> p").subst("p", &Type::Nat), t("nat -> nat"));
        assert_eq!(t("forall p. p -> q").subst("q", &Type::Nat), t("forall p. p -> nat"));
        assert_eq!(t("forall p. p").subst("p", &Type::Nat), t("forall p. p"));
    }

    #[test]
    fn capture_avoidance() {
        let r = t("forall p. p -> q").subst("q", &t("p"));
        assert!(r.alpha_eq(&t("forall r. r -> p")));
        assert!(!r.alpha_eq(&t("forall p. p -> p")));
    }

    #[test]
    fn alpha() {
        assert!(t("forall p. p -> p").alpha_eq(&t("forall q. q -> q")));
        assert!(!t("forall p. forall q. p -> q").alpha_eq(&t("forall p. forall q. q -> q")));
        assert!(!t("p").alpha_eq(&t("q")));
    }

    #[test]
    fn printing_round_trips() {
        for s in [
            "forall p. ((nat -> p) -> nat) -> (nat -> (p -> nat) -> p) -> list p -> nat",
            "list (nat * boole) -> nat",
            "(forall p. p) -> nat",
            "list (list nat)",
            "nat * (boole -> nat)",
            "(nat * nat) * nat",
        ] {
            let ty = t(s);
            assert_eq!(t(&ty.to_string()), ty, "{s}");
        }
        assert_eq!(t("a -> b -> c").to_string(), "a -> b -> c");
        assert_eq!(t("(a -> b) -> c").to_string(), "(a -> b) -> c");
    }

    #[test]
    fn closedness() {
        assert!(t("forall p. list p -> nat").is_closed());
        assert!(!t("list p -> nat").is_closed());
    }
}
