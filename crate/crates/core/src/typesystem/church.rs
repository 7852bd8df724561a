//! Church-style annotated terms, used to generate derivations mechanically.
//!
//! ```text
//! \x:T. M      abstraction with a typed binder
//! /\p. M       type abstraction (Gen)
//! M {T}        type application (Inst)
//! nil{T}       empty list of element type T
//! ```
//!
//! An unannotated `nil` is allowed as the tail of a `cons`, where its type
//! follows from the head.

use thiserror::Error;

use crate::syntax::lex::{Cursor, Tok};
use crate::syntax::{name, ConstName, Name, Signature, SyntaxError, Term, MAX_NUMERAL};

use super::derivation::{ConstTyping, Context, Derivation, TypingRule};
use super::types::{parse_type_at, Type};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnnTerm {
    Var(Name),
    Const(ConstName),
    Lam(Name, Type, Box<AnnTerm>),
    TyLam(Name, Box<AnnTerm>),
    App(Box<AnnTerm>, Box<AnnTerm>),
    TyApp(Box<AnnTerm>, Type),
    /// A constructor, with the element type for `nil`.
    Constr(Name, Vec<AnnTerm>, Option<Type>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("cannot type `{term}`: {reason}")]
    Ill { term: String, reason: String },
}

fn ill(t: &Term, reason: impl Into<String>) -> BuildError {
    BuildError::Ill {
        term: t.to_string(),
        reason: reason.into(),
    }
}

pub fn parse_annotated(text: &str, sig: &Signature) -> Result<AnnTerm, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let mut p = AnnParser { sig, bound: Vec::new() };
    let t = p.term(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.error(format!("unexpected {}", cur.peek().describe())));
    }
    Ok(t)
}

struct AnnParser<'s> {
    sig: &'s Signature,
    bound: Vec<Name>,
}

impl AnnParser<'_> {
    fn term(&mut self, cur: &mut Cursor) -> Result<AnnTerm, SyntaxError> {
        if cur.eat(&Tok::Backslash) {
            let x = match cur.bump() {
                Tok::Ident(x, None) => name(&x),
                other => return Err(cur.error(format!("expected a binder, found {}", other.describe()))),
            };
            cur.expect(&Tok::Colon)?;
            let ty = parse_type_at(cur)?;
            cur.expect(&Tok::Dot)?;
            self.bound.push(x.clone());
            let body = self.term(cur);
            self.bound.pop();
            return Ok(AnnTerm::Lam(x, ty, Box::new(body?)));
        }
        if cur.eat(&Tok::TyLam) {
            let mut ps = Vec::new();
            loop {
                match cur.bump() {
                    Tok::Ident(p, None) => ps.push(name(&p)),
                    Tok::Dot if !ps.is_empty() => break,
                    other => return Err(cur.error(format!("expected a type variable, found {}", other.describe()))),
                }
            }
            let body = self.term(cur)?;
            return Ok(ps.into_iter().rev().fold(body, |b, p| AnnTerm::TyLam(p, Box::new(b))));
        }
        let mut head = self.atom(cur)?;
        loop {
            if cur.eat(&Tok::LBrace) {
                let ty = parse_type_at(cur)?;
                cur.expect(&Tok::RBrace)?;
                head = AnnTerm::TyApp(Box::new(head), ty);
            } else if starts(cur.peek()) {
                let arg = self.atom(cur)?;
                head = AnnTerm::App(Box::new(head), Box::new(arg));
            } else {
                return Ok(head);
            }
        }
    }

    fn atom(&mut self, cur: &mut Cursor) -> Result<AnnTerm, SyntaxError> {
        match cur.peek().clone() {
            Tok::Num(n) => {
                if n > MAX_NUMERAL {
                    return Err(cur.error(format!("numeral {n} exceeds the limit {MAX_NUMERAL}")));
                }
                cur.bump();
                Ok((0..n).fold(AnnTerm::Constr(name("0"), vec![], None), |t, _| {
                    AnnTerm::Constr(name("S"), vec![t], None)
                }))
            }
            Tok::LParen => {
                cur.bump();
                let t = self.term(cur)?;
                cur.expect(&Tok::RParen)?;
                Ok(t)
            }
            Tok::LBracket => {
                cur.bump();
                let mut items = Vec::new();
                if !cur.eat(&Tok::RBracket) {
                    loop {
                        items.push(self.term(cur)?);
                        if cur.eat(&Tok::RBracket) {
                            break;
                        }
                        cur.expect(&Tok::Comma)?;
                    }
                }
                let nil = AnnTerm::Constr(name("nil"), vec![], None);
                Ok(items
                    .into_iter()
                    .rev()
                    .fold(nil, |tail, x| AnnTerm::Constr(name("cons"), vec![x, tail], None)))
            }
            Tok::Ident(id, level) | Tok::Sym(id, level) => {
                let call = cur.next_glued() && matches!(cur.peek_at(1), Tok::LParen);
                cur.bump();
                if let Some(level) = level {
                    return Ok(AnnTerm::Const(ConstName::leveled(&id, level)));
                }
                if self.bound.iter().any(|b| **b == *id) {
                    return Ok(AnnTerm::Var(name(&id)));
                }
                if let Some(arity) = self.sig.constructor_arity(&id) {
                    if id == "nil" && cur.eat(&Tok::LBrace) {
                        let ty = parse_type_at(cur)?;
                        cur.expect(&Tok::RBrace)?;
                        return Ok(AnnTerm::Constr(name("nil"), vec![], Some(ty)));
                    }
                    let mut args = Vec::new();
                    if call {
                        cur.expect(&Tok::LParen)?;
                        if !cur.eat(&Tok::RParen) {
                            loop {
                                args.push(self.term(cur)?);
                                if cur.eat(&Tok::RParen) {
                                    break;
                                }
                                cur.expect(&Tok::Comma)?;
                            }
                        }
                    } else {
                        for _ in 0..arity {
                            args.push(self.atom(cur)?);
                        }
                    }
                    if args.len() != arity {
                        return Err(SyntaxError::ArityMismatch {
                            name: id,
                            expected: arity,
                            found: args.len(),
                        });
                    }
                    return Ok(AnnTerm::Constr(name(&id), args, None));
                }
                if self.sig.constant_arity(&ConstName::new(&id)).is_some() {
                    return Ok(AnnTerm::Const(ConstName::new(&id)));
                }
                Ok(AnnTerm::Var(name(&id)))
            }
            other => Err(cur.error(format!("expected a term, found {}", other.describe()))),
        }
    }
}

fn starts(t: &Tok) -> bool {
    matches!(
        t,
        Tok::Ident(..) | Tok::Sym(..) | Tok::Num(_) | Tok::LParen | Tok::LBracket
    )
}

/// Builds the derivation of an annotated term in context `ctx`.
pub fn build_derivation(delta: &ConstTyping, ctx: &Context, t: &AnnTerm) -> Result<Derivation, BuildError> {
    build(delta, ctx, t, None)
}

/// Parses `text` and derives it in the empty context.
pub fn derive(delta: &ConstTyping, sig: &Signature, text: &str) -> Result<Derivation, BuildError> {
    let t = parse_annotated(text, sig)?;
    build_derivation(delta, &Context::new(), &t)
}

fn build(delta: &ConstTyping, ctx: &Context, t: &AnnTerm, nil_elem: Option<&Type>) -> Result<Derivation, BuildError> {
    Ok(match t {
        AnnTerm::Var(x) => {
            let ty = ctx
                .get(x)
                .cloned()
                .ok_or_else(|| ill(&Term::Var(x.clone()), "unbound variable"))?;
            Derivation::leaf(TypingRule::Var, ctx.clone(), Term::Var(x.clone()), ty)
        }
        AnnTerm::Const(c) => {
            let ty = delta
                .get(c)
                .cloned()
                .ok_or_else(|| ill(&Term::Const(c.clone()), "constant has no type"))?;
            Derivation::leaf(TypingRule::Const, ctx.clone(), Term::Const(c.clone()), ty)
        }
        AnnTerm::Lam(x, rho, body) => {
            let d = build(delta, &ctx.extend(x, rho.clone()), body, None)?;
            let term = Term::Abs(x.clone(), Box::new(d.term.clone()));
            let ty = Type::arrow(rho.clone(), d.ty.clone());
            Derivation::node(TypingRule::Abs, ctx.clone(), term, ty, vec![d])
        }
        AnnTerm::TyLam(p, body) => {
            let d = build(delta, ctx, body, None)?;
            if ctx.free_type_vars().contains(p) {
                return Err(ill(&d.term, format!("`{p}` is free in the context")));
            }
            Derivation {
                tvar: Some(p.clone()),
                ..Derivation::node(
                    TypingRule::Gen,
                    ctx.clone(),
                    d.term.clone(),
                    Type::Forall(p.clone(), Box::new(d.ty.clone())),
                    vec![d],
                )
            }
        }
        AnnTerm::App(m, n) => {
            let dm = build(delta, ctx, m, None)?;
            let dn = build(delta, ctx, n, None)?;
            let term = Term::app(dm.term.clone(), dn.term.clone());
            let Type::Arrow(rho, sigma) = &dm.ty else {
                return Err(ill(&term, format!("function has type `{}`", dm.ty)));
            };
            if !rho.alpha_eq(&dn.ty) {
                return Err(ill(&term, format!("argument has type `{}`, expected `{rho}`", dn.ty)));
            }
            let ty = (**sigma).clone();
            Derivation::node(TypingRule::App, ctx.clone(), term, ty, vec![dm, dn])
        }
        AnnTerm::TyApp(m, sigma) => {
            let dm = build(delta, ctx, m, None)?;
            let Type::Forall(p, rho) = &dm.ty else {
                return Err(ill(&dm.term, format!("type `{}` is not universal", dm.ty)));
            };
            let ty = rho.subst(p, sigma);
            Derivation {
                inst: Some(sigma.clone()),
                ..Derivation::node(TypingRule::Inst, ctx.clone(), dm.term.clone(), ty, vec![dm])
            }
        }
        AnnTerm::Constr(co, args, ann) => match (&**co, args.as_slice()) {
            ("T", []) => Derivation::leaf(TypingRule::TrueI, ctx.clone(), Term::constr("T", vec![]), Type::Boole),
            ("F", []) => Derivation::leaf(TypingRule::FalseI, ctx.clone(), Term::constr("F", vec![]), Type::Boole),
            ("0", []) => Derivation::leaf(TypingRule::ZeroI, ctx.clone(), Term::constr("0", vec![]), Type::Nat),
            ("S", [m]) => {
                let d = build(delta, ctx, m, None)?;
                let term = Term::constr("S", vec![d.term.clone()]);
                if !d.ty.alpha_eq(&Type::Nat) {
                    return Err(ill(&term, format!("argument has type `{}`", d.ty)));
                }
                Derivation::node(TypingRule::SuccI, ctx.clone(), term, Type::Nat, vec![d])
            }
            ("nil", []) => {
                let elem = ann.as_ref().or(nil_elem).ok_or_else(|| {
                    ill(
                        &Term::constr("nil", vec![]),
                        "`nil` needs an element type, e.g. `nil{nat}`",
                    )
                })?;
                Derivation::leaf(
                    TypingRule::NilI,
                    ctx.clone(),
                    Term::constr("nil", vec![]),
                    Type::list(elem.clone()),
                )
            }
            ("cons", [m, n]) => {
                let dm = build(delta, ctx, m, None)?;
                let dn = build(delta, ctx, n, Some(&dm.ty))?;
                let term = Term::constr("cons", vec![dm.term.clone(), dn.term.clone()]);
                let ty = Type::list(dm.ty.clone());
                if !dn.ty.alpha_eq(&ty) {
                    return Err(ill(&term, format!("tail has type `{}`, expected `{ty}`", dn.ty)));
                }
                Derivation::node(TypingRule::ConsI, ctx.clone(), term, ty, vec![dm, dn])
            }
            ("pr", [m, n]) => {
                let dm = build(delta, ctx, m, None)?;
                let dn = build(delta, ctx, n, None)?;
                let term = Term::constr("pr", vec![dm.term.clone(), dn.term.clone()]);
                let ty = Type::prod(dm.ty.clone(), dn.ty.clone());
                Derivation::node(TypingRule::PairI, ctx.clone(), term, ty, vec![dm, dn])
            }
            _ => {
                let term = Term::Constr(co.clone(), vec![]);
                return Err(ill(&term, format!("constructor `{co}` has no typing rule")));
            }
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typesystem::derivation::check_f_derivation;
    use crate::typesystem::types::parse_type;

    fn sig() -> Signature {
        let mut s = Signature::with_builtins();
        s.add_constant("lh", 1).unwrap();
        s
    }

    fn delta() -> ConstTyping {
        let mut d = ConstTyping::new();
        d.insert("lh", parse_type("forall p. list p -> nat").unwrap()).unwrap();
        d
    }

    #[test]
    fn polymorphic_identity() {
        let d = derive(&delta(), &sig(), "/\\p. \\x:p. x").unwrap();
        assert!(d.ty.alpha_eq(&parse_type("forall q. q -> q").unwrap()));
        check_f_derivation(&delta(), &d).unwrap();
    }

    #[test]
    fn lists_and_instantiation() {
        let d = derive(&delta(), &sig(), "lh {nat} [0, 1]").unwrap();
        assert_eq!(d.ty, Type::Nat);
        assert_eq!(d.term.to_string(), "lh [0, 1]");
        check_f_derivation(&delta(), &d).unwrap();
        let d = derive(&delta(), &sig(), "nil{boole}").unwrap();
        assert_eq!(d.ty.to_string(), "list boole");
    }

    #[test]
    fn ill_typed() {
        assert!(derive(&delta(), &sig(), "\\x:nat. x x").is_err());
        assert!(derive(&delta(), &sig(), "nil").is_err());
        assert!(derive(&delta(), &sig(), "\\x:p. /\\p. x").is_err());
        assert!(derive(&delta(), &sig(), "lh 0").is_err());
    }
}
