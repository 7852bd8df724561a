use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::syntax::lex::{Cursor, Tok};
use crate::syntax::{
    parse_leveled_term, print_term, ConstName, ConstSubstitution, Name, Position, Signature, SyntaxError, Term,
};

use super::types::{parse_type, parse_type_at, Type};

/// A typing context `x₁:ρ₁, …, xₙ:ρₙ`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context(BTreeMap<Name, Type>);

impl Context {
    pub fn new() -> Self {
        Context(BTreeMap::new())
    }

    pub fn get(&self, x: &str) -> Option<&Type> {
        self.0.get(x)
    }

    /// `Γ, x:ρ`, replacing any earlier binding of `x`.
    pub fn extend(&self, x: &Name, ty: Type) -> Context {
        let mut c = self.clone();
        c.0.insert(x.clone(), ty);
        c
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.0.iter()
    }

    pub fn free_type_vars(&self) -> BTreeSet<Name> {
        self.0.values().flat_map(Type::free_vars).collect()
    }

    /// Equality up to α-equivalence of the types.
    pub fn equiv(&self, other: &Context) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|((x, s), (y, t))| x == y && s.alpha_eq(t))
    }
}

impl FromIterator<(Name, Type)> for Context {
    fn from_iter<I: IntoIterator<Item = (Name, Type)>>(iter: I) -> Self {
        Context(iter.into_iter().collect())
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(x, t)| format!("{x}:{t}")).collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TypingError {
    #[error("type of `{0}` is not closed: {1}")]
    OpenConstantType(String, Type),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// Closed types for constants. Over leveled constants, `c#n` has the type
/// given for `c`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstTyping {
    types: BTreeMap<Name, Type>,
    over_omega: bool,
}

impl ConstTyping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, c: &str, ty: Type) -> Result<(), TypingError> {
        if !ty.is_closed() {
            return Err(TypingError::OpenConstantType(c.to_string(), ty));
        }
        self.types.insert(Name::from(c), ty);
        Ok(())
    }

    pub fn get(&self, c: &ConstName) -> Option<&Type> {
        if c.level().is_some() != self.over_omega {
            return None;
        }
        self.types.get(c.base())
    }

    pub fn is_over_omega(&self) -> bool {
        self.over_omega
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.types.iter()
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    /// Reads `name : type;` declarations (`--` comments allowed).
    pub fn parse(text: &str) -> Result<ConstTyping, TypingError> {
        let mut cur = Cursor::new(text)?;
        let mut delta = ConstTyping::new();
        while !cur.at_eof() {
            let c = match cur.bump() {
                Tok::Ident(c, None) | Tok::Sym(c, None) => c,
                other => {
                    return Err(cur
                        .error(format!("expected a constant name, found {}", other.describe()))
                        .into())
                }
            };
            cur.expect(&Tok::Colon)?;
            let ty = parse_type_at(&mut cur)?;
            cur.expect(&Tok::Semi)?;
            delta.insert(&c, ty)?;
        }
        Ok(delta)
    }

    pub fn to_text(&self) -> String {
        self.types.iter().map(|(c, t)| format!("{c} : {t};\n")).collect()
    }
}

/// `Δ′(c#n) = Δ(c)` for every level `n`.
pub fn lift_typing_to_omega(delta: &ConstTyping) -> ConstTyping {
    ConstTyping {
        types: delta.types.clone(),
        over_omega: true,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypingRule {
    Var,
    Const,
    Abs,
    App,
    Gen,
    Inst,
    TrueI,
    FalseI,
    ZeroI,
    SuccI,
    NilI,
    ConsI,
    PairI,
}

impl TypingRule {
    pub const ALL: [TypingRule; 13] = [
        TypingRule::Var,
        TypingRule::Const,
        TypingRule::Abs,
        TypingRule::App,
        TypingRule::Gen,
        TypingRule::Inst,
        TypingRule::TrueI,
        TypingRule::FalseI,
        TypingRule::ZeroI,
        TypingRule::SuccI,
        TypingRule::NilI,
        TypingRule::ConsI,
        TypingRule::PairI,
    ];
}

impl fmt::Display for TypingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for TypingRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TypingRule::ALL
            .into_iter()
            .find(|r| r.to_string() == s)
            .ok_or_else(|| format!("unknown typing rule `{s}`"))
    }
}

/// A proof tree for `Δ, Γ ⊢ M : ρ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: TypingRule,
    pub ctx: Context,
    pub term: Term,
    pub ty: Type,
    pub children: Vec<Derivation>,
    /// The generalised variable of a `Gen` node.
    pub tvar: Option<Name>,
    /// The instantiating type of an `Inst` node.
    pub inst: Option<Type>,
}

impl Derivation {
    pub fn leaf(rule: TypingRule, ctx: Context, term: Term, ty: Type) -> Self {
        Derivation {
            rule,
            ctx,
            term,
            ty,
            children: Vec::new(),
            tvar: None,
            inst: None,
        }
    }

    pub fn node(rule: TypingRule, ctx: Context, term: Term, ty: Type, children: Vec<Derivation>) -> Self {
        Derivation {
            children,
            ..Derivation::leaf(rule, ctx, term, ty)
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Derivation::size).sum::<usize>()
    }

    /// Renames constants in every node's term.
    pub fn rename_constants(&self, theta: &ConstSubstitution) -> Result<Derivation, SyntaxError> {
        Ok(Derivation {
            rule: self.rule,
            ctx: self.ctx.clone(),
            term: crate::syntax::apply_const_subst(&self.term, theta)?,
            ty: self.ty.clone(),
            children: self
                .children
                .iter()
                .map(|d| d.rename_constants(theta))
                .collect::<Result<_, _>>()?,
            tvar: self.tvar.clone(),
            inst: self.inst.clone(),
        })
    }

    /// Replaces every constant by the result of `f`.
    pub fn map_constants(&self, f: &mut impl FnMut(&ConstName) -> ConstName) -> Derivation {
        Derivation {
            rule: self.rule,
            ctx: self.ctx.clone(),
            term: self.term.map_consts::<()>(&mut |c| Ok(f(c))).expect("infallible"),
            ty: self.ty.clone(),
            children: self.children.iter().map(|d| d.map_constants(f)).collect(),
            tvar: self.tvar.clone(),
            inst: self.inst.clone(),
        }
    }

    pub fn to_json(&self) -> Json {
        let ctx: Map<String, Json> = self
            .ctx
            .iter()
            .map(|(x, t)| (x.to_string(), json!(t.to_string())))
            .collect();
        let mut obj = Map::new();
        obj.insert("rule".into(), json!(self.rule.to_string()));
        obj.insert("ctx".into(), Json::Object(ctx));
        obj.insert("term".into(), json!(print_term(&self.term)));
        obj.insert("type".into(), json!(self.ty.to_string()));
        obj.insert(
            "children".into(),
            Json::Array(self.children.iter().map(Derivation::to_json).collect()),
        );
        if let Some(p) = &self.tvar {
            obj.insert("tvar".into(), json!(p.to_string()));
        }
        if let Some(s) = &self.inst {
            obj.insert("inst".into(), json!(s.to_string()));
        }
        Json::Object(obj)
    }

    /// Reads a derivation tree; terms are parsed over `sig` and may
    /// mention leveled constants.
    pub fn from_json(v: &Json, sig: &Signature) -> Result<Derivation, DerivationFormatError> {
        let obj = v
            .as_object()
            .ok_or_else(|| DerivationFormatError::new("a derivation node must be an object"))?;
        let field = |k: &str| -> Result<&str, DerivationFormatError> {
            obj.get(k)
                .and_then(Json::as_str)
                .ok_or_else(|| DerivationFormatError::new(format!("missing string field `{k}`")))
        };
        let rule = TypingRule::from_str(field("rule")?).map_err(DerivationFormatError::new)?;
        let term = parse_leveled_term(field("term")?, sig).map_err(|e| DerivationFormatError::new(e.to_string()))?;
        let ty = parse_type(field("type")?).map_err(|e| DerivationFormatError::new(e.to_string()))?;
        let mut ctx = Context::new();
        if let Some(c) = obj.get("ctx") {
            let c = c
                .as_object()
                .ok_or_else(|| DerivationFormatError::new("`ctx` must be an object"))?;
            for (x, t) in c {
                let t = t
                    .as_str()
                    .ok_or_else(|| DerivationFormatError::new("context types must be strings"))?;
                let t = parse_type(t).map_err(|e| DerivationFormatError::new(e.to_string()))?;
                ctx = ctx.extend(&Name::from(x.as_str()), t);
            }
        }
        let children = match obj.get("children") {
            None => Vec::new(),
            Some(Json::Array(items)) => items
                .iter()
                .map(|c| Derivation::from_json(c, sig))
                .collect::<Result<_, _>>()?,
            Some(_) => return Err(DerivationFormatError::new("`children` must be an array")),
        };
        let tvar = match obj.get("tvar") {
            None => None,
            Some(p) => Some(Name::from(
                p.as_str()
                    .ok_or_else(|| DerivationFormatError::new("`tvar` must be a string"))?,
            )),
        };
        let inst = match obj.get("inst") {
            None => None,
            Some(s) => Some(
                parse_type(
                    s.as_str()
                        .ok_or_else(|| DerivationFormatError::new("`inst` must be a string"))?,
                )
                .map_err(|e| DerivationFormatError::new(e.to_string()))?,
            ),
        };
        Ok(Derivation {
            rule,
            ctx,
            term,
            ty,
            children,
            tvar,
            inst,
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed derivation: {message}")]
pub struct DerivationFormatError {
    pub message: String,
}

impl DerivationFormatError {
    fn new(message: impl Into<String>) -> Self {
        DerivationFormatError {
            message: message.into(),
        }
    }
}

/// The conclusion `Γ ⊢ M : ρ` of a checked derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgement {
    pub ctx: Context,
    pub term: Term,
    pub ty: Type,
}

impl fmt::Display for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |- {} : {}", self.ctx, print_term(&self.term), self.ty)
    }
}

/// A node that is not a correct instance of its rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeViolation {
    pub path: Position,
    pub rule: TypingRule,
    pub message: String,
}

impl fmt::Display for TypeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {} ({}): {}", self.path, self.rule, self.message)
    }
}

/// Checks every node of `deriv` against its rule.
pub fn check_derivation(delta: &ConstTyping, deriv: &Derivation) -> Result<Judgement, Vec<TypeViolation>> {
    let mut out = Vec::new();
    check_node(delta, deriv, Position::root(), &mut out);
    if out.is_empty() {
        Ok(Judgement {
            ctx: deriv.ctx.clone(),
            term: deriv.term.clone(),
            ty: deriv.ty.clone(),
        })
    } else {
        Err(out)
    }
}

/// Checks `Δ ⊢_F M : ρ`: a valid derivation with empty context and closed type.
pub fn check_f_derivation(delta: &ConstTyping, deriv: &Derivation) -> Result<Judgement, Vec<TypeViolation>> {
    let mut out = Vec::new();
    check_node(delta, deriv, Position::root(), &mut out);
    if !deriv.ctx.is_empty() {
        out.push(violation(
            &Position::root(),
            deriv.rule,
            format!("context `{}` is not empty", deriv.ctx),
        ));
    }
    if !deriv.ty.is_closed() {
        out.push(violation(
            &Position::root(),
            deriv.rule,
            format!("type `{}` is not closed", deriv.ty),
        ));
    }
    if out.is_empty() {
        Ok(Judgement {
            ctx: deriv.ctx.clone(),
            term: deriv.term.clone(),
            ty: deriv.ty.clone(),
        })
    } else {
        Err(out)
    }
}

fn violation(path: &Position, rule: TypingRule, message: impl Into<String>) -> TypeViolation {
    TypeViolation {
        path: path.clone(),
        rule,
        message: message.into(),
    }
}

fn check_node(delta: &ConstTyping, d: &Derivation, path: Position, out: &mut Vec<TypeViolation>) {
    for (i, child) in d.children.iter().enumerate() {
        check_node(delta, child, path.child(i), out);
    }
    let mut fail = |msg: String| out.push(violation(&path, d.rule, msg));
    let expected_children = match d.rule {
        TypingRule::Var
        | TypingRule::Const
        | TypingRule::TrueI
        | TypingRule::FalseI
        | TypingRule::ZeroI
        | TypingRule::NilI => 0,
        TypingRule::Abs | TypingRule::Gen | TypingRule::Inst | TypingRule::SuccI => 1,
        TypingRule::App | TypingRule::ConsI | TypingRule::PairI => 2,
    };
    if d.children.len() != expected_children {
        fail(format!(
            "expected {expected_children} premises, found {}",
            d.children.len()
        ));
        return;
    }
    if d.rule != TypingRule::Abs {
        for (i, c) in d.children.iter().enumerate() {
            if !c.ctx.equiv(&d.ctx) {
                fail(format!("premise {i} has context `{}`, expected `{}`", c.ctx, d.ctx));
            }
        }
    }
    if d.rule != TypingRule::Gen && d.tvar.is_some() {
        fail("only Gen nodes carry `tvar`".into());
    }
    if d.rule != TypingRule::Inst && d.inst.is_some() {
        fail("only Inst nodes carry `inst`".into());
    }
    let ch = &d.children;
    let constr_args = |co: &str, k: usize| -> Option<&Vec<Term>> {
        match &d.term {
            Term::Constr(c, args) if &**c == co && args.len() == k => Some(args),
            _ => None,
        }
    };
    match d.rule {
        TypingRule::Var => match &d.term {
            Term::Var(x) => match d.ctx.get(x) {
                Some(t) if t.alpha_eq(&d.ty) => {}
                Some(t) => fail(format!("`{x}` has type `{t}` in the context, not `{}`", d.ty)),
                None => fail(format!("`{x}` is not in the context")),
            },
            t => fail(format!("`{}` is not a variable", print_term(t))),
        },
        TypingRule::Const => match &d.term {
            Term::Const(c) => match delta.get(c) {
                Some(t) if t.alpha_eq(&d.ty) => {}
                Some(t) => fail(format!("`{c}` has type `{t}`, not `{}`", d.ty)),
                None => fail(format!("`{c}` has no type")),
            },
            t => fail(format!("`{}` is not a constant", print_term(t))),
        },
        TypingRule::Abs => match (&d.term, &d.ty) {
            (Term::Abs(x, body), Type::Arrow(rho, sigma)) => {
                let c = &ch[0];
                if !c.ctx.equiv(&d.ctx.extend(x, (**rho).clone())) {
                    fail(format!("premise context `{}` is not `{}, {x}:{rho}`", c.ctx, d.ctx));
                }
                if c.term != **body {
                    fail(format!("premise term `{}` is not the body", print_term(&c.term)));
                }
                if !c.ty.alpha_eq(sigma) {
                    fail(format!("body has type `{}`, expected `{sigma}`", c.ty));
                }
            }
            (Term::Abs(..), t) => fail(format!("an abstraction cannot have type `{t}`")),
            (t, _) => fail(format!("`{}` is not an abstraction", print_term(t))),
        },
        TypingRule::App => match &d.term {
            Term::App(m, n) => {
                if ch[0].term != **m || ch[1].term != **n {
                    fail("premise terms do not match the application".into());
                }
                match &ch[0].ty {
                    Type::Arrow(rho, sigma) => {
                        if !ch[1].ty.alpha_eq(rho) {
                            fail(format!("argument has type `{}`, expected `{rho}`", ch[1].ty));
                        }
                        if !d.ty.alpha_eq(sigma) {
                            fail(format!("result type `{}` is not `{sigma}`", d.ty));
                        }
                    }
                    t => fail(format!("function has non-arrow type `{t}`")),
                }
            }
            t => fail(format!("`{}` is not an application", print_term(t))),
        },
        TypingRule::Gen => match &d.tvar {
            None => fail("Gen node without `tvar`".into()),
            Some(p) => {
                if ch[0].term != d.term {
                    fail("Gen premise has a different term".into());
                }
                if !d.ty.alpha_eq(&Type::Forall(p.clone(), Box::new(ch[0].ty.clone()))) {
                    fail(format!("`{}` is not `forall {p}. {}`", d.ty, ch[0].ty));
                }
                if d.ctx.free_type_vars().contains(p) {
                    fail(format!("`{p}` is free in the context `{}`", d.ctx));
                }
            }
        },
        TypingRule::Inst => match (&d.inst, &ch[0].ty) {
            (None, _) => fail("Inst node without `inst`".into()),
            (Some(sigma), Type::Forall(p, rho)) => {
                if ch[0].term != d.term {
                    fail("Inst premise has a different term".into());
                }
                let expected = rho.subst(p, sigma);
                if !d.ty.alpha_eq(&expected) {
                    fail(format!("`{}` is not `{expected}`", d.ty));
                }
            }
            (Some(_), t) => fail(format!("premise type `{t}` is not universal")),
        },
        TypingRule::TrueI | TypingRule::FalseI | TypingRule::ZeroI => {
            let (co, ty) = match d.rule {
                TypingRule::TrueI => ("T", Type::Boole),
                TypingRule::FalseI => ("F", Type::Boole),
                _ => ("0", Type::Nat),
            };
            if constr_args(co, 0).is_none() {
                fail(format!("term `{}` is not `{co}`", print_term(&d.term)));
            }
            if !d.ty.alpha_eq(&ty) {
                fail(format!("`{co}` has type `{ty}`, not `{}`", d.ty));
            }
        }
        TypingRule::SuccI => {
            match constr_args("S", 1) {
                Some(args) if ch[0].term == args[0] => {}
                _ => fail(format!("term `{}` is not `S` of the premise", print_term(&d.term))),
            }
            if !ch[0].ty.alpha_eq(&Type::Nat) || !d.ty.alpha_eq(&Type::Nat) {
                fail("successor needs `nat` premise and conclusion".into());
            }
        }
        TypingRule::NilI => {
            if constr_args("nil", 0).is_none() {
                fail(format!("term `{}` is not `nil`", print_term(&d.term)));
            }
            if !matches!(d.ty, Type::List(_)) {
                fail(format!("`nil` cannot have type `{}`", d.ty));
            }
        }
        TypingRule::ConsI => {
            match constr_args("cons", 2) {
                Some(args) if ch[0].term == args[0] && ch[1].term == args[1] => {}
                _ => fail(format!("term `{}` is not `cons` of the premises", print_term(&d.term))),
            }
            match &d.ty {
                Type::List(rho) => {
                    if !ch[0].ty.alpha_eq(rho) {
                        fail(format!("head has type `{}`, expected `{rho}`", ch[0].ty));
                    }
                    if !ch[1].ty.alpha_eq(&d.ty) {
                        fail(format!("tail has type `{}`, expected `{}`", ch[1].ty, d.ty));
                    }
                }
                t => fail(format!("`cons` cannot have type `{t}`")),
            }
        }
        TypingRule::PairI => {
            match constr_args("pr", 2) {
                Some(args) if ch[0].term == args[0] && ch[1].term == args[1] => {}
                _ => fail(format!("term `{}` is not `pr` of the premises", print_term(&d.term))),
            }
            match &d.ty {
                Type::Prod(a, b) => {
                    if !ch[0].ty.alpha_eq(a) || !ch[1].ty.alpha_eq(b) {
                        fail(format!(
                            "components have types `{}` and `{}`, expected `{}`",
                            ch[0].ty, ch[1].ty, d.ty
                        ));
                    }
                }
                t => fail(format!("`pr` cannot have type `{t}`")),
            }
        }
    }
}
