use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Identifier for variables, constructors and constant bases.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// A constant, optionally carrying a stratification level (`get#3`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ConstName {
    base: Name,
    level: Option<u32>,
}

impl ConstName {
    pub fn new(base: &str) -> Self {
        ConstName {
            base: name(base),
            level: None,
        }
    }

    pub fn leveled(base: &str, level: u32) -> Self {
        ConstName {
            base: name(base),
            level: Some(level),
        }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn base_name(&self) -> &Name {
        &self.base
    }

    pub fn level(&self) -> Option<u32> {
        self.level
    }

    pub fn at_level(&self, level: u32) -> ConstName {
        ConstName {
            base: self.base.clone(),
            level: Some(level),
        }
    }

    pub fn erased(&self) -> ConstName {
        ConstName {
            base: self.base.clone(),
            level: None,
        }
    }
}

impl fmt::Display for ConstName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.level {
            Some(n) => write!(f, "{}#{}", self.base, n),
            None => f.write_str(&self.base),
        }
    }
}

impl Serialize for ConstName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ConstName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        match text.split_once('#') {
            Some((base, lvl)) => {
                let level = lvl.parse::<u32>().map_err(serde::de::Error::custom)?;
                Ok(ConstName::leveled(base, level))
            }
            None => Ok(ConstName::new(&text)),
        }
    }
}

/// Untyped λ-terms with constructors and constants.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Var(Name),
    Constr(Name, Vec<Term>),
    Const(ConstName),
    Abs(Name, Box<Term>),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(name(x))
    }

    pub fn konst(c: &str) -> Term {
        Term::Const(ConstName::new(c))
    }

    pub fn constr(co: &str, args: Vec<Term>) -> Term {
        Term::Constr(name(co), args)
    }

    pub fn abs(x: &str, body: Term) -> Term {
        Term::Abs(name(x), Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn numeral(n: usize) -> Term {
        (0..n).fold(Term::constr("0", vec![]), |t, _| Term::constr("S", vec![t]))
    }

    pub fn list(items: impl IntoIterator<Item = Term>) -> Term {
        let items: Vec<Term> = items.into_iter().collect();
        items.into_iter().rev().fold(Term::constr("nil", vec![]), |tail, x| {
            Term::constr("cons", vec![x, tail])
        })
    }

    /// `S^n(0)` as `Some(n)`.
    pub fn as_numeral(&self) -> Option<usize> {
        let mut n = 0;
        let mut t = self;
        loop {
            match t {
                Term::Constr(c, args) if &**c == "0" && args.is_empty() => return Some(n),
                Term::Constr(c, args) if &**c == "S" && args.len() == 1 => {
                    n += 1;
                    t = &args[0];
                }
                _ => return None,
            }
        }
    }

    /// Elements of a `cons`/`nil` chain ending in `nil`.
    pub fn as_list(&self) -> Option<Vec<&Term>> {
        let mut items = Vec::new();
        let mut t = self;
        loop {
            match t {
                Term::Constr(c, args) if &**c == "nil" && args.is_empty() => return Some(items),
                Term::Constr(c, args) if &**c == "cons" && args.len() == 2 => {
                    items.push(&args[0]);
                    t = &args[1];
                }
                _ => return None,
            }
        }
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App(f, a) = t {
            args.push(&**a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn is_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => &**y == x,
            Term::Constr(_, args) => args.iter().any(|a| a.is_free(x)),
            Term::Const(_) => false,
            Term::Abs(y, body) => &**y != x && body.is_free(x),
            Term::App(f, a) => f.is_free(x) || a.is_free(x),
        }
    }

    /// All variable names, free or bound.
    pub fn all_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Constr(_, args) => args.iter().for_each(|a| a.all_vars(out)),
            Term::Const(_) => {}
            Term::Abs(x, body) => {
                out.insert(x.clone());
                body.all_vars(out);
            }
            Term::App(f, a) => {
                f.all_vars(out);
                a.all_vars(out);
            }
        }
    }

    pub fn constants(&self) -> BTreeSet<ConstName> {
        let mut out = BTreeSet::new();
        self.visit_consts(&mut |c| {
            out.insert(c.clone());
        });
        out
    }

    fn visit_consts(&self, f: &mut impl FnMut(&ConstName)) {
        match self {
            Term::Var(_) => {}
            Term::Constr(_, args) => args.iter().for_each(|a| a.visit_consts(f)),
            Term::Const(c) => f(c),
            Term::Abs(_, body) => body.visit_consts(f),
            Term::App(a, b) => {
                a.visit_consts(f);
                b.visit_consts(f);
            }
        }
    }

    /// Rebuilds the term with every constant passed through `f`.
    pub fn map_consts<E>(&self, f: &mut impl FnMut(&ConstName) -> Result<ConstName, E>) -> Result<Term, E> {
        Ok(match self {
            Term::Var(x) => Term::Var(x.clone()),
            Term::Constr(co, args) => Term::Constr(
                co.clone(),
                args.iter().map(|a| a.map_consts(f)).collect::<Result<_, _>>()?,
            ),
            Term::Const(c) => Term::Const(f(c)?),
            Term::Abs(x, body) => Term::Abs(x.clone(), Box::new(body.map_consts(f)?)),
            Term::App(a, b) => Term::App(Box::new(a.map_consts(f)?), Box::new(b.map_consts(f)?)),
        })
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::Constr(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::Abs(_, body) => 1 + body.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) | Term::Const(_) => vec![],
            Term::Constr(_, args) => args.iter().collect(),
            Term::Abs(_, body) => vec![&**body],
            Term::App(f, a) => vec![&**f, &**a],
        }
    }

    pub fn subterm(&self, pos: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in &pos.0 {
            t = *t.children().get(i)?;
        }
        Some(t)
    }

    /// Replaces the subterm at `pos`; `None` if the position does not exist.
    pub fn replace_at(&self, pos: &Position, new: Term) -> Option<Term> {
        replace_rec(self, &pos.0, new)
    }

    /// Nameless form: bound variables become binder distances, free
    /// variables keep their names.
    pub fn canonical(&self) -> Canon {
        let mut scope = Vec::new();
        canon_rec(self, &mut scope)
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.canonical() == other.canonical()
    }
}

fn collect_free(t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Constr(_, args) => args.iter().for_each(|a| collect_free(a, bound, out)),
        Term::Const(_) => {}
        Term::Abs(x, body) => {
            bound.push(x.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        Term::App(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
    }
}

fn replace_rec(t: &Term, path: &[usize], new: Term) -> Option<Term> {
    let Some((&i, rest)) = path.split_first() else {
        return Some(new);
    };
    match t {
        Term::Constr(co, args) if i < args.len() => {
            let mut args = args.clone();
            args[i] = replace_rec(&args[i], rest, new)?;
            Some(Term::Constr(co.clone(), args))
        }
        Term::Abs(x, body) if i == 0 => Some(Term::Abs(x.clone(), Box::new(replace_rec(body, rest, new)?))),
        Term::App(f, a) if i == 0 => Some(Term::App(Box::new(replace_rec(f, rest, new)?), a.clone())),
        Term::App(f, a) if i == 1 => Some(Term::App(f.clone(), Box::new(replace_rec(a, rest, new)?))),
        _ => None,
    }
}

/// Canonical nameless representation used for α-equality and hashing.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Canon {
    Free(Name),
    Bound(u32),
    Constr(Name, Vec<Canon>),
    Const(ConstName),
    Abs(Box<Canon>),
    App(Box<Canon>, Box<Canon>),
}

fn canon_rec(t: &Term, scope: &mut Vec<Name>) -> Canon {
    match t {
        Term::Var(x) => match scope.iter().rev().position(|y| y == x) {
            Some(i) => Canon::Bound(i as u32),
            None => Canon::Free(x.clone()),
        },
        Term::Constr(co, args) => Canon::Constr(co.clone(), args.iter().map(|a| canon_rec(a, scope)).collect()),
        Term::Const(c) => Canon::Const(c.clone()),
        Term::Abs(x, body) => {
            scope.push(x.clone());
            let b = canon_rec(body, scope);
            scope.pop();
            Canon::Abs(Box::new(b))
        }
        Term::App(f, a) => Canon::App(Box::new(canon_rec(f, scope)), Box::new(canon_rec(a, scope))),
    }
}

/// Path to a subterm. Constructor arguments are numbered from 0; the body
/// of an abstraction is child 0; an application has function 0 and
/// argument 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn child(&self, i: usize) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

impl std::str::FromStr for Position {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "root" || s.is_empty() {
            return Ok(Position::root());
        }
        s.split('.')
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

/// Constructor patterns: variables and constructors only.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Pattern {
    Var(Name),
    Constr(Name, Vec<Pattern>),
}

impl Pattern {
    pub fn var(x: &str) -> Pattern {
        Pattern::Var(name(x))
    }

    pub fn constr(co: &str, args: Vec<Pattern>) -> Pattern {
        Pattern::Constr(name(co), args)
    }

    /// Variables in left-to-right order, repetitions kept.
    pub fn vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Name>) {
        match self {
            Pattern::Var(x) => out.push(x.clone()),
            Pattern::Constr(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn constructor_count(&self) -> usize {
        match self {
            Pattern::Var(_) => 0,
            Pattern::Constr(_, args) => 1 + args.iter().map(Pattern::constructor_count).sum::<usize>(),
        }
    }

    pub fn to_term(&self) -> Term {
        match self {
            Pattern::Var(x) => Term::Var(x.clone()),
            Pattern::Constr(co, args) => Term::Constr(co.clone(), args.iter().map(Pattern::to_term).collect()),
        }
    }

    /// Reads a term back as a pattern, if it only uses variables and constructors.
    pub fn from_term(t: &Term) -> Option<Pattern> {
        match t {
            Term::Var(x) => Some(Pattern::Var(x.clone())),
            Term::Constr(co, args) => Some(Pattern::Constr(
                co.clone(),
                args.iter().map(Pattern::from_term).collect::<Option<_>>()?,
            )),
            _ => None,
        }
    }

    pub fn rename(&self, f: &impl Fn(&Name) -> Name) -> Pattern {
        match self {
            Pattern::Var(x) => Pattern::Var(f(x)),
            Pattern::Constr(co, args) => Pattern::Constr(co.clone(), args.iter().map(|a| a.rename(f)).collect()),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::print_term(&self.to_term()))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::print_term(self))
    }
}
