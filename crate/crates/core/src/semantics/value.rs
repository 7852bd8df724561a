use std::fmt;
use std::sync::Arc;

use crate::syntax::{ConstName, Name, Pattern, Term};

use super::observe::observe;

/// An element of the approximated strict domain.
#[derive(Clone, Debug)]
pub enum Value {
    Bot,
    /// Arguments are never `Bot`.
    Constr(Name, Vec<Value>),
    Fun(Arc<Closure>),
    /// A constant applied to fewer arguments than its arity.
    ConstFun(Arc<ConstApp>),
    /// The element with `dummy = abst(λa. dummy)`.
    Dummy,
}

#[derive(Debug)]
pub struct Closure {
    pub var: Name,
    pub body: Term,
    pub env: Env,
    pub level: u32,
}

#[derive(Debug)]
pub struct ConstApp {
    pub name: ConstName,
    pub level: u32,
    pub args: Vec<Value>,
}

impl Value {
    pub fn constr(co: &str, args: Vec<Value>) -> Value {
        if args.iter().any(Value::is_bot) {
            return Value::Bot;
        }
        Value::Constr(Arc::from(co), args)
    }

    pub fn numeral(n: usize) -> Value {
        (0..n).fold(Value::constr("0", vec![]), |v, _| Value::constr("S", vec![v]))
    }

    /// Literally `Bot`; says nothing about function values.
    pub fn is_bot(&self) -> bool {
        matches!(self, Value::Bot)
    }

    /// Reads back a ground constructor value as a term.
    pub fn to_ground_term(&self) -> Option<Term> {
        match self {
            Value::Constr(co, args) => Some(Term::Constr(
                co.clone(),
                args.iter().map(Value::to_ground_term).collect::<Option<_>>()?,
            )),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", observe(self, usize::MAX))
    }
}

/// A persistent environment.
#[derive(Clone, Debug, Default)]
pub struct Env(Option<Arc<EnvNode>>);

#[derive(Debug)]
struct EnvNode {
    name: Name,
    value: Value,
    next: Env,
}

impl Env {
    pub fn new() -> Self {
        Env(None)
    }

    pub fn extend(&self, name: Name, value: Value) -> Env {
        Env(Some(Arc::new(EnvNode {
            name,
            value,
            next: self.clone(),
        })))
    }

    pub fn lookup(&self, x: &str) -> Option<&Value> {
        let mut cur = self;
        while let Some(node) = &cur.0 {
            if &*node.name == x {
                return Some(&node.value);
            }
            cur = &node.next;
        }
        None
    }

    /// Bindings, innermost first, shadowed ones omitted.
    pub fn bindings(&self) -> Vec<(Name, Value)> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        let mut cur = self;
        while let Some(node) = &cur.0 {
            if seen.insert(node.name.clone()) {
                out.push((node.name.clone(), node.value.clone()));
            }
            cur = &node.next;
        }
        out
    }

    pub fn from_bindings(bindings: impl IntoIterator<Item = (Name, Value)>) -> Env {
        bindings.into_iter().fold(Env::new(), |env, (x, v)| env.extend(x, v))
    }
}

#[derive(Clone, Debug)]
pub enum MatchResult {
    Matched(Env),
    NoMatch,
    Undetermined,
}

impl MatchResult {
    pub fn is_matched(&self) -> bool {
        matches!(self, MatchResult::Matched(_))
    }
}

/// The pattern inverse: scans the leftmost constructor pattern first and
/// descends into its arguments on agreement.
pub fn pat_inverse(patterns: &[Pattern], values: &[Value]) -> MatchResult {
    assert_eq!(patterns.len(), values.len(), "pattern and value counts differ");
    let mut env = Env::new();
    let mut work: Vec<(&Pattern, &Value)> = patterns.iter().zip(values).rev().collect();
    while let Some((p, v)) = work.pop() {
        match p {
            Pattern::Var(x) => env = env.extend(x.clone(), v.clone()),
            Pattern::Constr(co, ps) => match v {
                Value::Constr(d, vs) if d == co && vs.len() == ps.len() => {
                    work.extend(ps.iter().zip(vs).rev());
                }
                Value::Bot => return MatchResult::Undetermined,
                _ => return MatchResult::NoMatch,
            },
        }
    }
    MatchResult::Matched(env)
}
