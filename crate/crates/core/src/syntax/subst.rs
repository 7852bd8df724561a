use std::collections::{BTreeMap, BTreeSet};

use super::term::{name, ConstName, Name, Term};
use super::SyntaxError;

/// Simultaneous substitution of terms for variables.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TermSubstitution(BTreeMap<Name, Term>);

impl TermSubstitution {
    pub fn new() -> Self {
        TermSubstitution(BTreeMap::new())
    }

    pub fn single(x: &str, t: Term) -> Self {
        let mut s = Self::new();
        s.insert(name(x), t);
        s
    }

    pub fn insert(&mut self, x: Name, t: Term) -> Option<Term> {
        self.0.insert(x, t)
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.0.keys()
    }

    fn without(&self, x: &str) -> TermSubstitution {
        let mut m = self.0.clone();
        m.remove(x);
        TermSubstitution(m)
    }
}

impl FromIterator<(Name, Term)> for TermSubstitution {
    fn from_iter<I: IntoIterator<Item = (Name, Term)>>(iter: I) -> Self {
        TermSubstitution(iter.into_iter().collect())
    }
}

/// First of `x'`, `x''`, ... not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Name>) -> Name {
    let mut candidate = format!("{base}'");
    while avoid.contains(candidate.as_str()) {
        candidate.push('\'');
    }
    name(&candidate)
}

/// Capture-avoiding simultaneous substitution.
pub fn substitute(term: &Term, subst: &TermSubstitution) -> Term {
    if subst.is_empty() {
        return term.clone();
    }
    match term {
        Term::Var(x) => subst.get(x).cloned().unwrap_or_else(|| term.clone()),
        Term::Constr(co, args) => Term::Constr(co.clone(), args.iter().map(|a| substitute(a, subst)).collect()),
        Term::Const(_) => term.clone(),
        Term::App(f, a) => Term::app(substitute(f, subst), substitute(a, subst)),
        Term::Abs(x, body) => {
            let inner = subst.without(x);
            let body_fv = body.free_vars();
            let relevant: TermSubstitution = inner
                .iter()
                .filter(|(y, _)| body_fv.contains(*y))
                .map(|(y, t)| (y.clone(), t.clone()))
                .collect();
            if relevant.is_empty() {
                return term.clone();
            }
            let image_fv: BTreeSet<Name> = relevant.iter().flat_map(|(_, t)| t.free_vars()).collect();
            if image_fv.contains(x) {
                let mut avoid = image_fv;
                avoid.extend(body_fv);
                avoid.extend(relevant.domain().cloned());
                let fresh = fresh_name(x, &avoid);
                let mut renamed = relevant;
                renamed.insert(x.clone(), Term::Var(fresh.clone()));
                Term::Abs(fresh, Box::new(substitute(body, &renamed)))
            } else {
                Term::Abs(x.clone(), Box::new(substitute(body, &relevant)))
            }
        }
    }
}

/// Renaming of constants, e.g. `c ↦ c#n`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ConstSubstitution(BTreeMap<ConstName, ConstName>);

impl ConstSubstitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, from: ConstName, to: ConstName) {
        self.0.insert(from, to);
    }

    pub fn get(&self, c: &ConstName) -> Option<&ConstName> {
        self.0.get(c)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ConstName, &ConstName)> {
        self.0.iter()
    }

    pub fn identity_on(consts: impl IntoIterator<Item = ConstName>) -> Self {
        ConstSubstitution(consts.into_iter().map(|c| (c.clone(), c)).collect())
    }
}

impl FromIterator<(ConstName, ConstName)> for ConstSubstitution {
    fn from_iter<I: IntoIterator<Item = (ConstName, ConstName)>>(iter: I) -> Self {
        ConstSubstitution(iter.into_iter().collect())
    }
}

/// `M θ`: every constant replaced by its image under `theta`.
pub fn apply_const_subst(term: &Term, theta: &ConstSubstitution) -> Result<Term, SyntaxError> {
    term.map_consts(&mut |c| {
        theta
            .get(c)
            .cloned()
            .ok_or_else(|| SyntaxError::UnmappedConstant(c.to_string()))
    })
}
