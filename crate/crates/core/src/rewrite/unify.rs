use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{Name, Pattern};

/// Most general unifier over constructor patterns.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Unifier(pub BTreeMap<Name, Pattern>);

impl Unifier {
    pub fn get(&self, x: &str) -> Option<&Pattern> {
        self.0.get(x)
    }

    pub fn apply(&self, p: &Pattern) -> Pattern {
        match p {
            Pattern::Var(x) => self.0.get(x).cloned().unwrap_or_else(|| p.clone()),
            Pattern::Constr(co, args) => Pattern::Constr(co.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }
}

impl fmt::Display for Unifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, p)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:={p}")?;
        }
        f.write_str("}")
    }
}

fn occurs(x: &str, p: &Pattern) -> bool {
    match p {
        Pattern::Var(y) => &**y == x,
        Pattern::Constr(_, args) => args.iter().any(|a| occurs(x, a)),
    }
}

/// Unifies two pattern vectors position-wise. The vectors are expected to
/// be renamed apart; the result is idempotent.
pub fn unifiable_patterns(ps: &[Pattern], qs: &[Pattern]) -> Option<Unifier> {
    if ps.len() != qs.len() {
        return None;
    }
    let mut subst = Unifier::default();
    let mut work: Vec<(Pattern, Pattern)> = ps.iter().cloned().zip(qs.iter().cloned()).rev().collect();
    while let Some((a, b)) = work.pop() {
        let a = subst.apply(&a);
        let b = subst.apply(&b);
        match (a, b) {
            (Pattern::Var(x), Pattern::Var(y)) if x == y => {}
            (Pattern::Var(x), other) | (other, Pattern::Var(x)) => {
                if occurs(&x, &other) {
                    return None;
                }
                let single = Unifier(BTreeMap::from([(x.clone(), other.clone())]));
                for v in subst.0.values_mut() {
                    *v = single.apply(v);
                }
                subst.0.insert(x, other);
            }
            (Pattern::Constr(c, xs), Pattern::Constr(d, ys)) => {
                if c != d || xs.len() != ys.len() {
                    return None;
                }
                work.extend(xs.into_iter().zip(ys).rev());
            }
        }
    }
    Some(subst)
}
