use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::{substitute, ConstName, Pattern, Position, Term, TermSubstitution};

use super::system::{Rule, RuleSource};

/// Syntactic matching of a rule's patterns against arguments.
pub fn match_rule(rule: &Rule, args: &[&Term]) -> Option<TermSubstitution> {
    if rule.patterns.len() != args.len() {
        return None;
    }
    let mut sigma = TermSubstitution::new();
    for (p, a) in rule.patterns.iter().zip(args) {
        match_pattern(p, a, &mut sigma)?;
    }
    Some(sigma)
}

fn match_pattern(p: &Pattern, t: &Term, sigma: &mut TermSubstitution) -> Option<()> {
    match (p, t) {
        (Pattern::Var(x), _) => {
            sigma.insert(x.clone(), t.clone());
            Some(())
        }
        (Pattern::Constr(c, ps), Term::Constr(d, ts)) if c == d && ps.len() == ts.len() => {
            for (p, t) in ps.iter().zip(ts) {
                match_pattern(p, t, sigma)?;
            }
            Some(())
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RedexKind {
    Beta,
    Rule { head: ConstName, index: usize },
}

impl fmt::Display for RedexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RedexKind::Beta => f.write_str("beta"),
            RedexKind::Rule { head, index } => write!(f, "{head}[{index}]"),
        }
    }
}

/// One contractible redex and the whole term after contracting it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redex {
    pub position: Position,
    pub kind: RedexKind,
    pub reduct: Term,
}

/// Contracts `t` itself if it is a redex, returning the contractum.
pub fn contract_here<S: RuleSource + ?Sized>(source: &S, t: &Term) -> Option<(RedexKind, Term)> {
    if let Term::App(f, a) = t {
        if let Term::Abs(x, body) = &**f {
            let sigma = TermSubstitution::single(x, (**a).clone());
            return Some((RedexKind::Beta, substitute(body, &sigma)));
        }
    }
    let (head, args) = t.spine();
    let Term::Const(c) = head else {
        return None;
    };
    if source.constant_arity(c) != Some(args.len()) {
        return None;
    }
    let rules = source.rules_for(c);
    rules.iter().enumerate().find_map(|(index, rule)| {
        match_rule(rule, &args).map(|sigma| {
            (
                RedexKind::Rule { head: c.clone(), index },
                substitute(&rule.rhs, &sigma),
            )
        })
    })
}

/// Contracts the redex at `pos`, returning the kind and the whole new term.
pub fn contract_at<S: RuleSource + ?Sized>(source: &S, term: &Term, pos: &Position) -> Option<(RedexKind, Term)> {
    let sub = term.subterm(pos)?;
    let (kind, contractum) = contract_here(source, sub)?;
    Some((kind, term.replace_at(pos, contractum)?))
}

/// All redexes in pre-order (outermost first, left to right).
pub fn redexes<S: RuleSource + ?Sized>(source: &S, term: &Term) -> Vec<Redex> {
    let mut found = Vec::new();
    collect_positions(source, term, Position::root(), &mut found);
    found
        .into_iter()
        .map(|(position, kind, contractum)| {
            let reduct = term
                .replace_at(&position, contractum)
                .expect("redex position comes from traversal");
            Redex { position, kind, reduct }
        })
        .collect()
}

fn collect_positions<S: RuleSource + ?Sized>(
    source: &S,
    t: &Term,
    pos: Position,
    out: &mut Vec<(Position, RedexKind, Term)>,
) {
    if let Some((kind, contractum)) = contract_here(source, t) {
        out.push((pos.clone(), kind, contractum));
    }
    for (i, child) in t.children().into_iter().enumerate() {
        collect_positions(source, child, pos.child(i), out);
    }
}

pub fn is_normal<S: RuleSource + ?Sized>(source: &S, term: &Term) -> bool {
    find_outermost(source, term, Position::root()).is_none()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    #[default]
    LeftmostOutermost,
    LeftmostInnermost,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "leftmost-outermost" | "lo" | "outermost" => Ok(Strategy::LeftmostOutermost),
            "leftmost-innermost" | "li" | "innermost" => Ok(Strategy::LeftmostInnermost),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

fn find_outermost<S: RuleSource + ?Sized>(source: &S, t: &Term, pos: Position) -> Option<(Position, RedexKind, Term)> {
    if let Some((kind, c)) = contract_here(source, t) {
        return Some((pos, kind, c));
    }
    t.children()
        .into_iter()
        .enumerate()
        .find_map(|(i, child)| find_outermost(source, child, pos.child(i)))
}

fn find_innermost<S: RuleSource + ?Sized>(source: &S, t: &Term, pos: Position) -> Option<(Position, RedexKind, Term)> {
    let inner = t
        .children()
        .into_iter()
        .enumerate()
        .find_map(|(i, child)| find_innermost(source, child, pos.child(i)));
    inner.or_else(|| contract_here(source, t).map(|(kind, c)| (pos, kind, c)))
}

/// The redex a strategy contracts next, with the resulting whole term.
pub fn strategy_step<S: RuleSource + ?Sized>(source: &S, term: &Term, strategy: Strategy) -> Option<Redex> {
    let found = match strategy {
        Strategy::LeftmostOutermost => find_outermost(source, term, Position::root()),
        Strategy::LeftmostInnermost => find_innermost(source, term, Position::root()),
    }?;
    let (position, kind, contractum) = found;
    let reduct = term.replace_at(&position, contractum)?;
    Some(Redex { position, kind, reduct })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalizeOutcome {
    NormalForm { term: Term, steps: usize },
    Timeout { last: Term, steps: usize },
}

impl NormalizeOutcome {
    pub fn normal_form(&self) -> Option<&Term> {
        match self {
            NormalizeOutcome::NormalForm { term, .. } => Some(term),
            NormalizeOutcome::Timeout { .. } => None,
        }
    }

    pub fn steps(&self) -> usize {
        match self {
            NormalizeOutcome::NormalForm { steps, .. } | NormalizeOutcome::Timeout { steps, .. } => *steps,
        }
    }
}

pub fn normalize<S: RuleSource + ?Sized>(
    source: &S,
    term: &Term,
    strategy: Strategy,
    step_budget: usize,
) -> NormalizeOutcome {
    normalize_traced(source, term, strategy, step_budget, |_| {})
}

/// Like [`normalize`], reporting each step taken.
pub fn normalize_traced<S: RuleSource + ?Sized>(
    source: &S,
    term: &Term,
    strategy: Strategy,
    step_budget: usize,
    mut on_step: impl FnMut(&Redex),
) -> NormalizeOutcome {
    let mut current = term.clone();
    let mut steps = 0;
    loop {
        let Some(step) = strategy_step(source, &current, strategy) else {
            return NormalizeOutcome::NormalForm { term: current, steps };
        };
        if steps == step_budget {
            return NormalizeOutcome::Timeout { last: current, steps };
        }
        on_step(&step);
        current = step.reduct;
        steps += 1;
    }
}
