use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::syntax::{fresh_name, print_term, ConstName, Name, Pattern, Signature, SyntaxError, Term};

use super::unify::{unifiable_patterns, Unifier};

/// A rewrite rule `c P₁ … Pₙ ↦ R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: ConstName,
    pub patterns: Vec<Pattern>,
    pub rhs: Term,
}

impl Rule {
    pub fn new(head: ConstName, patterns: Vec<Pattern>, rhs: Term) -> Self {
        Rule { head, patterns, rhs }
    }

    /// The left-hand side as a term.
    pub fn lhs(&self) -> Term {
        Term::apps(
            Term::Const(self.head.clone()),
            self.patterns.iter().map(Pattern::to_term),
        )
    }

    /// Pattern variables in left-to-right order.
    pub fn lhs_vars(&self) -> Vec<Name> {
        self.patterns.iter().flat_map(Pattern::vars).collect()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for p in &self.patterns {
            write!(f, " {p}")?;
        }
        write!(f, " -> {}", print_term(&self.rhs))
    }
}

/// Anything that can supply rules for constants: a finite validated
/// system, or the lazily generated stratified system.
pub trait RuleSource {
    fn signature(&self) -> &Signature;

    /// Rules whose head is exactly `c`, in declaration order.
    fn rules_for(&self, c: &ConstName) -> Arc<[Rule]>;

    fn constant_arity(&self, c: &ConstName) -> Option<usize> {
        self.signature().constant_arity(c)
    }
}

/// A validated rewrite system.
#[derive(Clone, Debug)]
pub struct RewriteSystem {
    sig: Signature,
    rules: Vec<Rule>,
    by_head: BTreeMap<ConstName, Arc<[Rule]>>,
}

impl RewriteSystem {
    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Every constant that heads a rule.
    pub fn defined_constants(&self) -> impl Iterator<Item = &ConstName> {
        self.by_head.keys()
    }

    /// Declared constants (unleveled) plus any leveled rule heads.
    pub fn constants(&self) -> BTreeSet<ConstName> {
        let mut out: BTreeSet<ConstName> = self.sig.constants().map(|(c, _)| ConstName::new(c)).collect();
        out.extend(self.by_head.keys().cloned());
        out
    }

    /// Index of a rule in declaration order.
    pub fn rule_index(&self, rule: &Rule) -> Option<usize> {
        self.rules.iter().position(|r| r == rule)
    }

    /// Renders the system in the `.rwl` file format.
    pub fn to_rwl(&self) -> String {
        let builtin: BTreeSet<&str> = crate::syntax::BUILTIN_CONSTRUCTORS.iter().map(|(c, _)| *c).collect();
        let mut out = String::new();
        for (co, k) in self.sig.constructors() {
            if !builtin.contains(&**co) {
                out.push_str(&format!("constructor {co}/{k};\n"));
            }
        }
        for (c, k) in self.sig.constants() {
            out.push_str(&format!("const {c}/{k};\n"));
        }
        for r in &self.rules {
            out.push_str(&format!("{r};\n"));
        }
        out
    }
}

impl RuleSource for RewriteSystem {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn rules_for(&self, c: &ConstName) -> Arc<[Rule]> {
        self.by_head.get(c).cloned().unwrap_or_else(|| Arc::from(Vec::new()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    UnknownHead(String),
    ArityMismatch { expected: usize, found: usize },
    IllFormedPattern(SyntaxError),
    IllFormedRhs(SyntaxError),
    NonLinear { var: Name },
    SharedVariable { var: Name, first: usize, second: usize },
    UnboundRhsVariable { var: Name },
    Unifiable { other: usize, unifier: Unifier },
}

/// A reason a rule set is not a valid rewrite system, tied to a rule index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}: ", self.rule)?;
        match &self.kind {
            ViolationKind::UnknownHead(c) => write!(f, "head `{c}` is not a declared constant"),
            ViolationKind::ArityMismatch { expected, found } => {
                write!(f, "head has arity {expected} but the rule gives {found} pattern(s)")
            }
            ViolationKind::IllFormedPattern(e) => write!(f, "ill-formed pattern: {e}"),
            ViolationKind::IllFormedRhs(e) => write!(f, "ill-formed right-hand side: {e}"),
            ViolationKind::NonLinear { var } => write!(f, "non-linear: variable `{var}` occurs twice"),
            ViolationKind::SharedVariable { var, first, second } => {
                write!(f, "patterns {first} and {second} share variable `{var}`")
            }
            ViolationKind::UnboundRhsVariable { var } => {
                write!(f, "right-hand side variable `{var}` does not occur on the left")
            }
            ViolationKind::Unifiable { other, unifier } => {
                write!(f, "left-hand side unifies with rule {other} via {unifier}")
            }
        }
    }
}

/// Checks every rule against the signature and the pattern discipline and
/// returns either the system or all violations found.
pub fn validate_system(sig: Signature, rules: Vec<Rule>) -> Result<RewriteSystem, Vec<Violation>> {
    let mut violations = Vec::new();
    for (i, rule) in rules.iter().enumerate() {
        check_rule(&sig, i, rule, &mut violations);
    }
    for (i, a) in rules.iter().enumerate() {
        for (j, b) in rules.iter().enumerate().skip(i + 1) {
            if a.head != b.head || a.patterns.len() != b.patterns.len() {
                continue;
            }
            let (qs, _) = rename_apart(&a.patterns, &b.patterns);
            if let Some(unifier) = unifiable_patterns(&a.patterns, &qs) {
                violations.push(Violation {
                    rule: j,
                    kind: ViolationKind::Unifiable { other: i, unifier },
                });
            }
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }
    let mut grouped: BTreeMap<ConstName, Vec<Rule>> = BTreeMap::new();
    for r in &rules {
        grouped.entry(r.head.clone()).or_default().push(r.clone());
    }
    Ok(RewriteSystem {
        sig,
        rules,
        by_head: grouped.into_iter().map(|(k, v)| (k, Arc::from(v))).collect(),
    })
}

fn check_rule(sig: &Signature, i: usize, rule: &Rule, out: &mut Vec<Violation>) {
    let mut push = |kind| out.push(Violation { rule: i, kind });
    match sig.constant_arity(&rule.head) {
        None => push(ViolationKind::UnknownHead(rule.head.to_string())),
        Some(k) if k != rule.patterns.len() => push(ViolationKind::ArityMismatch {
            expected: k,
            found: rule.patterns.len(),
        }),
        Some(_) => {}
    }
    for p in &rule.patterns {
        if let Err(e) = sig.check_pattern(p) {
            push(ViolationKind::IllFormedPattern(e));
        }
    }
    if let Err(e) = sig.check_term(&rule.rhs) {
        push(ViolationKind::IllFormedRhs(e));
    }
    let mut owner: BTreeMap<Name, usize> = BTreeMap::new();
    let mut reported = BTreeSet::new();
    for (pi, p) in rule.patterns.iter().enumerate() {
        for x in p.vars() {
            match owner.get(&x) {
                Some(&first) => {
                    if reported.insert(x.clone()) {
                        push(ViolationKind::NonLinear { var: x.clone() });
                    }
                    if first != pi {
                        push(ViolationKind::SharedVariable {
                            var: x.clone(),
                            first,
                            second: pi,
                        });
                    }
                }
                None => {
                    owner.insert(x, pi);
                }
            }
        }
    }
    for x in rule.rhs.free_vars() {
        if !owner.contains_key(&x) {
            push(ViolationKind::UnboundRhsVariable { var: x });
        }
    }
}

/// Renames variables of `qs` that clash with those of `ps`.
fn rename_apart(ps: &[Pattern], qs: &[Pattern]) -> (Vec<Pattern>, BTreeMap<Name, Name>) {
    let mut taken: BTreeSet<Name> = ps.iter().flat_map(Pattern::vars).collect();
    taken.extend(qs.iter().flat_map(Pattern::vars));
    let left: BTreeSet<Name> = ps.iter().flat_map(Pattern::vars).collect();
    let mut renaming = BTreeMap::new();
    for x in qs.iter().flat_map(Pattern::vars) {
        if left.contains(&x) && !renaming.contains_key(&x) {
            let fresh = fresh_name(&x, &taken);
            taken.insert(fresh.clone());
            renaming.insert(x, fresh);
        }
    }
    let renamed = qs
        .iter()
        .map(|q| q.rename(&|x: &Name| renaming.get(x).cloned().unwrap_or_else(|| x.clone())))
        .collect();
    (renamed, renaming)
}
