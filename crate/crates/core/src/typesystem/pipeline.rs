use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use crate::rewrite::{sn_search, RewriteSystem, Rule, RuleSource, SnVerdict};
use crate::semantics::{eval_term, observe, Env, EvalOutcome};
use crate::syntax::{ConstName, Name, Signature, Term};

use super::derivation::{check_derivation, check_f_derivation, ConstTyping, Derivation, DerivationFormatError};
use super::types::{parse_type, Type};

/// Evidence that a rule preserves the type `ty` of its abstracted sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleEvidence {
    pub ty: Type,
    pub lhs: Derivation,
    pub rhs: Derivation,
}

impl RuleEvidence {
    pub fn to_json(&self, rule: Option<&Rule>) -> Json {
        let mut v = json!({
            "type": self.ty.to_string(),
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
        });
        if let Some(r) = rule {
            v["rule"] = json!(r.to_string());
        }
        v
    }

    pub fn from_json(v: &Json, sig: &Signature) -> Result<RuleEvidence, DerivationFormatError> {
        let err = |m: &str| DerivationFormatError { message: m.to_string() };
        let ty = v
            .get("type")
            .and_then(Json::as_str)
            .ok_or_else(|| err("evidence needs a `type`"))?;
        let ty = parse_type(ty).map_err(|e| err(&e.to_string()))?;
        let lhs = Derivation::from_json(v.get("lhs").ok_or_else(|| err("evidence needs `lhs`"))?, sig)?;
        let rhs = Derivation::from_json(v.get("rhs").ok_or_else(|| err("evidence needs `rhs`"))?, sig)?;
        Ok(RuleEvidence { ty, lhs, rhs })
    }

    /// Evidence for the stratified copy `c#(n+1) P⃗ ↦ R⁽ⁿ⁾` of the rule.
    pub fn lift_to_level(&self, n: u32) -> RuleEvidence {
        RuleEvidence {
            ty: self.ty.clone(),
            lhs: self.lhs.map_constants(&mut |c| c.at_level(n + 1)),
            rhs: self.rhs.map_constants(&mut |c| c.at_level(n)),
        }
    }
}

pub fn evidence_from_json(v: &Json, sig: &Signature) -> Result<Vec<RuleEvidence>, DerivationFormatError> {
    v.as_array()
        .ok_or_else(|| DerivationFormatError {
            message: "evidence must be an array".into(),
        })?
        .iter()
        .map(|e| RuleEvidence::from_json(e, sig))
        .collect()
}

/// `λx⃗. t` over the rule's pattern variables.
pub fn abstract_over_vars(rule: &Rule, t: Term) -> Term {
    rule.lhs_vars()
        .into_iter()
        .rev()
        .fold(t, |b, x| Term::Abs(x, Box::new(b)))
}

/// A rule checked type-sound at a (possibly schematic) type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleSoundness {
    pub rule: String,
    #[serde(rename = "type")]
    pub ty: String,
    /// Free type variables of the type; the check covers all closed instances.
    pub schematic: Vec<String>,
}

/// Checks that `lhs` derives `Δ ⊢ λx⃗.L : ρ` and `rhs` derives `Δ ⊢ λx⃗.R : ρ`.
pub fn check_rule_type_sound(
    delta: &ConstTyping,
    rule: &Rule,
    rho: &Type,
    lhs: &Derivation,
    rhs: &Derivation,
) -> Result<RuleSoundness, Vec<String>> {
    let mut problems = Vec::new();
    let want_l = abstract_over_vars(rule, rule.lhs());
    let want_r = abstract_over_vars(rule, rule.rhs.clone());
    for (side, d, want) in [("lhs", lhs, &want_l), ("rhs", rhs, &want_r)] {
        if d.term != *want {
            problems.push(format!("{side} derivation is for `{}`, expected `{want}`", d.term));
        }
        if !d.ctx.is_empty() {
            problems.push(format!("{side} derivation has a non-empty context"));
        }
        if !d.ty.alpha_eq(rho) {
            problems.push(format!("{side} derivation has type `{}`, expected `{rho}`", d.ty));
        }
        if let Err(vs) = check_derivation(delta, d) {
            problems.extend(vs.iter().map(|v| format!("{side}: {v}")));
        }
    }
    if problems.is_empty() {
        Ok(RuleSoundness {
            rule: rule.to_string(),
            ty: rho.to_string(),
            schematic: rho.free_vars().iter().map(|p| p.to_string()).collect(),
        })
    } else {
        Err(problems)
    }
}

/// How a constant's totality is vouched for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Attestation {
    PrimitiveRecursive,
    ModifiedBarRecursion,
    UserAttested { note: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TotalityAttestation(pub BTreeMap<String, Attestation>);

impl TotalityAttestation {
    pub fn get(&self, c: &str) -> Option<&Attestation> {
        self.0.get(c)
    }

    pub fn insert(&mut self, c: &str, a: Attestation) {
        self.0.insert(c.to_string(), a);
    }

    pub fn remove(&mut self, c: &str) -> Option<Attestation> {
        self.0.remove(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Premise {
    Typeability,
    TypeSoundness,
    Totality,
}

impl fmt::Display for Premise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Premise::Typeability => "typeability of the term",
            Premise::TypeSoundness => "type soundness of the rules",
            Premise::Totality => "totality of the constants",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Refusal {
    pub premise: Premise,
    pub reasons: Vec<String>,
}

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "refused: {} not established", self.premise)?;
        for r in &self.reasons {
            write!(f, "\n  {r}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PremiseRecord {
    pub premise: Premise,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum CrossCheck {
    SnSearch {
        verdict: String,
        states: usize,
        consistent: bool,
    },
    Eval {
        level: u32,
        observation: String,
        non_bot: bool,
    },
}

/// Strong normalisation of `term`, with the premises it rests on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub term: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub premises: Vec<PremiseRecord>,
    pub rules: Vec<RuleSoundness>,
    pub basis: String,
    pub cross_checks: Vec<CrossCheck>,
}

pub const CERTIFICATE_BASIS: &str = "A closed term typeable in a strongly normalising type system is strongly \
normalising with respect to a type-sound rewrite system whose constants denote total elements. \
Schematic type variables in rule evidence stand for every closed instance.";

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "certificate: {} : {} is strongly normalising", self.term, self.ty)?;
        for p in &self.premises {
            writeln!(f, "  [{}] {}", p.premise, p.detail)?;
        }
        for c in &self.cross_checks {
            match c {
                CrossCheck::SnSearch {
                    verdict,
                    states,
                    consistent,
                } => writeln!(
                    f,
                    "  cross-check sn search: {verdict} after {states} states (consistent: {consistent})"
                )?,
                CrossCheck::Eval {
                    level,
                    observation,
                    non_bot,
                } => writeln!(
                    f,
                    "  cross-check eval at level {level}: {observation} (non-bot: {non_bot})"
                )?,
            }
        }
        write!(f, "  basis: {}", self.basis)
    }
}

pub struct PipelineInput<'a> {
    pub system: &'a RewriteSystem,
    pub delta: &'a ConstTyping,
    pub evidence: &'a [RuleEvidence],
    pub attestation: &'a TotalityAttestation,
    pub term: &'a Term,
    pub derivation: &'a Derivation,
}

#[derive(Clone, Debug, Default)]
pub struct CrossCheckOptions {
    pub sn_max_states: Option<usize>,
    pub eval_level: Option<u32>,
    pub eval_fuel: u64,
}

/// Certifies strong normalisation of a typed closed term, or names the
/// first premise that is not established.
pub fn pipeline_sn(input: &PipelineInput, options: &CrossCheckOptions) -> Result<Certificate, Refusal> {
    let PipelineInput {
        system,
        delta,
        evidence,
        attestation,
        term,
        derivation,
    } = *input;

    let judgement = check_f_derivation(delta, derivation).map_err(|vs| Refusal {
        premise: Premise::Typeability,
        reasons: vs.iter().map(|v| v.to_string()).collect(),
    })?;
    if !judgement.term.alpha_eq(term) {
        return Err(Refusal {
            premise: Premise::Typeability,
            reasons: vec![format!("the derivation is for `{}`, not `{term}`", judgement.term)],
        });
    }

    let mut reasons = Vec::new();
    let constants: Vec<ConstName> = system.signature().constants().map(|(c, _)| ConstName::new(c)).collect();
    for c in &constants {
        if delta.get(c).is_none() {
            reasons.push(format!("constant `{c}` has no type"));
        }
    }
    let mut rules = Vec::new();
    for rule in system.rules() {
        let want = abstract_over_vars(rule, rule.lhs());
        let candidates: Vec<&RuleEvidence> = evidence.iter().filter(|e| e.lhs.term.alpha_eq(&want)).collect();
        if candidates.is_empty() {
            reasons.push(format!("no evidence for rule `{rule}`"));
            continue;
        }
        let mut last = Vec::new();
        let ok = candidates
            .iter()
            .find_map(|e| match check_rule_type_sound(delta, rule, &e.ty, &e.lhs, &e.rhs) {
                Ok(s) => Some(s),
                Err(p) => {
                    last = p;
                    None
                }
            });
        match ok {
            Some(s) => rules.push(s),
            None => reasons.extend(last.into_iter().map(|p| format!("rule `{rule}`: {p}"))),
        }
    }
    if !reasons.is_empty() {
        return Err(Refusal {
            premise: Premise::TypeSoundness,
            reasons,
        });
    }

    let unattested: Vec<String> = constants
        .iter()
        .filter(|c| attestation.get(c.base()).is_none())
        .map(|c| format!("constant `{c}` has no totality attestation"))
        .collect();
    if !unattested.is_empty() {
        return Err(Refusal {
            premise: Premise::Totality,
            reasons: unattested,
        });
    }

    let attested: Vec<String> = constants
        .iter()
        .map(|c| {
            let how = match attestation.get(c.base()).expect("checked above") {
                Attestation::PrimitiveRecursive => "primitive recursive".to_string(),
                Attestation::ModifiedBarRecursion => "modified bar recursion".to_string(),
                Attestation::UserAttested { note } => format!("user attested: {note}"),
            };
            format!("{c} ({how})")
        })
        .collect();
    let premises = vec![
        PremiseRecord {
            premise: Premise::Typeability,
            detail: format!("|- {} : {} (closed type, empty context)", judgement.term, judgement.ty),
        },
        PremiseRecord {
            premise: Premise::TypeSoundness,
            detail: format!("{} rules checked, {} constants typed", rules.len(), constants.len()),
        },
        PremiseRecord {
            premise: Premise::Totality,
            detail: attested.join(", "),
        },
    ];

    let mut cross_checks = Vec::new();
    if let Some(max) = options.sn_max_states {
        let report = sn_search(system, term, max);
        let (verdict, consistent) = match &report.verdict {
            SnVerdict::CertifiedSn { longest_reduction } => {
                (format!("certified, longest reduction {longest_reduction}"), true)
            }
            SnVerdict::NotSn { witness_cycle } => (format!("cycle of length {}", witness_cycle.len() - 1), false),
            SnVerdict::Exhausted => ("exhausted".to_string(), true),
        };
        cross_checks.push(CrossCheck::SnSearch {
            verdict,
            states: report.states_explored,
            consistent,
        });
    }
    if let Some(level) = options.eval_level {
        let (observation, non_bot) = match eval_term(system, term, &Env::new(), level, options.eval_fuel) {
            Ok(EvalOutcome::Det(v)) => {
                let o = observe(&v, 32);
                let nb = !o.is_bot();
                (o.to_string(), nb)
            }
            Ok(EvalOutcome::Unknown) => ("unknown".to_string(), false),
            Err(e) => (e.to_string(), false),
        };
        cross_checks.push(CrossCheck::Eval {
            level,
            observation,
            non_bot,
        });
    }

    Ok(Certificate {
        term: judgement.term.to_string(),
        ty: judgement.ty.to_string(),
        premises,
        rules,
        basis: CERTIFICATE_BASIS.to_string(),
        cross_checks,
    })
}

/// Constants of `system` lacking a rule, a type or an attestation.
pub fn coverage_gaps(system: &RewriteSystem, delta: &ConstTyping, attestation: &TotalityAttestation) -> Vec<String> {
    let mut out = Vec::new();
    for (c, _) in system.signature().constants() {
        let cn = ConstName::new(c);
        if system.rules_for(&cn).is_empty() {
            out.push(format!("`{c}` has no rules"));
        }
        if delta.get(&cn).is_none() {
            out.push(format!("`{c}` has no type"));
        }
        if attestation.get(c).is_none() {
            out.push(format!("`{c}` is not attested total"));
        }
    }
    out
}

pub fn attestation_names(a: &TotalityAttestation) -> Vec<Name> {
    a.0.keys().map(|k| Name::from(k.as_str())).collect()
}
