//! Extended System F with list, boolean and natural number types.

mod church;
mod derivation;
mod pipeline;
mod types;

pub use church::{build_derivation, derive, parse_annotated, AnnTerm, BuildError};
pub use derivation::{
    check_derivation, check_f_derivation, lift_typing_to_omega, ConstTyping, Context, Derivation,
    DerivationFormatError, Judgement, TypeViolation, TypingError, TypingRule,
};
pub use pipeline::{
    abstract_over_vars, attestation_names, check_rule_type_sound, coverage_gaps, evidence_from_json, pipeline_sn,
    Attestation, Certificate, CrossCheck, CrossCheckOptions, PipelineInput, Premise, PremiseRecord, Refusal,
    RuleEvidence, RuleSoundness, TotalityAttestation, CERTIFICATE_BASIS,
};
pub use types::{parse_type, parse_type_at, Type};
