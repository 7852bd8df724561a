//! Rewrite systems over constructor patterns: validation, matching,
//! one-step reduction, normalisation and bounded strong-normalisation search.

mod reduce;
pub mod rwl;
mod sn;
mod system;
mod unify;

pub use reduce::{
    contract_at, contract_here, is_normal, match_rule, normalize, normalize_traced, redexes, strategy_step,
    NormalizeOutcome, Redex, RedexKind, Strategy,
};
pub use rwl::{load_system, parse_rwl, RwlError};
pub use sn::{sn_search, SnReport, SnVerdict};
pub use system::{validate_system, RewriteSystem, Rule, RuleSource, Violation, ViolationKind};
pub use unify::{unifiable_patterns, Unifier};
