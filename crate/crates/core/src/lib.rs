//! A laboratory for applied λ-calculi: untyped λ-terms with constructors and
//! pattern-matching constants, a fuel-bounded approximation of their strict
//! domain semantics, stratified approximations, bounded strong-normalisation
//! search and a System F derivation checker feeding a normalisation pipeline.

pub mod library;
pub mod rewrite;
pub mod semantics;
pub mod stratify;
pub mod syntax;
pub mod typesystem;
