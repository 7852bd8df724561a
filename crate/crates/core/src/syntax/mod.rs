//! Terms, constructor patterns, substitution and the surface grammar.

pub mod lex;
mod parse;
mod print;
mod subst;
mod term;

use std::collections::BTreeMap;

use thiserror::Error;

pub use parse::{parse_leveled_term, parse_pattern, parse_term, starts_atom, TermParser, MAX_NUMERAL};
pub use print::{print_term, print_term_plain};
pub use subst::{apply_const_subst, fresh_name, substitute, ConstSubstitution, TermSubstitution};
pub use term::{name, Canon, ConstName, Name, Pattern, Position, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("`{name}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("constant `{0}` has no image under the constant substitution")]
    UnmappedConstant(String),
    #[error("`{0}` is declared both as a constructor and as a constant")]
    NameClash(String),
    #[error("`{0}` is not a constructor pattern")]
    NotAPattern(String),
}

/// Constructor and constant arities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    constructors: BTreeMap<Name, usize>,
    constants: BTreeMap<Name, usize>,
}

/// Constructors every signature starts with.
pub const BUILTIN_CONSTRUCTORS: [(&str, usize); 6] = [("T", 0), ("F", 0), ("0", 0), ("S", 1), ("nil", 0), ("cons", 2)];

impl Signature {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_builtins() -> Self {
        let mut s = Self::default();
        for (co, k) in BUILTIN_CONSTRUCTORS {
            s.constructors.insert(name(co), k);
        }
        s
    }

    pub fn add_constructor(&mut self, co: &str, arity: usize) -> Result<(), SyntaxError> {
        if self.constants.contains_key(co) {
            return Err(SyntaxError::NameClash(co.to_string()));
        }
        if let Some(&old) = self.constructors.get(co) {
            if old != arity {
                return Err(SyntaxError::ArityMismatch {
                    name: co.to_string(),
                    expected: old,
                    found: arity,
                });
            }
        }
        self.constructors.insert(name(co), arity);
        Ok(())
    }

    pub fn add_constant(&mut self, c: &str, arity: usize) -> Result<(), SyntaxError> {
        if self.constructors.contains_key(c) {
            return Err(SyntaxError::NameClash(c.to_string()));
        }
        if let Some(&old) = self.constants.get(c) {
            if old != arity {
                return Err(SyntaxError::ArityMismatch {
                    name: c.to_string(),
                    expected: old,
                    found: arity,
                });
            }
        }
        self.constants.insert(name(c), arity);
        Ok(())
    }

    pub fn constructor_arity(&self, co: &str) -> Option<usize> {
        self.constructors.get(co).copied()
    }

    /// Arity of a constant; a leveled `c#n` has the arity of `c`.
    pub fn constant_arity(&self, c: &ConstName) -> Option<usize> {
        self.constants.get(c.base()).copied()
    }

    pub fn constructors(&self) -> impl Iterator<Item = (&Name, usize)> {
        self.constructors.iter().map(|(k, v)| (k, *v))
    }

    pub fn constants(&self) -> impl Iterator<Item = (&Name, usize)> {
        self.constants.iter().map(|(k, v)| (k, *v))
    }

    /// Checks constructor arities and that every constant is declared.
    pub fn check_term(&self, t: &Term) -> Result<(), SyntaxError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::Const(c) => self
                .constant_arity(c)
                .map(|_| ())
                .ok_or_else(|| SyntaxError::UnknownConstant(c.to_string())),
            Term::Constr(co, args) => {
                let arity = self
                    .constructor_arity(co)
                    .ok_or_else(|| SyntaxError::UnknownConstructor(co.to_string()))?;
                if arity != args.len() {
                    return Err(SyntaxError::ArityMismatch {
                        name: co.to_string(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
            Term::Abs(_, body) => self.check_term(body),
            Term::App(f, a) => {
                self.check_term(f)?;
                self.check_term(a)
            }
        }
    }

    pub fn check_pattern(&self, p: &Pattern) -> Result<(), SyntaxError> {
        self.check_term(&p.to_term())
    }
}
