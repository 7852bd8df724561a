//! The `.rwl` rewrite-system file format.
//!
//! ```text
//! -- comment to end of line
//! constructor pr/2;
//! const lh/1;
//! lh nil -> 0;
//! lh cons(x, s) -> S(lh s);
//! ```
//!
//! Statements end with `;`. Declarations may appear anywhere in the file;
//! rules are read after all declarations. The constructors `T`, `F`, `0`,
//! `S`, `nil` and `cons` are predeclared. Rule patterns are atoms of the
//! term grammar built from variables and constructors only.

use thiserror::Error;

use crate::syntax::lex::parse_error;
use crate::syntax::lex::{Cursor, Tok};
use crate::syntax::{ConstName, Pattern, Signature, SyntaxError, TermParser};

use super::system::{validate_system, RewriteSystem, Rule, Violation};

#[derive(Debug, Error)]
pub enum RwlError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("invalid rewrite system:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
}

/// Reads declarations and rules without validating the rule set.
pub fn parse_rwl(text: &str) -> Result<(Signature, Vec<Rule>), SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let mut sig = Signature::with_builtins();
    let mut rule_starts = Vec::new();

    while !cur.at_eof() {
        let start = cur.pos;
        let keyword = match cur.peek() {
            Tok::Ident(k, None) if k == "constructor" || k == "const" => Some(k.clone()),
            _ => None,
        };
        if let Some(keyword) = keyword {
            cur.bump();
            let decl_name = match cur.bump() {
                Tok::Ident(n, None) | Tok::Sym(n, None) => n,
                other => {
                    return Err(cur.error(format!("expected a name after `{keyword}`, found {}", other.describe())))
                }
            };
            cur.expect(&Tok::Slash)?;
            let arity = match cur.bump() {
                Tok::Num(n) => n as usize,
                other => return Err(cur.error(format!("expected an arity, found {}", other.describe()))),
            };
            cur.expect(&Tok::Semi)?;
            if keyword == "constructor" {
                sig.add_constructor(&decl_name, arity)?;
            } else {
                sig.add_constant(&decl_name, arity)?;
            }
        } else {
            rule_starts.push(start);
            while !matches!(cur.peek(), Tok::Semi | Tok::Eof) {
                cur.bump();
            }
            cur.expect(&Tok::Semi)?;
        }
    }

    let mut rules = Vec::new();
    for start in rule_starts {
        cur.pos = start;
        rules.push(parse_rule(&mut cur, &sig)?);
    }
    Ok((sig, rules))
}

fn parse_rule(cur: &mut Cursor, sig: &Signature) -> Result<Rule, SyntaxError> {
    let head = match cur.peek().clone() {
        Tok::Ident(n, level) | Tok::Sym(n, level) => {
            let c = match level {
                Some(l) => ConstName::leveled(&n, l),
                None => ConstName::new(&n),
            };
            if sig.constant_arity(&c).is_none() {
                return Err(cur.error(format!("rule head `{c}` is not a declared constant")));
            }
            cur.bump();
            c
        }
        other => return Err(cur.error(format!("expected a rule head, found {}", other.describe()))),
    };
    let mut patterns = Vec::new();
    let mut parser = TermParser::new(sig, true);
    while !matches!(cur.peek(), Tok::Arrow) {
        if matches!(cur.peek(), Tok::Semi | Tok::Eof) {
            return Err(cur.error("expected `->` in rule"));
        }
        let offset = cur.token().offset;
        let t = parser.atom(cur)?;
        let p = Pattern::from_term(&t)
            .ok_or_else(|| parse_error(cur.src, offset, format!("`{t}` is not a constructor pattern")))?;
        patterns.push(p);
    }
    cur.expect(&Tok::Arrow)?;
    let rhs = parser.term(cur)?;
    cur.expect(&Tok::Semi)?;
    Ok(Rule::new(head, patterns, rhs))
}

/// Parses and validates a rewrite system.
pub fn load_system(text: &str) -> Result<RewriteSystem, RwlError> {
    let (sig, rules) = parse_rwl(text)?;
    validate_system(sig, rules).map_err(RwlError::Invalid)
}
