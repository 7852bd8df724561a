use super::lex::{Cursor, Tok};
use super::term::{name, ConstName, Name, Pattern, Term};
use super::{Signature, SyntaxError};

/// Largest numeral literal accepted; `S^n(0)` is stored unary.
pub const MAX_NUMERAL: u64 = 100_000;

/// Parses a term over `sig`. Leveled constants (`c#n`) are rejected.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, SyntaxError> {
    parse_complete(text, sig, false)
}

/// Parses a term that may mention leveled constants `c#n` for any declared `c`.
pub fn parse_leveled_term(text: &str, sig: &Signature) -> Result<Term, SyntaxError> {
    parse_complete(text, sig, true)
}

fn parse_complete(text: &str, sig: &Signature, allow_levels: bool) -> Result<Term, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let mut p = TermParser::new(sig, allow_levels);
    let t = p.term(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.error(format!("unexpected {}", cur.peek().describe())));
    }
    Ok(t)
}

/// Term parser over a shared token cursor, reused by the file-format readers.
pub struct TermParser<'s> {
    sig: &'s Signature,
    allow_levels: bool,
    bound: Vec<Name>,
}

impl<'s> TermParser<'s> {
    pub fn new(sig: &'s Signature, allow_levels: bool) -> Self {
        TermParser {
            sig,
            allow_levels,
            bound: Vec::new(),
        }
    }

    pub fn term(&mut self, cur: &mut Cursor) -> Result<Term, SyntaxError> {
        if cur.eat(&Tok::Backslash) {
            let mut binders = Vec::new();
            loop {
                match cur.peek().clone() {
                    Tok::Ident(x, None) => {
                        cur.bump();
                        binders.push(name(&x));
                    }
                    Tok::Dot if !binders.is_empty() => {
                        cur.bump();
                        break;
                    }
                    other => return Err(cur.error(format!("expected a binder, found {}", other.describe()))),
                }
            }
            let depth = self.bound.len();
            self.bound.extend(binders.iter().cloned());
            let body = self.term(cur);
            self.bound.truncate(depth);
            let body = body?;
            return Ok(binders.into_iter().rev().fold(body, |b, x| Term::Abs(x, Box::new(b))));
        }
        self.app_term(cur)
    }

    fn app_term(&mut self, cur: &mut Cursor) -> Result<Term, SyntaxError> {
        let mut head = self.atom(cur)?;
        while starts_atom(cur.peek()) {
            let arg = self.atom(cur)?;
            head = Term::app(head, arg);
        }
        Ok(head)
    }

    /// Parses one atom; a bare constructor of positive arity absorbs the
    /// following atoms as its arguments (`S 0` reads as `S(0)`).
    pub fn atom(&mut self, cur: &mut Cursor) -> Result<Term, SyntaxError> {
        match cur.peek().clone() {
            Tok::Num(n) => {
                if n > MAX_NUMERAL {
                    return Err(cur.error(format!("numeral {n} exceeds the limit {MAX_NUMERAL}")));
                }
                self.require_constructor(cur, "0", 0)?;
                self.require_constructor(cur, "S", 1)?;
                cur.bump();
                Ok(Term::numeral(n as usize))
            }
            Tok::LParen => {
                cur.bump();
                let t = self.term(cur)?;
                cur.expect(&Tok::RParen)?;
                Ok(t)
            }
            Tok::LBracket => {
                cur.bump();
                self.require_constructor(cur, "nil", 0)?;
                self.require_constructor(cur, "cons", 2)?;
                let mut items = Vec::new();
                if !cur.eat(&Tok::RBracket) {
                    loop {
                        items.push(self.term(cur)?);
                        if cur.eat(&Tok::RBracket) {
                            break;
                        }
                        cur.expect(&Tok::Comma)?;
                    }
                }
                Ok(Term::list(items))
            }
            Tok::Ident(id, level) | Tok::Sym(id, level) => {
                let call = cur.next_glued() && matches!(cur.peek_at(1), Tok::LParen);
                if let Some(level) = level {
                    return self.leveled(cur, &id, level, call);
                }
                if self.bound.iter().any(|b| **b == *id) {
                    if call {
                        return Err(cur.error(format!("variable `{id}` cannot take parenthesised arguments")));
                    }
                    cur.bump();
                    return Ok(Term::var(&id));
                }
                if let Some(arity) = self.sig.constructor_arity(&id) {
                    cur.bump();
                    let args = if call {
                        self.call_args(cur)?
                    } else {
                        let mut args = Vec::with_capacity(arity);
                        for _ in 0..arity {
                            if !starts_atom(cur.peek()) {
                                return Err(SyntaxError::ArityMismatch {
                                    name: id.clone(),
                                    expected: arity,
                                    found: args.len(),
                                });
                            }
                            args.push(self.atom(cur)?);
                        }
                        args
                    };
                    if args.len() != arity {
                        return Err(SyntaxError::ArityMismatch {
                            name: id,
                            expected: arity,
                            found: args.len(),
                        });
                    }
                    return Ok(Term::Constr(name(&id), args));
                }
                let c = ConstName::new(&id);
                if self.sig.constant_arity(&c).is_some() {
                    if call {
                        return Err(cur.error(format!(
                            "constant `{id}` is curried; apply it by juxtaposition, e.g. `{id} x`"
                        )));
                    }
                    cur.bump();
                    return Ok(Term::Const(c));
                }
                if matches!(cur.peek(), Tok::Sym(..)) {
                    return Err(SyntaxError::UnknownConstant(id));
                }
                if id.starts_with(|c: char| c.is_ascii_uppercase()) {
                    return Err(SyntaxError::UnknownConstructor(id));
                }
                if call {
                    return Err(cur.error(format!("`{id}` is not a constructor; write `{id} x` for application")));
                }
                cur.bump();
                Ok(Term::var(&id))
            }
            other => Err(cur.error(format!("expected a term, found {}", other.describe()))),
        }
    }

    fn leveled(&mut self, cur: &mut Cursor, id: &str, level: u32, call: bool) -> Result<Term, SyntaxError> {
        if !self.allow_levels {
            return Err(cur.error(format!("leveled constant `{id}#{level}` is not allowed here")));
        }
        let c = ConstName::leveled(id, level);
        if self.sig.constant_arity(&c).is_none() {
            return Err(SyntaxError::UnknownConstant(c.to_string()));
        }
        if call {
            return Err(cur.error(format!("constant `{c}` is curried; apply it by juxtaposition")));
        }
        cur.bump();
        Ok(Term::Const(c))
    }

    fn call_args(&mut self, cur: &mut Cursor) -> Result<Vec<Term>, SyntaxError> {
        cur.expect(&Tok::LParen)?;
        let mut args = Vec::new();
        if cur.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.term(cur)?);
            if cur.eat(&Tok::RParen) {
                return Ok(args);
            }
            cur.expect(&Tok::Comma)?;
        }
    }

    fn require_constructor(&self, cur: &Cursor, co: &str, arity: usize) -> Result<(), SyntaxError> {
        match self.sig.constructor_arity(co) {
            Some(a) if a == arity => Ok(()),
            _ => Err(cur.error(format!("literal sugar needs constructor `{co}/{arity}`"))),
        }
    }
}

pub fn starts_atom(t: &Tok) -> bool {
    matches!(
        t,
        Tok::Ident(..) | Tok::Sym(..) | Tok::Num(_) | Tok::LParen | Tok::LBracket
    )
}

/// Parses a constructor pattern (variables and constructors only).
pub fn parse_pattern(text: &str, sig: &Signature) -> Result<Pattern, SyntaxError> {
    let t = parse_term(text, sig)?;
    Pattern::from_term(&t).ok_or_else(|| SyntaxError::NotAPattern(text.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        let mut s = Signature::with_builtins();
        s.add_constant("f", 1).unwrap();
        s.add_constant("lh", 1).unwrap();
        s.add_constant("get", 2).unwrap();
        s.add_constant("++", 2).unwrap();
        s
    }

    #[test]
    fn lambda_and_application() {
        let t = parse_term(r"\x. f x", &sig()).unwrap();
        assert_eq!(t, Term::abs("x", Term::app(Term::konst("f"), Term::var("x"))));
    }

    #[test]
    fn numeral_sugar() {
        let t = parse_term("2", &sig()).unwrap();
        assert_eq!(
            t,
            Term::constr("S", vec![Term::constr("S", vec![Term::constr("0", vec![])])])
        );
    }

    #[test]
    fn list_sugar() {
        let t = parse_term("[0, 1]", &sig()).unwrap();
        assert_eq!(t, Term::list([Term::numeral(0), Term::numeral(1)]));
        assert_eq!(parse_term("[]", &sig()).unwrap(), Term::constr("nil", vec![]));
    }

    #[test]
    fn curried_constant_rejects_call_syntax() {
        assert!(parse_term("lh(cons(0,nil))", &sig()).is_err());
        let t = parse_term("lh cons(0,nil)", &sig()).unwrap();
        assert_eq!(t, Term::app(Term::konst("lh"), Term::list([Term::numeral(0)])));
    }

    #[test]
    fn application_is_left_associative() {
        let t = parse_term("get s k", &sig()).unwrap();
        assert_eq!(
            t,
            Term::app(Term::app(Term::konst("get"), Term::var("s")), Term::var("k"))
        );
    }

    #[test]
    fn bare_constructor_absorbs_arguments() {
        let t = parse_term("f (S 0)", &sig()).unwrap();
        assert_eq!(t, Term::app(Term::konst("f"), Term::numeral(1)));
        let t = parse_term("cons 0 nil", &sig()).unwrap();
        assert_eq!(t, Term::list([Term::numeral(0)]));
    }

    #[test]
    fn constructor_arity_checked() {
        let err = parse_term("cons(0)", &sig()).unwrap_err();
        assert_eq!(
            err,
            SyntaxError::ArityMismatch {
                name: "cons".into(),
                expected: 2,
                found: 1
            }
        );
        assert!(matches!(
            parse_term("f S", &sig()),
            Err(SyntaxError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn unknown_capitalised_name_is_error() {
        assert_eq!(
            parse_term("Foo", &sig()).unwrap_err(),
            SyntaxError::UnknownConstructor("Foo".into())
        );
        assert!(matches!(
            parse_term("<< x", &sig()),
            Err(SyntaxError::UnknownConstant(_))
        ));
    }

    #[test]
    fn symbolic_constant_prefix() {
        let t = parse_term("++ [0] [1]", &sig()).unwrap();
        assert_eq!(
            t,
            Term::apps(
                Term::konst("++"),
                [Term::list([Term::numeral(0)]), Term::list([Term::numeral(1)])]
            )
        );
    }

    #[test]
    fn binders_shadow_constants() {
        let t = parse_term(r"\lh. lh", &sig()).unwrap();
        assert_eq!(t, Term::abs("lh", Term::var("lh")));
    }

    #[test]
    fn multi_binder_sugar() {
        let t = parse_term(r"\x y. x", &sig()).unwrap();
        assert_eq!(t, Term::abs("x", Term::abs("y", Term::var("x"))));
    }

    #[test]
    fn levels_only_when_enabled() {
        assert!(parse_term("get#2 s 0", &sig()).is_err());
        let t = parse_leveled_term("get#2 s 0", &sig()).unwrap();
        assert_eq!(
            t,
            Term::apps(
                Term::Const(ConstName::leveled("get", 2)),
                [Term::var("s"), Term::numeral(0)]
            )
        );
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_term(r"\x. (f x", &sig()).unwrap_err() {
            SyntaxError::Parse { line, col, .. } => assert_eq!((line, col), (1, 9)),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn pattern_parsing() {
        let p = parse_pattern("cons(x, s)", &sig()).unwrap();
        assert_eq!(p, Pattern::constr("cons", vec![Pattern::var("x"), Pattern::var("s")]));
        assert!(parse_pattern("f x", &sig()).is_err());
    }
}
