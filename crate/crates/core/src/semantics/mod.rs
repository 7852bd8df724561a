//! Fuel-bounded approximation of the strict domain semantics.
//!
//! A term is evaluated against the constant assignment obtained by
//! unfolding the rules `level` times (constants at level 0 denote bottom).
//! Determinate results are lower bounds of the true denotation at that
//! level; running out of fuel yields [`EvalOutcome::Unknown`].

mod eval;
mod observe;
mod value;

pub use eval::{
    apply_value, eval_term, is_bot_probe, with_eval_stack, BotStatus, EvalError, EvalOutcome, Session,
    DEFAULT_MAX_DEPTH,
};
pub use observe::{obs_leq, observe, Observation};
pub use value::{pat_inverse, Closure, ConstApp, Env, MatchResult, Value};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::{load_system, RewriteSystem};
    use crate::stratify::{strat_term, StratSystem};
    use crate::syntax::parse_term;

    fn core() -> RewriteSystem {
        load_system(include_str!("../../assets/v1/core/system.rwl")).unwrap()
    }

    fn eval_str(sys: &RewriteSystem, src: &str, level: u32) -> String {
        let t = parse_term(src, sys.signature()).unwrap();
        match eval_term(sys, &t, &Env::new(), level, 100_000).unwrap() {
            EvalOutcome::Det(v) => v.to_string(),
            EvalOutcome::Unknown => "unknown".into(),
        }
    }

    #[test]
    fn list_length_by_level() {
        let sys = core();
        assert_eq!(eval_str(&sys, "lh cons(0, nil)", 1), "bot");
        assert_eq!(eval_str(&sys, "lh cons(0, nil)", 2), "1");
        assert_eq!(eval_str(&sys, "lh cons(0, nil)", 0), "bot");
    }

    #[test]
    fn rule_less_constant_is_bot() {
        let sys = load_system("const d/1; const e/0; const k/1; k x -> x;").unwrap();
        assert_eq!(eval_str(&sys, "d", 5), "bot");
        assert_eq!(eval_str(&sys, "e", 5), "bot");
        assert_eq!(eval_str(&sys, "k 0", 5), "0");
    }

    #[test]
    fn all_mismatch_gives_dummy() {
        let sys = core();
        assert_eq!(eval_str(&sys, "if (\\x. x) 0 1", 3), "dummy");
    }

    #[test]
    fn probes() {
        let sys = load_system("const d/1; d 0 -> 0;").unwrap();
        let f = parse_term("\\y. d y", sys.signature()).unwrap();
        let v = match eval_term(&sys, &f, &Env::new(), 0, 1000).unwrap() {
            EvalOutcome::Det(v) => v,
            EvalOutcome::Unknown => panic!(),
        };
        assert_eq!(is_bot_probe(&sys, &v, 1000), BotStatus::BotCertified);
        let id = parse_term("\\x. x", sys.signature()).unwrap();
        let v = eval_term(&sys, &id, &Env::new(), 1, 1000)
            .unwrap()
            .value()
            .cloned()
            .unwrap();
        assert_eq!(is_bot_probe(&sys, &v, 1000), BotStatus::NonBot);
        assert_eq!(is_bot_probe(&sys, &Value::Bot, 1000), BotStatus::BotCertified);
    }

    #[test]
    fn application_laws() {
        let sys = core();
        assert!(matches!(
            apply_value(&sys, &Value::Dummy, &Value::numeral(1), 100),
            EvalOutcome::Det(Value::Dummy)
        ));
        let id = eval_term(
            &sys,
            &parse_term("\\x. x", sys.signature()).unwrap(),
            &Env::new(),
            1,
            100,
        )
        .unwrap()
        .value()
        .cloned()
        .unwrap();
        assert!(matches!(
            apply_value(&sys, &id, &Value::Dummy, 100),
            EvalOutcome::Det(Value::Dummy)
        ));
        assert!(matches!(
            apply_value(&sys, &id, &Value::Bot, 100),
            EvalOutcome::Det(Value::Bot)
        ));
        assert!(matches!(
            apply_value(&sys, &Value::numeral(0), &Value::numeral(0), 100),
            EvalOutcome::Det(Value::Bot)
        ));
    }

    #[test]
    fn divergence_is_unknown() {
        let sys = core();
        assert_eq!(eval_str(&sys, "(\\x. x x) (\\x. x x)", 1), "unknown");
    }

    #[test]
    fn unbound_variable() {
        let sys = core();
        let t = parse_term("x", sys.signature()).unwrap();
        assert!(eval_term(&sys, &t, &Env::new(), 1, 10).is_err());
    }

    #[test]
    fn stratified_coherence() {
        let sys = core();
        let strat = StratSystem::new(sys.clone());
        let t = parse_term("++ [0, 1] [lh [2]]", sys.signature()).unwrap();
        for n in 0..5 {
            let a = eval_term(&sys, &t, &Env::new(), n, 10_000)
                .unwrap()
                .value()
                .unwrap()
                .to_string();
            let b = eval_term(&strat, &strat_term(&t, n), &Env::new(), 0, 10_000)
                .unwrap()
                .value()
                .unwrap()
                .to_string();
            assert_eq!(a, b, "level {n}");
        }
    }
}
