//! Worked examples for each module, checked through the public API.

mod common;

use applam::library::{bundle, BundleName};
use applam::rewrite::{
    load_system, match_rule, normalize, redexes, sn_search, unifiable_patterns, NormalizeOutcome, RuleSource, RwlError,
    SnVerdict, Strategy, ViolationKind,
};
use applam::semantics::{obs_leq, Observation};
use applam::stratify::{approx, simulate_step, strat_term, stratified_constants, SimulationError, StratSystem};
use applam::syntax::{
    apply_const_subst, parse_leveled_term, parse_pattern, parse_term, print_term, print_term_plain, substitute,
    ConstName, ConstSubstitution, Position, Signature, Term, TermSubstitution,
};
use applam::typesystem::{lift_typing_to_omega, parse_type, ConstTyping};

fn sig() -> Signature {
    bundle(BundleName::Mbr).system.signature().clone()
}

fn t(s: &str) -> Term {
    parse_term(s, &sig()).unwrap()
}

fn lt(s: &str) -> Term {
    parse_leveled_term(s, &sig()).unwrap()
}

fn fv(s: &str) -> Vec<String> {
    t(s).free_vars().iter().map(|x| x.to_string()).collect()
}

#[test]
fn free_variables() {
    assert_eq!(fv("\\x. lh x y"), vec!["y"]);
    assert_eq!(fv("x (\\x. x)"), vec!["x"]);
    assert!(fv("S(0)").is_empty());
}

#[test]
fn substitution() {
    let s = |x: &str, n: &str| TermSubstitution::single(x, t(n));
    assert!(substitute(&t("\\y. x y"), &s("x", "\\z. z")).alpha_eq(&t("\\y. (\\z. z) y")));
    let r = substitute(&t("\\x. x y"), &s("y", "x"));
    assert!(r.alpha_eq(&t("\\w. w x")));
    assert!(!r.alpha_eq(&t("\\x. x x")));
    assert_eq!(substitute(&t("x"), &s("x", "S(0)")), t("1"));
}

#[test]
fn alpha_equality() {
    assert!(t("\\x. x").alpha_eq(&t("\\y. y")));
    assert!(!t("\\x. \\y. x").alpha_eq(&t("\\x. \\y. y")));
    assert!(t("lh").alpha_eq(&t("lh")));
}

#[test]
fn constant_renaming() {
    let theta: ConstSubstitution = [(ConstName::new("get"), ConstName::leveled("get", 2))]
        .into_iter()
        .collect();
    assert_eq!(apply_const_subst(&t("get s 0"), &theta).unwrap(), lt("get#2 s 0"));
    assert_eq!(apply_const_subst(&t("\\x. x"), &theta).unwrap(), t("\\x. x"));
    let id = ConstSubstitution::identity_on([ConstName::new("if")]);
    assert_eq!(apply_const_subst(&t("if T x y"), &id).unwrap(), t("if T x y"));
}

#[test]
fn parsing_and_printing() {
    assert_eq!(t("\\x. f x"), Term::abs("x", Term::app(Term::var("f"), Term::var("x"))));
    assert_eq!(
        t("2"),
        Term::constr("S", vec![Term::constr("S", vec![Term::numeral(0)])])
    );
    assert!(parse_term("lh(cons(0,nil))", &sig()).is_err());
    assert!(parse_term("lh cons(0,nil)", &sig()).is_ok());
    assert_eq!(print_term(&t("S(S(0))")), "2");
    assert_eq!(print_term_plain(&t("S(S(0))")), "S(S(0))");
    assert_eq!(print_term(&t("\\x. x")), "\\x. x");
    assert_eq!(print_term(&t("get s k")), "get s k");
}

#[test]
fn validation() {
    match load_system("const c/1; c 0 -> 0; c x -> 0;") {
        Err(RwlError::Invalid(vs)) => {
            assert!(vs.iter().any(
                |v| matches!(&v.kind, ViolationKind::Unifiable { unifier, .. } if unifier.to_string() == "{x:=0}")
            ))
        }
        other => panic!("{other:?}"),
    }
    assert!(load_system("const get/2; get cons(x, s) 0 -> x; get cons(x, s) S(n) -> get s n;").is_ok());
    match load_system("const c/2; c x x -> x;") {
        Err(RwlError::Invalid(vs)) => assert!(matches!(vs[0].kind, ViolationKind::NonLinear { .. })),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unification() {
    let p = |s: &str| parse_pattern(s, &sig()).unwrap();
    assert_eq!(unifiable_patterns(&[p("0")], &[p("x")]).unwrap().to_string(), "{x:=0}");
    assert!(unifiable_patterns(&[p("cons(x, s)")], &[p("nil")]).is_none());
    let u = unifiable_patterns(&[p("S(n)"), p("m")], &[p("k"), p("0")]).unwrap();
    assert_eq!(u.get("k").unwrap().to_string(), "S(n)");
    assert_eq!(u.get("m").unwrap().to_string(), "0");
}

#[test]
fn matching() {
    let sys = &bundle(BundleName::Core).system;
    let get = sys.rules_for(&ConstName::new("get"));
    let (a, z) = (t("a"), t("0"));
    let list = t("cons(a, nil)");
    let m = match_rule(&get[0], &[&list, &z]).unwrap();
    assert_eq!(m.get("x"), Some(&a));
    assert_eq!(m.get("s"), Some(&t("nil")));
    let lh = sys.rules_for(&ConstName::new("lh"));
    assert!(match_rule(&lh[0], &[&t("nil")]).unwrap().is_empty());
    let ifs = sys.rules_for(&ConstName::new("if"));
    assert!(ifs
        .iter()
        .all(|r| match_rule(r, &[&t("z"), &t("a"), &t("b")]).is_none()));
}

#[test]
fn redex_enumeration() {
    let sys = &bundle(BundleName::Core).system;
    let r = redexes(sys, &t("(\\x. x) 0"));
    assert_eq!(r.len(), 1);
    assert!(r[0].position.is_root());
    assert_eq!(redexes(sys, &t("if T ((\\x. x) 0) y")).len(), 2);
    assert!(redexes(sys, &t("\\x. x")).is_empty());
}

#[test]
fn normalisation() {
    let sys = &bundle(BundleName::Core).system;
    match normalize(sys, &t("lh cons(0, nil)"), Strategy::LeftmostOutermost, 100) {
        NormalizeOutcome::NormalForm { term, steps } => {
            assert_eq!(term, t("1"));
            assert_eq!(steps, 2);
        }
        other => panic!("{other:?}"),
    }
    let nf = normalize(sys, &t("++ [0] [1]"), Strategy::LeftmostOutermost, 100);
    assert_eq!(nf.normal_form(), Some(&t("[0, 1]")));
    assert!(matches!(
        normalize(sys, &t("(\\x. x x)(\\x. x x)"), Strategy::LeftmostOutermost, 50),
        NormalizeOutcome::Timeout { .. }
    ));
}

#[test]
fn sn_examples() {
    let sys = &bundle(BundleName::Core).system;
    match sn_search(sys, &t("(\\x. x x)(\\x. x x)"), 100).verdict {
        SnVerdict::NotSn { witness_cycle } => assert_eq!(witness_cycle.len(), 2),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        sn_search(sys, &t("(\\x. y) ((\\x. x x)(\\x. x x))"), 100).verdict,
        SnVerdict::NotSn { .. }
    ));
    assert_eq!(sn_search(sys, &t("if T 0 (S 0)"), 100).longest_reduction(), Some(1));
}

#[test]
fn stratification() {
    let names = |src: &str| -> Vec<String> {
        let sys = load_system(src).unwrap();
        stratified_constants(&sys).iter().map(|c| c.to_string()).collect()
    };
    let core = bundle(BundleName::Core).system.to_rwl();
    assert!(names(&core).contains(&"if".to_string()));
    assert!(!names(&core).contains(&"lh".to_string()));
    assert_eq!(names("const if/3; if T x y -> x; if F x y -> y;"), vec!["if"]);
    let mbr = stratified_constants(&bundle(BundleName::Mbr).system);
    assert!(!mbr.contains(&ConstName::new("Phi")) && !mbr.contains(&ConstName::new("Psi")));

    assert_eq!(strat_term(&t("get s 0"), 2), lt("get#2 s 0"));
    assert_eq!(strat_term(&t("\\x. x"), 7), t("\\x. x"));
    assert_eq!(strat_term(&t("Phi y g nil"), 1), lt("Phi#1 y g nil"));

    let strat = StratSystem::new(bundle(BundleName::Core).system.clone());
    let get3 = strat.omega_rules_for(&ConstName::leveled("get", 3));
    assert_eq!(get3[1].to_string(), "get#3 cons(x, s) S(n) -> get#2 s n");
    assert!(strat.omega_rules_for(&ConstName::leveled("lh", 0)).is_empty());
    assert_eq!(strat.omega_rules_for(&ConstName::leveled("if", 1))[0].rhs, t("x"));

    assert!(approx(&lt("if#3 T x y"), &t("if T x y")));
    assert!(!approx(&lt("if#3 T x y"), &t("if T x x")));
}

#[test]
fn simulation() {
    let strat = StratSystem::new(bundle(BundleName::Core).system.clone());
    let root = Position::root();
    let b = simulate_step(&strat, &lt("lh#2 nil"), (&t("lh nil"), &root, &t("0"))).unwrap();
    assert_eq!(b, t("0"));
    let b = simulate_step(&strat, &t("(\\x. x) 0"), (&t("(\\x. x) 0"), &root, &t("0"))).unwrap();
    assert_eq!(b, t("0"));
    assert!(matches!(
        simulate_step(&strat, &lt("lh#0 nil"), (&t("lh nil"), &root, &t("0"))),
        Err(SimulationError::LevelZero(..))
    ));
}

#[test]
fn observation_order() {
    let zero = Observation::Con("0".into(), vec![]);
    let one = Observation::Con("S".into(), vec![zero.clone()]);
    assert!(obs_leq(&Observation::Bot, &one));
    assert!(obs_leq(&Observation::Con("S".into(), vec![Observation::Bot]), &one));
    assert!(!obs_leq(&zero, &one));
}

#[test]
fn type_substitution_and_lifting() {
    let ty = |s: &str| parse_type(s).unwrap();
    assert_eq!(ty("p -> p").subst("p", &ty("nat")), ty("nat -> nat"));
    assert_eq!(ty("forall p. p -> q").subst("q", &ty("nat")), ty("forall p. p -> nat"));
    assert_eq!(ty("forall p. p").subst("p", &ty("nat")), ty("forall p. p"));

    let delta = &bundle(BundleName::Core).delta;
    let lifted = lift_typing_to_omega(delta);
    assert_eq!(
        lifted.get(&ConstName::leveled("get", 5)),
        delta.get(&ConstName::new("get"))
    );
    assert_eq!(
        lifted.get(&ConstName::leveled("if", 0)),
        delta.get(&ConstName::new("if"))
    );
    assert!(lift_typing_to_omega(&ConstTyping::new()).is_empty());
}
