//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{random_pattern, random_value_term, rng, TermGen};
use rand::seq::SliceRandom;
use rand::Rng;

use applam::library::{builtin_systems, bundle, with_looping_constant, BundleName};
use applam::rewrite::{
    load_system, normalize, redexes, sn_search, unifiable_patterns, RewriteSystem, RuleSource, RwlError, SnVerdict,
    Strategy, ViolationKind,
};
use applam::semantics::{eval_term, obs_leq, observe, pat_inverse, Env, EvalOutcome, MatchResult, Observation, Value};
use applam::stratify::{approx, simulate_step, strat_term, StratSystem};
use applam::syntax::{parse_term, print_term, substitute, Pattern, Term, TermSubstitution};
use applam::typesystem::{
    check_derivation, check_f_derivation, derive, lift_typing_to_omega, pipeline_sn, CrossCheckOptions, Derivation,
    PipelineInput, Premise,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))
}

fn eval_det<S: RuleSource + Sync + ?Sized>(sys: &S, t: &Term, level: u32, fuel: u64) -> Option<Observation> {
    match eval_term(sys, t, &Env::new(), level, fuel).expect("closed term") {
        EvalOutcome::Det(v) => Some(observe(&v, 32)),
        EvalOutcome::Unknown => None,
    }
}

fn value_of(t: &Term) -> Value {
    let sys = &bundle(BundleName::Core).system;
    eval_term(sys, t, &Env::new(), 1, 100_000)
        .unwrap()
        .value()
        .cloned()
        .expect("values evaluate")
}

fn numeral(n: u64) -> Observation {
    (0..n).fold(Observation::Con("0".into(), vec![]), |o, _| {
        Observation::Con("S".into(), vec![o])
    })
}

fn validation() -> Outcome {
    let start = Instant::now();
    let core = &bundle(BundleName::Core).system;
    load_system(&core.to_rwl()).map_err(|e| format!("CORE rejected: {e}"))?;
    match load_system("const c/1;\nc 0 -> 0;\nc x -> 0;\n") {
        Err(RwlError::Invalid(vs)) => {
            let found = vs.iter().any(
                |v| matches!(&v.kind, ViolationKind::Unifiable { unifier, .. } if unifier.to_string() == "{x:=0}"),
            );
            ensure(found, || format!("no x:=0 overlap among {vs:?}"))?;
        }
        other => return Err(format!("mutated system not rejected: {other:?}")),
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!(
        "CORE valid, overlap {{x:=0}} reported, {:.2?}",
        start.elapsed()
    ))
}

fn pattern_laws() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let mut fresh = 0;
    let (mut matched, mut disjoint, mut attempts) = (0, 0, 0);
    while (matched < 200 || disjoint < 200) && attempts < 20_000 {
        attempts += 1;
        let k = r.gen_range(1..4);
        let ps: Vec<Pattern> = (0..k).map(|_| random_pattern(&mut r, 3, &mut fresh)).collect();
        let mut sigma = TermSubstitution::new();
        for x in ps.iter().flat_map(Pattern::vars) {
            sigma.insert(x, random_value_term(&mut r, 2));
        }
        let vs: Vec<Value> = ps.iter().map(|p| value_of(&substitute(&p.to_term(), &sigma))).collect();
        match pat_inverse(&ps, &vs) {
            MatchResult::Matched(env) => {
                let bound = env.bindings();
                ensure(bound.len() == sigma.len(), || format!("{ps:?}: wrong binding count"))?;
                for (x, v) in bound {
                    let want = value_of(sigma.get(&x).unwrap());
                    ensure(observe(&v, 16) == observe(&want, 16), || {
                        format!("{ps:?}: {x} bound wrongly")
                    })?;
                }
                matched += 1;
            }
            other => return Err(format!("{ps:?} against its own instance gave {other:?}")),
        }
        let qs: Vec<Pattern> = (0..k).map(|_| random_pattern(&mut r, 3, &mut fresh)).collect();
        if unifiable_patterns(&ps, &qs).is_none() {
            ensure(!pat_inverse(&qs, &vs).is_matched(), || {
                format!("{qs:?} matched an instance of {ps:?}")
            })?;
            disjoint += 1;
        }
    }
    ensure(matched >= 200 && disjoint >= 200, || {
        format!("only {matched} round trips and {disjoint} disjoint pairs")
    })?;
    within(start, Duration::from_secs(10))?;
    Ok(format!(
        "{matched} round trips, {disjoint} disjoint pairs, {:.2?}",
        start.elapsed()
    ))
}

fn reduction_order() -> Outcome {
    let start = Instant::now();
    let sys = &bundle(BundleName::Rec).system;
    let mut r = rng(3);
    let mut g = TermGen::new(sys, 4);
    let (mut checked, mut attempts) = (0, 0);
    while checked < 100 && attempts < 5_000 {
        attempts += 1;
        let t = g.closed(&mut r);
        let Some(step) = redexes(sys, &t).choose(&mut r).cloned() else {
            continue;
        };
        let (Some(a), Some(b)) = (eval_det(sys, &t, 6, 200_000), eval_det(sys, &step.reduct, 6, 200_000)) else {
            continue;
        };
        ensure(obs_leq(&a, &b), || {
            format!(
                "{} gives {a} but {} gives {b}",
                print_term(&t),
                print_term(&step.reduct)
            )
        })?;
        checked += 1;
    }
    ensure(checked >= 100, || format!("only {checked} Det steps"))?;
    within(start, Duration::from_secs(30))?;
    Ok(format!("{checked} one-step reductions, {:.2?}", start.elapsed()))
}

fn simulation() -> Outcome {
    let start = Instant::now();
    let sys: &RewriteSystem = &bundle(BundleName::Rec).system;
    let strat = StratSystem::new(sys.clone());
    let mut r = rng(4);
    let mut g = TermGen::new(sys, 4);
    let (mut runs, mut steps, mut attempts) = (0, 0, 0);
    while runs < 50 && attempts < 2_000 {
        attempts += 1;
        let mut m = g.closed(&mut r);
        let mut a = strat_term(&m, 8);
        let len = r.gen_range(1..=8);
        let mut taken = 0;
        for _ in 0..len {
            let Some(step) = redexes(sys, &m).choose(&mut r).cloned() else {
                break;
            };
            let b = simulate_step(&strat, &a, (&m, &step.position, &step.reduct))
                .map_err(|e| format!("{} at {}: {e}", print_term(&m), step.position))?;
            ensure(approx(&b, &step.reduct), || {
                format!("{} does not erase to {}", print_term(&b), print_term(&step.reduct))
            })?;
            m = step.reduct;
            a = b;
            taken += 1;
        }
        if taken > 0 {
            runs += 1;
            steps += taken;
        }
    }
    ensure(runs >= 50, || format!("only {runs} reductions"))?;
    Ok(format!(
        "{runs} reductions, {steps} simulated steps, {:.2?}",
        start.elapsed()
    ))
}

fn approximation_levels() -> Outcome {
    let sys = &bundle(BundleName::Core).system;
    let lh = parse_term("lh cons(0,nil)", sys.signature()).unwrap();
    let at1 = eval_det(sys, &lh, 1, 100_000);
    ensure(at1 == Some(Observation::Bot), || format!("level 1 gave {at1:?}"))?;
    for n in 2..=8 {
        let o = eval_det(sys, &lh, n, 100_000);
        ensure(o == Some(numeral(1)), || format!("level {n} gave {o:?}"))?;
    }
    let rec = &bundle(BundleName::Rec).system;
    let mut r = rng(5);
    let mut g = TermGen::new(rec, 4);
    let mut terms = 0;
    for _ in 0..100 {
        let t = g.closed(&mut r);
        let obs: Vec<Option<Observation>> = (1..=6).map(|n| eval_det(rec, &t, n, 200_000)).collect();
        for i in 0..obs.len() {
            for j in i + 1..obs.len() {
                if let (Some(a), Some(b)) = (&obs[i], &obs[j]) {
                    ensure(obs_leq(a, b), || {
                        format!(
                            "{}: level {} gives {a}, level {} gives {b}",
                            print_term(&t),
                            i + 1,
                            j + 1
                        )
                    })?;
                }
            }
        }
        terms += 1;
    }
    Ok(format!("lh: bot at 1, S(0) at 2..8; monotone on {terms} terms"))
}

fn mbr_demo() -> Outcome {
    let start = Instant::now();
    let b = bundle(BundleName::Mbr);
    let sys = &b.system;
    let t = &b.main_demo().term;
    let strat = StratSystem::new(sys.clone());
    let mut notes = Vec::new();
    for n in 1..=5 {
        let v = sn_search(&strat, &strat_term(t, n), 100_000).verdict;
        ensure(matches!(v, SnVerdict::CertifiedSn { .. }), || {
            format!("stratTerm at {n}: {v:?}")
        })?;
    }
    notes.push("stratTerm certified for n=1..5".to_string());
    let direct = sn_search(sys, t, 100_000);
    ensure(direct.longest_reduction().is_some(), || {
        format!("direct search: {:?}", direct.verdict)
    })?;
    notes.push(format!("direct SN in {} states", direct.states_explored));
    let at3 = eval_det(sys, t, 3, 10_000_000);
    let least = (3..=16).find(|&n| eval_det(sys, t, n, 10_000_000) == Some(numeral(2)));
    within(start, Duration::from_secs(60))?;
    if at3 != Some(numeral(2)) {
        return Err(format!(
            "{}; level 3 gives {}, least level giving 2 is {}",
            notes.join(", "),
            at3.map_or("Unknown".to_string(), |o| o.to_string()),
            least.map_or("above 16".to_string(), |n| n.to_string())
        ));
    }
    Ok(format!(
        "level 3 gives 2, {}, {:.2?}",
        notes.join(", "),
        start.elapsed()
    ))
}

fn pipeline() -> Outcome {
    let b = bundle(BundleName::Mbr);
    let demo = b.main_demo();
    let input = PipelineInput {
        system: &b.system,
        delta: &b.delta,
        evidence: &b.evidence,
        attestation: &b.attestation,
        term: &demo.term,
        derivation: &demo.derivation,
    };
    let cert = pipeline_sn(&input, &CrossCheckOptions::default()).map_err(|r| format!("MBR refused: {r}"))?;

    let looping = with_looping_constant(b);
    let sig = looping.system.signature();
    let deriv = derive(&looping.delta, sig, "if {nat} T 0 (omega 0)").map_err(|e| e.to_string())?;
    let term = parse_term("if T 0 (omega 0)", sig).unwrap();
    let input = PipelineInput {
        system: &looping.system,
        delta: &looping.delta,
        evidence: &looping.evidence,
        attestation: &looping.attestation,
        term: &term,
        derivation: &deriv,
    };
    match pipeline_sn(&input, &CrossCheckOptions::default()) {
        Err(r) => ensure(r.premise == Premise::Totality, || format!("refused at {:?}", r.premise))?,
        Ok(_) => return Err("certified a term with an unattested looping constant".into()),
    }
    match sn_search(&looping.system, &term, 1_000).verdict {
        SnVerdict::NotSn { witness_cycle } => {
            ensure(
                witness_cycle
                    .first()
                    .zip(witness_cycle.last())
                    .is_some_and(|(a, z)| a.alpha_eq(z)),
                || "cycle does not close".into(),
            )?;
            Ok(format!(
                "certificate at type {}; omega refused at totality; NotSN cycle of {} terms",
                cert.ty,
                witness_cycle.len()
            ))
        }
        v => Err(format!("if T 0 (omega 0): {v:?}")),
    }
}

fn addition() -> Outcome {
    let sys = &bundle(BundleName::Rec).system;
    let mut cases = 0;
    for m in 0..=8u64 {
        for n in 0..=8u64 {
            let t = parse_term(&format!("add {m} {n}"), sys.signature()).unwrap();
            let want = parse_term(&(m + n).to_string(), sys.signature()).unwrap();
            let got = normalize(sys, &t, Strategy::LeftmostOutermost, 100_000);
            ensure(got.normal_form() == Some(&want), || format!("add {m} {n}: {got:?}"))?;
            let o = eval_det(sys, &t, 12, 1_000_000);
            ensure(o == Some(numeral(m + n)), || format!("add {m} {n} evaluates to {o:?}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases exact"))
}

fn typing() -> Outcome {
    let sig = bundle(BundleName::Core).system.signature().clone();
    let delta = bundle(BundleName::Core).delta.clone();
    let json = |s: &str| Derivation::from_json(&serde_json::from_str(s).unwrap(), &sig).map_err(|e| e.to_string());
    let id = json(
        r#"{"rule": "Gen", "ctx": {}, "term": "\\x. x", "type": "forall p. p -> p", "tvar": "p",
            "children": [{"rule": "Abs", "ctx": {}, "term": "\\x. x", "type": "p -> p",
              "children": [{"rule": "Var", "ctx": {"x": "p"}, "term": "x", "type": "p", "children": []}]}]}"#,
    )?;
    let j = check_f_derivation(&delta, &id).map_err(|e| format!("identity: {e:?}"))?;
    let cons = derive(&delta, &sig, "cons(0, nil{nat})").map_err(|e| e.to_string())?;
    let k = check_f_derivation(&delta, &cons).map_err(|e| format!("cons: {e:?}"))?;
    ensure(k.ty.to_string() == "list nat", || format!("cons typed as {}", k.ty))?;
    let bad = json(
        r#"{"rule": "Gen", "ctx": {"x": "p"}, "term": "x", "type": "forall p. p", "tvar": "p",
            "children": [{"rule": "Var", "ctx": {"x": "p"}, "term": "x", "type": "p", "children": []}]}"#,
    )?;
    ensure(check_derivation(&delta, &bad).is_err(), || {
        "Gen with p free in the context accepted".into()
    })?;
    let mut rules = 0;
    for b in builtin_systems() {
        let omega = lift_typing_to_omega(&b.delta);
        for e in &b.evidence {
            for d in [&e.lhs, &e.rhs] {
                check_derivation(&b.delta, d).map_err(|v| format!("{}: {v:?}", b.name))?;
            }
            let l = e.lift_to_level(2);
            for d in [&l.lhs, &l.rhs] {
                check_derivation(&omega, d).map_err(|v| format!("{} lifted: {v:?}", b.name))?;
            }
            rules += 1;
        }
    }
    Ok(format!(
        "{j}; cons(0,nil) : list nat; Gen violation rejected; evidence for {rules} rules checks"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("validation", validation),
        ("pattern inverse laws", pattern_laws),
        ("one-step reduction order", reduction_order),
        ("stratified simulation", simulation),
        ("approximation levels", approximation_levels),
        ("MBR demo", mbr_demo),
        ("SN pipeline", pipeline),
        ("addition oracle", addition),
        ("typing", typing),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({took:.2?}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({took:.2?}): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
