use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value as Json};

use applam::library::{resolve_bundle, BundleName, BundledSystem};
use applam::rewrite::{
    load_system, normalize_traced, sn_search, strategy_step, NormalizeOutcome, RewriteSystem, RuleSource, RwlError,
    SnReport, SnVerdict, Strategy, Violation, ViolationKind,
};
use applam::semantics::{eval_term, observe, Env, EvalOutcome};
use applam::stratify::{strat_term, StratSystem};
use applam::syntax::{parse_leveled_term, parse_term, print_term, Signature, Term};
use applam::typesystem::{
    check_derivation, evidence_from_json, pipeline_sn, ConstTyping, CrossCheckOptions, Derivation, PipelineInput,
    TotalityAttestation,
};

const POSITIVE: u8 = 0;
const NEGATIVE: u8 = 1;
const UNKNOWN: u8 = 2;
const USAGE: u8 = 3;

/// Applied lambda calculi: rewriting, strict approximation semantics,
/// stratification and a System F strong-normalisation pipeline.
///
/// SYS is a path to a .rwl file or a bundle name (core, rec, mbr, bbc, open).
/// TERM is term text, or @FILE to read it from a file.
///
/// Exit codes: 0 positive verdict, 1 negative verdict, 2 unknown or budget
/// exhausted, 3 usage or parse error.
#[derive(Parser, Debug)]
#[command(name = "applam", version)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a system is a valid rewrite system.
    Validate { sys: String },
    /// Perform reduction steps under a strategy, printing each one.
    Reduce {
        sys: String,
        term: String,
        #[arg(long, default_value = "leftmost-outermost")]
        strategy: Strategy,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Reduce to normal form under a strategy.
    Normalize {
        sys: String,
        term: String,
        #[arg(long, default_value = "leftmost-outermost")]
        strategy: Strategy,
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
    },
    /// Bounded search of the reduction graph for strong normalisation.
    Sn {
        sys: String,
        term: String,
        #[arg(long, default_value_t = 100_000)]
        max_states: usize,
    },
    /// Stratify a term at a level and search its reduction graph under the stratified rules.
    Stratify {
        sys: String,
        term: String,
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = 100_000)]
        max_states: usize,
    },
    /// Evaluate a closed term in the level-n approximation of the semantics.
    Eval {
        sys: String,
        term: String,
        #[command(flatten)]
        eval: EvalFlags,
    },
    /// Check a derivation tree in JSON.
    Typecheck {
        deriv: PathBuf,
        /// System whose signature the derivation's terms use.
        #[arg(long)]
        system: Option<String>,
        /// Constant typing file; defaults to the bundle's when SYSTEM is a bundle.
        #[arg(long)]
        delta: Option<PathBuf>,
    },
    /// Certify strong normalisation of a typed closed term.
    Pipeline {
        sys: String,
        delta: PathBuf,
        evidence: PathBuf,
        attest: PathBuf,
        term: String,
        deriv: PathBuf,
        /// Cross-check with a bounded reduction graph search.
        #[arg(long)]
        max_states: Option<usize>,
        /// Cross-check with an evaluation at this level.
        #[arg(long)]
        level: Option<u32>,
        #[arg(long, default_value_t = 1_000_000)]
        fuel: u64,
    },
    /// Run a bundled demo: reduction trace, normal form and SN search.
    Demo {
        name: String,
        #[arg(long, default_value_t = 100_000)]
        max_states: usize,
        /// Also evaluate at this level.
        #[arg(long)]
        level: Option<u32>,
        #[arg(long, default_value_t = 1_000_000)]
        fuel: u64,
    },
}

#[derive(Args, Debug)]
struct EvalFlags {
    #[arg(long, default_value_t = 8)]
    level: u32,
    #[arg(long, default_value_t = 1_000_000)]
    fuel: u64,
    /// Observation depth for the printed result.
    #[arg(long, default_value_t = 32)]
    depth: usize,
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

type Run = Result<u8, Usage>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { POSITIVE });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
    }
}

fn run(cli: Cli) -> Run {
    let json = cli.json;
    match cli.command {
        Command::Validate { sys } => validate(&sys, json),
        Command::Reduce {
            sys,
            term,
            strategy,
            steps,
        } => {
            let system = load_sys(&sys)?.system;
            let t = read_term(&term, system.signature())?;
            reduce(&system, t, strategy, steps, json)
        }
        Command::Normalize {
            sys,
            term,
            strategy,
            steps,
        } => {
            let system = load_sys(&sys)?.system;
            let t = read_term(&term, system.signature())?;
            normalize_cmd(&system, &t, strategy, steps, json)
        }
        Command::Sn { sys, term, max_states } => {
            let system = load_sys(&sys)?.system;
            let t = read_term(&term, system.signature())?;
            let report = sn_search(&system, &t, max_states);
            Ok(emit_sn(&t, &report, json))
        }
        Command::Stratify {
            sys,
            term,
            level,
            max_states,
        } => {
            let system = load_sys(&sys)?.system;
            let t = read_term(&term, system.signature())?;
            let st = strat_term(&t, level);
            let strat = StratSystem::new(system);
            let report = sn_search(&strat, &st, max_states);
            Ok(emit_sn(&st, &report, json))
        }
        Command::Eval { sys, term, eval } => {
            let system = load_sys(&sys)?.system;
            let text = read_text(&term)?;
            let t = parse_leveled_term(&text, system.signature())?;
            eval_cmd(&system, &t, &eval, json)
        }
        Command::Typecheck { deriv, system, delta } => typecheck(&deriv, system.as_deref(), delta.as_deref(), json),
        Command::Pipeline {
            sys,
            delta,
            evidence,
            attest,
            term,
            deriv,
            max_states,
            level,
            fuel,
        } => {
            let system = load_sys(&sys)?.system;
            let sig = system.signature();
            let delta = ConstTyping::parse(&read_file(&delta)?)?;
            let evidence = evidence_from_json(&read_json(&evidence)?, sig)?;
            let attestation: TotalityAttestation = serde_json::from_str(&read_file(&attest)?)?;
            let t = read_term(&term, sig)?;
            let d = read_derivation(&deriv, sig)?;
            let input = PipelineInput {
                system: &system,
                delta: &delta,
                evidence: &evidence,
                attestation: &attestation,
                term: &t,
                derivation: &d,
            };
            let opts = CrossCheckOptions {
                sn_max_states: max_states,
                eval_level: level,
                eval_fuel: fuel,
            };
            Ok(match pipeline_sn(&input, &opts) {
                Ok(cert) => {
                    if json {
                        println!("{}", json!({"certified": true, "certificate": cert}));
                    } else {
                        println!("{cert}");
                    }
                    POSITIVE
                }
                Err(refusal) => {
                    if json {
                        println!("{}", json!({"certified": false, "refusal": refusal}));
                    } else {
                        println!("{refusal}");
                    }
                    NEGATIVE
                }
            })
        }
        Command::Demo {
            name,
            max_states,
            level,
            fuel,
        } => {
            let b = resolve_bundle(name.parse::<BundleName>()?)?;
            demo(&b, max_states, level, fuel, json)
        }
    }
}

struct Loaded {
    system: RewriteSystem,
}

fn load_sys(arg: &str) -> Result<Loaded, Usage> {
    if !Path::new(arg).exists() {
        if let Ok(name) = arg.parse::<BundleName>() {
            return Ok(Loaded {
                system: resolve_bundle(name)?.system,
            });
        }
    }
    Ok(Loaded {
        system: load_system(&read_file(Path::new(arg))?)?,
    })
}

fn read_file(path: &Path) -> Result<String, Usage> {
    std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Json, Usage> {
    serde_json::from_str(&read_file(path)?).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn read_text(arg: &str) -> Result<String, Usage> {
    match arg.strip_prefix('@') {
        Some(path) => read_file(Path::new(path)),
        None => Ok(arg.to_string()),
    }
}

fn read_term(arg: &str, sig: &Signature) -> Result<Term, Usage> {
    Ok(parse_term(&read_text(arg)?, sig)?)
}

/// A derivation object, or an object with a `derivation` field.
fn read_derivation(path: &Path, sig: &Signature) -> Result<Derivation, Usage> {
    let v = read_json(path)?;
    let node = v.get("derivation").unwrap_or(&v);
    Ok(Derivation::from_json(node, sig)?)
}

fn violation_json(v: &Violation) -> Json {
    let mut o = json!({"rule": v.rule, "message": v.to_string()});
    if let ViolationKind::Unifiable { other, unifier } = &v.kind {
        o["other"] = json!(other);
        o["unifier"] = json!(unifier.to_string());
    }
    o
}

fn validate(sys: &str, json: bool) -> Run {
    let text = if !Path::new(sys).exists() && sys.parse::<BundleName>().is_ok() {
        resolve_bundle(sys.parse()?)?.system.to_rwl()
    } else {
        read_file(Path::new(sys))?
    };
    match load_system(&text) {
        Ok(system) => {
            if json {
                println!(
                    "{}",
                    json!({"valid": true, "rules": system.rules().len(), "constants": system.signature().constants().count()})
                );
            } else {
                println!(
                    "valid: {} rules over {} constants",
                    system.rules().len(),
                    system.signature().constants().count()
                );
            }
            Ok(POSITIVE)
        }
        Err(RwlError::Invalid(vs)) => {
            if json {
                let vs: Vec<Json> = vs.iter().map(violation_json).collect();
                println!("{}", json!({"valid": false, "violations": vs}));
            } else {
                println!("invalid:");
                for v in &vs {
                    println!("  {v}");
                }
            }
            Ok(NEGATIVE)
        }
        Err(e) => Err(e.into()),
    }
}

fn reduce<S: RuleSource + ?Sized>(source: &S, mut t: Term, strategy: Strategy, steps: usize, json: bool) -> Run {
    let mut trace = Vec::new();
    if !json {
        println!("{}", print_term(&t));
    }
    for _ in 0..steps {
        let Some(step) = strategy_step(source, &t, strategy) else {
            break;
        };
        if json {
            trace.push(json!({"position": step.position.to_string(), "kind": step.kind.to_string(), "term": print_term(&step.reduct)}));
        } else {
            println!("  -> [{} at {}] {}", step.kind, step.position, print_term(&step.reduct));
        }
        t = step.reduct;
    }
    let normal = strategy_step(source, &t, strategy).is_none();
    if json {
        println!("{}", json!({"steps": trace, "term": print_term(&t), "normal": normal}));
    } else if normal {
        println!("normal form reached");
    } else {
        println!("step budget used; not yet normal");
    }
    Ok(if normal { POSITIVE } else { UNKNOWN })
}

fn normalize_cmd<S: RuleSource + ?Sized>(source: &S, t: &Term, strategy: Strategy, steps: usize, json: bool) -> Run {
    let outcome = normalize_traced(source, t, strategy, steps, |_| {});
    let (term, done) = match &outcome {
        NormalizeOutcome::NormalForm { term, .. } => (term, true),
        NormalizeOutcome::Timeout { last, .. } => (last, false),
    };
    if json {
        println!(
            "{}",
            json!({"normal": done, "term": print_term(term), "steps": outcome.steps()})
        );
    } else if done {
        println!("{}", print_term(term));
        println!("({} steps)", outcome.steps());
    } else {
        println!("no normal form within {} steps; last term:", outcome.steps());
        println!("{}", print_term(term));
    }
    Ok(if done { POSITIVE } else { UNKNOWN })
}

fn sn_json(t: &Term, r: &SnReport) -> Json {
    let mut o = json!({
        "term": print_term(t),
        "states_explored": r.states_explored,
        "edges": r.edges,
    });
    match &r.verdict {
        SnVerdict::CertifiedSn { longest_reduction } => {
            o["verdict"] = json!("certified-sn");
            o["longest_reduction"] = json!(longest_reduction);
        }
        SnVerdict::NotSn { witness_cycle } => {
            o["verdict"] = json!("not-sn");
            o["witness_cycle"] = json!(witness_cycle.iter().map(print_term).collect::<Vec<_>>());
        }
        SnVerdict::Exhausted => o["verdict"] = json!("exhausted"),
    }
    o
}

fn emit_sn(t: &Term, r: &SnReport, json: bool) -> u8 {
    if json {
        println!("{}", sn_json(t, r));
    } else {
        println!("term: {}", print_term(t));
        match &r.verdict {
            SnVerdict::CertifiedSn { longest_reduction } => println!(
                "certified SN: {} states, longest reduction {longest_reduction}",
                r.states_explored
            ),
            SnVerdict::NotSn { witness_cycle } => {
                println!("not SN: cycle of length {}", witness_cycle.len().saturating_sub(1));
                for (i, t) in witness_cycle.iter().enumerate() {
                    println!("  {}{}", if i == 0 { "" } else { "-> " }, print_term(t));
                }
            }
            SnVerdict::Exhausted => println!("exhausted after {} states", r.states_explored),
        }
    }
    match r.verdict {
        SnVerdict::CertifiedSn { .. } => POSITIVE,
        SnVerdict::NotSn { .. } => NEGATIVE,
        SnVerdict::Exhausted => UNKNOWN,
    }
}

fn eval_cmd(system: &RewriteSystem, t: &Term, flags: &EvalFlags, json: bool) -> Run {
    let outcome = eval_term(system, t, &Env::new(), flags.level, flags.fuel)?;
    let (code, obs) = match &outcome {
        EvalOutcome::Det(v) => {
            let o = observe(v, flags.depth);
            (if o.is_bot() { NEGATIVE } else { POSITIVE }, Some(o))
        }
        EvalOutcome::Unknown => (UNKNOWN, None),
    };
    if json {
        let out = match &obs {
            Some(o) => json!({"outcome": "det", "observation": o, "text": o.to_string(), "level": flags.level}),
            None => json!({"outcome": "unknown", "level": flags.level}),
        };
        println!("{out}");
    } else {
        match &obs {
            Some(o) => println!("Det {o}"),
            None => println!("Unknown (fuel {} exhausted)", flags.fuel),
        }
    }
    Ok(code)
}

fn typecheck(deriv: &Path, system: Option<&str>, delta: Option<&Path>, json: bool) -> Run {
    let mut bundle: Option<BundledSystem> = None;
    let sig = match system {
        Some(s) => {
            if !Path::new(s).exists() {
                if let Ok(name) = s.parse::<BundleName>() {
                    bundle = Some(resolve_bundle(name)?);
                }
            }
            match &bundle {
                Some(b) => b.system.signature().clone(),
                None => load_sys(s)?.system.signature().clone(),
            }
        }
        None => Signature::with_builtins(),
    };
    let delta = match (delta, &bundle) {
        (Some(p), _) => ConstTyping::parse(&read_file(p)?)?,
        (None, Some(b)) => b.delta.clone(),
        (None, None) => ConstTyping::new(),
    };
    let d = read_derivation(deriv, &sig)?;
    match check_derivation(&delta, &d) {
        Ok(j) => {
            let closed = j.ctx.is_empty() && j.ty.is_closed();
            if json {
                println!(
                    "{}",
                    json!({"valid": true, "judgement": j.to_string(), "term": print_term(&j.term), "type": j.ty.to_string(), "closed": closed})
                );
            } else {
                println!("valid: {j}");
                if closed {
                    println!("closed judgement (empty context, closed type)");
                }
            }
            Ok(POSITIVE)
        }
        Err(vs) => {
            if json {
                let vs: Vec<Json> = vs
                    .iter()
                    .map(|v| json!({"path": v.path.to_string(), "rule": v.rule.to_string(), "message": v.message}))
                    .collect();
                println!("{}", json!({"valid": false, "violations": vs}));
            } else {
                println!("invalid:");
                for v in &vs {
                    println!("  {v}");
                }
            }
            Ok(NEGATIVE)
        }
    }
}

fn demo(b: &BundledSystem, max_states: usize, level: Option<u32>, fuel: u64, json: bool) -> Run {
    let d = b.main_demo();
    let mut trace = Vec::new();
    let outcome = normalize_traced(&b.system, &d.term, Strategy::LeftmostOutermost, 100_000, |r| {
        trace.push((r.kind.to_string(), r.position.to_string(), print_term(&r.reduct)))
    });
    let nf = outcome.normal_form().cloned();
    let matches = nf.as_ref().is_some_and(|t| t.alpha_eq(&d.expected));
    let report = sn_search(&b.system, &d.term, max_states);
    let eval = match level {
        Some(n) => Some((n, eval_term(&b.system, &d.term, &Env::new(), n, fuel)?)),
        None => None,
    };
    if json {
        let steps: Vec<Json> = trace
            .iter()
            .map(|(k, p, t)| json!({"kind": k, "position": p, "term": t}))
            .collect();
        let mut out = json!({
            "bundle": b.name,
            "demo": d.name,
            "term": print_term(&d.term),
            "type": d.derivation.ty.to_string(),
            "trace": steps,
            "normal_form": nf.as_ref().map(print_term),
            "expected": print_term(&d.expected),
            "matches": matches,
            "sn": sn_json(&d.term, &report),
        });
        if let Some((n, o)) = &eval {
            out["eval"] = match o {
                EvalOutcome::Det(v) => json!({"level": n, "outcome": "det", "observation": observe(v, 32)}),
                EvalOutcome::Unknown => json!({"level": n, "outcome": "unknown"}),
            };
        }
        println!("{out}");
    } else {
        println!(
            "demo {} ({}): {} : {}",
            d.name,
            b.name,
            print_term(&d.term),
            d.derivation.ty
        );
        for (k, p, t) in &trace {
            println!("  -> [{k} at {p}] {t}");
        }
        match &nf {
            Some(t) => println!("normal form: {} (expected {})", print_term(t), print_term(&d.expected)),
            None => println!("no normal form within the step budget"),
        }
        match &report.verdict {
            SnVerdict::CertifiedSn { longest_reduction } => println!(
                "CertifiedSN: {} states explored, longest reduction {longest_reduction}",
                report.states_explored
            ),
            SnVerdict::NotSn { witness_cycle } => println!("NotSN: cycle of length {}", witness_cycle.len() - 1),
            SnVerdict::Exhausted => println!("Exhausted after {} states", report.states_explored),
        }
        if let Some((n, o)) = &eval {
            match o {
                EvalOutcome::Det(v) => println!("eval at level {n}: Det {}", observe(v, 32)),
                EvalOutcome::Unknown => println!("eval at level {n}: Unknown"),
            }
        }
    }
    Ok(match (&report.verdict, matches) {
        (SnVerdict::CertifiedSn { .. }, true) => POSITIVE,
        (SnVerdict::Exhausted, true) => UNKNOWN,
        _ => NEGATIVE,
    })
}
