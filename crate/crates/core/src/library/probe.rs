//! Empirical totality probing: a constant is applied to sampled total
//! arguments and evaluated at a fixed level.
//!
//! Arguments of arrow type come from a small fixed family (constant
//! functions, projections, and applications of one argument to others or to
//! sampled values), so a clean report is evidence, never a proof.

use serde::Serialize;

use crate::rewrite::RewriteSystem;
use crate::semantics::{observe, with_eval_stack, Env, EvalOutcome, Observation, Session};
use crate::syntax::{ConstName, Term};
use crate::typesystem::{ConstTyping, Type};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleSpec {
    /// Numerals `0..=max_nat` for `nat`.
    pub max_nat: usize,
    pub max_list_len: usize,
    /// Cap on the samples generated for any single type.
    pub per_type: usize,
    /// Cap on the argument tuples tried.
    pub max_tuples: usize,
    /// Type substituted for the constant's quantified variables.
    #[serde(serialize_with = "display")]
    pub instance: Type,
    /// Observation depth for results.
    pub depth: usize,
}

fn display<S: serde::Serializer>(t: &Type, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(t)
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            max_nat: 3,
            max_list_len: 2,
            per_type: 8,
            max_tuples: 256,
            instance: Type::Nat,
            depth: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ProbeOutcome {
    NonBot {
        observation: Observation,
    },
    /// Bottom at the probed level; a higher level may still succeed.
    Bot,
    /// Fuel ran out.
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeSample {
    pub args: Vec<String>,
    #[serde(flatten)]
    pub outcome: ProbeOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TotalityProbeReport {
    pub constant: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub level: u32,
    pub fuel: u64,
    pub samples: Vec<ProbeSample>,
}

impl TotalityProbeReport {
    pub fn non_bot(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| matches!(s.outcome, ProbeOutcome::NonBot { .. }))
            .count()
    }

    pub fn all_non_bot(&self) -> bool {
        self.non_bot() == self.samples.len()
    }
}

fn instantiate(ty: &Type, with: &Type) -> Type {
    match ty {
        Type::Forall(p, body) => instantiate(&body.subst(p, with), with),
        _ => ty.clone(),
    }
}

fn uncurry(ty: &Type) -> (Vec<Type>, Type) {
    let mut args = Vec::new();
    let mut t = ty;
    while let Type::Arrow(a, b) = t {
        args.push((**a).clone());
        t = b;
    }
    (args, t.clone())
}

/// Closed sample inhabitants of `ty`.
pub fn sample_values(ty: &Type, spec: &SampleSpec) -> Vec<Term> {
    samples(ty, spec, 3)
}

fn samples(ty: &Type, spec: &SampleSpec, depth: usize) -> Vec<Term> {
    let mut out = match ty {
        Type::Nat => (0..=spec.max_nat).map(Term::numeral).collect(),
        Type::Boole => vec![Term::constr("T", vec![]), Term::constr("F", vec![])],
        Type::Var(_) => return samples(&spec.instance, spec, depth),
        Type::Forall(..) => return samples(&instantiate(ty, &spec.instance), spec, depth),
        Type::List(t) => {
            let elems = samples(t, spec, depth);
            let mut out = vec![Term::list([])];
            let mut layer: Vec<Vec<Term>> = vec![vec![]];
            for _ in 0..spec.max_list_len {
                layer = layer
                    .iter()
                    .flat_map(|prefix| {
                        elems.iter().map(move |e| {
                            let mut v = prefix.clone();
                            v.push(e.clone());
                            v
                        })
                    })
                    .take(spec.per_type)
                    .collect();
                out.extend(layer.iter().map(|items| Term::list(items.clone())));
            }
            out
        }
        Type::Prod(a, b) => {
            let (xs, ys) = (samples(a, spec, depth), samples(b, spec, depth));
            xs.iter()
                .flat_map(|x| ys.iter().map(move |y| Term::constr("pr", vec![x.clone(), y.clone()])))
                .collect()
        }
        Type::Arrow(..) => functions(ty, spec, depth),
    };
    out.truncate(spec.per_type);
    out
}

fn functions(ty: &Type, spec: &SampleSpec, depth: usize) -> Vec<Term> {
    let (args, result) = uncurry(ty);
    let vars: Vec<String> = (0..args.len()).map(|i| format!("x{i}")).collect();
    let close = |body: Term| vars.iter().rev().fold(body, |b, x| Term::abs(x, b));
    let mut out = Vec::new();
    for (i, a) in args.iter().enumerate() {
        if a.alpha_eq(&result) {
            out.push(close(Term::var(&vars[i])));
        }
    }
    if depth > 0 {
        for (i, a) in args.iter().enumerate() {
            let (inner, r) = uncurry(a);
            if inner.is_empty() || !r.alpha_eq(&result) {
                continue;
            }
            let choices: Vec<Vec<Term>> = inner
                .iter()
                .map(|c| {
                    let mut v: Vec<Term> = args
                        .iter()
                        .enumerate()
                        .filter(|(k, ak)| *k != i && ak.alpha_eq(c))
                        .map(|(k, _)| Term::var(&vars[k]))
                        .collect();
                    v.extend(samples(c, spec, depth - 1).into_iter().skip(1).take(1));
                    v.extend(samples(c, spec, depth - 1).into_iter().take(1));
                    v
                })
                .collect();
            for combo in product(&choices, spec.per_type) {
                out.push(close(Term::apps(Term::var(&vars[i]), combo)));
            }
        }
    }
    let constants = samples(&result, spec, depth.saturating_sub(1));
    out.extend(constants.into_iter().take(2).map(close));
    out
}

fn product(choices: &[Vec<Term>], cap: usize) -> Vec<Vec<Term>> {
    let mut acc: Vec<Vec<Term>> = vec![vec![]];
    for c in choices {
        acc = acc
            .iter()
            .flat_map(|prefix| {
                c.iter().map(move |t| {
                    let mut v = prefix.clone();
                    v.push(t.clone());
                    v
                })
            })
            .take(cap)
            .collect();
    }
    acc
}

/// Applies `constant` to sampled argument tuples and evaluates each at `level`.
pub fn probe_totality(
    system: &RewriteSystem,
    delta: &ConstTyping,
    constant: &str,
    spec: &SampleSpec,
    level: u32,
    fuel: u64,
) -> Option<TotalityProbeReport> {
    let c = ConstName::new(constant);
    let ty = instantiate(delta.get(&c)?, &spec.instance);
    let arity = system.signature().constant_arity(&c)?;
    let (args, _) = uncurry(&ty);
    let pools: Vec<Vec<Term>> = args.iter().take(arity).map(|a| sample_values(a, spec)).collect();
    let tuples = product(&pools, spec.max_tuples);
    let samples = with_eval_stack(|| {
        tuples
            .iter()
            .map(|tuple| {
                let term = Term::apps(Term::Const(c.clone()), tuple.iter().cloned());
                let outcome = match Session::new(system, fuel).eval(&term, &Env::new(), level) {
                    Ok(EvalOutcome::Det(v)) => {
                        let o = observe(&v, spec.depth);
                        if o.is_bot() {
                            ProbeOutcome::Bot
                        } else {
                            ProbeOutcome::NonBot { observation: o }
                        }
                    }
                    _ => ProbeOutcome::Unresolved,
                };
                ProbeSample {
                    args: tuple.iter().map(Term::to_string).collect(),
                    outcome,
                }
            })
            .collect()
    });
    Some(TotalityProbeReport {
        constant: constant.to_string(),
        ty: ty.to_string(),
        level,
        fuel,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{bundle, BundleName};

    #[test]
    fn less_than_on_small_numerals() {
        let b = bundle(BundleName::Core);
        let spec = SampleSpec {
            max_nat: 5,
            ..SampleSpec::default()
        };
        let r = probe_totality(&b.system, &b.delta, "<", &spec, 8, 100_000).unwrap();
        assert_eq!(r.samples.len(), 36);
        for s in &r.samples {
            let m: usize = s.args[0].parse().unwrap();
            let n: usize = s.args[1].parse().unwrap();
            let want = if m < n { "T" } else { "F" };
            assert_eq!(
                s.outcome,
                ProbeOutcome::NonBot {
                    observation: Observation::Con(want.into(), vec![])
                }
            );
        }
    }

    #[test]
    fn length_of_short_lists() {
        let b = bundle(BundleName::Core);
        let spec = SampleSpec {
            max_list_len: 4,
            max_nat: 1,
            per_type: 64,
            ..SampleSpec::default()
        };
        let r = probe_totality(&b.system, &b.delta, "lh", &spec, 6, 100_000).unwrap();
        assert!(r.samples.len() > 10);
        for s in &r.samples {
            let len = s.args[0].matches(',').count() + usize::from(s.args[0] != "[]");
            match &s.outcome {
                ProbeOutcome::NonBot { observation } => assert_eq!(observation.as_numeral(), Some(len)),
                other => panic!("{}: {other:?}", s.args[0]),
            }
        }
    }

    #[test]
    fn bar_recursion_family() {
        let b = bundle(BundleName::Mbr);
        let spec = SampleSpec {
            per_type: 3,
            max_list_len: 1,
            max_nat: 2,
            ..SampleSpec::default()
        };
        let r = probe_totality(&b.system, &b.delta, "Phi", &spec, 16, 1_000_000).unwrap();
        assert!(!r.samples.is_empty());
        for s in &r.samples {
            match &s.outcome {
                ProbeOutcome::NonBot { observation } => assert!(observation.as_numeral().is_some(), "{s:?}"),
                other => panic!("{:?}: {other:?}", s.args),
            }
        }
    }

    #[test]
    fn function_samples_have_the_right_shape() {
        let spec = SampleSpec::default();
        let ty = crate::typesystem::parse_type("(nat -> nat) -> nat").unwrap();
        let fs: Vec<String> = sample_values(&ty, &spec).iter().map(Term::to_string).collect();
        assert!(fs.contains(&"\\x0. x0 1".to_string()), "{fs:?}");
        assert!(fs.contains(&"\\x0. 0".to_string()), "{fs:?}");
    }
}
