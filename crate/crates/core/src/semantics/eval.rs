use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rewrite::RuleSource;
use crate::syntax::{Name, Term};

use super::value::{pat_inverse, Closure, ConstApp, Env, MatchResult, Value};

#[derive(Clone, Debug)]
pub enum EvalOutcome {
    /// A lower bound of the denotation at the requested level.
    Det(Value),
    /// Fuel or recursion depth ran out.
    Unknown,
}

impl EvalOutcome {
    pub fn value(&self) -> Option<&Value> {
        match self {
            EvalOutcome::Det(v) => Some(v),
            EvalOutcome::Unknown => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BotStatus {
    NonBot,
    BotCertified,
    Unresolved,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Name),
}

enum Stop {
    Fuel,
    Depth,
    Unbound(Name),
}

type Step<T> = Result<T, Stop>;

pub const DEFAULT_MAX_DEPTH: usize = 200_000;
const EVAL_STACK_BYTES: usize = 1 << 30;

/// One evaluation: a fuel counter, a probe memo and collected diagnostics.
pub struct Session<'s, S: RuleSource + ?Sized> {
    source: &'s S,
    fuel: u64,
    depth: usize,
    max_depth: usize,
    probes: HashMap<*const Closure, (Arc<Closure>, bool)>,
    diagnostics: Vec<String>,
}

impl<'s, S: RuleSource + ?Sized> Session<'s, S> {
    pub fn new(source: &'s S, fuel: u64) -> Self {
        Session {
            source,
            fuel,
            depth: 0,
            max_depth: DEFAULT_MAX_DEPTH,
            probes: HashMap::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub fn fuel_left(&self) -> u64 {
        self.fuel
    }

    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    /// Evaluates `term` at `level`; a function result is probed so that a
    /// determinate answer is never a function whose probe came back `Bot`.
    pub fn eval(&mut self, term: &Term, env: &Env, level: u32) -> Result<EvalOutcome, EvalError> {
        let r = self.eval_in(term, env, level).and_then(|v| self.settle(v));
        self.finish(r)
    }

    pub fn apply(&mut self, f: &Value, a: &Value) -> Result<EvalOutcome, EvalError> {
        let r = self.apply_strict(f, a).and_then(|v| self.settle(v));
        self.finish(r)
    }

    pub fn probe(&mut self, v: &Value) -> BotStatus {
        match self.is_bot(v) {
            Ok(true) => BotStatus::BotCertified,
            Ok(false) => BotStatus::NonBot,
            Err(_) => BotStatus::Unresolved,
        }
    }

    fn finish(&mut self, r: Step<Value>) -> Result<EvalOutcome, EvalError> {
        self.depth = 0;
        match r {
            Ok(v) => Ok(EvalOutcome::Det(v)),
            Err(Stop::Fuel) | Err(Stop::Depth) => Ok(EvalOutcome::Unknown),
            Err(Stop::Unbound(x)) => Err(EvalError::UnboundVariable(x)),
        }
    }

    fn settle(&mut self, v: Value) -> Step<Value> {
        Ok(if self.is_bot(&v)? { Value::Bot } else { v })
    }

    fn tick(&mut self) -> Step<()> {
        if self.fuel == 0 {
            return Err(Stop::Fuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn enter(&mut self) -> Step<()> {
        self.tick()?;
        if self.depth >= self.max_depth {
            return Err(Stop::Depth);
        }
        self.depth += 1;
        Ok(())
    }

    fn eval_in(&mut self, term: &Term, env: &Env, level: u32) -> Step<Value> {
        self.enter()?;
        let r = self.eval_node(term, env, level);
        self.depth -= 1;
        r
    }

    fn eval_node(&mut self, term: &Term, env: &Env, level: u32) -> Step<Value> {
        match term {
            Term::Var(x) => env.lookup(x).cloned().ok_or_else(|| Stop::Unbound(x.clone())),
            Term::Constr(co, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    let v = self.eval_in(a, env, level)?;
                    if self.is_bot(&v)? {
                        return Ok(Value::Bot);
                    }
                    vals.push(v);
                }
                Ok(Value::Constr(co.clone(), vals))
            }
            Term::Const(c) => {
                let lvl = c.level().unwrap_or(level);
                let Some(arity) = self.source.constant_arity(c) else {
                    self.diagnostics
                        .push(format!("undeclared constant `{c}` evaluates to bot"));
                    return Ok(Value::Bot);
                };
                if lvl == 0 || self.source.rules_for(c).is_empty() {
                    return Ok(Value::Bot);
                }
                let app = ConstApp {
                    name: c.clone(),
                    level: lvl,
                    args: Vec::new(),
                };
                if arity == 0 {
                    self.dispatch(&app)
                } else {
                    Ok(Value::ConstFun(Arc::new(app)))
                }
            }
            Term::Abs(x, body) => Ok(Value::Fun(Arc::new(Closure {
                var: x.clone(),
                body: (**body).clone(),
                env: env.clone(),
                level,
            }))),
            Term::App(f, a) => {
                let fv = self.eval_in(f, env, level)?;
                if fv.is_bot() {
                    return Ok(Value::Bot);
                }
                let av = self.eval_in(a, env, level)?;
                self.apply_strict(&fv, &av)
            }
        }
    }

    fn apply_strict(&mut self, f: &Value, a: &Value) -> Step<Value> {
        if f.is_bot() || self.is_bot(a)? {
            return Ok(Value::Bot);
        }
        self.enter()?;
        let r = self.apply_nonbot(f, a);
        self.depth -= 1;
        r
    }

    fn apply_nonbot(&mut self, f: &Value, a: &Value) -> Step<Value> {
        match f {
            Value::Bot => Ok(Value::Bot),
            Value::Dummy => Ok(Value::Dummy),
            Value::Constr(co, _) => {
                self.diagnostics.push(format!(
                    "constructor value `{co}` applied to an argument; result is bot"
                ));
                Ok(Value::Bot)
            }
            Value::Fun(cl) => {
                let env = cl.env.extend(cl.var.clone(), a.clone());
                self.eval_in(&cl.body, &env, cl.level)
            }
            Value::ConstFun(app) => {
                let mut args = app.args.clone();
                args.push(a.clone());
                let next = ConstApp {
                    name: app.name.clone(),
                    level: app.level,
                    args,
                };
                let arity = self.source.constant_arity(&app.name).unwrap_or(0);
                if next.args.len() >= arity {
                    self.dispatch(&next)
                } else {
                    Ok(Value::ConstFun(Arc::new(next)))
                }
            }
        }
    }

    /// Applies the constant's rule whose patterns match; all mismatching
    /// gives `Dummy`, anything undetermined gives `Bot`.
    fn dispatch(&mut self, app: &ConstApp) -> Step<Value> {
        let rules = self.source.rules_for(&app.name);
        let mut undetermined = false;
        for rule in rules.iter() {
            match pat_inverse(&rule.patterns, &app.args) {
                MatchResult::Matched(env) => return self.eval_in(&rule.rhs, &env, app.level - 1),
                MatchResult::NoMatch => {}
                MatchResult::Undetermined => undetermined = true,
            }
        }
        Ok(if undetermined { Value::Bot } else { Value::Dummy })
    }

    /// `Ok(true)` when `v` is (judged to be) bottom. Function values are
    /// applied to `Dummy` and the result judged in turn.
    fn is_bot(&mut self, v: &Value) -> Step<bool> {
        let mut cur = v.clone();
        let mut seen: Vec<Arc<Closure>> = Vec::new();
        let verdict = loop {
            match &cur {
                Value::Bot => break true,
                Value::Constr(..) | Value::ConstFun(_) | Value::Dummy => break false,
                Value::Fun(cl) => {
                    if let Some((_, b)) = self.probes.get(&Arc::as_ptr(cl)) {
                        break *b;
                    }
                    seen.push(cl.clone());
                    self.tick()?;
                    let env = cl.env.extend(cl.var.clone(), Value::Dummy);
                    cur = self.eval_in(&cl.body, &env, cl.level)?;
                }
            }
        };
        for cl in seen {
            self.probes.insert(Arc::as_ptr(&cl), (cl, verdict));
        }
        Ok(verdict)
    }
}

/// Runs `f` on a thread with a large stack so deep evaluations hit the
/// depth guard rather than the native stack limit.
pub fn with_eval_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(EVAL_STACK_BYTES)
            .spawn_scoped(scope, f)
            .expect("spawn evaluation thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

/// Evaluates `term` at `level` with a fresh session of `fuel` steps.
pub fn eval_term<S: RuleSource + Sync + ?Sized>(
    source: &S,
    term: &Term,
    env: &Env,
    level: u32,
    fuel: u64,
) -> Result<EvalOutcome, EvalError> {
    with_eval_stack(|| Session::new(source, fuel).eval(term, env, level))
}

pub fn is_bot_probe<S: RuleSource + Sync + ?Sized>(source: &S, v: &Value, fuel: u64) -> BotStatus {
    with_eval_stack(|| Session::new(source, fuel).probe(v))
}

pub fn apply_value<S: RuleSource + Sync + ?Sized>(source: &S, f: &Value, a: &Value, fuel: u64) -> EvalOutcome {
    with_eval_stack(|| {
        Session::new(source, fuel)
            .apply(f, a)
            .expect("closed values have no unbound variables")
    })
}
