//! Stratified constants `c#n`, the level transform `M ↦ M⁽ⁿ⁾`, the lazily
//! generated stratified system over leveled constants, and step simulation
//! along the erasure relation.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::rewrite::{contract_at, contract_here, validate_system, RewriteSystem, Rule, RuleSource, Violation};
use crate::syntax::{ConstName, Position, Signature, Term};

/// The least set of constants whose rules only mention constants of the set.
pub fn stratified_constants(system: &RewriteSystem) -> BTreeSet<ConstName> {
    let mut all = system.constants();
    for r in system.rules() {
        all.extend(r.rhs.constants());
    }
    let mut strat: BTreeSet<ConstName> = BTreeSet::new();
    loop {
        let mut changed = false;
        for c in &all {
            if strat.contains(c) {
                continue;
            }
            let ok = system
                .rules_for(c)
                .iter()
                .all(|r| r.rhs.constants().iter().all(|d| strat.contains(d)));
            if ok {
                strat.insert(c.clone());
                changed = true;
            }
        }
        if !changed {
            return strat;
        }
    }
}

/// Replaces every constant `c` by `c#n`.
pub fn strat_term(term: &Term, n: u32) -> Term {
    term.map_consts::<()>(&mut |c| Ok(c.at_level(n))).expect("infallible")
}

/// Drops all levels.
pub fn erase(term: &Term) -> Term {
    term.map_consts::<()>(&mut |c| Ok(c.erased())).expect("infallible")
}

/// `a ⪯ m`: erasing the levels of `a` gives `m` up to α.
pub fn approx(a: &Term, m: &Term) -> bool {
    erase(a).alpha_eq(m)
}

/// The stratified system: `c#(n+1) P⃗ ↦ R⁽ⁿ⁾` for every source rule
/// `c P⃗ ↦ R`; no rules for `c#0` or for unleveled constants.
pub struct StratSystem {
    source: RewriteSystem,
    cache: Mutex<HashMap<ConstName, Arc<[Rule]>>>,
}

impl StratSystem {
    pub fn new(source: RewriteSystem) -> Self {
        StratSystem {
            source,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn source(&self) -> &RewriteSystem {
        &self.source
    }

    /// Rules for one leveled constant.
    pub fn omega_rules_for(&self, c: &ConstName) -> Arc<[Rule]> {
        let level = match c.level() {
            Some(l) if l > 0 => l,
            _ => return Arc::from(Vec::new()),
        };
        let mut cache = self.cache.lock().expect("rule cache poisoned");
        cache
            .entry(c.clone())
            .or_insert_with(|| {
                self.source
                    .rules_for(&c.erased())
                    .iter()
                    .map(|r| Rule::new(c.clone(), r.patterns.clone(), strat_term(&r.rhs, level - 1)))
                    .collect::<Vec<_>>()
                    .into()
            })
            .clone()
    }

    /// All rules for levels `1..=max_level` as an ordinary system.
    pub fn materialize(&self, max_level: u32) -> Result<RewriteSystem, Vec<Violation>> {
        let mut rules = Vec::new();
        for level in 1..=max_level {
            for c in self.source.defined_constants() {
                rules.extend(self.omega_rules_for(&c.at_level(level)).iter().cloned());
            }
        }
        validate_system(self.source.signature().clone(), rules)
    }
}

impl RuleSource for StratSystem {
    fn signature(&self) -> &Signature {
        self.source.signature()
    }

    fn rules_for(&self, c: &ConstName) -> Arc<[Rule]> {
        self.omega_rules_for(c)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimulationError {
    #[error("the leveled term does not erase to the source term")]
    NotAnApproximation,
    #[error("no redex at position {0} of the source term")]
    NotARedex(Position),
    #[error("the step does not produce the stated result")]
    WrongResult,
    #[error("`{0}` has level 0 and blocks the redex at position {1}")]
    LevelZero(ConstName, Position),
    #[error("the leveled redex at position {0} cannot be contracted")]
    Stuck(Position),
    #[error("the simulated step leaves the erasure relation")]
    Diverged,
}

/// Given `a ⪯ m` and a step `m → n` at `pos`, performs the corresponding
/// step of `a` in the stratified system.
pub fn simulate_step(strat: &StratSystem, a: &Term, step: (&Term, &Position, &Term)) -> Result<Term, SimulationError> {
    let (m, pos, n) = step;
    if !approx(a, m) {
        return Err(SimulationError::NotAnApproximation);
    }
    let (_, reduct) = contract_at(strat.source(), m, pos).ok_or_else(|| SimulationError::NotARedex(pos.clone()))?;
    if !reduct.alpha_eq(n) {
        return Err(SimulationError::WrongResult);
    }
    let sub = a.subterm(pos).ok_or(SimulationError::NotAnApproximation)?;
    let Some((_, contractum)) = contract_here(strat, sub) else {
        if let (Term::Const(c), _) = sub.spine() {
            if c.level() == Some(0) {
                return Err(SimulationError::LevelZero(c.clone(), pos.clone()));
            }
        }
        return Err(SimulationError::Stuck(pos.clone()));
    };
    let b = a
        .replace_at(pos, contractum)
        .ok_or(SimulationError::NotAnApproximation)?;
    if !approx(&b, n) {
        return Err(SimulationError::Diverged);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::load_system;
    use crate::syntax::{parse_leveled_term, parse_term};

    fn core() -> RewriteSystem {
        load_system(include_str!("../assets/v1/core/system.rwl")).unwrap()
    }

    #[test]
    fn stratified_core() {
        let set = stratified_constants(&core());
        let names: Vec<String> = set.iter().map(|c| c.to_string()).collect();
        assert_eq!(names, vec!["if"]);
    }

    #[test]
    fn mutual_recursion_is_not_stratified() {
        let sys = load_system("const P/1; const Q/1; P x -> Q x; Q x -> P x;").unwrap();
        assert!(stratified_constants(&sys).is_empty());
    }

    #[test]
    fn strat_and_erase() {
        let sys = core();
        let t = parse_term("get s 0", sys.signature()).unwrap();
        let s = strat_term(&t, 2);
        assert_eq!(s.to_string(), "get#2 s 0");
        assert!(approx(&s, &t));
        assert_eq!(erase(&s), t);
        let id = parse_term("\\x. x", sys.signature()).unwrap();
        assert_eq!(strat_term(&id, 7), id);
    }

    #[test]
    fn approx_cases() {
        let sys = core();
        let a = parse_leveled_term("if#3 T x y", sys.signature()).unwrap();
        assert!(approx(&a, &parse_term("if T x y", sys.signature()).unwrap()));
        assert!(!approx(&a, &parse_term("if T x x", sys.signature()).unwrap()));
    }

    #[test]
    fn omega_rules() {
        let strat = StratSystem::new(core());
        let rules = strat.omega_rules_for(&ConstName::leveled("get", 3));
        assert_eq!(rules[1].to_string(), "get#3 cons(x, s) S(n) -> get#2 s n");
        assert!(strat.omega_rules_for(&ConstName::leveled("get", 0)).is_empty());
        assert!(strat.omega_rules_for(&ConstName::new("get")).is_empty());
        assert_eq!(
            strat.omega_rules_for(&ConstName::leveled("if", 1))[0].to_string(),
            "if#1 T x y -> x"
        );
    }

    #[test]
    fn materialized_levels_are_stratified() {
        let strat = StratSystem::new(core());
        let sys = strat.materialize(4).unwrap();
        let set = stratified_constants(&sys);
        for c in sys.defined_constants() {
            assert!(set.contains(c), "{c}");
        }
    }

    #[test]
    fn simulation() {
        let sys = core();
        let strat = StratSystem::new(sys.clone());
        let m = parse_term("lh nil", sys.signature()).unwrap();
        let n = Term::numeral(0);
        let a = parse_leveled_term("lh#2 nil", sys.signature()).unwrap();
        assert_eq!(simulate_step(&strat, &a, (&m, &Position::root(), &n)).unwrap(), n);

        let a0 = parse_leveled_term("lh#0 nil", sys.signature()).unwrap();
        assert!(matches!(
            simulate_step(&strat, &a0, (&m, &Position::root(), &n)),
            Err(SimulationError::LevelZero(..))
        ));

        let beta = parse_term("(\\x. x) 0", sys.signature()).unwrap();
        assert_eq!(simulate_step(&strat, &beta, (&beta, &Position::root(), &n)).unwrap(), n);
    }
}
