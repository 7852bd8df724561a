#![allow(dead_code)]

use applam::library::{bundle, BundleName};
use applam::rewrite::RewriteSystem;
use applam::syntax::{name, ConstName, Name, Pattern, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn core() -> RewriteSystem {
    bundle(BundleName::Core).system.clone()
}

pub fn rec() -> RewriteSystem {
    bundle(BundleName::Rec).system.clone()
}

pub fn mbr() -> RewriteSystem {
    bundle(BundleName::Mbr).system.clone()
}

/// Random closed terms over a system's constants, biased toward
/// saturated constant applications, numerals and lists.
pub struct TermGen<'a> {
    pub system: &'a RewriteSystem,
    pub max_depth: usize,
    counter: usize,
}

impl<'a> TermGen<'a> {
    pub fn new(system: &'a RewriteSystem, max_depth: usize) -> Self {
        TermGen {
            system,
            max_depth,
            counter: 0,
        }
    }

    fn constants(&self) -> Vec<(ConstName, usize)> {
        self.system
            .signature()
            .constants()
            .map(|(c, k)| (ConstName::new(c), k))
            .collect()
    }

    pub fn closed(&mut self, rng: &mut impl Rng) -> Term {
        self.term(rng, self.max_depth, &mut Vec::new())
    }

    fn fresh(&mut self) -> Name {
        self.counter += 1;
        name(&format!("v{}", self.counter))
    }

    fn leaf(&mut self, rng: &mut impl Rng, scope: &[Name]) -> Term {
        match rng.gen_range(0..6) {
            0 | 1 => Term::numeral(rng.gen_range(0..4)),
            2 => Term::constr(if rng.gen_bool(0.5) { "T" } else { "F" }, vec![]),
            3 => {
                let n = rng.gen_range(0..3);
                Term::list((0..n).map(|_| Term::numeral(rng.gen_range(0..3))))
            }
            4 if !scope.is_empty() => Term::Var(scope.choose(rng).unwrap().clone()),
            _ => Term::numeral(rng.gen_range(0..2)),
        }
    }

    pub fn term(&mut self, rng: &mut impl Rng, depth: usize, scope: &mut Vec<Name>) -> Term {
        if depth == 0 {
            return self.leaf(rng, scope);
        }
        match rng.gen_range(0..10) {
            0 | 1 => self.leaf(rng, scope),
            2..=4 => {
                let consts = self.constants();
                let (c, k) = consts.choose(rng).unwrap().clone();
                let args: Vec<Term> = (0..k).map(|_| self.term(rng, depth - 1, scope)).collect();
                Term::apps(Term::Const(c), args)
            }
            5 => {
                let x = self.fresh();
                scope.push(x.clone());
                let body = self.term(rng, depth - 1, scope);
                scope.pop();
                let arg = self.term(rng, depth - 1, scope);
                Term::app(Term::Abs(x, Box::new(body)), arg)
            }
            6 => Term::constr("S", vec![self.term(rng, depth - 1, scope)]),
            7 => Term::constr(
                "cons",
                vec![self.term(rng, depth - 1, scope), self.term(rng, depth - 1, scope)],
            ),
            8 => {
                let x = self.fresh();
                scope.push(x.clone());
                let body = self.term(rng, depth - 1, scope);
                scope.pop();
                Term::Abs(x, Box::new(body))
            }
            _ => {
                let f = self.term(rng, depth - 1, scope);
                let a = self.term(rng, depth - 1, scope);
                Term::app(f, a)
            }
        }
    }
}

/// Random linear constructor pattern with variables drawn from `fresh`.
pub fn random_pattern(rng: &mut impl Rng, depth: usize, fresh: &mut usize) -> Pattern {
    let var = |fresh: &mut usize| {
        *fresh += 1;
        Pattern::var(&format!("p{fresh}"))
    };
    if depth == 0 {
        return var(fresh);
    }
    match rng.gen_range(0..8) {
        0 | 1 => var(fresh),
        2 => Pattern::constr("0", vec![]),
        3 => Pattern::constr("nil", vec![]),
        4 => Pattern::constr(if rng.gen_bool(0.5) { "T" } else { "F" }, vec![]),
        5 => Pattern::constr("S", vec![random_pattern(rng, depth - 1, fresh)]),
        _ => Pattern::constr(
            "cons",
            vec![
                random_pattern(rng, depth - 1, fresh),
                random_pattern(rng, depth - 1, fresh),
            ],
        ),
    }
}

/// Random closed constructor value term (numerals, booleans, lists, functions).
pub fn random_value_term(rng: &mut impl Rng, depth: usize) -> Term {
    if depth == 0 {
        return match rng.gen_range(0..4) {
            0 => Term::numeral(0),
            1 => Term::constr("nil", vec![]),
            2 => Term::constr("T", vec![]),
            _ => Term::abs("z", Term::var("z")),
        };
    }
    match rng.gen_range(0..7) {
        0 => Term::numeral(rng.gen_range(0..3)),
        1 => Term::constr("nil", vec![]),
        2 => Term::constr(if rng.gen_bool(0.5) { "T" } else { "F" }, vec![]),
        3 => Term::abs("z", Term::var("z")),
        4 => Term::constr("S", vec![random_value_term(rng, depth - 1)]),
        _ => Term::constr(
            "cons",
            vec![random_value_term(rng, depth - 1), random_value_term(rng, depth - 1)],
        ),
    }
}
