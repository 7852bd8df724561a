use std::collections::HashMap;

use crate::syntax::{Canon, Term};

use super::reduce::redexes;
use super::system::RuleSource;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SnVerdict {
    /// The whole reduction graph was explored and is acyclic.
    CertifiedSn { longest_reduction: usize },
    /// A reduction cycle; the last term is α-equal to the first.
    NotSn { witness_cycle: Vec<Term> },
    /// The state budget ran out before either verdict was reached.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnReport {
    pub verdict: SnVerdict,
    pub states_explored: usize,
    pub edges: usize,
}

impl SnReport {
    pub fn is_certified(&self) -> bool {
        matches!(self.verdict, SnVerdict::CertifiedSn { .. })
    }

    pub fn longest_reduction(&self) -> Option<usize> {
        match self.verdict {
            SnVerdict::CertifiedSn { longest_reduction } => Some(longest_reduction),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Fresh,
    OnPath,
    Done,
}

struct Graph {
    terms: Vec<Term>,
    index: HashMap<Canon, usize>,
    succ: Vec<Option<Vec<usize>>>,
    mark: Vec<Mark>,
    longest: Vec<usize>,
    edges: usize,
}

impl Graph {
    fn intern(&mut self, t: Term) -> (usize, bool) {
        let key = t.canonical();
        if let Some(&i) = self.index.get(&key) {
            return (i, false);
        }
        let i = self.terms.len();
        self.index.insert(key, i);
        self.terms.push(t);
        self.succ.push(None);
        self.mark.push(Mark::Fresh);
        self.longest.push(0);
        (i, true)
    }
}

/// Explores the reduction graph of `term` depth-first, identifying
/// α-equivalent terms, until it is exhausted, a cycle shows up, or more
/// than `max_states` distinct terms have been seen.
pub fn sn_search<S: RuleSource + ?Sized>(source: &S, term: &Term, max_states: usize) -> SnReport {
    let max_states = max_states.max(1);
    let mut g = Graph {
        terms: Vec::new(),
        index: HashMap::new(),
        succ: Vec::new(),
        mark: Vec::new(),
        longest: Vec::new(),
        edges: 0,
    };
    let (root, _) = g.intern(term.clone());
    // (node, next successor to visit)
    let mut path: Vec<(usize, usize)> = vec![(root, 0)];
    g.mark[root] = Mark::OnPath;

    while let Some(&(node, next)) = path.last() {
        if g.succ[node].is_none() {
            let mut ids = Vec::new();
            for r in redexes(source, &g.terms[node]) {
                let (id, created) = g.intern(r.reduct);
                if created && g.terms.len() > max_states {
                    return SnReport {
                        verdict: SnVerdict::Exhausted,
                        states_explored: g.terms.len() - 1,
                        edges: g.edges,
                    };
                }
                if !ids.contains(&id) {
                    ids.push(id);
                }
            }
            g.edges += ids.len();
            g.succ[node] = Some(ids);
        }
        let succ = g.succ[node].as_deref().expect("expanded above");
        if next < succ.len() {
            let child = succ[next];
            if let Some(top) = path.last_mut() {
                top.1 += 1;
            }
            match g.mark[child] {
                Mark::Fresh => {
                    g.mark[child] = Mark::OnPath;
                    path.push((child, 0));
                }
                Mark::OnPath => {
                    let start = path.iter().position(|(n, _)| *n == child).expect("on path");
                    let mut witness: Vec<Term> = path[start..].iter().map(|(n, _)| g.terms[*n].clone()).collect();
                    witness.push(g.terms[child].clone());
                    return SnReport {
                        verdict: SnVerdict::NotSn { witness_cycle: witness },
                        states_explored: g.terms.len(),
                        edges: g.edges,
                    };
                }
                Mark::Done => {}
            }
        } else {
            let best = succ.iter().map(|&s| g.longest[s] + 1).max().unwrap_or(0);
            g.longest[node] = best;
            g.mark[node] = Mark::Done;
            path.pop();
        }
    }
    SnReport {
        verdict: SnVerdict::CertifiedSn {
            longest_reduction: g.longest[root],
        },
        states_explored: g.terms.len(),
        edges: g.edges,
    }
}
