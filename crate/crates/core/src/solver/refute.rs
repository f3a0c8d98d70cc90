//! Witness-chain refutation.
//!
//! Every `>0(p,q)` fact on two positive literals gets a named witness element
//! known to lie in `p` and `q`. Facts `<=0(p,~q)` say `p ⊆ q` and grow the
//! known memberships; a fact `<=1(p,q)` says two witnesses both in `p` and `q`
//! are one element, so their classes merge. A class that lands inside both
//! atoms of some `<=0(p,q)` is a contradiction. Everything else in the input
//! is ignored, which is sound because refuting a subset refutes the whole.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::syntax::{Atom, Formula, FormulaSet, Literal};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "lowercase")]
pub enum TraceStep {
    /// The input contains an absurdity outright.
    Absurd { formula: Formula },
    Witness { witness: String, formula: Formula },
    Subset { witness: String, atom: Atom, via: Formula },
    Merge { kept: String, absorbed: String, via: Formula },
    Violation { witness: String, via: Formula },
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceStep::Absurd { formula } => write!(f, "absurdity {formula}"),
            TraceStep::Witness { witness, formula } => write!(f, "witness {witness} for {formula}"),
            TraceStep::Subset { witness, atom, via } => write!(f, "{witness} in {atom} by {via}"),
            TraceStep::Merge { kept, absorbed, via } => write!(f, "merge {absorbed} into {kept} by {via}"),
            TraceStep::Violation { witness, via } => write!(f, "{witness} violates {via}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refutation {
    pub trace: Vec<TraceStep>,
}

impl Refutation {
    /// The formula the final step contradicts.
    pub fn violated(&self) -> &Formula {
        match self.trace.last().expect("refutations are nonempty") {
            TraceStep::Absurd { formula } => formula,
            TraceStep::Violation { via, .. } => via,
            other => unreachable!("trace ends in {other}"),
        }
    }
}

impl fmt::Display for Refutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.trace {
            writeln!(f, "{step}")?;
        }
        Ok(())
    }
}

struct Chain {
    names: Vec<String>,
    parent: Vec<usize>,
    /// Known memberships at class roots, each with the steps establishing it.
    members: Vec<BTreeMap<Atom, Vec<usize>>>,
    trace: Vec<TraceStep>,
    /// Steps each step relies on.
    deps: Vec<Vec<usize>>,
}

impl Chain {
    fn roots(&self) -> Vec<usize> {
        (0..self.parent.len()).filter(|&w| self.parent[w] == w).collect()
    }

    fn push(&mut self, step: TraceStep, deps: Vec<usize>) -> usize {
        self.trace.push(step);
        self.deps.push(deps);
        self.trace.len() - 1
    }

    fn holds(&self, w: usize, p: &Atom, q: &Atom) -> bool {
        self.members[w].contains_key(p) && self.members[w].contains_key(q)
    }

    fn support(&self, w: usize, atoms: &[&Atom]) -> Vec<usize> {
        atoms.iter().flat_map(|a| self.members[w][*a].iter().copied()).collect()
    }

    /// The trace cut down to the steps `last` depends on, in order.
    fn finish(self, last: usize) -> Refutation {
        let mut keep = vec![false; self.trace.len()];
        let mut stack = vec![last];
        while let Some(s) = stack.pop() {
            if !std::mem::replace(&mut keep[s], true) {
                stack.extend(&self.deps[s]);
            }
        }
        let trace = self.trace.into_iter().zip(keep).filter_map(|(s, k)| k.then_some(s)).collect();
        Refutation { trace }
    }
}

fn positive_pair(f: &Formula) -> Option<(&Atom, &Atom)> {
    let (l, m) = f.args();
    (l.is_positive() && m.is_positive()).then_some((&l.atom, &m.atom))
}

/// `p ⊆ q` read off `<=0(p,~q)`; trivial `p ⊆ p` facts are dropped.
fn subset(f: &Formula) -> Option<(&Atom, &Atom)> {
    if !f.is_at_most() || f.bound() != 0 {
        return None;
    }
    let (l, m): (&Literal, &Literal) = f.args();
    let (sub, sup) = match (l.is_positive(), m.is_positive()) {
        (true, false) => (l, m),
        (false, true) => (m, l),
        _ => return None,
    };
    (sub.atom != sup.atom).then_some((&sub.atom, &sup.atom))
}

/// Try to refute `formulas` by the witness-chain argument. The returned trace
/// keeps only the steps the final contradiction depends on.
pub fn refute_witness_chain(formulas: &FormulaSet) -> Option<Refutation> {
    if let Some(bot) = formulas.iter().find(|f| f.is_absurdity()) {
        return Some(Refutation { trace: vec![TraceStep::Absurd { formula: bot.clone() }] });
    }
    let mut supersets: BTreeMap<&Atom, Vec<(&Atom, &Formula)>> = BTreeMap::new();
    for f in formulas {
        if let Some((sub, sup)) = subset(f) {
            supersets.entry(sub).or_default().push((sup, f));
        }
    }
    let budget = |bound: u64| {
        formulas
            .iter()
            .filter(move |f| f.is_at_most() && f.bound() == bound)
            .filter_map(|f| positive_pair(f).map(|(p, q)| (p, q, f)))
            .collect::<Vec<_>>()
    };
    let empty = budget(0);
    let single = budget(1);

    let mut chain =
        Chain { names: Vec::new(), parent: Vec::new(), members: Vec::new(), trace: Vec::new(), deps: Vec::new() };
    for f in formulas.iter().filter(|f| !f.is_at_most() && f.bound() == 0) {
        if let Some((p, q)) = positive_pair(f) {
            let w = chain.names.len();
            let name = format!("w{w}");
            let step = chain.push(TraceStep::Witness { witness: name.clone(), formula: f.clone() }, vec![]);
            chain.names.push(name);
            chain.parent.push(w);
            chain.members.push([(p.clone(), vec![step]), (q.clone(), vec![step])].into());
        }
    }

    loop {
        // saturate memberships along subset facts
        for w in chain.roots() {
            let mut queue: Vec<Atom> = chain.members[w].keys().cloned().collect();
            while let Some(atom) = queue.pop() {
                for (sup, via) in supersets.get(&atom).into_iter().flatten() {
                    if chain.members[w].contains_key(*sup) {
                        continue;
                    }
                    let deps = chain.members[w][&atom].clone();
                    let step = chain.push(
                        TraceStep::Subset { witness: chain.names[w].clone(), atom: (*sup).clone(), via: (*via).clone() },
                        deps,
                    );
                    chain.members[w].insert((*sup).clone(), vec![step]);
                    queue.push((*sup).clone());
                }
            }
        }
        for w in chain.roots() {
            if let Some((p, q, via)) = empty.iter().find(|(p, q, _)| chain.holds(w, p, q)) {
                let deps = chain.support(w, &[p, q]);
                let last = chain.push(TraceStep::Violation { witness: chain.names[w].clone(), via: (*via).clone() }, deps);
                return Some(chain.finish(last));
            }
        }
        let mut merged = false;
        for (p, q, via) in &single {
            let holders: Vec<usize> = chain.roots().into_iter().filter(|&w| chain.holds(w, p, q)).collect();
            if let Some((&kept, rest)) = holders.split_first() {
                for &absorbed in rest {
                    let mut deps = chain.support(kept, &[p, q]);
                    deps.extend(chain.support(absorbed, &[p, q]));
                    let step = chain.push(
                        TraceStep::Merge {
                            kept: chain.names[kept].clone(),
                            absorbed: chain.names[absorbed].clone(),
                            via: (*via).clone(),
                        },
                        deps,
                    );
                    chain.parent[absorbed] = kept;
                    for (atom, origin) in std::mem::take(&mut chain.members[absorbed]) {
                        chain.members[kept].entry(atom).or_insert_with(|| {
                            let mut origin = origin;
                            origin.push(step);
                            origin
                        });
                    }
                    merged = true;
                }
            }
            if merged {
                break;
            }
        }
        if !merged {
            return None;
        }
    }
}

/// Engine entry point: the refutation, if any, and the trace length.
pub(crate) fn run(formulas: &FormulaSet) -> (Option<Refutation>, u64) {
    let r = refute_witness_chain(formulas);
    let steps = r.as_ref().map_or(0, |r| r.trace.len() as u64);
    (r, steps)
}
