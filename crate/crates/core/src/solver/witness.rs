//! Witness placement with budget propagation.
//!
//! A model only needs the elements that witness some `MoreThan` formula (any
//! substructure keeps every `AtMost` formula true), so the search places
//! `i + 1` slots per `MoreThan i` formula onto elements with partial
//! valuations. Each placement either reuses an existing element or opens a
//! fresh one; the `AtMost` budgets are then propagated over the partial
//! valuations. Once every slot sits somewhere, the remaining unknown atoms
//! are decided by a small DPLL over the same propagation.

use std::collections::BTreeMap;

use super::cells::{Cell, CellVector};
use super::{Constraint, Lit, Problem, SolverError};

type Element = Vec<Option<bool>>;

#[derive(Clone)]
struct State {
    elements: Vec<Element>,
    /// Slots placed so far, per `MoreThan` formula.
    placed: Vec<u64>,
    /// Element holding the most recent slot of each formula; later slots of
    /// the same formula go strictly to the right.
    last: Vec<Option<usize>>,
}

struct Solver<'a> {
    problem: &'a Problem,
    budget: u64,
    nodes: u64,
    /// Atoms that occur in some nontrivial `AtMost` constraint.
    budget_atoms: Vec<bool>,
}

fn value(e: &Element, lit: Lit) -> Option<bool> {
    e[lit.atom].map(|v| v == lit.positive)
}

/// Make `lit` true (or false) on `e`; `false` on a clash.
fn assign(e: &mut Element, lit: Lit, truth: bool) -> bool {
    let want = lit.positive == truth;
    match e[lit.atom] {
        Some(v) => v == want,
        None => {
            e[lit.atom] = Some(want);
            true
        }
    }
}

/// Propagate every budget to a fixpoint; `false` on a violated budget.
fn propagate(elements: &mut [Element], at_most: &[Constraint]) -> bool {
    loop {
        let mut changed = false;
        for c in at_most {
            if c.is_disjoint() {
                continue;
            }
            let full = elements.iter().filter(|e| value(e, c.a) == Some(true) && value(e, c.b) == Some(true)).count()
                as u64;
            if full > c.bound {
                return false;
            }
            if full < c.bound {
                continue;
            }
            for e in elements.iter_mut() {
                match (value(e, c.a), value(e, c.b)) {
                    (Some(true), None) => {
                        changed |= assign(e, c.b, false);
                    }
                    (None, Some(true)) => {
                        changed |= assign(e, c.a, false);
                    }
                    (None, None) if c.a == c.b => {
                        changed |= assign(e, c.a, false);
                    }
                    _ => {}
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

impl<'a> Solver<'a> {
    fn tick(&mut self) -> Result<(), SolverError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            Err(SolverError::ResourceLimit { nodes: self.budget })
        } else {
            Ok(())
        }
    }

    /// Viable successor states for the next slot of formula `j`.
    fn options(&mut self, state: &State, j: usize) -> Result<Vec<State>, SolverError> {
        let c = self.problem.more_than[j];
        let start = state.last[j].map_or(0, |e| e + 1);
        let mut out = Vec::new();
        for target in start..=state.elements.len() {
            self.tick()?;
            let mut next = state.clone();
            if target == next.elements.len() {
                next.elements.push(vec![None; self.problem.atoms.len()]);
            }
            let e = &mut next.elements[target];
            if !(assign(e, c.a, true) && assign(e, c.b, true)) {
                continue;
            }
            if !propagate(&mut next.elements, &self.problem.at_most) {
                continue;
            }
            next.placed[j] += 1;
            next.last[j] = Some(target);
            out.push(next);
        }
        Ok(out)
    }

    fn place(&mut self, state: State) -> Result<Option<State>, SolverError> {
        let open: Vec<usize> = (0..self.problem.more_than.len())
            .filter(|&j| state.placed[j] <= self.problem.more_than[j].bound)
            .collect();
        if open.is_empty() {
            let mut state = state;
            if state.elements.is_empty() {
                state.elements.push(vec![None; self.problem.atoms.len()]);
                if !propagate(&mut state.elements, &self.problem.at_most) {
                    return Ok(None);
                }
            }
            return self.complete(state);
        }
        let mut best: Option<Vec<State>> = None;
        for j in open {
            let options = self.options(&state, j)?;
            if best.as_ref().map_or(true, |b| options.len() < b.len()) {
                let dead = options.is_empty();
                best = Some(options);
                if dead {
                    break;
                }
            }
        }
        for next in best.unwrap_or_default() {
            if let Some(found) = self.place(next)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }

    /// Decide the unknown budget atoms.
    fn complete(&mut self, state: State) -> Result<Option<State>, SolverError> {
        self.tick()?;
        let unknown = state.elements.iter().enumerate().find_map(|(e, vals)| {
            (0..vals.len()).find(|&a| vals[a].is_none() && self.budget_atoms[a]).map(|a| (e, a))
        });
        let Some((e, a)) = unknown else {
            return Ok(Some(state));
        };
        for truth in [false, true] {
            let mut next = state.clone();
            next.elements[e][a] = Some(truth);
            if propagate(&mut next.elements, &self.problem.at_most) {
                if let Some(found) = self.complete(next)? {
                    return Ok(Some(found));
                }
            }
        }
        Ok(None)
    }
}

fn satisfied(problem: &Problem, cells: &BTreeMap<Cell, u64>) -> bool {
    let count = |c: &Constraint| -> u64 {
        cells
            .iter()
            .filter(|(cell, _)| cell.0[c.a.atom] == c.a.positive && cell.0[c.b.atom] == c.b.positive)
            .map(|(_, n)| n)
            .sum()
    };
    problem.at_most.iter().all(|c| count(c) <= c.bound) && problem.more_than.iter().all(|c| count(c) > c.bound)
}

pub(crate) fn solve(problem: &Problem, node_budget: u64) -> Result<(Option<CellVector>, u64), SolverError> {
    let mut budget_atoms = vec![false; problem.atoms.len()];
    for c in problem.at_most.iter().filter(|c| !c.is_disjoint()) {
        budget_atoms[c.a.atom] = true;
        budget_atoms[c.b.atom] = true;
    }
    let mut solver = Solver { problem, budget: node_budget, nodes: 0, budget_atoms };
    let start = State {
        elements: Vec::new(),
        placed: vec![0; problem.more_than.len()],
        last: vec![None; problem.more_than.len()],
    };
    let found = solver.place(start)?;
    let model = found.map(|state| {
        let mut cells: BTreeMap<Cell, u64> = BTreeMap::new();
        for e in state.elements {
            *cells.entry(Cell(e.into_iter().map(|v| v.unwrap_or(false)).collect())).or_insert(0) += 1;
        }
        debug_assert!(satisfied(problem, &cells));
        CellVector::new(problem.atoms.clone(), cells)
    });
    Ok((model, solver.nodes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::tests::set;

    fn run(texts: &[&str]) -> Option<CellVector> {
        let phi = set(texts);
        let (model, _) = solve(&Problem::compile(&phi), 100_000).unwrap();
        if let Some(m) = &model {
            assert_eq!(m.to_structure().models_set(&phi), Ok(()));
        }
        model
    }

    #[test]
    fn distinct_slots_need_distinct_elements() {
        let m = run(&[">2(p,q)"]).unwrap();
        assert_eq!(m.total(), 3);
        assert!(run(&[">2(p,q)", "<=2(p,p)"]).is_none());
    }

    #[test]
    fn shared_witness_is_found() {
        // one element must witness both existentials
        assert!(run(&[">0(p,q)", ">0(q,r)", "<=0(~p,q)", "<=0(q,~r)", "<=0(~q,r)"]).is_some());
        assert!(run(&[">0(p,q)", ">0(q,r)", "<=0(q,~r)", "<=0(p,r)"]).is_none());
    }

    #[test]
    fn negative_budgets_propagate() {
        // every element is in p or q, and each of those has at most one
        assert!(run(&["<=0(~p,~q)", "<=0(p,p)", "<=0(q,q)"]).is_none());
        assert!(run(&["<=0(~p,~q)", "<=1(p,p)", "<=1(q,q)", ">2(r,r)"]).is_none());
        assert_eq!(run(&["<=0(~p,~q)", "<=1(p,p)", "<=1(q,q)", ">1(r,r)"]).unwrap().total(), 2);
    }

    #[test]
    fn budget_forcing_blocks_reuse() {
        // a second p-and-q element is forbidden, so the r-witness cannot be
        // a fresh p-and-q element
        assert!(run(&[">0(p,q)", "<=0(p,q)"]).is_none());
        assert!(run(&[">0(p,q)", "<=0(p,~r)", "<=0(r,s)", ">0(q,s)", "<=0(q,~p)"]).is_none());
    }
}
