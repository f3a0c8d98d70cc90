//! Exhaustive search over cell vectors.

use std::ops::ControlFlow;

use super::cells::{Cell, CellVector};
use super::{Constraint, Lit, Problem, SolverError};
use crate::syntax::FormulaSet;

struct Search<'a> {
    problem: &'a Problem,
    cells: Vec<Vec<bool>>,
    /// `at_most_in[c][k]`: cell `k` lies in the region of at-most constraint `c`.
    at_most_in: Vec<Vec<bool>>,
    more_than_in: Vec<Vec<bool>>,
    /// `more_than_left[c][k]`: cells at index `>= k` lying in region `c`.
    more_than_left: Vec<Vec<u64>>,
    cell_cap: u64,
    total_cap: u64,
    budget: u64,
    nodes: u64,
    counts: Vec<u64>,
}

fn holds(cell: &[bool], lit: Lit) -> bool {
    cell[lit.atom] == lit.positive
}

fn region(cells: &[Vec<bool>], c: &Constraint) -> Vec<bool> {
    cells.iter().map(|cell| holds(cell, c.a) && holds(cell, c.b)).collect()
}

impl<'a> Search<'a> {
    fn new(problem: &'a Problem, cell_cap: u64, total_cap: u64, budget: u64) -> Self {
        let k = problem.atoms.len();
        let cells: Vec<Vec<bool>> =
            (0..1usize << k).map(|bits| (0..k).map(|i| bits >> i & 1 == 1).collect()).collect();
        let at_most_in = problem.at_most.iter().map(|c| region(&cells, c)).collect();
        let more_than_in: Vec<Vec<bool>> = problem.more_than.iter().map(|c| region(&cells, c)).collect();
        let more_than_left = more_than_in
            .iter()
            .map(|inside| {
                let mut left = vec![0; inside.len() + 1];
                for i in (0..inside.len()).rev() {
                    left[i] = left[i + 1] + u64::from(inside[i]);
                }
                left
            })
            .collect();
        let counts = vec![0; cells.len()];
        Search { problem, cells, at_most_in, more_than_in, more_than_left, cell_cap, total_cap, budget, nodes: 0, counts }
    }

    fn sum(&self, region: &[bool]) -> u64 {
        self.counts.iter().zip(region).filter(|(_, &inside)| inside).map(|(n, _)| n).sum()
    }

    fn feasible(&self, next: usize, total: u64) -> bool {
        let at_most_ok = self
            .problem
            .at_most
            .iter()
            .zip(&self.at_most_in)
            .all(|(c, inside)| self.sum(inside) <= c.bound);
        at_most_ok
            && self.problem.more_than.iter().enumerate().all(|(j, c)| {
                let reachable = (self.more_than_left[j][next] * self.cell_cap).min(self.total_cap - total);
                self.sum(&self.more_than_in[j]) + reachable > c.bound
            })
    }

    fn dfs<F>(&mut self, next: usize, total: u64, visit: &mut F) -> Result<ControlFlow<()>, SolverError>
    where
        F: FnMut(&[Vec<bool>], &[u64]) -> ControlFlow<()>,
    {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SolverError::ResourceLimit { nodes: self.budget });
        }
        if !self.feasible(next, total) {
            return Ok(ControlFlow::Continue(()));
        }
        if next == self.cells.len() {
            if total == 0 {
                return Ok(ControlFlow::Continue(()));
            }
            return Ok(visit(&self.cells, &self.counts));
        }
        let most = self.cell_cap.min(self.total_cap - total);
        for n in 0..=most {
            self.counts[next] = n;
            let flow = self.dfs(next + 1, total + n, visit)?;
            if flow.is_break() {
                self.counts[next] = 0;
                return Ok(flow);
            }
        }
        self.counts[next] = 0;
        Ok(ControlFlow::Continue(()))
    }
}

fn to_vector(problem: &Problem, cells: &[Vec<bool>], counts: &[u64]) -> CellVector {
    CellVector::new(
        problem.atoms.clone(),
        cells.iter().zip(counts).map(|(cell, &n)| (Cell(cell.clone()), n)),
    )
}

pub(crate) fn first_model(
    problem: &Problem,
    cell_cap: u64,
    total_cap: u64,
    node_budget: u64,
) -> Result<(Option<CellVector>, u64), SolverError> {
    let mut search = Search::new(problem, cell_cap, total_cap, node_budget);
    let mut found = None;
    let _ = search.dfs(0, 0, &mut |cells, counts| {
        found = Some(to_vector(problem, cells, counts));
        ControlFlow::Break(())
    })?;
    Ok((found, search.nodes))
}

/// Every model of `formulas` whose cells each hold at most `cell_cap`
/// elements and whose total is at most `total_cap`, as cell vectors over the
/// atoms of `formulas`. Exponential; meant for cross-checking on tiny inputs.
pub fn enumerate_models(formulas: &FormulaSet, cell_cap: u64, total_cap: u64) -> Vec<CellVector> {
    let problem = Problem::compile(formulas);
    let mut search = Search::new(&problem, cell_cap, total_cap, u64::MAX);
    let mut models = Vec::new();
    let _ = search
        .dfs(0, 0, &mut |cells, counts| {
            models.push(to_vector(&problem, cells, counts));
            ControlFlow::Continue(())
        })
        .expect("unbounded search");
    models
}
