use std::collections::BTreeMap;
use std::fmt;

use crate::semantics::Structure;
use crate::syntax::{Atom, Literal};

/// A total valuation of the relevant atoms: the atoms an element satisfies.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell(pub Vec<bool>);

impl Cell {
    pub fn contains(&self, atom: usize) -> bool {
        self.0[atom]
    }
}

/// Elements grouped by cell; the solver's canonical model representation.
///
/// Invariant: every stored count is positive and the total is at least one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellVector {
    atoms: Vec<Atom>,
    counts: BTreeMap<Cell, u64>,
}

impl CellVector {
    pub(crate) fn new(atoms: Vec<Atom>, counts: impl IntoIterator<Item = (Cell, u64)>) -> Self {
        let counts: BTreeMap<Cell, u64> = counts.into_iter().filter(|(_, n)| *n > 0).fold(
            BTreeMap::new(),
            |mut acc, (cell, n)| {
                debug_assert_eq!(cell.0.len(), atoms.len());
                *acc.entry(cell).or_insert(0) += n;
                acc
            },
        );
        debug_assert!(!counts.is_empty());
        CellVector { atoms, counts }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn counts(&self) -> &BTreeMap<Cell, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Number of elements satisfying both literals (atoms outside the vector
    /// count as empty).
    pub fn count(&self, l: &Literal, m: &Literal) -> u64 {
        let holds = |cell: &Cell, lit: &Literal| {
            let inside = self.atoms.iter().position(|a| *a == lit.atom).is_some_and(|i| cell.contains(i));
            inside == lit.is_positive()
        };
        self.counts.iter().filter(|(c, _)| holds(c, l) && holds(c, m)).map(|(_, n)| n).sum()
    }

    /// Expand into a structure with elements `x1, x2, …`.
    pub fn to_structure(&self) -> Structure {
        let mut elements = Vec::new();
        for (cell, &n) in &self.counts {
            let atoms: Vec<Atom> = self
                .atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| cell.contains(*i))
                .map(|(_, a)| a.clone())
                .collect();
            for _ in 0..n {
                elements.push((format!("x{}", elements.len() + 1), atoms.clone()));
            }
        }
        Structure::from_elements(elements).expect("cell vectors are nonempty")
    }
}

impl fmt::Display for CellVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (cell, n) in &self.counts {
            let members: Vec<String> = self
                .atoms
                .iter()
                .enumerate()
                .map(|(i, a)| if cell.contains(i) { a.to_string() } else { format!("~{a}") })
                .collect();
            writeln!(f, "{n} x {{{}}}", members.join(", "))?;
        }
        Ok(())
    }
}
