//! Finite structures and truth evaluation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::syntax::{language_formulas, Atom, Formula, FormulaSet, Language, Literal, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("a structure needs a nonempty domain")]
    EmptyDomain,
    #[error("duplicate element name {0}")]
    DuplicateElement(String),
    #[error("atom {atom} is interpreted with element index {index} outside the domain")]
    OutsideDomain { atom: Atom, index: usize },
}

/// A finite nonempty domain together with the extension of each atom.
///
/// Elements are addressed by index; their names are opaque labels used only
/// for I/O. Atoms absent from the interpretation denote the empty set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    names: Vec<String>,
    interp: BTreeMap<Atom, BTreeSet<usize>>,
}

impl Structure {
    pub fn from_parts(
        names: Vec<String>,
        interp: BTreeMap<Atom, BTreeSet<usize>>,
    ) -> Result<Self, StructureError> {
        if names.is_empty() {
            return Err(StructureError::EmptyDomain);
        }
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(StructureError::DuplicateElement(n.clone()));
            }
        }
        for (atom, elems) in &interp {
            if let Some(&index) = elems.iter().find(|&&e| e >= names.len()) {
                return Err(StructureError::OutsideDomain { atom: atom.clone(), index });
            }
        }
        let interp = interp.into_iter().filter(|(_, s)| !s.is_empty()).collect();
        Ok(Structure { names, interp })
    }

    /// Build from `(element name, atoms it satisfies)` pairs.
    pub fn from_elements<I, A>(elements: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = (String, A)>,
        A: IntoIterator<Item = Atom>,
    {
        let mut names = Vec::new();
        let mut interp: BTreeMap<Atom, BTreeSet<usize>> = BTreeMap::new();
        for (id, (name, atoms)) in elements.into_iter().enumerate() {
            names.push(name);
            for a in atoms {
                interp.entry(a).or_default().insert(id);
            }
        }
        Structure::from_parts(names, interp)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn element_names(&self) -> &[String] {
        &self.names
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn interpreted_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.interp.keys()
    }

    /// For each element, the atoms it satisfies (sorted).
    pub fn atoms_by_element(&self) -> Vec<Vec<Atom>> {
        let mut out = vec![Vec::new(); self.names.len()];
        for (atom, elems) in &self.interp {
            for &e in elems {
                out[e].push(atom.clone());
            }
        }
        out
    }

    pub fn satisfies(&self, element: usize, literal: &Literal) -> bool {
        let inside = self.interp.get(&literal.atom).is_some_and(|s| s.contains(&element));
        inside == literal.is_positive()
    }

    pub fn extension(&self, literal: &Literal) -> BTreeSet<usize> {
        let atom_ext = self.interp.get(&literal.atom);
        if literal.is_positive() {
            atom_ext.cloned().unwrap_or_default()
        } else {
            (0..self.names.len()).filter(|e| atom_ext.map_or(true, |s| !s.contains(e))).collect()
        }
    }

    /// `|ext(l) ∩ ext(m)|`.
    pub fn count(&self, l: &Literal, m: &Literal) -> u64 {
        let (a, b) = (self.extension(l), self.extension(m));
        a.intersection(&b).count() as u64
    }

    pub fn evaluate(&self, formula: &Formula) -> bool {
        let (l, m) = formula.args();
        let n = self.count(l, m);
        if formula.is_at_most() {
            n <= formula.bound()
        } else {
            n > formula.bound()
        }
    }

    /// `Ok(())` when every formula holds, otherwise the first failing one.
    pub fn models_set<'a>(
        &self,
        formulas: impl IntoIterator<Item = &'a Formula>,
    ) -> Result<(), Formula> {
        match formulas.into_iter().find(|f| !self.evaluate(f)) {
            Some(f) => Err(f.clone()),
            None => Ok(()),
        }
    }

    /// All formulas of `language` over `atoms` true in this structure.
    ///
    /// Counts every literal pair in one pass over the elements rather than
    /// evaluating formulas one by one.
    pub fn theory_of(
        &self,
        atoms: &BTreeSet<Atom>,
        language: Language,
    ) -> Result<FormulaSet, SyntaxError> {
        if atoms.is_empty() {
            return Err(SyntaxError::NoAtoms);
        }
        let universe = language_formulas(atoms, language)?;
        let index: HashMap<&Atom, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let k = atoms.len();
        // literal id: 2*atom + (1 if negative)
        let mut counts = vec![0u64; (2 * k) * (2 * k)];
        let by_element = self.atoms_by_element();
        let mut true_lits = Vec::with_capacity(k);
        for members in &by_element {
            let mut inside = vec![false; k];
            for a in members {
                if let Some(&i) = index.get(a) {
                    inside[i] = true;
                }
            }
            true_lits.clear();
            true_lits.extend((0..k).map(|i| 2 * i + usize::from(!inside[i])));
            for (x, &l) in true_lits.iter().enumerate() {
                for &m in &true_lits[x..] {
                    counts[l * 2 * k + m] += 1;
                }
            }
        }
        let lit_id = |l: &Literal| 2 * index[&l.atom] + usize::from(!l.is_positive());
        Ok(universe
            .into_iter()
            .filter(|f| {
                let (l, m) = f.args();
                let (a, b) = (lit_id(l), lit_id(m));
                let n = counts[a.min(b) * 2 * k + a.max(b)];
                if f.is_at_most() {
                    n <= f.bound()
                } else {
                    n > f.bound()
                }
            })
            .collect())
    }

    /// Restriction to the given elements (in their original order).
    pub fn restrict(&self, keep: &BTreeSet<usize>) -> Result<Structure, StructureError> {
        let order: Vec<usize> = keep.iter().copied().filter(|&e| e < self.names.len()).collect();
        let remap: HashMap<usize, usize> = order.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let names = order.iter().map(|&e| self.names[e].clone()).collect();
        let interp = self
            .interp
            .iter()
            .map(|(a, s)| (a.clone(), s.iter().filter_map(|e| remap.get(e).copied()).collect()))
            .collect();
        Structure::from_parts(names, interp)
    }
}
