//! Satisfiability and entailment for finite sets of bounded syllogistic
//! formulas.
//!
//! Three engines share one contract:
//!
//! * [`Engine::Brute`] enumerates cell vectors (counts per consistent valuation
//!   of the relevant atoms) with each count capped at `z + 1` and the total
//!   capped by [`small_model_bound`]. Exhaustive, so only usable on a handful
//!   of atoms.
//! * [`Engine::Witness`] places `i + 1` witness slots for every `MoreThan i`
//!   formula on elements, letting slots share elements, and propagates the
//!   `AtMost` budgets over partially valued elements. Complete.
//! * [`Engine::Refute`] runs the witness-chain refutation of [`refute`]. It only
//!   ever answers UNSAT or "no refutation found".

mod brute;
mod cells;
mod reduce;
mod refute;
mod witness;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::semantics::Structure;
use crate::syntax::{atoms_of, Atom, Formula, FormulaSet, Language, Literal};

pub use brute::enumerate_models;
pub use cells::{Cell, CellVector};
pub use reduce::{reduce_3col, reduce_t_to_s1, three_colourable, Graph, ReduceError};
pub use refute::{refute_witness_chain, Refutation, TraceStep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("formula {formula} is outside S\u{2020}_{z}")]
    OutsideLanguage { formula: Formula, z: u64 },
    #[error("{atoms} distinct atoms exceed the brute-force cap of {cap}")]
    AtomCap { atoms: usize, cap: usize },
    #[error("search budget of {nodes} nodes exhausted")]
    ResourceLimit { nodes: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Brute,
    Witness,
    Refute,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Brute => "brute",
            Engine::Witness => "witness",
            Engine::Refute => "refute",
        })
    }
}

impl std::str::FromStr for Engine {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "brute" => Ok(Engine::Brute),
            "witness" => Ok(Engine::Witness),
            "refute" => Ok(Engine::Refute),
            other => Err(format!("unknown engine {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// Maximum number of distinct atoms the brute engine accepts.
    pub atom_cap: usize,
    /// Search nodes before giving up with [`SolverError::ResourceLimit`].
    pub node_budget: u64,
    /// Brute engine: per-cell count cap; `None` means `z + 1`.
    pub cell_cap: Option<u64>,
    /// Brute engine: total element cap; `None` means [`small_model_bound`].
    pub total_cap: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { atom_cap: 5, node_budget: 10_000_000, cell_cap: None, total_cap: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sat(CellVector),
    Unsat,
    /// Only produced by the refute engine.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    pub verdict: Verdict,
    pub engine: Engine,
    pub nodes: u64,
    /// Present when the refute engine found a refutation.
    pub refutation: Option<Refutation>,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self.verdict, Verdict::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        self.verdict == Verdict::Unsat
    }

    pub fn model(&self) -> Option<&CellVector> {
        match &self.verdict {
            Verdict::Sat(m) => Some(m),
            _ => None,
        }
    }
}

fn check_language(formulas: &FormulaSet, z: u64) -> Result<(), SolverError> {
    let lang = Language::sdagger(z);
    match formulas.iter().find(|f| !lang.contains(f)) {
        Some(f) => Err(SolverError::OutsideLanguage { formula: f.clone(), z }),
        None => Ok(()),
    }
}

/// `max(1, (z + 1) · |Φ|)`: a satisfiable set has a model no larger than this.
pub fn small_model_bound(formulas: &FormulaSet, z: u64) -> Result<u64, SolverError> {
    check_language(formulas, z)?;
    Ok(((z + 1) * formulas.len() as u64).max(1))
}

pub fn satisfiable(formulas: &FormulaSet, z: u64, engine: Engine) -> Result<SatResult, SolverError> {
    satisfiable_with(formulas, z, engine, &SolverConfig::default())
}

pub fn satisfiable_with(
    formulas: &FormulaSet,
    z: u64,
    engine: Engine,
    config: &SolverConfig,
) -> Result<SatResult, SolverError> {
    check_language(formulas, z)?;
    match engine {
        Engine::Brute => {
            let problem = Problem::compile(formulas);
            if problem.atoms.len() > config.atom_cap {
                return Err(SolverError::AtomCap { atoms: problem.atoms.len(), cap: config.atom_cap });
            }
            let cell_cap = config.cell_cap.unwrap_or(z + 1);
            let total_cap = config.total_cap.unwrap_or(((z + 1) * formulas.len() as u64).max(1));
            let (model, nodes) = brute::first_model(&problem, cell_cap, total_cap, config.node_budget)?;
            let verdict = model.map_or(Verdict::Unsat, Verdict::Sat);
            Ok(SatResult { verdict, engine, nodes, refutation: None })
        }
        Engine::Witness => {
            let problem = Problem::compile(formulas);
            let (model, nodes) = witness::solve(&problem, config.node_budget)?;
            let verdict = model.map_or(Verdict::Unsat, Verdict::Sat);
            Ok(SatResult { verdict, engine, nodes, refutation: None })
        }
        Engine::Refute => {
            let (refutation, nodes) = refute::run(formulas);
            let verdict = if refutation.is_some() { Verdict::Unsat } else { Verdict::Unknown };
            Ok(SatResult { verdict, engine, nodes, refutation })
        }
    }
}

/// A model of `premises` in which `conclusion` fails, if there is one.
pub fn countermodel(
    premises: &FormulaSet,
    conclusion: &Formula,
    z: u64,
) -> Result<Option<Structure>, SolverError> {
    let mut set = premises.clone();
    set.insert(conclusion.negate());
    let result = satisfiable(&set, z, Engine::Witness)?;
    Ok(result.model().map(CellVector::to_structure))
}

/// `Θ ⊨ ψ`, decided by refuting `Θ ∪ {¬ψ}` with the witness engine.
pub fn entails(premises: &FormulaSet, conclusion: &Formula, z: u64) -> Result<bool, SolverError> {
    Ok(countermodel(premises, conclusion, z)?.is_none())
}

/// Literal over problem-local atom indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Lit {
    pub atom: usize,
    pub positive: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Constraint {
    pub a: Lit,
    pub b: Lit,
    pub bound: u64,
}

impl Constraint {
    /// `a` and `b` are complementary: the intersection is always empty.
    pub fn is_disjoint(&self) -> bool {
        self.a.atom == self.b.atom && self.a.positive != self.b.positive
    }
}

/// Formulas over dense atom indices, split by quantifier.
pub(crate) struct Problem {
    pub atoms: Vec<Atom>,
    pub at_most: Vec<Constraint>,
    pub more_than: Vec<Constraint>,
}

impl Problem {
    pub fn compile(formulas: &FormulaSet) -> Self {
        let atoms: Vec<Atom> = atoms_of(formulas).into_iter().collect();
        let index: HashMap<&Atom, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let lit = |l: &Literal| Lit { atom: index[&l.atom], positive: l.is_positive() };
        let mut at_most = Vec::new();
        let mut more_than = Vec::new();
        for f in formulas {
            let (l, m) = f.args();
            let c = Constraint { a: lit(l), b: lit(m), bound: f.bound() };
            if f.is_at_most() {
                at_most.push(c);
            } else {
                more_than.push(c);
            }
        }
        Problem { atoms, at_most, more_than }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::tests::{f, set};

    pub(crate) fn unity_premises() -> FormulaSet {
        set(&["<=1(o,p)", "<=1(o,~p)", "<=1(q,~o)", ">1(q,~r)"])
    }

    #[test]
    fn small_model_bound_examples() {
        let five = set(&["<=1(p,q)", ">0(p,p)", ">1(q,q)", "<=0(p,~q)", ">0(r,r)"]);
        assert_eq!(small_model_bound(&five, 1).unwrap(), 10);
        assert_eq!(small_model_bound(&FormulaSet::new(), 0).unwrap(), 1);
        assert_eq!(small_model_bound(&FormulaSet::new(), 7).unwrap(), 1);
        let three = set(&["<=2(p,q)", ">0(p,p)", ">1(q,q)"]);
        assert_eq!(small_model_bound(&three, 2).unwrap(), 9);
        assert!(matches!(
            small_model_bound(&set(&[">2(p,q)"]), 1),
            Err(SolverError::OutsideLanguage { .. })
        ));
    }

    #[test]
    fn absurdity_is_unsat_for_every_engine() {
        let phi = set(&[">0(p,~p)"]);
        for engine in [Engine::Brute, Engine::Witness, Engine::Refute] {
            let r = satisfiable(&phi, 0, engine).unwrap();
            assert!(r.is_unsat(), "{engine}");
        }
    }

    #[test]
    fn unity_argument_is_valid() {
        let premises = unity_premises();
        assert!(satisfiable(&premises, 1, Engine::Witness).unwrap().is_sat());
        assert!(satisfiable(&premises, 1, Engine::Brute).unwrap().is_sat());
        let mut with_negation = premises.clone();
        with_negation.insert(f(">1(q,r)"));
        assert!(satisfiable(&with_negation, 1, Engine::Witness).unwrap().is_unsat());
        assert!(satisfiable(&with_negation, 1, Engine::Brute).unwrap().is_unsat());
        assert!(entails(&premises, &f("<=1(q,r)"), 1).unwrap());
    }

    #[test]
    fn entailment_examples() {
        assert!(entails(&set(&["<=0(q,~o)", ">0(p,q)"]), &f(">0(p,o)"), 0).unwrap());
        assert!(!entails(&set(&["<=0(p,q)"]), &f(">0(p,p)"), 0).unwrap());
        let cm = countermodel(&set(&["<=0(p,q)"]), &f(">0(p,p)"), 0).unwrap().unwrap();
        assert!(cm.evaluate(&f("<=0(p,q)")) && !cm.evaluate(&f(">0(p,p)")));
    }

    #[test]
    fn sat_models_are_models() {
        let phi = set(&[">1(p,q)", "<=0(q,~r)", "<=1(r,~p)", ">0(~p,~q)"]);
        for engine in [Engine::Brute, Engine::Witness] {
            let r = satisfiable(&phi, 1, engine).unwrap();
            let model = r.model().expect("satisfiable").to_structure();
            assert_eq!(model.models_set(&phi), Ok(()), "{engine}");
        }
    }

    #[test]
    fn brute_respects_atom_cap() {
        let phi = set(&[">0(a,b)", ">0(c,d)", ">0(e,g)"]);
        assert!(matches!(
            satisfiable(&phi, 0, Engine::Brute),
            Err(SolverError::AtomCap { atoms: 6, cap: 5 })
        ));
    }

    #[test]
    fn node_budget_is_enforced() {
        let phi = unity_premises();
        let tiny = SolverConfig { node_budget: 2, ..SolverConfig::default() };
        for engine in [Engine::Brute, Engine::Witness] {
            assert!(matches!(
                satisfiable_with(&phi, 1, engine, &tiny),
                Err(SolverError::ResourceLimit { .. })
            ));
        }
    }

    #[test]
    fn empty_set_is_satisfiable() {
        for engine in [Engine::Brute, Engine::Witness] {
            let r = satisfiable(&FormulaSet::new(), 0, engine).unwrap();
            assert_eq!(r.model().unwrap().total(), 1);
        }
    }
}
