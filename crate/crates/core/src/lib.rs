//! Numerical syllogistic logic: formulas with counting quantifiers, their
//! finite-model semantics, a complete satisfiability decision procedure,
//! rule-based proof search, and a checker for a family of complete but
//! unsatisfiable theories that no finite sound rule set refutes.

pub mod cli;
pub mod nogo;
pub mod parser;
pub mod proof;
pub mod semantics;
pub mod solver;
pub mod syntax;
