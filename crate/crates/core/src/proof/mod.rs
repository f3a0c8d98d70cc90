//! Syllogistic rules, direct derivability (closure under rule instances) and
//! indirect derivability (additionally, reductio ad absurdum).

mod closure;
mod derivation;
mod indirect;
mod rules;

use thiserror::Error;

use crate::syntax::{Atom, Formula, SyntaxError};

pub use closure::{derive_direct, direct_closure, DirectClosure};
pub use derivation::{verify_derivation, Derivation, VerifyError};
pub use indirect::{derive_indirect, Goal, IndirectLimits, IndirectOptions, IndirectProver};
pub use rules::{builtin, builtin_rulesets, check_rule_sound, darii_ferio, transfer, Rule, RuleSet, Soundness, Substitution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("substitution for rule {rule} does not cover atom {atom}")]
    PartialSubstitution { rule: String, atom: Atom },
    #[error("{0} lies outside the derivation universe")]
    OutsideUniverse(Formula),
    #[error("limit of {limit} {what} exceeded")]
    Limit { what: &'static str, limit: u64 },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}
