use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::syntax::{Atom, Formula};

use super::rules::{RuleSet, Substitution};

/// A finite derivation tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    /// A leaf; `discharge` names the enclosing reductio that discharges it.
    Premise { formula: Formula, discharge: Option<u32> },
    /// An instance of a named rule; children follow the rule's antecedents.
    Rule { rule: String, substitution: Substitution, children: Vec<Derivation>, conclusion: Formula },
    /// Reductio: the child derives an absurdity from the open premises plus
    /// the negation of `conclusion`, whose leaves tagged `label` are discharged.
    Raa { conclusion: Formula, child: Box<Derivation>, label: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("premise {0} is neither assumed nor discharged")]
    OpenPremise(Formula),
    #[error("leaf {formula} is tagged {label} outside any reductio assuming it")]
    BadDischarge { formula: Formula, label: u32 },
    #[error("no rule named {0}")]
    UnknownRule(String),
    #[error("rule {rule}: {message}")]
    BadInstance { rule: String, message: String },
    #[error("reductio {label} concludes {conclusion} from {child}, which is not an absurdity")]
    NotAbsurd { label: u32, conclusion: Formula, child: Formula },
    #[error("label {0} is reused inside its own scope")]
    ShadowedLabel(u32),
}

impl Derivation {
    pub fn premise(formula: Formula) -> Self {
        Derivation::Premise { formula, discharge: None }
    }

    pub fn conclusion(&self) -> &Formula {
        match self {
            Derivation::Premise { formula, .. } => formula,
            Derivation::Rule { conclusion, .. } | Derivation::Raa { conclusion, .. } => conclusion,
        }
    }

    /// Undischarged leaves.
    pub fn open_premises(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.walk(&mut |d| {
            if let Derivation::Premise { formula, discharge: None } = d {
                out.insert(formula.clone());
            }
        });
        out
    }

    pub fn raa_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |d| n += usize::from(matches!(d, Derivation::Raa { .. })));
        n
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.walk(&mut |d| out.extend(d.conclusion().atoms().cloned()));
        out
    }

    fn walk(&self, visit: &mut impl FnMut(&Derivation)) {
        visit(self);
        match self {
            Derivation::Premise { .. } => {}
            Derivation::Rule { children, .. } => children.iter().for_each(|c| c.walk(visit)),
            Derivation::Raa { child, .. } => child.walk(visit),
        }
    }

    /// Apply an atom map to every formula, composing it into each rule
    /// substitution.
    pub fn rename(&self, map: &impl Fn(&Atom) -> Atom) -> Derivation {
        match self {
            Derivation::Premise { formula, discharge } => {
                Derivation::Premise { formula: formula.map_atoms(map), discharge: *discharge }
            }
            Derivation::Rule { rule, substitution, children, conclusion } => Derivation::Rule {
                rule: rule.clone(),
                substitution: Substitution(substitution.0.iter().map(|(k, v)| (k.clone(), map(v))).collect()),
                children: children.iter().map(|c| c.rename(map)).collect(),
                conclusion: conclusion.map_atoms(map),
            },
            Derivation::Raa { conclusion, child, label } => Derivation::Raa {
                conclusion: conclusion.map_atoms(map),
                child: Box::new(child.rename(map)),
                label: *label,
            },
        }
    }

    /// Indented text, one formula per line, children below their parent.
    /// Discharged leaves print as `[φ]^k`, reductio steps as `(RAA)^k`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        match self {
            Derivation::Premise { formula, discharge: None } => {
                let _ = writeln!(out, "{pad}{formula}");
            }
            Derivation::Premise { formula, discharge: Some(k) } => {
                let _ = writeln!(out, "{pad}[{formula}]^{k}");
            }
            Derivation::Rule { rule, children, conclusion, .. } => {
                let _ = writeln!(out, "{pad}{conclusion}  ({rule})");
                children.iter().for_each(|c| c.render_into(out, depth + 1));
            }
            Derivation::Raa { conclusion, child, label } => {
                let _ = writeln!(out, "{pad}{conclusion}  (RAA)^{label}");
                child.render_into(out, depth + 1);
            }
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Check `d` as a derivation from `premises` with `rules`.
pub fn verify_derivation(
    d: &Derivation,
    premises: &BTreeSet<Formula>,
    rules: &RuleSet,
) -> Result<(), VerifyError> {
    let mut scope = Vec::new();
    verify(d, premises, rules, &mut scope)
}

fn verify(
    d: &Derivation,
    premises: &BTreeSet<Formula>,
    rules: &RuleSet,
    scope: &mut Vec<(u32, Formula)>,
) -> Result<(), VerifyError> {
    match d {
        Derivation::Premise { formula, discharge: None } => {
            if premises.contains(formula) {
                Ok(())
            } else {
                Err(VerifyError::OpenPremise(formula.clone()))
            }
        }
        Derivation::Premise { formula, discharge: Some(label) } => {
            if scope.iter().any(|(k, hyp)| k == label && hyp == formula) {
                Ok(())
            } else {
                Err(VerifyError::BadDischarge { formula: formula.clone(), label: *label })
            }
        }
        Derivation::Rule { rule, substitution, children, conclusion } => {
            let schema = rules.get(rule).ok_or_else(|| VerifyError::UnknownRule(rule.clone()))?;
            let bad = |message: String| VerifyError::BadInstance { rule: rule.clone(), message };
            let instance = schema.instantiate(substitution).map_err(|e| bad(e.to_string()))?;
            if instance.antecedents.len() != children.len() {
                return Err(bad(format!("{} children for {} antecedents", children.len(), instance.antecedents.len())));
            }
            for (child, antecedent) in children.iter().zip(&instance.antecedents) {
                if child.conclusion() != antecedent {
                    return Err(bad(format!("child concludes {} where {antecedent} is needed", child.conclusion())));
                }
            }
            if &instance.consequent != conclusion {
                return Err(bad(format!("instance concludes {}, not {conclusion}", instance.consequent)));
            }
            children.iter().try_for_each(|c| verify(c, premises, rules, scope))
        }
        Derivation::Raa { conclusion, child, label } => {
            if !child.conclusion().is_absurdity() {
                return Err(VerifyError::NotAbsurd {
                    label: *label,
                    conclusion: conclusion.clone(),
                    child: child.conclusion().clone(),
                });
            }
            if scope.iter().any(|(k, _)| k == label) {
                return Err(VerifyError::ShadowedLabel(*label));
            }
            scope.push((*label, conclusion.negate()));
            let result = verify(child, premises, rules, scope);
            scope.pop();
            result
        }
    }
}
