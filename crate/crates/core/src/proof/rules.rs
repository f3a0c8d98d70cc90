use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::semantics::Structure;
use crate::solver::{countermodel, SolverError};
use crate::syntax::{atoms_of, Atom, Formula};

use super::ProofError;

/// `antecedents / consequent`; its atoms are schematic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub antecedents: Vec<Formula>,
    pub consequent: Formula,
}

impl Rule {
    pub fn new(name: String, antecedents: Vec<Formula>, consequent: Formula) -> Self {
        Rule { name, antecedents, consequent }
    }

    pub fn width(&self) -> usize {
        self.antecedents.len()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        atoms_of(self.antecedents.iter().chain([&self.consequent]))
    }

    pub fn instantiate(&self, g: &Substitution) -> Result<Rule, ProofError> {
        if let Some(missing) = self.atoms().into_iter().find(|a| g.get(a).is_none()) {
            return Err(ProofError::PartialSubstitution { rule: self.name.clone(), atom: missing });
        }
        Ok(Rule {
            name: self.name.clone(),
            antecedents: self.antecedents.iter().map(|f| g.apply(f)).collect(),
            consequent: g.apply(&self.consequent),
        })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let antecedents: Vec<String> = self.antecedents.iter().map(Formula::to_string).collect();
        write!(f, "{}: {{{}}} / {}", self.name, antecedents.join(", "), self.consequent)
    }
}

/// An atom-to-atom map; need not be injective.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution(pub BTreeMap<Atom, Atom>);

impl Substitution {
    pub fn identity<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Self {
        Substitution(atoms.into_iter().map(|a| (a.clone(), a.clone())).collect())
    }

    pub fn get(&self, atom: &Atom) -> Option<&Atom> {
        self.0.get(atom)
    }

    pub fn insert(&mut self, from: Atom, to: Atom) {
        self.0.insert(from, to);
    }

    /// Apply to a formula; atoms outside the map are left alone.
    pub fn apply(&self, formula: &Formula) -> Formula {
        formula.map_atoms(|a| self.0.get(a).unwrap_or(a).clone())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self.0.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        write!(f, "{{{}}}", pairs.join(", "))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<Rule>,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>) -> Self {
        RuleSet { rules }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Largest antecedent count, 0 for the empty set.
    pub fn max_width(&self) -> usize {
        self.rules.iter().map(Rule::width).max().unwrap_or(0)
    }

    /// Largest bound mentioned anywhere in the rules.
    pub fn max_bound(&self) -> u64 {
        self.rules
            .iter()
            .flat_map(|r| r.antecedents.iter().chain([&r.consequent]))
            .map(Formula::bound)
            .max()
            .unwrap_or(0)
    }

    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// Rules of both sets; on a name clash the rule from `self` wins.
    pub fn union(&self, other: &RuleSet) -> RuleSet {
        let mut rules = self.rules.clone();
        rules.extend(other.rules.iter().filter(|r| self.get(&r.name).is_none()).cloned());
        RuleSet { rules }
    }
}

impl FromIterator<Rule> for RuleSet {
    fn from_iter<I: IntoIterator<Item = Rule>>(iter: I) -> Self {
        RuleSet { rules: iter.into_iter().collect() }
    }
}

fn atom(name: &str) -> Atom {
    Atom::new(name).expect("valid atom name")
}

/// Darii `{<=0(q,~o), >0(p,q)} / >0(p,o)` and Ferio
/// `{<=0(q,o), >0(p,q)} / >0(p,~o)`.
pub fn darii_ferio() -> RuleSet {
    transfer_pair(0, 0, "darii".into(), "ferio".into()).into_iter().collect()
}

/// `{<=i(q,~o), >j(p,q)} / >(j-i)(p,o)` and `{<=i(q,o), >j(p,q)} / >(j-i)(p,~o)`.
fn transfer_pair(i: u64, j: u64, pos: String, neg: String) -> [Rule; 2] {
    let (p, q, o) = (atom("p"), atom("q"), atom("o"));
    let some = Formula::more_than(j, p.pos(), q.pos());
    [
        Rule::new(pos, vec![Formula::at_most(i, q.pos(), o.neg()), some.clone()], Formula::more_than(j - i, p.pos(), o.pos())),
        Rule::new(neg, vec![Formula::at_most(i, q.pos(), o.pos()), some], Formula::more_than(j - i, p.pos(), o.neg())),
    ]
}

/// Both transfer schemata for every `0 <= i <= j <= z`.
pub fn transfer(z: u64) -> RuleSet {
    (0..=z)
        .flat_map(|j| (0..=j).map(move |i| (i, j)))
        .flat_map(|(i, j)| transfer_pair(i, j, format!("transfer_pos_{i}_{j}"), format!("transfer_neg_{i}_{j}")))
        .collect()
}

pub fn builtin_rulesets(z: u64) -> BTreeMap<String, RuleSet> {
    BTreeMap::from([("darii_ferio".to_string(), darii_ferio()), ("transfer_z".to_string(), transfer(z))])
}

/// Resolve `darii_ferio` or `transfer_<z>`.
pub fn builtin(name: &str) -> Option<RuleSet> {
    match name {
        "darii_ferio" => Some(darii_ferio()),
        _ => name.strip_prefix("transfer_")?.parse().ok().map(transfer),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Soundness {
    Sound,
    Unsound(Structure),
}

/// Decide whether the antecedents entail the consequent over `S†_z`.
pub fn check_rule_sound(rule: &Rule, z: u64) -> Result<Soundness, SolverError> {
    let premises = rule.antecedents.iter().cloned().collect();
    Ok(match countermodel(&premises, &rule.consequent, z)? {
        None => Soundness::Sound,
        Some(model) => Soundness::Unsound(model),
    })
}
