//! Forward chaining under rule instances.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::syntax::{atoms_of, Atom, Formula, FormulaSet, Literal, Quantifier};

use super::derivation::Derivation;
use super::rules::{Rule, RuleSet, Substitution};

/// Facts indexed by shape and by each argument literal.
#[derive(Default)]
struct Facts {
    list: Vec<Formula>,
    known: HashSet<Formula>,
    by_kind: HashMap<(Quantifier, u64), Vec<usize>>,
    by_literal: HashMap<(Quantifier, u64, Literal), Vec<usize>>,
}

impl Facts {
    fn insert(&mut self, f: Formula) -> bool {
        if !self.known.insert(f.clone()) {
            return false;
        }
        let id = self.list.len();
        let (l, m) = f.args();
        self.by_kind.entry((f.quantifier(), f.bound())).or_default().push(id);
        self.by_literal.entry((f.quantifier(), f.bound(), l.clone())).or_default().push(id);
        if l != m {
            self.by_literal.entry((f.quantifier(), f.bound(), m.clone())).or_default().push(id);
        }
        self.list.push(f);
        true
    }
}

fn unify(pattern: &Literal, fact: &Literal, g: &mut Substitution) -> bool {
    if pattern.polarity != fact.polarity {
        return false;
    }
    match g.get(&pattern.atom) {
        Some(bound) => *bound == fact.atom,
        None => {
            g.insert(pattern.atom.clone(), fact.atom.clone());
            true
        }
    }
}

/// Antecedents ordered so each one shares as many atoms as possible with
/// those before it.
fn join_order(rule: &Rule) -> Vec<usize> {
    let mut seen: BTreeSet<Atom> = BTreeSet::new();
    let mut left: Vec<usize> = (0..rule.antecedents.len()).collect();
    let mut order = Vec::new();
    while !left.is_empty() {
        let (pos, _) = left
            .iter()
            .enumerate()
            .max_by_key(|(_, &k)| {
                let f = &rule.antecedents[k];
                (f.atoms().filter(|a| seen.contains(*a)).count(), std::cmp::Reverse(k))
            })
            .expect("nonempty");
        let k = left.remove(pos);
        seen.extend(rule.antecedents[k].atoms().cloned());
        order.push(k);
    }
    order
}

/// Every substitution into `universe` under which all antecedents of `rule`
/// are facts.
fn matches(rule: &Rule, facts: &Facts, universe: &[Atom], out: &mut Vec<Substitution>) {
    fn join(rule: &Rule, order: &[usize], facts: &Facts, g: &Substitution, universe: &[Atom], free: &[Atom], out: &mut Vec<Substitution>) {
        let Some((&k, rest)) = order.split_first() else {
            extend_free(g, free, universe, out);
            return;
        };
        let pattern = &rule.antecedents[k];
        let (pl, pm) = pattern.args();
        let key = |lit: &Literal| g.get(&lit.atom).map(|a| (pattern.quantifier(), pattern.bound(), Literal { atom: a.clone(), polarity: lit.polarity }));
        let candidates = match key(pl).or_else(|| key(pm)) {
            Some(k) => facts.by_literal.get(&k),
            None => facts.by_kind.get(&(pattern.quantifier(), pattern.bound())),
        };
        for &id in candidates.into_iter().flatten() {
            let (l, m) = facts.list[id].args();
            let orientations: &[(&Literal, &Literal)] = if l == m { &[(l, m)] } else { &[(l, m), (m, l)] };
            for &(x, y) in orientations {
                let mut h = g.clone();
                if unify(pl, x, &mut h) && unify(pm, y, &mut h) {
                    join(rule, rest, facts, &h, universe, free, out);
                }
            }
        }
    }
    fn extend_free(g: &Substitution, free: &[Atom], universe: &[Atom], out: &mut Vec<Substitution>) {
        match free.iter().position(|a| g.get(a).is_none()) {
            None => out.push(g.clone()),
            Some(i) => {
                for target in universe {
                    let mut h = g.clone();
                    h.insert(free[i].clone(), target.clone());
                    extend_free(&h, &free[i + 1..], universe, out);
                }
            }
        }
    }
    let free: Vec<Atom> = rule.atoms().into_iter().collect();
    join(rule, &join_order(rule), facts, &Substitution::default(), universe, &free, out);
}

/// The direct closure of a premise set, with the first derivation step found
/// for every derived formula.
pub struct DirectClosure {
    facts: Facts,
    /// `None` for premises.
    provenance: HashMap<Formula, Option<(usize, Substitution)>>,
    rules: RuleSet,
}

impl DirectClosure {
    pub fn compute(premises: &FormulaSet, rules: &RuleSet, atoms: &BTreeSet<Atom>) -> Self {
        let universe: Vec<Atom> = atoms.iter().cloned().collect();
        let mut facts = Facts::default();
        let mut provenance = HashMap::new();
        for f in premises {
            facts.insert(f.clone());
            provenance.insert(f.clone(), None);
        }
        loop {
            let mut fresh: Vec<(Formula, usize, Substitution)> = Vec::new();
            let mut pending = HashSet::new();
            for (r, rule) in rules.rules().iter().enumerate() {
                let mut found = Vec::new();
                matches(rule, &facts, &universe, &mut found);
                for g in found {
                    let conclusion = g.apply(&rule.consequent);
                    if !facts.known.contains(&conclusion) && pending.insert(conclusion.clone()) {
                        fresh.push((conclusion, r, g));
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            for (f, r, g) in fresh {
                facts.insert(f.clone());
                provenance.insert(f, Some((r, g)));
            }
        }
        DirectClosure { facts, provenance, rules: rules.clone() }
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.facts.known.contains(f)
    }

    pub fn formulas(&self) -> FormulaSet {
        self.facts.list.iter().cloned().collect()
    }

    /// Some absurdity in the closure, if any.
    pub fn absurdity(&self) -> Option<&Formula> {
        self.facts.list.iter().find(|f| f.is_absurdity())
    }

    /// Rebuild a derivation of `goal` from the recorded provenance.
    pub fn derivation(&self, goal: &Formula) -> Option<Derivation> {
        match self.provenance.get(goal)? {
            None => Some(Derivation::premise(goal.clone())),
            Some((r, g)) => {
                let rule = &self.rules.rules()[*r];
                let children = rule
                    .antecedents
                    .iter()
                    .map(|a| self.derivation(&g.apply(a)))
                    .collect::<Option<Vec<_>>>()?;
                Some(Derivation::Rule {
                    rule: rule.name.clone(),
                    substitution: g.clone(),
                    children,
                    conclusion: goal.clone(),
                })
            }
        }
    }
}

/// Least superset of `premises` closed under every instance of `rules` with
/// atoms drawn from `atoms`.
pub fn direct_closure(premises: &FormulaSet, rules: &RuleSet, atoms: &BTreeSet<Atom>) -> FormulaSet {
    DirectClosure::compute(premises, rules, atoms).formulas()
}

/// A direct derivation of `goal` over the atoms of the premises and goal.
pub fn derive_direct(premises: &FormulaSet, rules: &RuleSet, goal: &Formula) -> Option<Derivation> {
    let atoms = atoms_of(premises.iter().chain([goal]));
    DirectClosure::compute(premises, rules, &atoms).derivation(goal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::derivation::verify_derivation;
    use crate::proof::rules::{darii_ferio, transfer};
    use crate::syntax::tests::{atoms, f, set};
    use proptest::prelude::*;

    #[test]
    fn two_step_closure() {
        let premises = set(&["<=0(o,r)", "<=0(q,~o)", ">0(p,q)"]);
        let closure = direct_closure(&premises, &darii_ferio(), &atoms(&["o", "p", "q", "r"]));
        assert!(closure.contains(&f(">0(p,o)")));
        assert!(closure.contains(&f(">0(p,~r)")));
        assert!(closure.is_superset(&premises));
        assert_eq!(direct_closure(&premises, &RuleSet::default(), &atoms(&["o", "p", "q", "r"])), premises);
    }

    #[test]
    fn derivations_rebuild_and_verify() {
        let premises = set(&["<=0(o,r)", "<=0(q,~o)", ">0(p,q)"]);
        let d = derive_direct(&premises, &darii_ferio(), &f(">0(p,~r)")).unwrap();
        assert_eq!(verify_derivation(&d, &premises, &darii_ferio()), Ok(()));
        assert_eq!(d.size(), 5);
        assert_eq!(derive_direct(&premises, &darii_ferio(), &f("<=0(q,~o)")), Some(Derivation::premise(f("<=0(q,~o)"))));
        let one = derive_direct(&set(&["<=0(q,~o)", ">0(p,q)"]), &darii_ferio(), &f(">0(p,o)")).unwrap();
        assert!(matches!(&one, Derivation::Rule { children, .. } if children.len() == 2));
        assert_eq!(derive_direct(&premises, &darii_ferio(), &f(">0(r,p)")), None);
    }

    #[test]
    fn symmetric_matching_and_collapsed_instances() {
        // the premise >0(q,p) matches the pattern >0(p,q) in either order
        let premises = set(&["<=0(q,~o)", ">0(q,p)", ">0(q,q)"]);
        let closure = direct_closure(&premises, &darii_ferio(), &atoms(&["o", "p", "q"]));
        assert!(closure.contains(&f(">0(p,o)")));
        assert!(closure.contains(&f(">0(o,q)")));
    }

    #[test]
    fn free_consequent_atoms_range_over_universe() {
        let rules = RuleSet::new(vec![Rule::new("taut".into(), vec![], f("<=0(p,~p)"))]);
        let closure = direct_closure(&FormulaSet::new(), &rules, &atoms(&["a", "b"]));
        assert_eq!(closure, set(&["<=0(a,~a)", "<=0(b,~b)"]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn closure_is_monotone_and_idempotent(
            small in proptest::collection::btree_set(crate::syntax::tests::arb_formula(&["p", "q", "r"], 1), 0..5),
            extra in proptest::collection::btree_set(crate::syntax::tests::arb_formula(&["p", "q", "r"], 1), 0..3),
        ) {
            let rules = darii_ferio().union(&transfer(1));
            let universe = atoms(&["p", "q", "r"]);
            let once = direct_closure(&small, &rules, &universe);
            prop_assert_eq!(direct_closure(&once, &rules, &universe), once.clone());
            let bigger: FormulaSet = small.union(&extra).cloned().collect();
            prop_assert!(direct_closure(&bigger, &rules, &universe).is_superset(&once));
        }
    }
}
