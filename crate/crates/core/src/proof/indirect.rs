//! Indirect derivability by saturation.
//!
//! Over a fixed finite universe `L(P')`, the formulas indirectly derivable
//! from `S` form the least `D ⊇ S` closed under rule instances and under
//! adding `¬θ` whenever `D ∪ {θ}` derives an absurdity. Only undecided
//! candidates (`θ ∉ D`, `¬θ ∉ D`) need testing.
//!
//! Refutability itself is decided by searching for a consistent completion:
//! a closed set with an undecided `θ` is refutable iff both `θ` and `¬θ`
//! extensions are, and a complete closed set is refutable iff it already
//! contains an absurdity (a reductio inside a complete set can always be
//! replaced by the premise it concludes). Results are memoised on closed
//! sets.

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;

use crate::syntax::{atoms_of, language_formulas, Atom, Formula, FormulaSet, Language};

use super::closure::derive_direct;
use super::derivation::Derivation;
use super::rules::{RuleSet, Substitution};
use super::ProofError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndirectLimits {
    /// Search nodes per query before giving up.
    pub max_nodes: u64,
    /// Ground rule instances the universe may generate.
    pub max_instances: usize,
}

impl Default for IndirectLimits {
    fn default() -> Self {
        IndirectLimits { max_nodes: 1_000_000, max_instances: 2_000_000 }
    }
}

/// What a derivation should reach.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goal {
    Formula(Formula),
    /// Any absurdity.
    Absurdity,
}

struct Instance {
    rule: usize,
    substitution: Substitution,
    antecedents: Vec<usize>,
    /// Antecedents without repeats, for counting.
    distinct: Vec<usize>,
    consequent: usize,
}

#[derive(Clone)]
enum Origin {
    Given,
    Rule(usize),
    /// `¬θ` by reductio on `θ` over the facts known at that moment.
    Raa { theta: usize, base: FixedBitSet },
}

struct Saturation {
    facts: FixedBitSet,
    origin: Vec<Option<Origin>>,
}

/// A compiled prover for one rule set over one universe `L(P')`; reuse it for
/// many premise sets to share the memo table.
pub struct IndirectProver {
    rules: RuleSet,
    universe: Vec<Formula>,
    index: HashMap<Formula, usize>,
    negation: Vec<usize>,
    absurd: FixedBitSet,
    instances: Vec<Instance>,
    watch: Vec<Vec<usize>>,
    memo: HashMap<FixedBitSet, bool>,
    limits: IndirectLimits,
    nodes: u64,
}

impl IndirectProver {
    pub fn new(
        rules: &RuleSet,
        atoms: &BTreeSet<Atom>,
        language: Language,
        limits: IndirectLimits,
    ) -> Result<Self, ProofError> {
        let universe = language_formulas(atoms, language)?;
        let index: HashMap<Formula, usize> = universe.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        let negation = universe.iter().map(|f| index[&f.negate()]).collect();
        let mut absurd = FixedBitSet::with_capacity(universe.len());
        for (i, f) in universe.iter().enumerate() {
            absurd.set(i, f.is_absurdity());
        }
        let targets: Vec<Atom> = atoms.iter().cloned().collect();
        let mut instances = Vec::new();
        for (r, rule) in rules.rules().iter().enumerate() {
            let vars: Vec<Atom> = rule.atoms().into_iter().collect();
            let total = targets.len().checked_pow(vars.len() as u32).unwrap_or(usize::MAX);
            if total.saturating_add(instances.len()) > limits.max_instances {
                return Err(ProofError::Limit { what: "ground rule instances", limit: limits.max_instances as u64 });
            }
            for mut code in 0..total {
                let mut g = Substitution::default();
                for v in &vars {
                    g.insert(v.clone(), targets[code % targets.len()].clone());
                    code /= targets.len();
                }
                let lookup = |f: &Formula| index.get(&g.apply(f)).copied();
                let Some(consequent) = lookup(&rule.consequent) else { continue };
                let Some(antecedents) = rule.antecedents.iter().map(lookup).collect::<Option<Vec<_>>>() else {
                    continue;
                };
                let mut distinct = antecedents.clone();
                distinct.sort_unstable();
                distinct.dedup();
                instances.push(Instance { rule: r, substitution: g, antecedents, distinct, consequent });
            }
        }
        let mut watch = vec![Vec::new(); universe.len()];
        for (k, inst) in instances.iter().enumerate() {
            for &a in &inst.distinct {
                watch[a].push(k);
            }
        }
        Ok(IndirectProver {
            rules: rules.clone(),
            universe,
            index,
            negation,
            absurd,
            instances,
            watch,
            memo: HashMap::new(),
            limits,
            nodes: 0,
        })
    }

    pub fn universe(&self) -> &[Formula] {
        &self.universe
    }

    fn ids(&self, formulas: &FormulaSet) -> Result<FixedBitSet, ProofError> {
        let mut set = FixedBitSet::with_capacity(self.universe.len());
        for f in formulas {
            let &i = self.index.get(f).ok_or_else(|| ProofError::OutsideUniverse(f.clone()))?;
            set.insert(i);
        }
        Ok(set)
    }

    /// Forward-chain from `facts`, recording origins for new facts.
    fn close(&self, facts: &mut FixedBitSet, origin: &mut [Option<Origin>]) {
        let mut missing: Vec<usize> = self
            .instances
            .iter()
            .map(|inst| inst.distinct.iter().filter(|&&a| !facts.contains(a)).count())
            .collect();
        let mut queue: Vec<usize> = Vec::new();
        let fire = |k: usize, facts: &mut FixedBitSet, origin: &mut [Option<Origin>], queue: &mut Vec<usize>| {
            let c = self.instances[k].consequent;
            if !facts.put(c) {
                origin[c] = Some(Origin::Rule(k));
                queue.push(c);
            }
        };
        for (k, &m) in missing.iter().enumerate() {
            if m == 0 {
                fire(k, facts, origin, &mut queue);
            }
        }
        while let Some(f) = queue.pop() {
            for &k in &self.watch[f] {
                missing[k] -= 1;
                if missing[k] == 0 {
                    fire(k, facts, origin, &mut queue);
                }
            }
        }
    }

    fn closure_of(&self, start: &FixedBitSet) -> FixedBitSet {
        let mut facts = start.clone();
        let mut origin = vec![None; self.universe.len()];
        self.close(&mut facts, &mut origin);
        facts
    }

    fn has_absurdity(&self, facts: &FixedBitSet) -> bool {
        !facts.is_disjoint(&self.absurd)
    }

    fn tick(&mut self) -> Result<(), ProofError> {
        self.nodes += 1;
        if self.nodes > self.limits.max_nodes {
            Err(ProofError::Limit { what: "search nodes", limit: self.limits.max_nodes })
        } else {
            Ok(())
        }
    }

    /// Does `start` indirectly derive an absurdity?
    fn refutes(&mut self, start: &FixedBitSet) -> Result<bool, ProofError> {
        let closed = self.closure_of(start);
        Ok(!self.completable(closed)?)
    }

    /// Is there a complete closed superset of `facts` without absurdities?
    fn completable(&mut self, facts: FixedBitSet) -> Result<bool, ProofError> {
        if self.has_absurdity(&facts) {
            return Ok(false);
        }
        if let Some(&known) = self.memo.get(&facts) {
            return Ok(known);
        }
        self.tick()?;
        let undecided = (0..self.universe.len()).find(|&i| !facts.contains(i) && !facts.contains(self.negation[i]));
        let answer = match undecided {
            None => true,
            Some(theta) => {
                let mut found = false;
                for choice in [theta, self.negation[theta]] {
                    let mut next = facts.clone();
                    next.insert(choice);
                    if self.completable(self.closure_of(&next))? {
                        found = true;
                        break;
                    }
                }
                found
            }
        };
        self.memo.insert(facts, answer);
        Ok(answer)
    }

    /// Saturate `start`, stopping early once an absurdity or `goal` appears.
    fn saturate(&mut self, start: &FixedBitSet, goal: Option<usize>) -> Result<Saturation, ProofError> {
        self.tick()?;
        let n = self.universe.len();
        let mut facts = start.clone();
        let mut origin: Vec<Option<Origin>> = (0..n).map(|i| start.contains(i).then_some(Origin::Given)).collect();
        self.close(&mut facts, &mut origin);
        let done = |facts: &FixedBitSet, this: &Self| {
            this.has_absurdity(facts) || goal.is_some_and(|g| facts.contains(g))
        };
        // try refuting the goal's negation before anything else
        let order: Vec<usize> = goal.map(|g| self.negation[g]).into_iter().chain(0..n).collect();
        let mut changed = true;
        while changed && !done(&facts, self) {
            changed = false;
            for &theta in &order {
                let neg = self.negation[theta];
                if facts.contains(theta) || facts.contains(neg) {
                    continue;
                }
                let mut trial = facts.clone();
                trial.insert(theta);
                if self.refutes(&trial)? {
                    let base = facts.clone();
                    facts.insert(neg);
                    origin[neg] = Some(Origin::Raa { theta, base });
                    self.close(&mut facts, &mut origin);
                    changed = true;
                    if done(&facts, self) {
                        break;
                    }
                }
            }
        }
        Ok(Saturation { facts, origin })
    }

    /// Is `goal` indirectly derivable from `premises`?
    pub fn derivable(&mut self, premises: &FormulaSet, goal: &Goal) -> Result<bool, ProofError> {
        self.nodes = 0;
        let start = self.ids(premises)?;
        let goal_id = self.goal_id(goal)?;
        let sat = self.saturate(&start, goal_id)?;
        Ok(match goal_id {
            Some(g) => sat.facts.contains(g) || self.has_absurdity(&sat.facts),
            None => self.has_absurdity(&sat.facts),
        })
    }

    /// Everything indirectly derivable from `premises` within the universe.
    pub fn saturation(&mut self, premises: &FormulaSet) -> Result<FormulaSet, ProofError> {
        self.nodes = 0;
        let start = self.ids(premises)?;
        let sat = self.saturate(&start, None)?;
        if self.has_absurdity(&sat.facts) {
            // every formula follows by a vacuous reductio
            return Ok(self.universe.iter().cloned().collect());
        }
        Ok(sat.facts.ones().map(|i| self.universe[i].clone()).collect())
    }

    fn goal_id(&self, goal: &Goal) -> Result<Option<usize>, ProofError> {
        match goal {
            Goal::Absurdity => Ok(None),
            Goal::Formula(f) => {
                self.index.get(f).copied().map(Some).ok_or_else(|| ProofError::OutsideUniverse(f.clone()))
            }
        }
    }

    /// A derivation of `goal` from `premises`, with reductio steps where the
    /// saturation used them.
    pub fn derive(&mut self, premises: &FormulaSet, goal: &Goal) -> Result<Option<Derivation>, ProofError> {
        self.nodes = 0;
        let start = self.ids(premises)?;
        let goal_id = self.goal_id(goal)?;
        let mut builder = Builder { prover: self, next_label: 1 };
        builder.derive(start, goal_id)
    }
}

struct Frame {
    sat: Saturation,
    /// Hypothesis discharged by this frame, with its label.
    hypothesis: Option<(usize, u32)>,
}

struct Builder<'a> {
    prover: &'a mut IndirectProver,
    next_label: u32,
}

impl Builder<'_> {
    fn derive(&mut self, start: FixedBitSet, goal: Option<usize>) -> Result<Option<Derivation>, ProofError> {
        let sat = self.prover.saturate(&start, goal)?;
        let target = match goal {
            Some(g) if sat.facts.contains(g) => Some(g),
            _ => sat.facts.ones().find(|&i| self.prover.absurd.contains(i)),
        };
        let Some(target) = target else { return Ok(None) };
        let mut frames = vec![Frame { sat, hypothesis: None }];
        let mut tree = self.build(&mut frames, target)?;
        if let Some(g) = goal {
            if target != g {
                // from an absurdity, the goal follows by discharging nothing
                let label = self.fresh_label();
                tree = Derivation::Raa { conclusion: self.prover.universe[g].clone(), child: Box::new(tree), label };
            }
        }
        Ok(Some(tree))
    }

    fn fresh_label(&mut self) -> u32 {
        let label = self.next_label;
        self.next_label += 1;
        label
    }

    /// Derivation of fact `f` in the innermost frame.
    fn build(&mut self, frames: &mut Vec<Frame>, f: usize) -> Result<Derivation, ProofError> {
        let depth = frames.len() - 1;
        let origin = frames[depth].sat.origin[f].clone().expect("fact has an origin");
        let formula = self.prover.universe[f].clone();
        match origin {
            Origin::Given => match frames[depth].hypothesis {
                Some((h, label)) if h == f => Ok(Derivation::Premise { formula, discharge: Some(label) }),
                Some(_) => {
                    // inherited from the enclosing frame
                    let frame = frames.pop().expect("frame");
                    let d = self.build(frames, f);
                    frames.push(frame);
                    d
                }
                None => Ok(Derivation::premise(formula)),
            },
            Origin::Rule(k) => {
                let inst = &self.prover.instances[k];
                let (rule, substitution, antecedents) =
                    (inst.rule, inst.substitution.clone(), inst.antecedents.clone());
                let children = antecedents.iter().map(|&a| self.build(frames, a)).collect::<Result<Vec<_>, _>>()?;
                Ok(Derivation::Rule {
                    rule: self.prover.rules.rules()[rule].name.clone(),
                    substitution,
                    children,
                    conclusion: formula,
                })
            }
            Origin::Raa { theta, base } => {
                let label = self.fresh_label();
                let mut start = base;
                start.insert(theta);
                let sat = self.prover.saturate(&start, None)?;
                let bot = sat
                    .facts
                    .ones()
                    .find(|&i| self.prover.absurd.contains(i))
                    .expect("recorded reductio reaches an absurdity");
                frames.push(Frame { sat, hypothesis: Some((theta, label)) });
                let child = self.build(frames, bot);
                frames.pop();
                Ok(Derivation::Raa { conclusion: formula, child: Box::new(child?), label })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IndirectOptions {
    /// Universe for reductio hypotheses; `None` means `S†_z` with `z` the
    /// largest bound in the rules, premises and goal.
    pub language: Option<Language>,
    pub limits: IndirectLimits,
}

/// An indirect derivation of `goal` over the atoms of the premises and goal.
/// A direct derivation is returned as is when one exists.
pub fn derive_indirect(
    premises: &FormulaSet,
    rules: &RuleSet,
    goal: &Goal,
    options: &IndirectOptions,
) -> Result<Option<Derivation>, ProofError> {
    if let Goal::Formula(g) = goal {
        if let Some(d) = derive_direct(premises, rules, g) {
            return Ok(Some(d));
        }
    }
    let goal_formulas: Vec<&Formula> = match goal {
        Goal::Formula(g) => vec![g],
        Goal::Absurdity => vec![],
    };
    let mut atoms = atoms_of(premises.iter().chain(goal_formulas.iter().copied()));
    if atoms.is_empty() {
        // an absurdity needs an atom to be stated
        atoms.insert(Atom::new("a").expect("valid atom name"));
    }
    let language = options.language.unwrap_or_else(|| {
        let z = premises.iter().chain(goal_formulas.iter().copied()).map(Formula::bound).max().unwrap_or(0);
        Language::sdagger(z.max(rules.max_bound()))
    });
    let mut prover = IndirectProver::new(rules, &atoms, language, options.limits)?;
    prover.derive(premises, goal)
}
