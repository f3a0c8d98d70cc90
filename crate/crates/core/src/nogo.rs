//! The counterexample family behind the incompleteness of indirect
//! syllogistic proof systems for the bounded counting fragments.
//!
//! Over the atoms `p_0..p_{2n-1}, q_0..q_{2n+1}` we build a complete,
//! absurdity-free but unsatisfiable theory `Γⁿ`, satisfiable three-formula
//! variants `Γⁿ_t` and explicit models `𝔅ⁿ_t` of them. Any finite set of sound
//! rules of width `r` leaves `Γⁿ` closed once `n ≥ r + 4`, so it can never
//! reach the absurdity `Γⁿ` entails.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::proof::{check_rule_sound, direct_closure, RuleSet, Soundness};
use crate::semantics::Structure;
use crate::solver::{refute_witness_chain, satisfiable_with, Engine, SolverConfig, SolverError};
use crate::syntax::{expand_star, Atom, Family, Formula, FormulaSet, Language, Literal, StarKind, SyntaxError};

#[derive(Debug, Error)]
pub enum NogoError {
    #[error("n must be at least 4, got {0}")]
    SmallN(usize),
    #[error("z must be at least 1")]
    ZeroZ,
    #[error("t must lie in 1..={max}, got {t}")]
    TOutOfRange { t: usize, max: usize },
    #[error("unknown claim {0}; expected 1, 2, 3 or 4")]
    UnknownClaim(u8),
    #[error("only S and S\u{2020} are supported")]
    Unbounded,
    #[error("rule {rule} is unsound; countermodel has {} elements", model.len())]
    UnsoundRule { rule: String, model: Structure },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// Validated parameters of the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NogoConfig {
    pub n: usize,
    pub z: u64,
    pub lang: Family,
}

impl NogoConfig {
    pub fn new(n: usize, z: u64, lang: Family) -> Result<Self, NogoError> {
        if n < 4 {
            return Err(NogoError::SmallN(n));
        }
        if z == 0 {
            return Err(NogoError::ZeroZ);
        }
        if !matches!(lang, Family::S | Family::Sdagger) {
            return Err(NogoError::Unbounded);
        }
        Ok(NogoConfig { n, z, lang })
    }

    pub fn language(&self) -> Language {
        Language { family: self.lang, z: self.z }
    }

    fn check_t(&self, t: usize) -> Result<(), NogoError> {
        if (1..=self.n - 2).contains(&t) {
            Ok(())
        } else {
            Err(NogoError::TOutOfRange { t, max: self.n - 2 })
        }
    }
}

fn p(i: usize) -> Atom {
    Atom::new(&format!("p_{i}")).expect("valid atom name")
}

fn q(i: usize) -> Atom {
    Atom::new(&format!("q_{i}")).expect("valid atom name")
}

/// `p_0..p_{2n-1}` followed by `q_0..q_{2n+1}`.
pub fn gen_pn(n: usize) -> Result<Vec<Atom>, NogoError> {
    if n < 4 {
        return Err(NogoError::SmallN(n));
    }
    Ok((0..2 * n).map(p).chain((0..2 * n + 2).map(q)).collect())
}

fn atom_set(n: usize) -> BTreeSet<Atom> {
    gen_pn(n).expect("n checked").into_iter().collect()
}

/// The schemas making up `Γⁿ`, named by the kinds of their two arguments
/// (`+` positive, `-` negative) and a running index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Schema {
    PP1, PP2, PP3, PP4, PPm1, PPm2, PPmm1,
    QQ1, QQ2, QQm1, QQm2, QQmm1,
    PQ1, PQ2, PQ3, PQ4, PQm1, PQm2, PQm3, PQmp1, PQmm1,
}

impl Schema {
    pub const ALL: [Schema; 21] = [
        Schema::PP1, Schema::PP2, Schema::PP3, Schema::PP4, Schema::PPm1, Schema::PPm2, Schema::PPmm1,
        Schema::QQ1, Schema::QQ2, Schema::QQm1, Schema::QQm2, Schema::QQmm1,
        Schema::PQ1, Schema::PQ2, Schema::PQ3, Schema::PQ4, Schema::PQm1, Schema::PQm2, Schema::PQm3,
        Schema::PQmp1, Schema::PQmm1,
    ];

    /// The schemas the unsatisfiability argument actually uses.
    pub const CORE: [Schema; 5] = [Schema::PP1, Schema::PP3, Schema::QQ1, Schema::PQm1, Schema::PQm2];

    pub fn label(self) -> &'static str {
        match self {
            Schema::PP1 => "pp++1",
            Schema::PP2 => "pp++2",
            Schema::PP3 => "pp++3",
            Schema::PP4 => "pp++4",
            Schema::PPm1 => "pp+-1",
            Schema::PPm2 => "pp+-2",
            Schema::PPmm1 => "pp--1",
            Schema::QQ1 => "qq++1",
            Schema::QQ2 => "qq++2",
            Schema::QQm1 => "qq+-1",
            Schema::QQm2 => "qq+-2",
            Schema::QQmm1 => "qq--1",
            Schema::PQ1 => "pq++1",
            Schema::PQ2 => "pq++2",
            Schema::PQ3 => "pq++3",
            Schema::PQ4 => "pq++4",
            Schema::PQm1 => "pq+-1",
            Schema::PQm2 => "pq+-2",
            Schema::PQm3 => "pq+-3",
            Schema::PQmp1 => "pq-+1",
            Schema::PQmm1 => "pq--1",
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// How a pair's count is pinned down.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    /// exactly one
    One,
    /// none
    Zero,
    /// more than `z`
    Many,
}

struct Instance {
    schema: Schema,
    shape: Shape,
    l: Literal,
    m: Literal,
}

fn instances(n: usize) -> Vec<Instance> {
    let (np, nq) = (2 * n, 2 * n + 2);
    let even = |i: usize| i % 2 == 0;
    let mut out = Vec::new();
    let mut push = |schema, shape, l: Literal, m: Literal| out.push(Instance { schema, shape, l, m });
    use Schema::*;
    use Shape::*;

    for i in 0..np - 1 {
        push(PP1, One, p(i).pos(), p(i + 1).pos());
    }
    for i in (0..=np - 4).filter(|&i| even(i)) {
        push(PP2, One, p(i).pos(), p(i + 3).pos());
    }
    push(PP3, Zero, p(0).pos(), p(np - 1).pos());
    for i in 0..np {
        for j in i..np {
            if j != i + 1 && (!even(i) || j != i + 3) && (i != 0 || j != np - 1) {
                push(PP4, Many, p(i).pos(), p(j).pos());
            }
        }
    }
    for i in 0..np {
        push(PPm1, Zero, p(i).pos(), p(i).neg());
        for j in (0..np).filter(|&j| j != i) {
            push(PPm2, Many, p(i).pos(), p(j).neg());
        }
        for j in i..np {
            push(PPmm1, Many, p(i).neg(), p(j).neg());
        }
    }

    for i in (0..=nq - 2).filter(|&i| even(i)) {
        push(QQ1, One, q(i).pos(), q(i + 1).pos());
    }
    for i in 0..nq {
        for j in i..nq {
            if !even(i) || j != i + 1 {
                push(QQ2, Many, q(i).pos(), q(j).pos());
            }
        }
    }
    for i in 0..nq {
        push(QQm1, Zero, q(i).pos(), q(i).neg());
        for j in (0..nq).filter(|&j| j != i) {
            push(QQm2, Many, q(i).pos(), q(j).neg());
        }
        for j in i..nq {
            push(QQmm1, Many, q(i).neg(), q(j).neg());
        }
    }

    for i in (0..=np - 2).filter(|&i| even(i)) {
        push(PQ1, One, p(i + 1).pos(), q(i).pos());
    }
    for i in 0..np {
        push(PQ2, One, p(i).pos(), q(i + 1).pos());
    }
    for i in (0..=np - 2).filter(|&i| even(i)) {
        push(PQ3, One, p(i).pos(), q(i + 3).pos());
    }
    for i in 0..np {
        for j in 0..nq {
            if j != i + 1 && (!even(i) || j != i + 3) && (!even(j) || i != j + 1) {
                push(PQ4, Many, p(i).pos(), q(j).pos());
            }
        }
    }
    for i in 0..np {
        push(PQm1, Zero, p(i).pos(), q(i).neg());
        push(PQm2, Zero, p(i).pos(), q(i + 2).neg());
        for j in (0..nq).filter(|&j| j != i && j != i + 2) {
            push(PQm3, Many, p(i).pos(), q(j).neg());
        }
        for j in 0..nq {
            push(PQmp1, Many, p(i).neg(), q(j).pos());
            push(PQmm1, Many, p(i).neg(), q(j).neg());
        }
    }
    out
}

fn expand(shape: Shape, z: u64, l: &Literal, m: &Literal) -> FormulaSet {
    let (kind, i) = match shape {
        Shape::One => (StarKind::Exactly, 1),
        Shape::Zero => (StarKind::AtMost, 0),
        Shape::Many => (StarKind::MoreThan, z),
    };
    expand_star(kind, i, z, l, m).expect("bounds within 0..=z")
}

fn gamma_of(cfg: &NogoConfig, keep: impl Fn(Schema) -> bool) -> FormulaSet {
    let language = cfg.language();
    instances(cfg.n)
        .iter()
        .filter(|inst| keep(inst.schema))
        .flat_map(|inst| expand(inst.shape, cfg.z, &inst.l, &inst.m))
        .filter(|f| language.contains(f))
        .collect()
}

/// `Γⁿ` for bound `z` in `S_z` or `S†_z`.
pub fn gen_gamma(n: usize, z: u64, lang: Family) -> Result<FormulaSet, NogoError> {
    let cfg = NogoConfig::new(n, z, lang)?;
    Ok(gamma_of(&cfg, |_| true))
}

/// `Γⁿ` with each formula tagged by the schema producing it.
pub fn gen_gamma_tagged(n: usize, z: u64, lang: Family) -> Result<Vec<(Schema, FormulaSet)>, NogoError> {
    let cfg = NogoConfig::new(n, z, lang)?;
    let language = cfg.language();
    Ok(instances(n)
        .iter()
        .map(|inst| {
            let fs = expand(inst.shape, z, &inst.l, &inst.m).into_iter().filter(|f| language.contains(f)).collect();
            (inst.schema, fs)
        })
        .filter(|(_, fs): &(Schema, FormulaSet)| !fs.is_empty())
        .collect())
}

/// The part of `Γⁿ` the unsatisfiability argument runs on.
pub fn claim2_subset(n: usize, z: u64, lang: Family) -> Result<FormulaSet, NogoError> {
    let cfg = NogoConfig::new(n, z, lang)?;
    Ok(gamma_of(&cfg, |s| Schema::CORE.contains(&s)))
}

/// `Γⁿ_t`: `p_{2t-1}, p_{2t}` and `p_{2t-2}, p_{2t+1}` become disjoint and
/// `q_{2t}, q_{2t+1}` gain a second common element.
pub fn gen_gamma_t(n: usize, t: usize, z: u64, lang: Family) -> Result<FormulaSet, NogoError> {
    let cfg = NogoConfig::new(n, z, lang)?;
    cfg.check_t(t)?;
    let mut gamma = gamma_of(&cfg, |_| true);
    let swaps = [
        Formula::more_than(0, p(2 * t - 1).pos(), p(2 * t).pos()),
        Formula::more_than(0, p(2 * t - 2).pos(), p(2 * t + 1).pos()),
        Formula::at_most(1, q(2 * t).pos(), q(2 * t + 1).pos()),
    ];
    for f in swaps {
        gamma.remove(&f);
        gamma.insert(f.negate());
    }
    Ok(gamma)
}

/// The model `𝔅ⁿ_t` of `Γⁿ_t`, with `z + 1` copies of every `b`, `c` and
/// `d` element so that "more than `z`" claims hold.
pub fn gen_b(n: usize, t: usize, z: u64) -> Result<Structure, NogoError> {
    let cfg = NogoConfig::new(n, z, Family::Sdagger)?;
    cfg.check_t(t)?;
    let (np, nq) = (2 * n, 2 * n + 2);
    let even = |i: usize| i % 2 == 0;
    let mut elements: Vec<(String, Vec<Atom>)> = vec![
        ("a".into(), (0..2 * t).map(p).chain((0..2 * t + 2).map(q)).collect()),
        ("a'".into(), (2 * t..np).map(p).chain((2 * t..nq).map(q)).collect()),
    ];
    let mut copies = |family: &str, i: usize, j: usize, atoms: Vec<Atom>| {
        for k in 0..=z {
            elements.push((format!("{family}_{i}_{j}_{k}"), atoms.clone()));
        }
    };
    for i in 0..np {
        for j in i..np {
            if j != i + 1 && (!even(i) || j != i + 3) && (i != 0 || j != np - 1) {
                copies("b", i, j, vec![p(i), q(i), q(i + 2), p(j), q(j), q(j + 2)]);
            }
        }
    }
    for i in 0..np {
        for j in 0..nq {
            if j != i + 1 && (!even(i) || j != i + 3) && (!even(j) || i != j + 1) {
                copies("c", i, j, vec![p(i), q(i), q(i + 2), q(j)]);
            }
        }
    }
    for i in 0..nq {
        for j in i..nq {
            if !even(i) || j != i + 1 {
                copies("d", i, j, vec![q(i), q(j)]);
            }
        }
    }
    elements.push(("e".into(), vec![]));
    elements.push(("e'".into(), vec![]));
    Ok(Structure::from_elements(elements).expect("distinct element names"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimReport {
    /// `"1"`–`"4"` or `"experiment"`.
    pub claim: String,
    pub n: usize,
    pub z: u64,
    pub lang: String,
    pub verdict: bool,
    pub summary: String,
    /// Traces, witnesses and counterexamples backing the verdict.
    pub evidence: Vec<String>,
    pub millis: u128,
}

impl fmt::Display for ClaimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.verdict { "holds" } else { "FAILS" };
        writeln!(f, "claim {} (n={}, z={}, {}): {verdict} [{} ms]", self.claim, self.n, self.z, self.lang, self.millis)?;
        writeln!(f, "  {}", self.summary)?;
        for line in &self.evidence {
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

fn report(cfg: &NogoConfig, claim: &str, start: Instant, verdict: bool, summary: String, evidence: Vec<String>) -> ClaimReport {
    ClaimReport {
        claim: claim.into(),
        n: cfg.n,
        z: cfg.z,
        lang: cfg.language().to_string(),
        verdict,
        summary,
        evidence,
        millis: start.elapsed().as_millis(),
    }
}

/// Machine-check one of the four claims about the family.
pub fn check_claim(n: usize, z: u64, lang: Family, id: u8) -> Result<ClaimReport, NogoError> {
    let cfg = NogoConfig::new(n, z, lang)?;
    let start = Instant::now();
    let gamma = gamma_of(&cfg, |_| true);
    let mut evidence = Vec::new();
    let (verdict, summary) = match id {
        1 => {
            let c = crate::syntax::is_complete_set(&gamma, &atom_set(n), cfg.language())?;
            let absurd: Vec<_> = gamma.iter().filter(|f| f.is_absurdity()).collect();
            evidence.extend(c.missing.iter().map(|f| format!("neither {f} nor its negation")));
            evidence.extend(c.both.iter().map(|f| format!("both {f} and its negation")));
            evidence.extend(absurd.iter().map(|f| format!("absurdity {f}")));
            let ok = c.is_exactly_one() && absurd.is_empty();
            (ok, format!("{} formulas; complete, exactly-one and absurdity-free: {ok}", gamma.len()))
        }
        2 => {
            let chain = refute_witness_chain(&gamma);
            let subset = gamma_of(&cfg, |s| Schema::CORE.contains(&s));
            let witness = satisfiable_with(&subset, z, Engine::Witness, &SolverConfig::default())?;
            match &chain {
                Some(r) => evidence.extend(r.trace.iter().map(|s| s.to_string())),
                None => evidence.push("witness chain found no refutation".into()),
            }
            if let Some(m) = witness.model() {
                evidence.push(format!("model of the core subset: {m}"));
            }
            let ok = chain.is_some() && witness.is_unsat();
            let summary = format!(
                "witness chain: {}; witness engine on {} core formulas: {} after {} nodes",
                if chain.is_some() { "UNSAT" } else { "no refutation" },
                subset.len(),
                if witness.is_unsat() { "UNSAT" } else { "SAT" },
                witness.nodes,
            );
            (ok, summary)
        }
        3 => {
            let variants: Vec<FormulaSet> =
                (1..=n - 2).map(|t| gen_gamma_t(n, t, z, lang)).collect::<Result<_, _>>()?;
            let mut pairs = 0;
            for (a, ga) in variants.iter().enumerate() {
                for (b, gb) in variants.iter().enumerate().skip(a + 1) {
                    pairs += 1;
                    for f in ga.intersection(gb).filter(|f| !gamma.contains(*f)) {
                        evidence.push(format!("t={}, t'={}: {f} is shared but not in the base theory", a + 1, b + 1));
                    }
                }
            }
            (evidence.is_empty(), format!("{pairs} pairs of variants checked"))
        }
        4 => {
            let mut ok = true;
            let atoms = atom_set(n);
            for t in 1..=n - 2 {
                let model = gen_b(n, t, z)?;
                let theory = gen_gamma_t(n, t, z, lang)?;
                match model.models_set(&theory) {
                    Ok(()) => {
                        let exact = model.theory_of(&atoms, cfg.language())? == theory;
                        evidence.push(format!("t={t}: {} elements, model; theory matches exactly: {exact}", model.len()));
                    }
                    Err(f) => {
                        ok = false;
                        evidence.push(format!("t={t}: model falsifies {f}"));
                    }
                }
            }
            (ok, format!("{} variants checked against their models", n - 2))
        }
        other => return Err(NogoError::UnknownClaim(other)),
    };
    Ok(report(&cfg, &id.to_string(), start, verdict, summary, evidence))
}

/// Run a sound rule set against `Γⁿ` with `n = max(width + 4, 4)`: its direct
/// closure stays inside `Γⁿ`, so no absurdity is derivable even though `Γⁿ`
/// is unsatisfiable.
pub fn incompleteness_experiment(rules: &RuleSet, z: u64, lang: Family) -> Result<ClaimReport, NogoError> {
    for rule in rules.rules() {
        if let Soundness::Unsound(model) = check_rule_sound(rule, z)? {
            return Err(NogoError::UnsoundRule { rule: rule.name.clone(), model });
        }
    }
    let n = (rules.max_width() + 4).max(4);
    let cfg = NogoConfig::new(n, z, lang)?;
    let start = Instant::now();
    let gamma = gamma_of(&cfg, |_| true);
    let closure = direct_closure(&gamma, rules, &atom_set(n));
    let escaped: Vec<_> = closure.difference(&gamma).collect();
    let absurd = closure.iter().find(|f| f.is_absurdity());
    let refutation = refute_witness_chain(&gamma);

    let mut evidence: Vec<String> = escaped.iter().map(|f| format!("derived outside the theory: {f}")).collect();
    if let Some(f) = absurd {
        evidence.push(format!("derived absurdity {f}"));
    }
    match &refutation {
        Some(r) => evidence.push(format!("theory is unsatisfiable: witness chain ends by violating {}", r.violated())),
        None => evidence.push("witness chain found no refutation".into()),
    }
    let verdict = escaped.is_empty() && absurd.is_none() && refutation.is_some();
    let summary = if verdict {
        format!(
            "{} rules of width at most {}: closure of the {} formulas adds nothing and reaches no absurdity, \
             yet the theory is unsatisfiable; the rules are incomplete for {}",
            rules.len(),
            rules.max_width(),
            gamma.len(),
            cfg.language()
        )
    } else {
        "the rules escape the theory; incompleteness not exhibited".to_string()
    };
    Ok(report(&cfg, "experiment", start, verdict, summary, evidence))
}
