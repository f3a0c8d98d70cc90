//! Command-line front end.
//!
//! Exit codes: 0 sat / entailed / derivable / verified, 1 the negative
//! answer, 2 usage, parse or input errors, 3 resource limits, 4 the refute
//! engine found no refutation (which decides nothing).

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::nogo::{self, ClaimReport, NogoError};
use crate::parser::{parse_formula, parse_graph, parse_rules, parse_theory, render_structure, render_theory};
use crate::proof::{
    builtin, check_rule_sound, derive_direct, derive_indirect, Goal, IndirectOptions, ProofError, RuleSet, Soundness,
};
use crate::solver::{
    entails, countermodel, reduce_3col, reduce_t_to_s1, satisfiable, Engine, SolverError, Verdict,
};
use crate::syntax::{Family, Formula, FormulaSet};

const OK: i32 = 0;
const NO: i32 = 1;
const INPUT: i32 = 2;
const LIMIT: i32 = 3;
const UNDECIDED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "syllogistic", version, about = "Reasoning in numerical syllogistic fragments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide satisfiability of a theory file.
    Sat {
        file: PathBuf,
        #[arg(long)]
        z: u64,
        #[arg(long, value_enum, default_value_t = EngineArg::Witness)]
        engine: EngineArg,
        /// Write a model, when one is found, as a structure file.
        #[arg(long)]
        model_out: Option<PathBuf>,
    },
    /// Decide whether a theory entails a formula.
    Entail {
        file: PathBuf,
        #[arg(long)]
        conclusion: String,
        #[arg(long)]
        z: u64,
    },
    /// Search for a derivation of a goal from a theory.
    Derive {
        file: PathBuf,
        #[arg(long)]
        goal: String,
        /// A rule file, or builtin names (`darii_ferio`, `transfer_<z>`) joined by `+`.
        #[arg(long)]
        rules: String,
        /// Allow reductio ad absurdum.
        #[arg(long)]
        indirect: bool,
        #[arg(long)]
        max_nodes: Option<u64>,
    },
    Rules {
        #[command(subcommand)]
        command: RulesCommand,
    },
    Nogo {
        #[command(subcommand)]
        command: NogoCommand,
    },
    Reduce {
        #[command(subcommand)]
        command: ReduceCommand,
    },
}

#[derive(Debug, Subcommand)]
enum RulesCommand {
    /// Check every rule for soundness.
    Check {
        /// A rule file or builtin names joined by `+`.
        file: String,
        #[arg(long)]
        z: u64,
        /// Also write a JSON report (`-` for standard output).
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum NogoCommand {
    /// Write the unsatisfiable theory, its variants and their models.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        z: u64,
        #[arg(long, value_enum)]
        lang: LangArg,
        /// Only this variant; all of them by default.
        #[arg(long)]
        t: Option<usize>,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Check the claims about the family, or run a rule set against it.
    Verify {
        #[arg(long, required_unless_present = "experiment")]
        n: Option<usize>,
        #[arg(long)]
        z: u64,
        #[arg(long, value_enum)]
        lang: LangArg,
        /// Comma-separated claim ids out of 1,2,3,4.
        #[arg(long, conflicts_with = "experiment", required_unless_present = "experiment")]
        claims: Option<String>,
        #[arg(long, requires = "rules")]
        experiment: bool,
        #[arg(long)]
        rules: Option<String>,
        /// Also write a JSON report (`-` for standard output).
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum ReduceCommand {
    /// Graph 3-colourability to a theory.
    #[command(name = "3col")]
    ThreeCol {
        graph: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Bounded unary cardinalities to S_1.
    #[command(name = "t-to-s1")]
    TToS1 {
        file: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EngineArg {
    Brute,
    Witness,
    Refute,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Brute => Engine::Brute,
            EngineArg::Witness => Engine::Witness,
            EngineArg::Refute => Engine::Refute,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LangArg {
    S,
    Sd,
}

impl From<LangArg> for Family {
    fn from(l: LangArg) -> Self {
        match l {
            LangArg::S => Family::S,
            LangArg::Sd => Family::Sdagger,
        }
    }
}

/// A failure with the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure { code: INPUT, message: message.to_string() }
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        let code = if matches!(e, SolverError::ResourceLimit { .. }) { LIMIT } else { INPUT };
        Failure { code, message: e.to_string() }
    }
}

impl From<ProofError> for Failure {
    fn from(e: ProofError) -> Self {
        let code = if matches!(e, ProofError::Limit { .. }) { LIMIT } else { INPUT };
        Failure { code, message: e.to_string() }
    }
}

impl From<NogoError> for Failure {
    fn from(e: NogoError) -> Self {
        match e {
            NogoError::Solver(s) => s.into(),
            NogoError::UnsoundRule { rule, model } => Failure {
                code: INPUT,
                message: format!("rule {rule} is unsound; countermodel:\n{}", render_structure(&model)),
            },
            other => Failure::input(other),
        }
    }
}

type Outcome = Result<i32, Failure>;

/// Parse `argv` (program name first), run the command and return its exit
/// code. Results go to standard output, diagnostics to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { INPUT } else { OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            eprintln!("error: {}", message.trim_end());
            code
        }
    }
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Sat { file, z, engine, model_out } => sat(&file, z, engine.into(), model_out.as_deref()),
        Command::Entail { file, conclusion, z } => entail(&file, &conclusion, z),
        Command::Derive { file, goal, rules, indirect, max_nodes } => derive(&file, &goal, &rules, indirect, max_nodes),
        Command::Rules { command: RulesCommand::Check { file, z, json } } => rules_check(&file, z, json.as_deref()),
        Command::Nogo { command: NogoCommand::Generate { n, z, lang, t, out } } => generate(n, z, lang.into(), t, &out),
        Command::Nogo { command: NogoCommand::Verify { n, z, lang, claims, experiment, rules, json } } => {
            let reports = if experiment {
                let rules = load_rules(rules.as_deref().expect("clap requires --rules"))?;
                vec![nogo::incompleteness_experiment(&rules, z, lang.into())?]
            } else {
                let n = n.expect("clap requires --n");
                claim_ids(claims.as_deref().expect("clap requires --claims"))?
                    .into_iter()
                    .map(|id| nogo::check_claim(n, z, lang.into(), id))
                    .collect::<Result<_, _>>()?
            };
            verify_output(&reports, json.as_deref())
        }
        Command::Reduce { command: ReduceCommand::ThreeCol { graph, out } } => {
            let graph = parse_graph(&read(&graph)?).map_err(Failure::input)?;
            let theory = reduce_3col(&graph).map_err(Failure::input)?;
            write(&out, &render_theory(&theory))?;
            Ok(OK)
        }
        Command::Reduce { command: ReduceCommand::TToS1 { file, out } } => {
            let theory = reduce_t_to_s1(&load_theory(&file)?).map_err(Failure::input)?;
            write(&out, &render_theory(&theory))?;
            Ok(OK)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if path == Path::new("-") {
        print!("{text}");
        return Ok(());
    }
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_theory(path: &Path) -> Result<FormulaSet, Failure> {
    let doc = parse_theory(&read(path)?).map_err(|e| Failure::input(format!("{}:\n{e}", path.display())))?;
    Ok(doc.to_set())
}

fn formula_arg(text: &str) -> Result<Formula, Failure> {
    parse_formula(text).map_err(|e| Failure::input(format!("{text:?}: {e}")))
}

/// A rule file if one exists at `source`, otherwise builtin names joined by `+`.
fn load_rules(source: &str) -> Result<RuleSet, Failure> {
    let path = Path::new(source);
    if path.is_file() {
        let doc = parse_rules(&read(path)?).map_err(|e| Failure::input(format!("{source}: {e}")))?;
        return Ok(RuleSet::new(doc.rules));
    }
    source.split('+').try_fold(RuleSet::default(), |acc, name| {
        builtin(name.trim())
            .map(|rs| acc.union(&rs))
            .ok_or_else(|| Failure::input(format!("{source}: no such file or builtin rule set")))
    })
}

fn claim_ids(list: &str) -> Result<Vec<u8>, Failure> {
    list.split(',')
        .map(|s| s.trim().parse::<u8>().map_err(|_| Failure::input(format!("bad claim id {s:?}"))))
        .collect()
}

fn sat(file: &Path, z: u64, engine: Engine, model_out: Option<&Path>) -> Outcome {
    let theory = load_theory(file)?;
    let result = satisfiable(&theory, z, engine)?;
    match &result.verdict {
        Verdict::Sat(model) => {
            println!("sat");
            print!("{model}");
            if let Some(path) = model_out {
                write(path, &render_structure(&model.to_structure()))?;
            }
            Ok(OK)
        }
        Verdict::Unsat => {
            println!("unsat");
            if let Some(r) = &result.refutation {
                print!("{r}");
            }
            Ok(NO)
        }
        Verdict::Unknown => {
            println!("unknown");
            eprintln!("the refute engine found no refutation; try --engine witness");
            Ok(UNDECIDED)
        }
    }
}

fn entail(file: &Path, conclusion: &str, z: u64) -> Outcome {
    let theory = load_theory(file)?;
    let conclusion = formula_arg(conclusion)?;
    if entails(&theory, &conclusion, z)? {
        println!("entailed");
        return Ok(OK);
    }
    println!("not entailed");
    if let Some(model) = countermodel(&theory, &conclusion, z)? {
        print!("{}", render_structure(&model));
    }
    Ok(NO)
}

fn derive(file: &Path, goal: &str, rules: &str, indirect: bool, max_nodes: Option<u64>) -> Outcome {
    let theory = load_theory(file)?;
    let goal = formula_arg(goal)?;
    let rules = load_rules(rules)?;
    let derivation = if indirect {
        let mut options = IndirectOptions::default();
        if let Some(n) = max_nodes {
            options.limits.max_nodes = n;
        }
        derive_indirect(&theory, &rules, &Goal::Formula(goal), &options)?
    } else {
        derive_direct(&theory, &rules, &goal)
    };
    match derivation {
        Some(d) => {
            print!("{d}");
            Ok(OK)
        }
        None => {
            println!("not derivable");
            Ok(NO)
        }
    }
}

#[derive(Serialize)]
struct RuleVerdict {
    rule: String,
    sound: bool,
    countermodel: Option<Vec<(String, Vec<String>)>>,
}

fn rules_check(source: &str, z: u64, json_out: Option<&Path>) -> Outcome {
    let rules = load_rules(source)?;
    let mut verdicts = Vec::new();
    for rule in rules.rules() {
        let verdict = match check_rule_sound(rule, z)? {
            Soundness::Sound => {
                println!("{}: sound", rule.name);
                RuleVerdict { rule: rule.name.clone(), sound: true, countermodel: None }
            }
            Soundness::Unsound(model) => {
                println!("{}: unsound; countermodel:", rule.name);
                for line in render_structure(&model).lines() {
                    println!("  {line}");
                }
                let rows = model
                    .element_names()
                    .iter()
                    .zip(model.atoms_by_element())
                    .map(|(name, atoms)| (name.clone(), atoms.iter().map(|a| a.to_string()).collect()))
                    .collect();
                RuleVerdict { rule: rule.name.clone(), sound: false, countermodel: Some(rows) }
            }
        };
        verdicts.push(verdict);
    }
    let all_sound = verdicts.iter().all(|v| v.sound);
    if let Some(path) = json_out {
        let doc = json!({ "schema": 1, "z": z, "all_sound": all_sound, "rules": verdicts });
        write(path, &format!("{doc:#}\n"))?;
    }
    Ok(if all_sound { OK } else { NO })
}

fn generate(n: usize, z: u64, lang: Family, t: Option<usize>, out: &Path) -> Outcome {
    let gamma = nogo::gen_gamma(n, z, lang)?;
    let variants: Vec<usize> = match t {
        Some(t) => vec![t],
        None => (1..=n - 2).collect(),
    };
    fs::create_dir_all(out).map_err(|e| Failure::input(format!("{}: {e}", out.display())))?;
    let mut files = vec![("gamma.txt".to_string(), render_theory(&gamma))];
    for t in variants {
        files.push((format!("gamma_t{t}.txt"), render_theory(&nogo::gen_gamma_t(n, t, z, lang)?)));
        files.push((format!("model_t{t}.txt"), render_structure(&nogo::gen_b(n, t, z)?)));
    }
    for (name, text) in files {
        let path = out.join(&name);
        write(&path, &text)?;
        println!("{}", path.display());
    }
    Ok(OK)
}

fn verify_output(reports: &[ClaimReport], json_out: Option<&Path>) -> Outcome {
    let mut stdout = std::io::stdout().lock();
    for r in reports {
        let _ = write!(stdout, "{r}");
    }
    drop(stdout);
    let verified = reports.iter().all(|r| r.verdict);
    if let Some(path) = json_out {
        let doc = json!({ "schema": 1, "verified": verified, "reports": reports });
        write(path, &format!("{doc:#}\n"))?;
    }
    Ok(if verified { OK } else { NO })
}
