//! Text front end.
//!
//! Formulas are written either in a compact DSL, `<=1(q,~r)` / `>0(p,q)`, or as
//! quasi-English sentences such as `At most 1 q is not an r`. Theory files hold
//! one formula per line, rule files hold named `antecedents --- consequent`
//! blocks, structure files list elements with the atoms they satisfy, and
//! graph files use DIMACS `p edge` / `e u v` lines.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::proof::Rule;
use crate::semantics::Structure;
use crate::solver::Graph;
use crate::syntax::{Atom, Formula, FormulaSet, Literal, Quantifier};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unrecognized sentence form: {0:?}")]
    UnknownTemplate(String),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

/// Every malformed line of a theory file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", render_line_errors(.errors))]
pub struct TheoryError {
    pub errors: Vec<(usize, ParseError)>,
}

fn render_line_errors(errors: &[(usize, ParseError)]) -> String {
    errors
        .iter()
        .map(|(line, e)| format!("line {line}: {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// How [`render`] prints a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Dsl,
    English,
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('<') || trimmed.starts_with('>') {
        DslParser { src: text, pos: text.len() - trimmed.len() }.formula()
    } else {
        parse_english(text)
    }
}

struct DslParser<'a> {
    src: &'a str,
    pos: usize,
}

impl DslParser<'_> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { column: self.pos + 1, message: message.into() })
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            self.error(format!("expected {token:?}"))
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &str {
        self.skip_ws();
        let start = self.pos;
        let len = self.rest().find(|c| !pred(c)).unwrap_or(self.rest().len());
        self.pos += len;
        &self.src[start..self.pos]
    }

    fn formula(mut self) -> Result<Formula, ParseError> {
        let quantifier = if self.eat("<=") {
            Quantifier::AtMost
        } else if self.eat(">") {
            Quantifier::MoreThan
        } else {
            return self.error("expected \"<=\" or \">\"");
        };
        let digits_at = self.pos;
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return self.error("expected a bound");
        }
        let Ok(bound) = digits.parse::<u64>() else {
            self.pos = digits_at;
            return self.error("bound too large");
        };
        self.expect("(")?;
        let l = self.literal()?;
        self.expect(",")?;
        let m = self.literal()?;
        self.expect(")")?;
        self.skip_ws();
        if !self.rest().is_empty() {
            return self.error("trailing input");
        }
        Ok(Formula::new(quantifier, bound, l, m))
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let negative = self.eat("~");
        self.skip_ws();
        let at = self.pos;
        let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        if name.is_empty() {
            return self.error("expected a literal");
        }
        match Atom::new(name) {
            Ok(a) if negative => Ok(a.neg()),
            Ok(a) => Ok(a.pos()),
            Err(e) => {
                self.pos = at;
                self.error(e.to_string())
            }
        }
    }
}

/// Quasi-English sentence forms.
///
/// Recognised (keywords case-insensitive, trailing period optional):
/// * `At most N X is/are [not] [a|an] Y`, `More than N X is/are [not] [a|an] Y`
/// * `No X is [a|an] Y`, `Some X is [not] [a|an] Y`, `Every X is [not] [a|an] Y`
///
/// where `X`, `Y` are `p` or `non-p`. After `are`, nouns are plural: one
/// trailing `s` is stripped, or a detached `s` token is skipped.
fn parse_english(text: &str) -> Result<Formula, ParseError> {
    let unknown = || ParseError::UnknownTemplate(text.trim().to_string());
    let cleaned = text.trim().trim_end_matches('.');
    let words: Vec<&str> = cleaned.split_whitespace().collect();
    let lower: Vec<String> = words.iter().map(|w| w.to_ascii_lowercase()).collect();
    let key = |i: usize| lower.get(i).map(String::as_str);

    // (quantifier, bound, position of subject, negate-predicate-for-every)
    let (quantifier, bound, mut at, every) = match (key(0), key(1)) {
        (Some("at"), Some("most")) | (Some("more"), Some("than")) => {
            let q = if key(0) == Some("at") { Quantifier::AtMost } else { Quantifier::MoreThan };
            let n = words.get(2).ok_or_else(unknown)?;
            let bound = n.parse::<u64>().map_err(|_| unknown())?;
            (q, bound, 3, false)
        }
        (Some("no"), _) => (Quantifier::AtMost, 0, 1, false),
        (Some("some"), _) => (Quantifier::MoreThan, 0, 1, false),
        (Some("every"), _) => (Quantifier::AtMost, 0, 1, true),
        _ => return Err(unknown()),
    };
    let verb = lower.iter().skip(at).position(|w| w == "is" || w == "are").ok_or_else(unknown)?;
    let verb = at + verb;
    let plural = lower[verb] == "are";
    let subject = noun_phrase(&words[at..verb], plural).ok_or_else(unknown)?;
    at = verb + 1;
    let mut negated = false;
    if key(at) == Some("not") {
        negated = true;
        at += 1;
    }
    if matches!(key(at), Some("a") | Some("an")) {
        at += 1;
    }
    let mut predicate = noun_phrase(&words[at.min(words.len())..], plural).ok_or_else(unknown)?;
    if negated {
        predicate = predicate.bar();
    }
    if every {
        // every X is Y  ==  at most 0 X are non-Y
        predicate = predicate.bar();
    }
    Ok(Formula::new(quantifier, bound, subject, predicate))
}

fn noun_phrase(words: &[&str], plural: bool) -> Option<Literal> {
    let (noun, detached_s) = match words {
        [noun] => (noun.to_string(), false),
        [noun, s] if plural && s.eq_ignore_ascii_case("s") => (noun.to_string(), true),
        [non, noun] if non.eq_ignore_ascii_case("non-") => (format!("non-{noun}"), false),
        _ => return None,
    };
    let (negative, mut name) = match noun.get(..4) {
        Some(prefix) if prefix.eq_ignore_ascii_case("non-") => (true, &noun[4..]),
        _ => (false, noun.as_str()),
    };
    if plural && !detached_s && name.len() > 1 && name.ends_with('s') {
        name = &name[..name.len() - 1];
    }
    let atom = Atom::new(name).ok()?;
    Some(if negative { atom.neg() } else { atom.pos() })
}

pub fn render(formula: &Formula, style: Style) -> String {
    match style {
        Style::Dsl => formula.to_string(),
        Style::English => render_english(formula),
    }
}

fn render_english(formula: &Formula) -> String {
    let (l, m) = formula.args();
    let head = match formula.quantifier() {
        Quantifier::AtMost => "At most",
        Quantifier::MoreThan => "More than",
    };
    let noun = |lit: &Literal| {
        if lit.is_positive() {
            format!("{}s", lit.atom)
        } else {
            format!("non-{}s", lit.atom)
        }
    };
    let predicate = if m.is_positive() {
        format!("{}s", m.atom)
    } else {
        format!("not {}s", m.atom)
    };
    format!("{head} {} {} are {predicate}", formula.bound(), noun(l))
}

/// A parsed theory file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TheoryDocument {
    /// Formulas in file order, with their 1-based line numbers.
    pub entries: Vec<(Formula, usize)>,
}

impl TheoryDocument {
    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.entries.iter().map(|(f, _)| f)
    }

    /// Set view; duplicates collapse.
    pub fn to_set(&self) -> FormulaSet {
        self.formulas().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Content of a line with any `#` comment removed, or `None` when blank.
fn content(line: &str) -> Option<&str> {
    let body = line.split('#').next().unwrap_or("").trim();
    (!body.is_empty()).then_some(body)
}

pub fn parse_theory(text: &str) -> Result<TheoryDocument, TheoryError> {
    let mut doc = TheoryDocument::default();
    let mut errors = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let Some(body) = content(line) else { continue };
        match parse_formula(body) {
            Ok(f) => doc.entries.push((f, idx + 1)),
            Err(e) => errors.push((idx + 1, e)),
        }
    }
    if errors.is_empty() {
        Ok(doc)
    } else {
        Err(TheoryError { errors })
    }
}

pub fn render_theory<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> String {
    let mut out = String::new();
    for f in formulas {
        let _ = writeln!(out, "{f}");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RuleDocument {
    pub rules: Vec<Rule>,
}

/// Parse a rule file:
///
/// ```text
/// rule darii:
/// <=0(q,~o)
/// >0(p,q)
/// ---
/// >0(p,o)
/// ```
pub fn parse_rules(text: &str) -> Result<RuleDocument, ParseError> {
    struct Open {
        name: String,
        line: usize,
        antecedents: Vec<Formula>,
        separator: bool,
        consequent: Option<Formula>,
    }
    fn close(open: Open) -> Result<Rule, ParseError> {
        if !open.separator {
            return Err(ParseError::Line {
                line: open.line,
                message: format!("rule {} has no `---` separator", open.name),
            });
        }
        let consequent = open.consequent.ok_or_else(|| ParseError::Line {
            line: open.line,
            message: format!("rule {} has no consequent", open.name),
        })?;
        Ok(Rule::new(open.name, open.antecedents, consequent))
    }

    let mut rules = Vec::new();
    let mut names = HashSet::new();
    let mut current: Option<Open> = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let Some(body) = content(line) else { continue };
        let err = |message: String| ParseError::Line { line: line_no, message };
        if let Some(header) = body.strip_prefix("rule ").or_else(|| body.strip_prefix("rule\t")) {
            let name = header.trim().strip_suffix(':').ok_or_else(|| err("expected `rule NAME:`".into()))?;
            let name = name.trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(err(format!("invalid rule name {name:?}")));
            }
            if !names.insert(name.to_string()) {
                return Err(err(format!("duplicate rule name {name}")));
            }
            if let Some(open) = current.take() {
                rules.push(close(open)?);
            }
            current = Some(Open {
                name: name.to_string(),
                line: line_no,
                antecedents: Vec::new(),
                separator: false,
                consequent: None,
            });
            continue;
        }
        let open = current.as_mut().ok_or_else(|| err("formula outside a rule block".into()))?;
        if body.chars().all(|c| c == '-') && body.len() >= 3 {
            if open.separator {
                return Err(err(format!("rule {} has more than one separator", open.name)));
            }
            open.separator = true;
            continue;
        }
        let formula = parse_formula(body).map_err(|e| err(e.to_string()))?;
        if !open.separator {
            open.antecedents.push(formula);
        } else if open.consequent.is_some() {
            return Err(err(format!("rule {} has more than one consequent", open.name)));
        } else {
            open.consequent = Some(formula);
        }
    }
    if let Some(open) = current.take() {
        rules.push(close(open)?);
    }
    Ok(RuleDocument { rules })
}

pub fn render_rules<'a>(rules: impl IntoIterator<Item = &'a Rule>) -> String {
    let mut out = String::new();
    for (k, rule) in rules.into_iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "rule {}:", rule.name);
        for a in &rule.antecedents {
            let _ = writeln!(out, "{a}");
        }
        out.push_str("---\n");
        let _ = writeln!(out, "{}", rule.consequent);
    }
    out
}

fn is_element_name(name: &str) -> bool {
    !name.is_empty()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Parse `elem NAME: atom atom …` lines into a structure.
pub fn parse_structure(text: &str) -> Result<Structure, ParseError> {
    let mut names = Vec::new();
    let mut interp: BTreeMap<Atom, BTreeSet<usize>> = BTreeMap::new();
    let mut seen = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let Some(body) = content(line) else { continue };
        let err = |message: String| ParseError::Line { line: idx + 1, message };
        let rest = body.strip_prefix("elem").ok_or_else(|| err("expected `elem NAME: atoms…`".into()))?;
        let (name, atoms) = rest.split_once(':').ok_or_else(|| err("missing `:`".into()))?;
        let name = name.trim();
        if !is_element_name(name) {
            return Err(err(format!("invalid element name {name:?}")));
        }
        if !seen.insert(name.to_string()) {
            return Err(err(format!("duplicate element {name}")));
        }
        let id = names.len();
        names.push(name.to_string());
        for a in atoms.split_whitespace() {
            let atom = Atom::new(a).map_err(|e| err(e.to_string()))?;
            interp.entry(atom).or_default().insert(id);
        }
    }
    Structure::from_parts(names, interp).map_err(|e| ParseError::Line { line: 0, message: e.to_string() })
}

pub fn render_structure(structure: &Structure) -> String {
    let mut out = String::new();
    let members = structure.atoms_by_element();
    for (id, name) in structure.element_names().iter().enumerate() {
        let _ = write!(out, "elem {name}:");
        for a in &members[id] {
            let _ = write!(out, " {a}");
        }
        out.push('\n');
    }
    out
}

/// Parse a DIMACS-style graph: `c` comments, `p edge V E`, then `e u v` with
/// 1-based vertices.
pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let err = |message: String| ParseError::Line { line: idx + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [] => {}
            ["c", ..] => {}
            ["p", "edge", v, e] => {
                if header.is_some() {
                    return Err(err("duplicate problem line".into()));
                }
                let v = v.parse().map_err(|_| err(format!("bad vertex count {v:?}")))?;
                let e = e.parse().map_err(|_| err(format!("bad edge count {e:?}")))?;
                header = Some((v, e));
            }
            ["e", u, v] => {
                let (n, _) = header.ok_or_else(|| err("edge before problem line".into()))?;
                let parse = |s: &str| -> Result<usize, ParseError> {
                    match s.parse::<usize>() {
                        Ok(x) if (1..=n).contains(&x) => Ok(x),
                        _ => Err(err(format!("bad vertex {s:?}"))),
                    }
                };
                edges.push((parse(u)?, parse(v)?));
            }
            _ => return Err(err(format!("unrecognized line {line:?}"))),
        }
    }
    let (vertices, declared) = header.ok_or(ParseError::Line { line: 0, message: "missing `p edge` line".into() })?;
    if declared != edges.len() {
        return Err(ParseError::Line {
            line: 0,
            message: format!("declared {declared} edges, found {}", edges.len()),
        });
    }
    Ok(Graph { vertices, edges })
}

pub fn render_graph(graph: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", graph.vertices, graph.edges.len());
    for (u, v) in &graph.edges {
        let _ = writeln!(out, "e {u} {v}");
    }
    out
}

impl fmt::Display for TheoryDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_theory(self.formulas()))
    }
}
