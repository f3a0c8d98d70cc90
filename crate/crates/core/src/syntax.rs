//! Formula algebra for the bounded numerical syllogistic.
//!
//! A formula is a counting quantifier (`AtMost` or `MoreThan`), a bound and an
//! *unordered* pair of literals. Unorderedness is realised by storing the pair
//! sorted by atom name, positive before negative, so that structural equality,
//! hashing and rendering all agree on one canonical form.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Errors raised by the formula algebra itself.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("invalid atom name {0:?}: expected [a-z][a-z0-9_]*")]
    InvalidAtom(String),
    #[error("bound {bound} out of range for {kind} abbreviation with z = {z}")]
    Bound { kind: StarKind, bound: u64, z: u64 },
    #[error("language {0} has no finite formula set")]
    Unbounded(Language),
    #[error("empty atom set")]
    NoAtoms,
    #[error("formula {formula} is outside {language}")]
    OutsideLanguage { formula: Formula, language: Language },
    #[error("formula {formula} mentions atom {atom} outside the given atom set")]
    ForeignAtom { formula: Formula, atom: Atom },
}

/// A common count-noun symbol.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: &str) -> Result<Self, SyntaxError> {
        if is_atom_name(name) {
            Ok(Atom(Arc::from(name)))
        } else {
            Err(SyntaxError::InvalidAtom(name.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn pos(&self) -> Literal {
        Literal::pos(self.clone())
    }

    pub fn neg(&self) -> Literal {
        Literal::neg(self.clone())
    }
}

pub(crate) fn is_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for Atom {
    type Err = SyntaxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Atom::new(s)
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

/// Positive sorts before negative so that `p` precedes `~p` canonically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// An atom `p` or its complement `~p`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub polarity: Polarity,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, polarity: Polarity::Positive }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, polarity: Polarity::Negative }
    }

    pub fn is_positive(&self) -> bool {
        self.polarity == Polarity::Positive
    }

    /// The complementary literal.
    pub fn bar(&self) -> Self {
        Literal { atom: self.atom.clone(), polarity: self.polarity.flip() }
    }

    pub fn map_atom(&self, f: impl FnOnce(&Atom) -> Atom) -> Self {
        Literal { atom: f(&self.atom), polarity: self.polarity }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "~{}", self.atom)
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Quantifier {
    AtMost,
    MoreThan,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::AtMost => Quantifier::MoreThan,
            Quantifier::MoreThan => Quantifier::AtMost,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Quantifier::AtMost => "<=",
            Quantifier::MoreThan => ">",
        }
    }
}

/// `AtMost i (l, m)` or `MoreThan i (l, m)` with `{l, m}` unordered.
///
/// Ordering groups formulas by argument pair first, so sorted sets read as
/// blocks of formulas about the same two literals.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Formula {
    first: Literal,
    second: Literal,
    quantifier: Quantifier,
    bound: u64,
}

impl Formula {
    pub fn new(quantifier: Quantifier, bound: u64, l: Literal, m: Literal) -> Self {
        let (first, second) = if l <= m { (l, m) } else { (m, l) };
        Formula { first, second, quantifier, bound }
    }

    pub fn at_most(bound: u64, l: Literal, m: Literal) -> Self {
        Formula::new(Quantifier::AtMost, bound, l, m)
    }

    pub fn more_than(bound: u64, l: Literal, m: Literal) -> Self {
        Formula::new(Quantifier::MoreThan, bound, l, m)
    }

    /// The canonical absurdity `>0(a,~a)`.
    pub fn absurdity(atom: &Atom) -> Self {
        Formula::more_than(0, atom.pos(), atom.neg())
    }

    pub fn quantifier(&self) -> Quantifier {
        self.quantifier
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn args(&self) -> (&Literal, &Literal) {
        (&self.first, &self.second)
    }

    pub fn is_at_most(&self) -> bool {
        self.quantifier == Quantifier::AtMost
    }

    pub fn negate(&self) -> Self {
        Formula { quantifier: self.quantifier.dual(), ..self.clone() }
    }

    /// `MoreThan i (p, ~p)` for any atom `p` and any bound `i`.
    pub fn is_absurdity(&self) -> bool {
        self.quantifier == Quantifier::MoreThan
            && self.first.atom == self.second.atom
            && self.first.polarity != self.second.polarity
    }

    pub fn has_positive_arg(&self) -> bool {
        self.first.is_positive() || self.second.is_positive()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        let second = (self.second.atom != self.first.atom).then_some(&self.second.atom);
        std::iter::once(&self.first.atom).chain(second)
    }

    pub fn map_atoms(&self, mut f: impl FnMut(&Atom) -> Atom) -> Self {
        Formula::new(
            self.quantifier,
            self.bound,
            self.first.map_atom(&mut f),
            self.second.map_atom(&mut f),
        )
    }

    pub fn in_language(&self, language: Language) -> bool {
        language.contains(self)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}({},{})", self.quantifier.symbol(), self.bound, self.first, self.second)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub type FormulaSet = BTreeSet<Formula>;

/// Atoms mentioned by any formula of `formulas`, sorted by name.
pub fn atoms_of<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> BTreeSet<Atom> {
    formulas.into_iter().flat_map(|f| f.atoms().cloned()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    /// At least one positive argument, bound at most `z`.
    S,
    /// Any arguments, bound at most `z`.
    Sdagger,
    /// Union of all `S_z`.
    N,
    /// Union of all `Sdagger_z`.
    Ndagger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Language {
    pub family: Family,
    /// Ignored for the unbounded families.
    pub z: u64,
}

impl Language {
    pub fn s(z: u64) -> Self {
        Language { family: Family::S, z }
    }

    pub fn sdagger(z: u64) -> Self {
        Language { family: Family::Sdagger, z }
    }

    pub fn n() -> Self {
        Language { family: Family::N, z: 0 }
    }

    pub fn ndagger() -> Self {
        Language { family: Family::Ndagger, z: 0 }
    }

    pub fn max_bound(&self) -> Option<u64> {
        match self.family {
            Family::S | Family::Sdagger => Some(self.z),
            Family::N | Family::Ndagger => None,
        }
    }

    pub fn requires_positive(&self) -> bool {
        matches!(self.family, Family::S | Family::N)
    }

    pub fn contains(&self, formula: &Formula) -> bool {
        if self.requires_positive() && !formula.has_positive_arg() {
            return false;
        }
        self.max_bound().map_or(true, |z| formula.bound <= z)
    }

    /// Same family with a different bound.
    pub fn with_z(self, z: u64) -> Self {
        Language { z, ..self }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::S => write!(f, "S_{}", self.z),
            Family::Sdagger => write!(f, "S\u{2020}_{}", self.z),
            Family::N => f.write_str("N"),
            Family::Ndagger => f.write_str("N\u{2020}"),
        }
    }
}

/// Which `∃*` abbreviation to expand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StarKind {
    AtMost,
    MoreThan,
    Exactly,
}

impl fmt::Display for StarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StarKind::AtMost => "<=*",
            StarKind::MoreThan => ">*",
            StarKind::Exactly => "=*",
        })
    }
}

/// Expand `∃*≤i`, `∃*>i` or `∃*=i` over `(l, m)` relative to the bound `z`.
///
/// * `≤i` gives `{<=i, …, <=z}`
/// * `>i` gives `{>0, …, >i}`
/// * `=i` gives `{>0, …, >i-1, <=i, …, <=z}` and needs `i > 0`
pub fn expand_star(
    kind: StarKind,
    i: u64,
    z: u64,
    l: &Literal,
    m: &Literal,
) -> Result<FormulaSet, SyntaxError> {
    let out_of_range = i > z || (kind == StarKind::Exactly && i == 0);
    if out_of_range {
        return Err(SyntaxError::Bound { kind, bound: i, z });
    }
    let at_most = |range: std::ops::RangeInclusive<u64>| {
        range.map(|k| Formula::at_most(k, l.clone(), m.clone())).collect::<Vec<_>>()
    };
    let more_than = |range: std::ops::Range<u64>| {
        range.map(|k| Formula::more_than(k, l.clone(), m.clone())).collect::<Vec<_>>()
    };
    let set = match kind {
        StarKind::AtMost => at_most(i..=z).into_iter().collect(),
        StarKind::MoreThan => more_than(0..i + 1).into_iter().collect(),
        StarKind::Exactly => more_than(0..i).into_iter().chain(at_most(i..=z)).collect(),
    };
    Ok(set)
}

/// Every formula of `language` over `atoms`, in canonical order.
pub fn language_formulas(
    atoms: &BTreeSet<Atom>,
    language: Language,
) -> Result<Vec<Formula>, SyntaxError> {
    let z = language.max_bound().ok_or(SyntaxError::Unbounded(language))?;
    let literals: Vec<Literal> =
        atoms.iter().flat_map(|a| [a.pos(), a.neg()]).collect();
    let mut out = Vec::new();
    for (idx, l) in literals.iter().enumerate() {
        for m in &literals[idx..] {
            if language.requires_positive() && !l.is_positive() && !m.is_positive() {
                continue;
            }
            for quantifier in [Quantifier::AtMost, Quantifier::MoreThan] {
                for bound in 0..=z {
                    out.push(Formula::new(quantifier, bound, l.clone(), m.clone()));
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Outcome of [`is_complete_set`].
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Completeness {
    /// One representative (the `AtMost` member) of every complement pair with
    /// neither member present.
    pub missing: Vec<Formula>,
    /// The `AtMost` member of every complement pair with both members present.
    pub both: Vec<Formula>,
}

impl Completeness {
    pub fn is_complete(&self) -> bool {
        self.missing.is_empty()
    }

    /// Complete and never containing a formula together with its negation.
    pub fn is_exactly_one(&self) -> bool {
        self.missing.is_empty() && self.both.is_empty()
    }
}

pub fn is_complete_set(
    formulas: &FormulaSet,
    atoms: &BTreeSet<Atom>,
    language: Language,
) -> Result<Completeness, SyntaxError> {
    if atoms.is_empty() {
        return Err(SyntaxError::NoAtoms);
    }
    for f in formulas {
        if !language.contains(f) {
            return Err(SyntaxError::OutsideLanguage { formula: f.clone(), language });
        }
        if let Some(a) = f.atoms().find(|a| !atoms.contains(*a)) {
            return Err(SyntaxError::ForeignAtom { formula: f.clone(), atom: a.clone() });
        }
    }
    let mut report = Completeness::default();
    for f in language_formulas(atoms, language)? {
        if !f.is_at_most() {
            continue;
        }
        match (formulas.contains(&f), formulas.contains(&f.negate())) {
            (false, false) => report.missing.push(f),
            (true, true) => report.both.push(f),
            _ => {}
        }
    }
    Ok(report)
}
