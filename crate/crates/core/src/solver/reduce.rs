//! Hardness gadgets: bounded unary cardinalities into `S_1`, and graph
//! 3-colouring into sets with one `<=3(c,c)` formula.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{atoms_of, Atom, Formula, FormulaSet, Language};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("{0} is neither in S_1 nor of the form <=3(p,p)")]
    OutsideT(Formula),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("graph has no vertices")]
    NoVertices,
    #[error("edge ({0}, {1}) mentions a vertex outside 1..={2}")]
    BadEdge(usize, usize, usize),
}

/// Undirected graph on vertices `1..=vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn complete(n: usize) -> Self {
        let edges = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
        Graph { vertices: n, edges }
    }

    pub fn cycle(n: usize) -> Self {
        Graph { vertices: n, edges: (1..=n).map(|u| (u, u % n + 1)).collect() }
    }

    fn validate(&self) -> Result<(), ReduceError> {
        if self.vertices == 0 {
            return Err(ReduceError::NoVertices);
        }
        for &(u, v) in &self.edges {
            if !(1..=self.vertices).contains(&u) || !(1..=self.vertices).contains(&v) {
                return Err(ReduceError::BadEdge(u, v, self.vertices));
            }
            if u == v {
                return Err(ReduceError::SelfLoop(u));
            }
        }
        Ok(())
    }
}

fn unary_cap(f: &Formula) -> Option<&Atom> {
    let (l, m) = f.args();
    (f.is_at_most() && f.bound() == 3 && l == m && l.is_positive()).then_some(&l.atom)
}

/// Replace every `<=3(p,p)` by `<=1(p,~o)`, `<=1(o,o')`, `<=1(o,~o')` with
/// fresh `o`, `o'`; the result lies in `S_1` and is equisatisfiable.
pub fn reduce_t_to_s1(formulas: &FormulaSet) -> Result<FormulaSet, ReduceError> {
    let s1 = Language::s(1);
    if let Some(bad) = formulas.iter().find(|f| !s1.contains(f) && unary_cap(f).is_none()) {
        return Err(ReduceError::OutsideT(bad.clone()));
    }
    let used: BTreeSet<Atom> = atoms_of(formulas);
    let mut counter = 0u64;
    let mut fresh = || loop {
        counter += 1;
        let atom = Atom::new(&format!("o__g{counter}")).expect("valid atom name");
        if !used.contains(&atom) {
            return atom;
        }
    };
    let mut out = FormulaSet::new();
    for f in formulas {
        match unary_cap(f) {
            Some(p) => {
                let (o, o2) = (fresh(), fresh());
                out.insert(Formula::at_most(1, p.pos(), o.neg()));
                out.insert(Formula::at_most(1, o.pos(), o2.pos()));
                out.insert(Formula::at_most(1, o.pos(), o2.neg()));
            }
            None => {
                out.insert(f.clone());
            }
        }
    }
    Ok(out)
}

fn vertex(v: usize) -> Atom {
    Atom::new(&format!("v{v}")).expect("valid atom name")
}

/// Atom `c` holds the (at most three) colours; each vertex atom picks exactly
/// one of them and adjacent vertices pick different ones.
pub fn reduce_3col(graph: &Graph) -> Result<FormulaSet, ReduceError> {
    graph.validate()?;
    let c = Atom::new("c").expect("valid atom name");
    let mut out = FormulaSet::new();
    out.insert(Formula::at_most(3, c.pos(), c.pos()));
    for v in (1..=graph.vertices).map(vertex) {
        out.insert(Formula::more_than(0, v.pos(), v.pos()));
        out.insert(Formula::at_most(1, v.pos(), v.pos()));
        out.insert(Formula::at_most(0, v.pos(), c.neg()));
    }
    for &(u, v) in &graph.edges {
        out.insert(Formula::at_most(0, vertex(u).pos(), vertex(v).pos()));
    }
    Ok(out)
}

/// Brute-force 3-colourability.
pub fn three_colourable(graph: &Graph) -> bool {
    let n = graph.vertices;
    let mut colour = vec![0u8; n + 1];
    (0..3usize.pow(n as u32)).any(|mut code| {
        for c in colour.iter_mut().skip(1) {
            *c = (code % 3) as u8;
            code /= 3;
        }
        graph.edges.iter().all(|&(u, v)| colour[u] != colour[v])
    })
}
