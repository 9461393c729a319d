//! Encoders that turn SAT formulas and bipartite graphs into CIRs whose
//! consistency questions answer the original problem.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::fd::FdSet;
use crate::model::{Cell, Cir, Distribution, ModelError, Schema, TupleId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("clause {0} is empty")]
    EmptyClause(usize),
    #[error("literal {literal} in clause {clause} exceeds the {vars} declared variables")]
    UndeclaredVariable { clause: usize, literal: i32, vars: u32 },
    #[error("clause {0} mixes positive and negative literals")]
    MixedClause(usize),
    #[error("edge ({0}, {1}) leaves the vertex range")]
    EdgeOutOfRange(usize, usize),
    #[error("the sides have {left} and {right} vertices")]
    Unbalanced { left: usize, right: usize },
    #[error("left vertex {0} has no neighbor")]
    IsolatedVertex(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A formula in conjunctive normal form. Variables are `1..=vars`; a literal
/// is a signed variable index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    vars: u32,
    clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(vars: u32, clauses: Vec<Vec<i32>>) -> Result<Self, GadgetError> {
        for (i, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(GadgetError::EmptyClause(i + 1));
            }
            if let Some(&literal) = clause.iter().find(|l| **l == 0 || l.unsigned_abs() > vars) {
                return Err(GadgetError::UndeclaredVariable { clause: i + 1, literal, vars });
            }
        }
        Ok(CnfFormula { vars, clauses })
    }

    pub fn vars(&self) -> u32 {
        self.vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// Every clause is all-positive or all-negative.
    pub fn is_non_mixed(&self) -> bool {
        self.clauses.iter().all(|c| c.iter().all(|l| *l > 0) || c.iter().all(|l| *l < 0))
    }

    /// Whether `assignment[v - 1]` satisfies every clause.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
    }
}

/// A bipartite graph with left vertices `0..left` and right vertices
/// `0..right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GadgetError> {
        let edges: BTreeSet<_> = edges.into_iter().collect();
        if let Some(&(u, v)) = edges.iter().find(|(u, v)| *u >= left || *v >= right) {
            return Err(GadgetError::EdgeOutOfRange(u, v));
        }
        Ok(BipartiteGraph { left, right, edges })
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.range((u, 0)..(u + 1, 0)).map(|&(_, v)| v)
    }
}

fn literal_name(literal: i32) -> String {
    format!("{}x{}", if literal > 0 { '+' } else { '-' }, literal.unsigned_abs())
}

fn pair_name(clause: usize, literal: i32) -> String {
    format!("p:c{}:{}", clause, literal_name(literal))
}

fn build(names: &[&str], rows: Vec<Vec<Cell>>) -> Result<Cir, GadgetError> {
    let schema = Arc::new(Schema::parse_names(names)?);
    Ok(Cir::new(schema, rows.into_iter().enumerate().map(|(i, row)| (TupleId(i as u64 + 1), row)))?)
}

/// `?A -> B` over the schema of a gadget built here.
pub fn nm_sat_fds(cir: &Cir) -> FdSet {
    FdSet::parse(cir.schema().clone(), "A? -> B").expect("gadget schema")
}

/// `A <-> ?B` over the schema of [`gadget_perfect_matching`].
pub fn perfect_matching_fds(cir: &Cir) -> FdSet {
    FdSet::parse(cir.schema().clone(), "A <-> B?").expect("gadget schema")
}

/// `?A <-> ?B` over the schema of [`gadget_sat_matching`].
pub fn sat_matching_fds(cir: &Cir) -> FdSet {
    FdSet::parse(cir.schema().clone(), "A? <-> B?").expect("gadget schema")
}

/// One tuple per clause: `?A` uniform over the clause's variables, `B` is
/// `true` for a positive clause and `false` for a negative one. Possibly
/// consistent under `?A -> B` iff the formula is satisfiable.
pub fn gadget_nm_sat(phi: &CnfFormula) -> Result<Cir, GadgetError> {
    let mut rows = Vec::with_capacity(phi.clauses.len());
    for (i, clause) in phi.clauses.iter().enumerate() {
        let positive = clause[0] > 0;
        if clause.iter().any(|l| (*l > 0) != positive) {
            return Err(GadgetError::MixedClause(i + 1));
        }
        let vars: BTreeSet<u32> = clause.iter().map(|l| l.unsigned_abs()).collect();
        let a = Distribution::uniform(vars.iter().map(|v| format!("x{v}")))?;
        rows.push(vec![Cell::Uncertain(a), Cell::Certain(if positive { "true" } else { "false" }.into())]);
    }
    build(&["A?", "B"], rows)
}

/// One tuple per left vertex `u`: `A = u:{u}`, `?B` uniform over the
/// neighbors `v:{v}` (1-based). With `scale` the product of the degrees,
/// `Pr(A <-> ?B) * scale` is the number of perfect matchings.
pub fn gadget_perfect_matching(g: &BipartiteGraph) -> Result<(Cir, BigUint), GadgetError> {
    if g.left != g.right {
        return Err(GadgetError::Unbalanced { left: g.left, right: g.right });
    }
    let mut scale = BigUint::one();
    let mut rows = Vec::with_capacity(g.left);
    for u in 0..g.left {
        let neighbors: Vec<usize> = g.neighbors(u).collect();
        if neighbors.is_empty() {
            return Err(GadgetError::IsolatedVertex(u + 1));
        }
        scale *= neighbors.len();
        let b = Distribution::uniform(neighbors.iter().map(|v| format!("v:{}", v + 1)))?;
        rows.push(vec![Cell::Certain(format!("u:{}", u + 1).into()), Cell::Uncertain(b)]);
    }
    Ok((build(&["A", "B?"], rows)?, scale))
}

/// Clause `c` becomes `(c:{c}, p:c{c}:{l} | ...)` over its literals. Every
/// two pairs whose literals conflict, inside one clause or across two, add a
/// tuple uniform over both pairs in `?A` and in `?B`. Possibly consistent
/// under `?A <-> ?B` iff the formula is satisfiable.
pub fn gadget_sat_matching(phi: &CnfFormula) -> Result<Cir, GadgetError> {
    let literals: Vec<BTreeSet<i32>> = phi.clauses.iter().map(|c| c.iter().copied().collect()).collect();
    let mut rows = Vec::new();
    for (i, lits) in literals.iter().enumerate() {
        let b = Distribution::uniform(lits.iter().map(|&l| pair_name(i + 1, l)))?;
        rows.push(vec![Cell::Uncertain(Distribution::point(format!("c:{}", i + 1))), Cell::Uncertain(b)]);
    }
    let pairs: Vec<(usize, i32)> =
        literals.iter().enumerate().flat_map(|(i, lits)| lits.iter().map(move |&l| (i + 1, l))).collect();
    for (k, &(c, l)) in pairs.iter().enumerate() {
        for &(c2, l2) in &pairs[k + 1..] {
            if l2 == -l {
                let both = [pair_name(c, l), pair_name(c2, l2)];
                rows.push(vec![
                    Cell::Uncertain(Distribution::uniform(both.clone())?),
                    Cell::Uncertain(Distribution::uniform(both)?),
                ]);
            }
        }
    }
    build(&["A?", "B?"], rows)
}
