use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::SolveError;
use crate::model::{AttrSet, Cell, CellRef, Cir, Relation, Value};
use crate::rational::Rational;

/// Values chosen for the uncertain cells one solver owns, and the product of
/// their probabilities. A zero probability marks an infeasible part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSolution {
    pub cells: BTreeMap<CellRef, Value>,
    pub probability: Rational,
}

impl ComponentSolution {
    pub fn infeasible() -> Self {
        ComponentSolution { cells: BTreeMap::new(), probability: Rational::zero() }
    }

    pub fn is_feasible(&self) -> bool {
        !self.probability.is_zero()
    }

    /// Union of parts owning disjoint cells.
    pub fn merge(parts: impl IntoIterator<Item = ComponentSolution>) -> Result<Self, SolveError> {
        let mut out = ComponentSolution { cells: BTreeMap::new(), probability: Rational::one() };
        for part in parts {
            if !part.is_feasible() {
                return Ok(ComponentSolution::infeasible());
            }
            for (cell, v) in part.cells {
                if out.cells.insert(cell, v).is_some() {
                    return Err(SolveError::misuse(format!(
                        "cell ({}, {}) owned by two parts",
                        cell.tid, cell.attr
                    )));
                }
            }
            out.probability *= part.probability;
        }
        Ok(out)
    }
}

/// A most probable consistent sample and its probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mpd {
    pub relation: Relation,
    pub probability: Rational,
}

/// Joins part solutions into one sample. Uncertain cells of the `free`
/// attributes take their most likely value. Every other uncertain cell must
/// be owned by exactly one part. Returns `None` if some part is infeasible.
pub fn combine_solutions(
    cir: &Cir,
    parts: &[ComponentSolution],
    free: AttrSet,
) -> Result<Option<Mpd>, SolveError> {
    if parts.iter().any(|p| !p.is_feasible()) {
        return Ok(None);
    }
    let merged = ComponentSolution::merge(parts.iter().cloned())?;
    let schema = cir.schema();
    let mut relation = cir.argmax_sample();
    let mut probability = merged.probability;
    for (tid, cells) in cir.rows() {
        for a in schema.uncertain().iter() {
            let cell = CellRef { tid, attr: a };
            let Cell::Uncertain(d) = &cells[a] else { continue };
            match merged.cells.get(&cell) {
                Some(v) if free.contains(a) => {
                    return Err(SolveError::misuse(format!(
                        "free cell ({tid}, {}) = {v} owned by a part",
                        schema.name(a)
                    )))
                }
                Some(v) => {
                    if !d.contains(v) {
                        return Err(SolveError::misuse(format!(
                            "value {v} outside the support of ({tid}, {})",
                            schema.name(a)
                        )));
                    }
                    relation.set(cell, v.clone())?;
                }
                None if free.contains(a) => probability *= d.max_prob(),
                None => {
                    return Err(SolveError::misuse(format!(
                        "cell ({tid}, {}) owned by no part",
                        schema.name(a)
                    )))
                }
            }
        }
    }
    Ok(Some(Mpd { relation, probability }))
}
