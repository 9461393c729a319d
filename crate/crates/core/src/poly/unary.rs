//! Unary FD sets where every uncertain attribute is a sink or equivalent to a
//! certain attribute.
//!
//! Each non-sink `?A` is paired with an equivalent certain attribute `B`.
//! The set is equivalent to the matchings `?A <-> B` plus the set obtained by
//! replacing every such `?A` with its partner, whose left sides are then all
//! certain. The parts share only certain attributes and are solved apart.

use super::{solve_left_certain, solve_matching, ComponentSolution};
use crate::error::SolveError;
use crate::fd::{Fd, FdSet};
use crate::model::{AttrId, AttrSet, Cir};

/// Partner for every attribute: itself, or for a non-sink uncertain
/// attribute its smallest equivalent certain attribute.
fn partners(f: &FdSet) -> Result<Vec<AttrId>, SolveError> {
    let schema = f.schema();
    (0..schema.len())
        .map(|a| {
            if !schema.is_uncertain(a) || f.is_sink(a) {
                return Ok(a);
            }
            schema.certain().iter().find(|&b| f.equivalent(a, b)).ok_or_else(|| {
                SolveError::misuse(format!(
                    "`{}` is neither a sink nor equivalent to a certain attribute",
                    schema.name(a)
                ))
            })
        })
        .collect()
}

/// Most probable consistent choice for the uncertain cells governed by a
/// unary FD set in the tractable class.
pub fn solve_unary_tractable(cir: &Cir, fds: &FdSet) -> Result<ComponentSolution, SolveError> {
    let f = fds.normalize();
    if !f.is_unary() {
        return Err(SolveError::misuse(format!("not a unary FD set: {f}")));
    }
    let partner = partners(&f)?;
    let map = |s: AttrSet| s.iter().map(|a| partner[a]).collect::<AttrSet>();
    let substituted = f.subset(f.fds().iter().map(|fd| Fd::new(map(fd.lhs), map(fd.rhs)))).normalize();

    let mut parts = vec![solve_left_certain(cir, &substituted)?];
    for a in f.attrs().iter().filter(|&a| partner[a] != a) {
        parts.push(solve_matching(cir, AttrSet::singleton(partner[a]), AttrSet::singleton(a))?);
    }
    ComponentSolution::merge(parts)
}
