//! Left sides made only of certain attributes.
//!
//! For each uncertain attribute `?A`, tuples that agree on the left side of
//! some FD with right side `?A` must share their `?A` value; the union-find
//! closure of this relation splits the tuples into independent groups. A
//! group choosing `b` has probability `p(b)`, the product of `Pr(b)` over
//! its cells.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::ComponentSolution;
use crate::error::SolveError;
use crate::fd::FdSet;
use crate::model::{AttrId, AttrSet, Cell, CellRef, Cir, Distribution, TupleId, Value};
use crate::rational::Rational;
use crate::union_find::UnionFind;

fn certain(cell: &Cell) -> &Value {
    match cell {
        Cell::Certain(v) => v,
        Cell::Uncertain(d) => d.argmax().0,
    }
}

fn check(fds: &FdSet) -> Result<FdSet, SolveError> {
    if !fds.is_lhs_certain() {
        return Err(SolveError::misuse(format!("left side with an uncertain attribute in {fds}")));
    }
    Ok(fds.normalize())
}

/// FDs whose right side is certain are plain checks on the data.
fn certain_part_holds(cir: &Cir, f: &FdSet) -> bool {
    let schema = cir.schema();
    for fd in f.fds().iter().filter(|fd| fd.rhs.is_subset(schema.certain())) {
        let mut seen: HashMap<Vec<&Value>, Vec<&Value>> = HashMap::new();
        for (_, row) in cir.rows() {
            let key = fd.lhs.iter().map(|a| certain(&row[a])).collect();
            let val: Vec<&Value> = fd.rhs.iter().map(|a| certain(&row[a])).collect();
            if *seen.entry(key).or_insert_with(|| val.clone()) != val {
                return false;
            }
        }
    }
    true
}

/// Tuples that must agree on `attr`, grouped.
fn groups<'c>(cir: &'c Cir, f: &FdSet, attr: AttrId) -> Vec<Vec<(TupleId, &'c Distribution)>> {
    let rows: Vec<(TupleId, &[Cell])> = cir.rows().collect();
    let mut uf = UnionFind::new(rows.len());
    for fd in f.fds().iter().filter(|fd| fd.rhs == AttrSet::singleton(attr)) {
        let mut first: HashMap<Vec<&Value>, usize> = HashMap::new();
        for (i, (_, row)) in rows.iter().enumerate() {
            let key = fd.lhs.iter().map(|a| certain(&row[a])).collect();
            let j = *first.entry(key).or_insert(i);
            uf.union(i, j);
        }
    }
    uf.groups()
        .into_iter()
        .map(|g| {
            g.into_iter()
                .map(|i| match &rows[i].1[attr] {
                    Cell::Uncertain(d) => (rows[i].0, d),
                    Cell::Certain(_) => unreachable!("uncertain attribute holds a certain cell"),
                })
                .collect()
        })
        .collect()
}

/// `p(b)` for every `b` in the intersection of the group's supports, in value
/// order.
fn group_weights(group: &[(TupleId, &Distribution)]) -> BTreeMap<Value, Rational> {
    let mut weights: BTreeMap<Value, Rational> =
        group[0].1.entries().iter().cloned().collect();
    for (_, d) in &group[1..] {
        weights.retain(|v, w| match d.prob_ref(v) {
            Some(p) => {
                *w *= p;
                true
            }
            None => false,
        });
    }
    weights
}

fn uncertain_rhs(cir: &Cir, f: &FdSet) -> AttrSet {
    f.fds().iter().fold(AttrSet::EMPTY, |acc, fd| acc.union(fd.rhs)).intersection(cir.schema().uncertain())
}

/// Most probable consistent choice for the uncertain cells governed by
/// `fds`, all of whose left sides are certain. Ties go to the smallest value.
pub fn solve_left_certain(cir: &Cir, fds: &FdSet) -> Result<ComponentSolution, SolveError> {
    let f = check(fds)?;
    if !certain_part_holds(cir, &f) {
        return Ok(ComponentSolution::infeasible());
    }
    let mut out = ComponentSolution { cells: BTreeMap::new(), probability: Rational::one() };
    for attr in uncertain_rhs(cir, &f).iter() {
        for group in groups(cir, &f, attr) {
            let mut best: Option<(Value, Rational)> = None;
            for (v, w) in group_weights(&group) {
                if best.as_ref().is_none_or(|(_, bw)| w > *bw) {
                    best = Some((v, w));
                }
            }
            let Some((v, w)) = best else {
                return Ok(ComponentSolution::infeasible());
            };
            out.probability *= w;
            for (tid, _) in group {
                out.cells.insert(CellRef { tid, attr }, v.clone());
            }
        }
    }
    Ok(out)
}

/// Probability that a random sample satisfies `fds`, all of whose left sides
/// are certain: the product over groups of `sum_b p(b)`.
pub fn prob_left_certain(cir: &Cir, fds: &FdSet) -> Result<Rational, SolveError> {
    let f = check(fds)?;
    if !certain_part_holds(cir, &f) {
        return Ok(Rational::zero());
    }
    let mut total = Rational::one();
    for attr in uncertain_rhs(cir, &f).iter() {
        for group in groups(cir, &f, attr) {
            let sum = group_weights(&group).into_values().fold(Rational::zero(), |a, w| a + w);
            if sum.is_zero() {
                return Ok(sum);
            }
            total *= sum;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::Schema;
    use crate::rational::{parse_probability, ratio};
    use std::sync::Arc;

    /// Rows of `(certain value, [(value, probability)])` over `A, B?`.
    pub(crate) fn a_b(rows: &[(&str, &[(&str, &str)])]) -> Cir {
        let schema = Arc::new(Schema::parse_names(&["A", "B?"]).unwrap());
        Cir::new(
            schema,
            rows.iter().enumerate().map(|(i, (a, dist))| {
                let d = Distribution::new(
                    dist.iter().map(|(v, p)| (Value::new(v), parse_probability(p).unwrap())),
                )
                .unwrap();
                (TupleId(i as u64 + 1), vec![Cell::Certain(Value::new(a)), Cell::Uncertain(d)])
            }),
        )
        .unwrap()
    }

    #[test]
    fn grouped_choice() {
        let cir = a_b(&[("a", &[("x", "0.9"), ("y", "0.1")]), ("a", &[("y", "1")])]);
        let f = FdSet::parse(cir.schema().clone(), "A -> B?").unwrap();
        let s = solve_left_certain(&cir, &f).unwrap();
        assert_eq!(s.probability, ratio(1, 10));
        assert!(s.cells.values().all(|v| v.as_str() == "y"));
        assert_eq!(prob_left_certain(&cir, &f).unwrap(), ratio(1, 10));
    }

    #[test]
    fn probability_examples() {
        let cir = a_b(&[("a", &[("x", "0.5"), ("y", "0.5")]), ("a", &[("x", "0.5"), ("y", "0.5")])]);
        let f = FdSet::parse(cir.schema().clone(), "A -> B?").unwrap();
        assert_eq!(prob_left_certain(&cir, &f).unwrap(), ratio(1, 2));
        // Tie between x and y goes to x.
        let s = solve_left_certain(&cir, &f).unwrap();
        assert!(s.cells.values().all(|v| v.as_str() == "x"));

        let distinct = a_b(&[("a", &[("x", "0.5"), ("y", "0.5")]), ("b", &[("x", "0.2"), ("y", "0.8")])]);
        assert_eq!(prob_left_certain(&distinct, &f).unwrap(), Rational::one());
    }

    #[test]
    fn consensus() {
        let cir = a_b(&[("a", &[("x", "0.6"), ("y", "0.4")]), ("b", &[("x", "0.5"), ("y", "0.5")])]);
        let f = FdSet::parse(cir.schema().clone(), "{} -> B?").unwrap();
        let s = solve_left_certain(&cir, &f).unwrap();
        assert_eq!(s.probability, ratio(3, 10));
        assert!(s.cells.values().all(|v| v.as_str() == "x"));
        assert_eq!(prob_left_certain(&cir, &f).unwrap(), ratio(1, 2));
    }

    #[test]
    fn certain_violation() {
        let schema = Arc::new(Schema::parse_names(&["A", "B"]).unwrap());
        let cir = Cir::new(
            schema.clone(),
            [("a", "b"), ("a", "c")].iter().enumerate().map(|(i, (a, b))| {
                (TupleId(i as u64), vec![Cell::Certain(Value::new(a)), Cell::Certain(Value::new(b))])
            }),
        )
        .unwrap();
        let f = FdSet::parse(schema, "A -> B").unwrap();
        assert!(!solve_left_certain(&cir, &f).unwrap().is_feasible());
        assert!(prob_left_certain(&cir, &f).unwrap().is_zero());
    }

    #[test]
    fn disjoint_supports_are_infeasible() {
        let cir = a_b(&[("a", &[("x", "1")]), ("a", &[("y", "1")])]);
        let f = FdSet::parse(cir.schema().clone(), "A -> B?").unwrap();
        assert!(!solve_left_certain(&cir, &f).unwrap().is_feasible());
    }

    #[test]
    fn rejects_uncertain_lhs() {
        assert!(matches!(
            solve_left_certain(&fixtures::u1(), &fixtures::u1_f1()),
            Err(SolveError::Misuse(_))
        ));
    }
}
