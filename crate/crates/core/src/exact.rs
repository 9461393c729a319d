//! Exponential solvers: a definition-level enumeration oracle, and depth-first
//! searches for the MPD and the probability of consistency.
//!
//! The oracle is kept naive on purpose so the searches and the polynomial
//! solvers can be checked against it.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::SolveError;
use crate::fd::{satisfies, Fd, FdSet};
use crate::model::{sample_probability, AttrId, AttrSet, Cell, CellRef, Cir, Relation, Value};
use crate::poly::{combine_solutions, ComponentSolution, Mpd};
use crate::rational::Rational;

/// Largest world count the oracle enumerates by default.
pub const DEFAULT_WORLD_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactOptions {
    /// World count above which [`oracle_enumerate_with_cap`] refuses to run.
    pub world_cap: u128,
    /// Maximum number of search nodes, unbounded if `None`.
    pub node_budget: Option<u64>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { world_cap: DEFAULT_WORLD_CAP, node_budget: None }
    }
}

/// Result of full enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    /// The first most probable consistent sample in enumeration order.
    pub max: Option<Mpd>,
    /// Probability of consistency.
    pub total: Rational,
    /// Number of consistent samples.
    pub count: u128,
    /// Number of samples visited.
    pub worlds: u128,
}

/// [`oracle_enumerate_with_cap`] with the default cap.
pub fn oracle_enumerate(cir: &Cir, fds: &FdSet) -> Result<OracleReport, SolveError> {
    oracle_enumerate_with_cap(cir, fds, DEFAULT_WORLD_CAP)
}

/// Visits every sample in the support of `cir`, in mixed-radix order over
/// the uncertain cells sorted by (tuple id, attribute) with values ascending.
pub fn oracle_enumerate_with_cap(cir: &Cir, fds: &FdSet, cap: u128) -> Result<OracleReport, SolveError> {
    let worlds = cir.world_count(cir.schema().all());
    if worlds > cap {
        return Err(SolveError::WorldBudget { worlds, cap });
    }
    let cells: Vec<(CellRef, Vec<Value>)> = cir
        .uncertain_cells(cir.schema().all())
        .into_iter()
        .map(|c| (c, cir.cell(c).expect("cell").entries().into_iter().map(|(v, _)| v).collect()))
        .collect();
    let mut digits = vec![0usize; cells.len()];
    let mut r = cir.argmax_sample();
    let mut report = OracleReport { max: None, total: Rational::zero(), count: 0, worlds: 0 };
    loop {
        for ((cell, values), d) in cells.iter().zip(&digits) {
            r.set(*cell, values[*d].clone())?;
        }
        report.worlds += 1;
        if satisfies(&r, fds)? {
            let p = sample_probability(cir, &r)?;
            report.count += 1;
            report.total += &p;
            if report.max.as_ref().is_none_or(|m| p > m.probability) {
                report.max = Some(Mpd { relation: r.clone(), probability: p });
            }
        }
        // Last cell varies fastest.
        let mut k = cells.len();
        loop {
            if k == 0 {
                return Ok(report);
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < cells[k].1.len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// One uncertain cell to decide.
struct SearchCell {
    row: usize,
    attr: AttrId,
    cell: CellRef,
    candidates: Vec<(Value, Rational)>,
}

/// Partial assignment with per-FD indexes from left-side projections of
/// fully assigned rows to their right-side values.
struct Search {
    fds: Vec<Fd>,
    by_attr: Vec<Vec<usize>>,
    rows: Vec<Vec<Option<Value>>>,
    index: Vec<HashMap<Vec<Value>, (Value, usize)>>,
    cells: Vec<SearchCell>,
    nodes: u64,
    budget: Option<u64>,
}

struct OutOfBudget;

impl Search {
    /// `None` if the certain part already violates an FD.
    fn new(cir: &Cir, fds: &FdSet, scope: AttrSet, budget: Option<u64>) -> Option<Search> {
        let schema = cir.schema();
        let fds = fds.normalize().fds().to_vec();
        let mut by_attr = vec![Vec::new(); schema.len()];
        for (i, fd) in fds.iter().enumerate() {
            for a in fd.attrs().iter() {
                by_attr[a].push(i);
            }
        }
        let scope = scope.intersection(schema.uncertain());
        let mut rows = Vec::with_capacity(cir.len());
        let mut cells = Vec::new();
        for (r, (tid, row)) in cir.rows().enumerate() {
            rows.push(
                row.iter()
                    .enumerate()
                    .map(|(a, c)| match c {
                        Cell::Certain(v) => Some(v.clone()),
                        Cell::Uncertain(_) if scope.contains(a) => None,
                        Cell::Uncertain(d) => Some(d.argmax().0.clone()),
                    })
                    .collect(),
            );
            for a in scope.iter() {
                let mut candidates = row[a].entries();
                candidates.sort_by(|(v1, p1), (v2, p2)| p2.cmp(p1).then_with(|| v1.cmp(v2)));
                cells.push(SearchCell { row: r, attr: a, cell: CellRef { tid, attr: a }, candidates });
            }
        }
        cells.sort_by(|x, y| {
            x.candidates
                .len()
                .cmp(&y.candidates.len())
                .then(x.cell.tid.cmp(&y.cell.tid))
                .then_with(|| schema.name(x.attr).cmp(schema.name(y.attr)))
        });
        let mut s = Search {
            index: vec![HashMap::new(); fds.len()],
            fds,
            by_attr,
            rows,
            cells,
            nodes: 0,
            budget,
        };
        for i in 0..s.fds.len() {
            for r in 0..s.rows.len() {
                if s.complete(i, r) && !s.insert(i, r) {
                    return None;
                }
            }
        }
        Some(s)
    }

    fn complete(&self, fd: usize, row: usize) -> bool {
        self.fds[fd].attrs().iter().all(|a| self.rows[row][a].is_some())
    }

    fn key(&self, fd: usize, row: usize) -> (Vec<Value>, Value) {
        let fd_ = &self.fds[fd];
        let values = &self.rows[row];
        let lhs = fd_.lhs.iter().map(|a| values[a].clone().expect("assigned")).collect();
        let rhs = values[fd_.rhs.first().expect("normalized rhs")].clone().expect("assigned");
        (lhs, rhs)
    }

    /// Records row `row` in the index of `fd`; false on a conflict.
    fn insert(&mut self, fd: usize, row: usize) -> bool {
        let (lhs, rhs) = self.key(fd, row);
        match self.index[fd].get_mut(&lhs) {
            Some((v, n)) if *v == rhs => {
                *n += 1;
                true
            }
            Some(_) => false,
            None => {
                self.index[fd].insert(lhs, (rhs, 1));
                true
            }
        }
    }

    fn remove(&mut self, fd: usize, row: usize) {
        let (lhs, _) = self.key(fd, row);
        let entry = self.index[fd].get_mut(&lhs).expect("indexed row");
        entry.1 -= 1;
        if entry.1 == 0 {
            self.index[fd].remove(&lhs);
        }
    }

    /// Assigns cell `k` its candidate `c`; false (with nothing changed) if
    /// this breaks an FD.
    fn assign(&mut self, k: usize, c: usize) -> bool {
        let (row, attr) = (self.cells[k].row, self.cells[k].attr);
        self.rows[row][attr] = Some(self.cells[k].candidates[c].0.clone());
        let fds = self.by_attr[attr].clone();
        for (n, &fd) in fds.iter().enumerate() {
            if self.complete(fd, row) && !self.insert(fd, row) {
                for &done in &fds[..n] {
                    if self.complete(done, row) {
                        self.remove(done, row);
                    }
                }
                self.rows[row][attr] = None;
                return false;
            }
        }
        true
    }

    fn unassign(&mut self, k: usize) {
        let (row, attr) = (self.cells[k].row, self.cells[k].attr);
        for fd in self.by_attr[attr].clone() {
            if self.complete(fd, row) {
                self.remove(fd, row);
            }
        }
        self.rows[row][attr] = None;
    }

    fn tick(&mut self) -> Result<(), OutOfBudget> {
        self.nodes += 1;
        match self.budget {
            Some(b) if self.nodes > b => Err(OutOfBudget),
            _ => Ok(()),
        }
    }

    fn mpd(
        &mut self,
        k: usize,
        p: &Rational,
        bound: &[Rational],
        chosen: &mut Vec<usize>,
        best: &mut Option<(Vec<usize>, Rational)>,
    ) -> Result<(), OutOfBudget> {
        self.tick()?;
        if let Some((_, b)) = best {
            if p * &bound[k] <= *b {
                return Ok(());
            }
        }
        if k == self.cells.len() {
            *best = Some((chosen.clone(), p.clone()));
            return Ok(());
        }
        for c in 0..self.cells[k].candidates.len() {
            if !self.assign(k, c) {
                continue;
            }
            let next = p * &self.cells[k].candidates[c].1;
            chosen.push(c);
            let r = self.mpd(k + 1, &next, bound, chosen, best);
            chosen.pop();
            self.unassign(k);
            r?;
        }
        Ok(())
    }

    fn total(&mut self, k: usize) -> Result<Rational, OutOfBudget> {
        self.tick()?;
        if k == self.cells.len() {
            return Ok(Rational::one());
        }
        let mut sum = Rational::zero();
        for c in 0..self.cells[k].candidates.len() {
            if !self.assign(k, c) {
                continue;
            }
            let r = self.total(k + 1);
            self.unassign(k);
            sum += &self.cells[k].candidates[c].1 * r?;
        }
        Ok(sum)
    }

    fn solution(&self, chosen: &[usize], probability: Rational) -> ComponentSolution {
        ComponentSolution {
            cells: self
                .cells
                .iter()
                .zip(chosen)
                .map(|(cell, &c)| (cell.cell, cell.candidates[c].0.clone()))
                .collect(),
            probability,
        }
    }
}

/// Uncertain attributes an exact search over `fds` has to branch on.
pub(crate) fn search_scope(cir: &Cir, fds: &FdSet) -> AttrSet {
    fds.attrs().intersection(cir.schema().uncertain())
}

/// Most probable consistent choice for the uncertain cells of `scope`, which
/// must cover every uncertain attribute of `fds`. On budget exhaustion the
/// error holds the incumbent, if any.
pub(crate) fn mpd_in_scope(
    cir: &Cir,
    fds: &FdSet,
    scope: AttrSet,
    budget: Option<u64>,
) -> Result<ComponentSolution, Option<ComponentSolution>> {
    let Some(mut s) = Search::new(cir, fds, scope, budget) else {
        return Ok(ComponentSolution::infeasible());
    };
    let mut bound = vec![Rational::one(); s.cells.len() + 1];
    for k in (0..s.cells.len()).rev() {
        bound[k] = &bound[k + 1] * &s.cells[k].candidates[0].1;
    }
    let mut best = None;
    let outcome = s.mpd(0, &Rational::one(), &bound, &mut Vec::new(), &mut best);
    let solution = best.map(|(chosen, p)| s.solution(&chosen, p));
    match outcome {
        Ok(()) => Ok(solution.unwrap_or_else(ComponentSolution::infeasible)),
        Err(OutOfBudget) => Err(solution),
    }
}

/// Probability that the uncertain cells of `scope` satisfy `fds`.
pub(crate) fn prob_in_scope(
    cir: &Cir,
    fds: &FdSet,
    scope: AttrSet,
    budget: Option<u64>,
) -> Result<Rational, SolveError> {
    let Some(mut s) = Search::new(cir, fds, scope, budget) else {
        return Ok(Rational::zero());
    };
    s.total(0).map_err(|OutOfBudget| SolveError::NodeBudget { budget: budget.unwrap_or(0), incumbent: None })
}

/// Most probable consistent sample by branch and bound, `None` if there is
/// no consistent sample. Cells outside every FD take their most likely value.
pub fn bnb_mpd(cir: &Cir, fds: &FdSet, options: &ExactOptions) -> Result<Option<Mpd>, SolveError> {
    let free = cir.schema().all().difference(fds.attrs());
    let scope = search_scope(cir, fds);
    match mpd_in_scope(cir, fds, scope, options.node_budget) {
        Ok(part) => combine_solutions(cir, &[part], free),
        Err(incumbent) => {
            let incumbent = match incumbent {
                Some(part) => combine_solutions(cir, &[part], free)?.map(Box::new),
                None => None,
            };
            Err(SolveError::NodeBudget { budget: options.node_budget.unwrap_or(0), incumbent })
        }
    }
}

/// Exact probability of consistency by depth-first summation, pruning
/// branches as soon as an FD breaks.
pub fn exact_prob(cir: &Cir, fds: &FdSet, options: &ExactOptions) -> Result<Rational, SolveError> {
    prob_in_scope(cir, fds, search_scope(cir, fds), options.node_budget)
}

/// Whether `r` satisfies `fds` and is a sample of `cir` with positive
/// probability.
pub fn is_consistent_sample(cir: &Cir, fds: &FdSet, r: &Relation) -> Result<bool, SolveError> {
    Ok(sample_probability(cir, r)? > Rational::zero() && satisfies(r, fds)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{Distribution, Schema, TupleId};
    use crate::rational::ratio;
    use std::sync::Arc;

    #[test]
    fn running_example_f1() {
        let (u1, f1) = (fixtures::u1(), fixtures::u1_f1());
        let report = oracle_enumerate(&u1, &f1).unwrap();
        assert_eq!(report.total, ratio(43, 100));
        assert_eq!(report.max.as_ref().unwrap().probability, ratio(7, 25));
        assert_eq!(report.worlds, 8);
        let opts = ExactOptions::default();
        assert_eq!(exact_prob(&u1, &f1, &opts).unwrap(), ratio(43, 100));
        let m = bnb_mpd(&u1, &f1, &opts).unwrap().unwrap();
        assert_eq!(m.probability, ratio(7, 25));
        assert!(is_consistent_sample(&u1, &f1, &m.relation).unwrap());
    }

    #[test]
    fn running_example_f2() {
        let (u1, f2) = (fixtures::u1(), fixtures::u1_f2());
        let report = oracle_enumerate(&u1, &f2).unwrap();
        assert_eq!(report.count, 1);
        assert_eq!(report.total, ratio(3, 100));
        let opts = ExactOptions::default();
        assert_eq!(exact_prob(&u1, &f2, &opts).unwrap(), ratio(3, 100));
        let m = bnb_mpd(&u1, &f2, &opts).unwrap().unwrap();
        assert_eq!(m, report.max.unwrap());
    }

    #[test]
    fn empty_and_unsatisfiable() {
        let u1 = fixtures::u1();
        let none = FdSet::empty(u1.schema().clone());
        let opts = ExactOptions::default();
        assert_eq!(exact_prob(&u1, &none, &opts).unwrap(), Rational::one());
        assert_eq!(oracle_enumerate(&u1, &none).unwrap().count, 8);

        let schema = Arc::new(Schema::parse_names(&["A", "B", "C?"]).unwrap());
        let cir = Cir::new(
            schema.clone(),
            [("a", "b"), ("a", "c")].iter().enumerate().map(|(i, (a, b))| {
                (
                    TupleId(i as u64),
                    vec![Cell::Certain(Value::new(a)), Cell::Certain(Value::new(b)), Cell::Certain(Value::new("z"))],
                )
            }),
        )
        .unwrap();
        let f = FdSet::parse(schema, "A -> B").unwrap();
        assert!(bnb_mpd(&cir, &f, &opts).unwrap().is_none());
        assert!(exact_prob(&cir, &f, &opts).unwrap().is_zero());
        assert!(oracle_enumerate(&cir, &f).unwrap().max.is_none());
    }

    #[test]
    fn budgets() {
        let (u1, f1) = (fixtures::u1(), fixtures::u1_f1());
        assert!(matches!(
            oracle_enumerate_with_cap(&u1, &f1, 4),
            Err(SolveError::WorldBudget { worlds: 8, cap: 4 })
        ));
        let tight = ExactOptions { node_budget: Some(3), ..Default::default() };
        match bnb_mpd(&u1, &f1, &tight) {
            Err(SolveError::NodeBudget { incumbent, .. }) => {
                if let Some(m) = incumbent {
                    assert!(is_consistent_sample(&u1, &f1, &m.relation).unwrap());
                }
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(exact_prob(&u1, &f1, &tight).is_err());
    }

    #[test]
    fn rejected_value_leaves_index_clean() {
        // Assigning A? in row 2 completes `C -> A?` (and conflicts) while
        // `A? -> B?` is still open for that row.
        let schema = Arc::new(Schema::parse_names(&["A?", "B?", "C"]).unwrap());
        let d = |e: &[(&str, i64, i64)]| {
            Cell::Uncertain(Distribution::new(e.iter().map(|(v, n, m)| (Value::new(v), ratio(*n, *m)))).unwrap())
        };
        let cir = Cir::new(
            schema.clone(),
            vec![
                (TupleId(1), vec![Cell::Certain("x".into()), d(&[("p", 1, 2), ("q", 1, 2)]), Cell::Certain("c".into())]),
                (TupleId(2), vec![d(&[("x", 1, 3), ("y", 2, 3)]), d(&[("p", 1, 4), ("q", 3, 4)]), Cell::Certain("c".into())]),
            ],
        )
        .unwrap();
        let f = FdSet::parse(schema, "A? -> B?; C -> A?").unwrap();
        let oracle = oracle_enumerate(&cir, &f).unwrap();
        let opts = ExactOptions::default();
        assert_eq!(exact_prob(&cir, &f, &opts).unwrap(), oracle.total);
        assert_eq!(bnb_mpd(&cir, &f, &opts).unwrap().unwrap().probability, oracle.max.unwrap().probability);
    }
}
