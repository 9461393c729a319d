//! Exact sampling from the distribution of samples conditioned on
//! consistency.
//!
//! Cells are drawn one at a time. With cells `1..j-1` fixed, value `a` of
//! cell `j` gets weight `Pr(a) * Pr(F | cells 1..j fixed)`, where the second
//! factor comes from any exact probability-of-consistency backend run on the
//! CIR with the prefix fixed to point values. Each draw is exact: weights are
//! scaled to integers and a uniform big integer picks the value.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{self, SolveOptions};
use crate::error::SolveError;
use crate::exact::{exact_prob, is_consistent_sample, ExactOptions};
use crate::fd::FdSet;
use crate::model::{CellRef, Cir, Relation, Value};
use crate::poly::prob_left_certain;
use crate::rational::Rational;

/// Computes `Pr_U(F)` exactly.
pub trait ProbabilityBackend {
    fn probability(&self, cir: &Cir, fds: &FdSet) -> Result<Rational, SolveError>;
}

/// The grouped formula; only for FD sets whose left sides are certain.
#[derive(Debug, Clone, Copy, Default)]
pub struct LeftCertainBackend;

impl ProbabilityBackend for LeftCertainBackend {
    fn probability(&self, cir: &Cir, fds: &FdSet) -> Result<Rational, SolveError> {
        prob_left_certain(cir, fds)
    }
}

/// Depth-first summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactBackend(pub ExactOptions);

impl ProbabilityBackend for ExactBackend {
    fn probability(&self, cir: &Cir, fds: &FdSet) -> Result<Rational, SolveError> {
        exact_prob(cir, fds, &self.0)
    }
}

/// Whatever the engine picks for the given options.
#[derive(Debug, Clone, Copy, Default)]
pub struct EngineBackend(pub SolveOptions);

impl ProbabilityBackend for EngineBackend {
    fn probability(&self, cir: &Cir, fds: &FdSet) -> Result<Rational, SolveError> {
        Ok(engine::probability(cir, fds, &self.0)?.value)
    }
}

/// The order in which uncertain cells are drawn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellOrder(Vec<CellRef>);

impl CellOrder {
    /// By tuple id, then attribute name.
    pub fn lexicographic(cir: &Cir) -> Self {
        let schema = cir.schema();
        let mut cells = cir.uncertain_cells(schema.all());
        cells.sort_by(|a, b| a.tid.cmp(&b.tid).then_with(|| schema.name(a.attr).cmp(schema.name(b.attr))));
        CellOrder(cells)
    }

    /// Checks that `cells` lists every uncertain cell of `cir` once.
    pub fn new(cir: &Cir, cells: Vec<CellRef>) -> Result<Self, SolveError> {
        let order = CellOrder(cells);
        order.check(cir)?;
        Ok(order)
    }

    fn check(&self, cir: &Cir) -> Result<(), SolveError> {
        let mut sorted = self.0.clone();
        sorted.sort();
        if sorted != cir.uncertain_cells(cir.schema().all()) {
            return Err(SolveError::misuse("cell order is not a permutation of the uncertain cells"));
        }
        Ok(())
    }

    pub fn cells(&self) -> &[CellRef] {
        &self.0
    }
}

/// Generator for cell `cell` of draw `draw`: one key per seed, one stream per
/// (draw, cell) pair, so draws can be reproduced or run in any order.
fn stream(seed: u64, draw: u64, cell: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((draw << 32) | cell as u64);
    rng
}

/// Index drawn with probability proportional to `weights`.
fn draw(weights: &[Rational], rng: &mut ChaCha8Rng) -> usize {
    let denominator = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let scaled: Vec<BigUint> = weights
        .iter()
        .map(|w| {
            let n = w.numer() * (&denominator / w.denom());
            debug_assert!(!n.is_negative());
            n.to_biguint().unwrap_or_default()
        })
        .collect();
    let total: BigUint = scaled.iter().sum();
    let mut u = rng.gen_biguint_below(&total);
    for (i, w) in scaled.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    unreachable!("draw below the total")
}

/// Adjusted weights of the candidates of `cell` given the fixed prefix.
fn weights(
    prefix: &Cir,
    fds: &FdSet,
    cell: CellRef,
    backend: &dyn ProbabilityBackend,
) -> Result<Vec<(Value, Rational)>, SolveError> {
    let entries = prefix.cell(cell).ok_or_else(|| SolveError::misuse("unknown cell"))?.entries();
    entries
        .into_iter()
        .map(|(v, p)| {
            let w = if p.is_zero() {
                p
            } else {
                p * backend.probability(&prefix.with_fixed(cell, v.clone())?, fds)?
            };
            Ok((v, w))
        })
        .collect()
}

fn conditional_draw(
    cir: &Cir,
    fds: &FdSet,
    backend: &dyn ProbabilityBackend,
    seed: u64,
    index: u64,
    order: &CellOrder,
) -> Result<Relation, SolveError> {
    order.check(cir)?;
    if backend.probability(cir, fds)?.is_zero() {
        return Err(SolveError::Infeasible);
    }
    let mut prefix = cir.clone();
    let mut r = cir.argmax_sample();
    for (j, &cell) in order.cells().iter().enumerate() {
        let candidates = weights(&prefix, fds, cell, backend)?;
        let ws: Vec<Rational> = candidates.iter().map(|(_, w)| w.clone()).collect();
        if ws.iter().all(Zero::is_zero) {
            return Err(SolveError::misuse(format!(
                "every candidate of cell ({}, {}) has weight zero after a prefix of positive probability",
                cell.tid,
                cir.schema().name(cell.attr)
            )));
        }
        let value = candidates[draw(&ws, &mut stream(seed, index, j))].0.clone();
        prefix = prefix.with_fixed(cell, value.clone())?;
        r.set(cell, value)?;
    }
    Ok(r)
}

/// One sample drawn from the samples of `cir` that satisfy `fds`, with
/// probability proportional to its own.
pub fn conditional_sample(
    cir: &Cir,
    fds: &FdSet,
    backend: &dyn ProbabilityBackend,
    seed: u64,
    order: &CellOrder,
) -> Result<Relation, SolveError> {
    conditional_draw(cir, fds, backend, seed, 0, order)
}

/// `count` independent conditional samples; the first equals
/// [`conditional_sample`] with the same seed.
pub fn conditional_samples(
    cir: &Cir,
    fds: &FdSet,
    backend: &dyn ProbabilityBackend,
    seed: u64,
    count: usize,
    order: &CellOrder,
) -> Result<Vec<Relation>, SolveError> {
    (0..count as u64).map(|i| conditional_draw(cir, fds, backend, seed, i, order)).collect()
}

/// A sample of `cir` with no condition, drawn the same way.
pub fn unconditional_sample(cir: &Cir, seed: u64, order: &CellOrder) -> Result<Relation, SolveError> {
    order.check(cir)?;
    let mut r = cir.argmax_sample();
    for (j, &cell) in order.cells().iter().enumerate() {
        let entries = cir.cell(cell).ok_or_else(|| SolveError::misuse("unknown cell"))?.entries();
        let ws: Vec<Rational> = entries.iter().map(|(_, p)| p.clone()).collect();
        r.set(cell, entries[draw(&ws, &mut stream(seed, 0, j))].0.clone())?;
    }
    Ok(r)
}

/// Probability that [`conditional_sample`] returns `r`: the product of the
/// normalized adjusted weights of `r`'s values along `order`.
pub fn path_weight(
    cir: &Cir,
    fds: &FdSet,
    r: &Relation,
    backend: &dyn ProbabilityBackend,
    order: &CellOrder,
) -> Result<Rational, SolveError> {
    if !is_consistent_sample(cir, fds, r)? {
        return Err(SolveError::misuse("path weight of a sample that is not consistent"));
    }
    order.check(cir)?;
    let mut prefix = cir.clone();
    let mut weight = Rational::one();
    for &cell in order.cells() {
        let value = r.value(cell).expect("checked shape").clone();
        let candidates = weights(&prefix, fds, cell, backend)?;
        let total: Rational = candidates.iter().map(|(_, w)| w).sum();
        let own = candidates.iter().find(|(v, _)| *v == value).map(|(_, w)| w.clone()).unwrap_or_default();
        weight *= own / total;
        prefix = prefix.with_fixed(cell, value)?;
    }
    Ok(weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::oracle_enumerate;
    use crate::fixtures;
    use crate::model::{sample_probability, Cell, Distribution, Schema, TupleId};
    use crate::rational::{parse_probability, ratio};
    use std::sync::Arc;

    fn a_b(rows: &[(&str, &[(&str, &str)])]) -> Cir {
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
    fn unique_consistent_sample() {
        let (u1, f2) = (fixtures::u1(), fixtures::u1_f2());
        let order = CellOrder::lexicographic(&u1);
        let only = oracle_enumerate(&u1, &f2).unwrap().max.unwrap().relation;
        for seed in 0..5 {
            let r = conditional_sample(&u1, &f2, &ExactBackend::default(), seed, &order).unwrap();
            assert_eq!(r, only);
        }
        assert_eq!(path_weight(&u1, &f2, &only, &ExactBackend::default(), &order).unwrap(), Rational::one());
    }

    #[test]
    fn empty_fds_match_unconditional() {
        let u2 = fixtures::u2();
        let none = FdSet::empty(u2.schema().clone());
        let order = CellOrder::lexicographic(&u2);
        for seed in 0..10 {
            let c = conditional_sample(&u2, &none, &ExactBackend::default(), seed, &order).unwrap();
            assert_eq!(c, unconditional_sample(&u2, seed, &order).unwrap());
            let w = path_weight(&u2, &none, &c, &ExactBackend::default(), &order).unwrap();
            assert_eq!(w, sample_probability(&u2, &c).unwrap());
        }
    }

    #[test]
    fn path_weights_are_conditional_probabilities() {
        let cir = a_b(&[("a", &[("x", "0.9"), ("y", "0.1")]), ("a", &[("y", "1")])]);
        let f = FdSet::parse(cir.schema().clone(), "A -> B?").unwrap();
        let order = CellOrder::lexicographic(&cir);
        let r = conditional_sample(&cir, &f, &LeftCertainBackend, 7, &order).unwrap();
        // The only consistent world has probability 0.1 = Pr(F).
        assert!(r.rows().all(|(_, row)| row[1].as_str() == "y"));
        let w = path_weight(&cir, &f, &r, &LeftCertainBackend, &order).unwrap();
        assert_eq!(w, sample_probability(&cir, &r).unwrap() / ratio(1, 10));

        let cir = a_b(&[
            ("a", &[("x", "0.5"), ("y", "0.3"), ("z", "0.2")]),
            ("a", &[("x", "0.25"), ("y", "0.75")]),
            ("b", &[("x", "0.5"), ("y", "0.5")]),
        ]);
        let order = CellOrder::lexicographic(&cir);
        let report = oracle_enumerate(&cir, &f).unwrap();
        let mut sum = Rational::zero();
        let mut r = cir.argmax_sample();
        for v1 in ["x", "y"] {
            for v3 in ["x", "y"] {
                for (t, v) in [(1, v1), (2, v1), (3, v3)] {
                    r.set(CellRef { tid: TupleId(t), attr: 1 }, Value::new(v)).unwrap();
                }
                let lc = path_weight(&cir, &f, &r, &LeftCertainBackend, &order).unwrap();
                let ex = path_weight(&cir, &f, &r, &ExactBackend::default(), &order).unwrap();
                assert_eq!(lc, ex);
                assert_eq!(lc, sample_probability(&cir, &r).unwrap() / &report.total);
                sum += lc;
            }
        }
        assert_eq!(sum, Rational::one());
    }

    #[test]
    fn reproducible_and_infeasible() {
        let (u1, f1) = (fixtures::u1(), fixtures::u1_f1());
        let order = CellOrder::lexicographic(&u1);
        let backend = EngineBackend::default();
        let a = conditional_samples(&u1, &f1, &backend, 42, 6, &order).unwrap();
        let b = conditional_samples(&u1, &f1, &backend, 42, 6, &order).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0], conditional_sample(&u1, &f1, &backend, 42, &order).unwrap());

        let blocked = a_b(&[("a", &[("x", "1")]), ("a", &[("y", "1")])]);
        let f = FdSet::parse(blocked.schema().clone(), "A -> B?").unwrap();
        let order = CellOrder::lexicographic(&blocked);
        assert!(matches!(
            conditional_sample(&blocked, &f, &LeftCertainBackend, 0, &order),
            Err(SolveError::Infeasible)
        ));
    }

    #[test]
    fn custom_orders() {
        let u1 = fixtures::u1();
        let mut cells = CellOrder::lexicographic(&u1).cells().to_vec();
        cells.reverse();
        let reversed = CellOrder::new(&u1, cells.clone()).unwrap();
        let r = conditional_sample(&u1, &fixtures::u1_f1(), &ExactBackend::default(), 3, &reversed).unwrap();
        let w = path_weight(&u1, &fixtures::u1_f1(), &r, &ExactBackend::default(), &reversed).unwrap();
        assert_eq!(w, sample_probability(&u1, &r).unwrap() / ratio(43, 100));
        cells.pop();
        assert!(CellOrder::new(&u1, cells).is_err());
    }

    #[test]
    fn draws_follow_weights() {
        // Frequencies over many streams stay close to 1:3.
        let ws = [ratio(1, 4), ratio(3, 4)];
        let hits = (0..4000).filter(|&i| draw(&ws, &mut stream(9, i, 0)) == 1).count();
        assert!((2800..3200).contains(&hits), "{hits}");
    }
}
