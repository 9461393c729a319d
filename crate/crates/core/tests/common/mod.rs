//! Shared generators and brute-force references for the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use cirsolve::classify::{classify, Complexity, Problem, Theorem};
use cirsolve::fd::Fd;
use cirsolve::model::{AttrSet, Cell, Cir, Distribution, Relation, Schema, TupleId, Value};
use cirsolve::{FdSet, Rational};
use num_bigint::BigInt;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MAX_WORLDS: u128 = 1 << 14;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// FD families the random sweep is stratified over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdClass {
    UncertainToCertain,
    CertainToUncertain,
    CertainMatching,
    UncertainMatching,
    LeftCertain,
    UnaryTractable,
    Decomposable,
}

impl FdClass {
    pub const ALL: [FdClass; 7] = [
        FdClass::UncertainToCertain,
        FdClass::CertainToUncertain,
        FdClass::CertainMatching,
        FdClass::UncertainMatching,
        FdClass::LeftCertain,
        FdClass::UnaryTractable,
        FdClass::Decomposable,
    ];
}

pub struct Instance {
    pub class: FdClass,
    pub cir: Cir,
    pub fds: FdSet,
}

fn schema(names: &[&str]) -> Arc<Schema> {
    Arc::new(Schema::parse_names(names).unwrap())
}

/// Random probabilities with small denominators.
fn random_distribution(rng: &mut ChaCha8Rng, domain: &[&str], max_support: usize) -> Distribution {
    let k = rng.gen_range(1..=max_support.min(domain.len()));
    let values: Vec<&str> = domain.choose_multiple(rng, k).copied().collect();
    let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = weights.iter().sum();
    Distribution::new(
        values.into_iter().zip(weights).map(|(v, w)| (Value::new(v), Rational::new(BigInt::from(w), BigInt::from(total)))),
    )
    .unwrap()
}

/// A CIR over `schema` with at most `max_tuples` tuples and [`MAX_WORLDS`]
/// worlds.
pub fn random_cir(rng: &mut ChaCha8Rng, schema: &Arc<Schema>, max_tuples: usize) -> Cir {
    let domain_size = rng.gen_range(2..=4);
    let domain = &["a", "b", "c", "d"][..domain_size];
    let n = rng.gen_range(1..=max_tuples);
    // Most rows copy their certain cells from a prototype, so FDs among
    // certain attributes are not violated in nearly every instance.
    let prototypes: Vec<Vec<&str>> =
        (0..2).map(|_| (0..schema.len()).map(|_| *domain.choose(rng).unwrap()).collect()).collect();
    let mut rows = Vec::new();
    let mut worlds: u128 = 1;
    for i in 0..n {
        let copy = rng.gen_bool(0.75).then(|| rng.gen_range(0..prototypes.len()));
        let row: Vec<Cell> = (0..schema.len())
            .map(|a| {
                if schema.is_uncertain(a) {
                    Cell::Uncertain(random_distribution(rng, domain, 3))
                } else {
                    let v = copy.map_or_else(|| *domain.choose(rng).unwrap(), |p| prototypes[p][a]);
                    Cell::Certain(Value::new(v))
                }
            })
            .collect();
        let w: u128 = row.iter().map(|c| c.support_len() as u128).product();
        if worlds * w > MAX_WORLDS {
            break;
        }
        worlds *= w;
        rows.push((TupleId(i as u64 + 1), row));
    }
    Cir::new(schema.clone(), rows).unwrap()
}

fn random_subset(rng: &mut ChaCha8Rng, from: AttrSet) -> AttrSet {
    from.iter().filter(|_| rng.gen_bool(0.5)).collect()
}

fn random_nonempty_subset(rng: &mut ChaCha8Rng, from: AttrSet) -> AttrSet {
    loop {
        let s = random_subset(rng, from);
        if !s.is_empty() || from.is_empty() {
            return s;
        }
    }
}

/// Attribute names with `certain` certain ones first, then uncertain ones.
fn mixed_schema(certain: usize, uncertain: usize) -> Arc<Schema> {
    let names: Vec<String> = (0..certain + uncertain)
        .map(|i| {
            let n = ((b'A' + i as u8) as char).to_string();
            if i >= certain {
                format!("{n}?")
            } else {
                n
            }
        })
        .collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    schema(&refs)
}

fn random_fds(rng: &mut ChaCha8Rng, s: &Arc<Schema>, count: usize, unary: bool) -> FdSet {
    let all = s.all();
    let fds: Vec<Fd> = (0..count)
        .map(|_| {
            let lhs = if unary {
                AttrSet::singleton(rng.gen_range(0..s.len()))
            } else {
                random_subset(rng, all)
            };
            let rhs = random_nonempty_subset(rng, all.difference(lhs));
            Fd::new(lhs, rhs)
        })
        .collect();
    FdSet::new(s.clone(), fds)
}

fn random_schema(rng: &mut ChaCha8Rng) -> Arc<Schema> {
    let len = rng.gen_range(2..=4);
    let certain = rng.gen_range(0..=len);
    mixed_schema(certain, len - certain)
}

pub fn random_fd_set(rng: &mut ChaCha8Rng, class: FdClass) -> FdSet {
    match class {
        FdClass::UncertainToCertain => FdSet::parse(schema(&["A?", "B"]), "A? -> B").unwrap(),
        FdClass::CertainToUncertain => FdSet::parse(schema(&["A", "B?"]), "A -> B?").unwrap(),
        FdClass::CertainMatching => {
            if rng.gen_bool(0.5) {
                FdSet::parse(schema(&["A", "B?"]), "A <-> B?").unwrap()
            } else {
                // Wider matchings: certain side of one or two attributes.
                FdSet::parse(schema(&["A", "B", "C?"]), "A B <-> C?").unwrap()
            }
        }
        FdClass::UncertainMatching => FdSet::parse(schema(&["A?", "B?"]), "A? <-> B?").unwrap(),
        FdClass::LeftCertain => {
            let len = rng.gen_range(2..=4);
            let certain = rng.gen_range(1..len);
            let s = mixed_schema(certain, len - certain);
            let count = rng.gen_range(1..=3);
            let fds: Vec<Fd> = (0..count)
                .map(|_| {
                    let lhs = random_subset(rng, s.certain());
                    Fd::new(lhs, random_nonempty_subset(rng, s.all().difference(lhs)))
                })
                .collect();
            FdSet::new(s, fds)
        }
        FdClass::UnaryTractable => loop {
            let s = random_schema(rng);
            let count = rng.gen_range(2..=4);
            let f = random_fds(rng, &s, count, true);
            let c = classify(&f);
            if c.mpd.theorem == Some(Theorem::UnaryTrichotomy) && c.mpd.complexity == Complexity::PolyTime {
                return f;
            }
        },
        FdClass::Decomposable => loop {
            let s = random_schema(rng);
            let unary = rng.gen_bool(0.5);
            let count = rng.gen_range(2..=3);
            let f = random_fds(rng, &s, count, unary);
            let uncertain = s.uncertain();
            let parts = f.decompose().components;
            if parts.iter().filter(|c| !c.attrs().intersection(uncertain).is_empty()).count() >= 2 {
                return f;
            }
        },
    }
}

/// Any FD set over a random schema of up to four attributes.
pub fn random_general(rng: &mut ChaCha8Rng) -> (Cir, FdSet) {
    let s = random_schema(rng);
    let count = rng.gen_range(1..=4);
    let unary = rng.gen_bool(0.3);
    let fds = random_fds(rng, &s, count, unary);
    (random_cir(rng, &s, 6), fds)
}

pub fn random_instance(rng: &mut ChaCha8Rng, class: FdClass) -> Instance {
    let fds = random_fd_set(rng, class);
    let cir = random_cir(rng, fds.schema(), 6);
    Instance { class, cir, fds }
}

/// `count` instances, cycling through the classes.
pub fn stratified(seed: u64, count: usize) -> Vec<Instance> {
    let mut r = rng(seed);
    (0..count).map(|i| random_instance(&mut r, FdClass::ALL[i % FdClass::ALL.len()])).collect()
}

type Row = (TupleId, Vec<Vec<(Value, Rational)>>);

/// Every sample of `cir` with its probability, by mixed-radix counting.
pub fn all_worlds(cir: &Cir) -> Vec<(Relation, Rational)> {
    let rows: Vec<Row> =
        cir.rows().map(|(tid, cells)| (tid, cells.iter().map(Cell::entries).collect())).collect();
    let slots: Vec<(usize, usize)> = rows
        .iter()
        .enumerate()
        .flat_map(|(i, (_, cells))| (0..cells.len()).map(move |a| (i, a)))
        .collect();
    let mut digits = vec![0usize; slots.len()];
    let mut out = Vec::new();
    loop {
        let mut p = Rational::one();
        let mut values: Vec<Vec<Value>> = rows.iter().map(|(_, c)| vec![Value::new(""); c.len()]).collect();
        for (k, &(i, a)) in slots.iter().enumerate() {
            let (v, q) = &rows[i].1[a][digits[k]];
            values[i][a] = v.clone();
            p *= q;
        }
        let r = Relation::new(cir.schema().clone(), rows.iter().map(|(tid, _)| *tid).zip(values)).unwrap();
        out.push((r, p));
        let mut k = slots.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            let (i, a) = slots[k];
            digits[k] += 1;
            if digits[k] < rows[i].1[a].len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Consistency by pairwise comparison.
pub fn naive_satisfies(r: &Relation, fds: &FdSet) -> bool {
    let rows: Vec<&[Value]> = r.rows().map(|(_, v)| v).collect();
    fds.fds().iter().all(|fd| {
        rows.iter().all(|x| {
            rows.iter().all(|y| {
                !fd.lhs.iter().all(|a| x[a] == y[a]) || fd.rhs.iter().all(|a| x[a] == y[a])
            })
        })
    })
}

/// Number of perfect matchings of an `n x n` adjacency matrix.
pub fn permanent(adj: &[Vec<bool>]) -> u64 {
    fn go(adj: &[Vec<bool>], row: usize, used: &mut Vec<bool>) -> u64 {
        if row == adj.len() {
            return 1;
        }
        let mut total = 0;
        for c in 0..adj.len() {
            if adj[row][c] && !used[c] {
                used[c] = true;
                total += go(adj, row + 1, used);
                used[c] = false;
            }
        }
        total
    }
    go(adj, 0, &mut vec![false; adj.len()])
}

/// Satisfiability by trying every assignment.
pub fn brute_force_sat(vars: u32, clauses: &[Vec<i32>]) -> bool {
    (0u32..1 << vars).any(|bits| {
        clauses.iter().all(|c| c.iter().any(|&l| ((bits >> (l.unsigned_abs() - 1)) & 1 == 1) == (l > 0)))
    })
}

pub fn random_cnf(rng: &mut ChaCha8Rng, non_mixed: bool, max_clauses: usize) -> (u32, Vec<Vec<i32>>) {
    let vars = rng.gen_range(1..=6);
    let m = rng.gen_range(1..=max_clauses);
    let clauses = (0..m)
        .map(|_| {
            let len = rng.gen_range(1..=3);
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            (0..len)
                .map(|_| {
                    let v = rng.gen_range(1..=vars) as i32;
                    if non_mixed {
                        sign * v
                    } else if rng.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    (vars, clauses)
}

/// Whether the verdict for `problem` runs without search.
pub fn poly(fds: &FdSet, problem: Problem) -> bool {
    classify(fds).verdict(problem).plan.is_poly()
}
