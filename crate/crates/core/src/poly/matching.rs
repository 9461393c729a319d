//! Matching constraints `X <-> Y` with `X` all certain.
//!
//! Tuples are grouped by their `X` value; every group must take one `Y`
//! tuple, and distinct groups distinct `Y` tuples. Choosing `b` for group
//! `a` has probability `p(a, b)`, the product of `Pr(b)` over the group's
//! rows, so the best sample is a maximum-product matching. That matching is
//! found with a Hungarian algorithm on `-ln p(a, b)` (surplus `Y` tuples are
//! absorbed by zero-cost dummy rows). Floating point only narrows the search:
//! every optimal matching uses edges of zero reduced cost, so an exact search
//! over the nearly tight edges recovers the exact optimum and breaks ties by
//! the smallest assignment in group order.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::ComponentSolution;
use crate::error::SolveError;
use crate::model::{AttrSet, Cell, CellRef, Cir, TupleId, Value};
use crate::rational::{ln, Rational};

type YTuple = Vec<Value>;

/// Distribution of a row's `Y` projection, in lexicographic order.
fn y_distribution(row: &[Cell], y: AttrSet) -> Vec<(YTuple, Rational)> {
    let mut out: Vec<(YTuple, Rational)> = vec![(Vec::new(), Rational::one())];
    for a in y.iter() {
        let entries = row[a].entries();
        out = out
            .into_iter()
            .flat_map(|(prefix, p)| {
                entries.iter().map(move |(v, q)| {
                    let mut t = prefix.clone();
                    t.push(v.clone());
                    (t, &p * q)
                })
            })
            .collect();
    }
    out
}

fn certain_projection(row: &[Cell], x: AttrSet) -> Vec<Value> {
    x.iter()
        .map(|a| match &row[a] {
            Cell::Certain(v) => v.clone(),
            Cell::Uncertain(d) => d.argmax().0.clone(),
        })
        .collect()
}

/// Most probable assignment of the `Y` cells under `x <-> y`, where one side
/// is all certain.
pub fn solve_matching(cir: &Cir, x: AttrSet, y: AttrSet) -> Result<ComponentSolution, SolveError> {
    let schema = cir.schema();
    let (x, y) = if x.is_subset(schema.certain()) {
        (x, y)
    } else if y.is_subset(schema.certain()) {
        (y, x)
    } else {
        return Err(SolveError::misuse("matching constraint with uncertain attributes on both sides"));
    };
    if x.is_subset(y) || y.is_subset(x) {
        return Err(SolveError::misuse("one side of the matching contains the other"));
    }

    let mut groups: BTreeMap<Vec<Value>, Vec<(TupleId, &[Cell])>> = BTreeMap::new();
    for (tid, row) in cir.rows() {
        groups.entry(certain_projection(row, x)).or_default().push((tid, row));
    }
    let groups: Vec<Vec<(TupleId, &[Cell])>> = groups.into_values().collect();

    // Candidate Y tuples per group with their weights.
    let mut weights: Vec<BTreeMap<YTuple, Rational>> = Vec::with_capacity(groups.len());
    for g in &groups {
        let mut w: BTreeMap<YTuple, Rational> = y_distribution(g[0].1, y).into_iter().collect();
        for (_, row) in &g[1..] {
            let d: BTreeMap<YTuple, Rational> = y_distribution(row, y).into_iter().collect();
            w.retain(|t, p| match d.get(t) {
                Some(q) => {
                    *p *= q;
                    true
                }
                None => false,
            });
        }
        weights.push(w);
    }
    let columns: BTreeMap<&YTuple, usize> = {
        let mut all: Vec<&YTuple> = weights.iter().flat_map(|w| w.keys()).collect();
        all.sort();
        all.dedup();
        all.into_iter().enumerate().map(|(i, t)| (t, i)).collect()
    };
    let edges: Vec<Vec<(usize, Rational)>> = weights
        .iter()
        .map(|w| w.iter().map(|(t, p)| (columns[t], p.clone())).collect())
        .collect();

    let Some((assignment, probability)) = best_matching(&edges, columns.len()) else {
        return Ok(ComponentSolution::infeasible());
    };
    let by_index: Vec<&YTuple> = columns.keys().copied().collect();
    let mut cells = BTreeMap::new();
    for (g, col) in groups.iter().zip(assignment) {
        let t = by_index[col];
        for (tid, _) in g {
            for (k, a) in y.iter().enumerate() {
                if schema.is_uncertain(a) {
                    cells.insert(CellRef { tid: *tid, attr: a }, t[k].clone());
                }
            }
        }
    }
    Ok(ComponentSolution { cells, probability })
}

/// Maximum-product matching that saturates every row, as column indices and
/// the exact product. `None` if no such matching exists.
pub(crate) fn best_matching(
    edges: &[Vec<(usize, Rational)>],
    columns: usize,
) -> Option<(Vec<usize>, Rational)> {
    let n = edges.len();
    if n == 0 {
        return Some((Vec::new(), Rational::one()));
    }
    if n > columns || max_cardinality(edges, columns) < n {
        return None;
    }
    let costs: Vec<Vec<f64>> =
        edges.iter().map(|row| row.iter().map(|(_, p)| -ln(p)).collect()).collect();
    let largest = costs.iter().flatten().fold(0.0f64, |m, c| m.max(*c));
    let forbidden = (largest + 1.0) * (n as f64 + 1.0);
    let mut matrix = vec![vec![0.0; columns]; columns];
    for (i, row) in edges.iter().enumerate() {
        matrix[i].iter_mut().for_each(|c| *c = forbidden);
        for ((j, _), c) in row.iter().zip(&costs[i]) {
            matrix[i][*j] = *c;
        }
    }
    let (u, v) = hungarian(&matrix);
    let tolerance = 1e-9 * (1.0 + largest) * n as f64;
    let tight: Vec<Vec<(usize, Rational)>> = edges
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .zip(&costs[i])
                .filter(|((j, _), c)| *c - u[i] - v[*j] <= tolerance)
                .map(|(e, _)| e.clone())
                .collect()
        })
        .collect();
    exact_search(&tight, columns).or_else(|| exact_search(edges, columns))
}

/// Size of a maximum matching over the given edges (augmenting paths).
fn max_cardinality(edges: &[Vec<(usize, Rational)>], columns: usize) -> usize {
    fn augment(i: usize, edges: &[Vec<(usize, Rational)>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for (j, _) in &edges[i] {
            if seen[*j] {
                continue;
            }
            seen[*j] = true;
            if owner[*j].is_none_or(|k| augment(k, edges, seen, owner)) {
                owner[*j] = Some(i);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; columns];
    (0..edges.len())
        .filter(|&i| augment(i, edges, &mut vec![false; columns], &mut owner))
        .count()
}

/// Minimum-cost perfect assignment on a square matrix. Returns the row and
/// column potentials; `cost[i][j] - u[i] - v[j]` is nonnegative and zero on
/// the assignment.
fn hungarian(cost: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = cost.len();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (u[1..].to_vec(), v[1..].to_vec())
}

/// Exact branch and bound over the given edges. Rows are assigned in order
/// and columns tried in ascending order, so the first optimum found is the
/// smallest assignment vector.
fn exact_search(edges: &[Vec<(usize, Rational)>], columns: usize) -> Option<(Vec<usize>, Rational)> {
    struct State<'e> {
        edges: &'e [Vec<(usize, Rational)>],
        bound: Vec<Rational>,
        used: Vec<bool>,
        current: Vec<usize>,
        best: Option<(Vec<usize>, Rational)>,
    }
    fn go(s: &mut State, i: usize, p: Rational) {
        if let Some((_, best)) = &s.best {
            if &p * &s.bound[i] <= *best {
                return;
            }
        }
        if i == s.edges.len() {
            s.best = Some((s.current.clone(), p));
            return;
        }
        for k in 0..s.edges[i].len() {
            let (j, w) = &s.edges[i][k];
            if s.used[*j] {
                continue;
            }
            let j = *j;
            let next = &p * w;
            s.used[j] = true;
            s.current.push(j);
            go(s, i + 1, next);
            s.current.pop();
            s.used[j] = false;
        }
    }
    let mut bound = vec![Rational::one(); edges.len() + 1];
    for i in (0..edges.len()).rev() {
        let max = edges[i].iter().map(|(_, p)| p).max().cloned().unwrap_or_else(Rational::zero);
        bound[i] = &bound[i + 1] * max;
    }
    let mut s = State { edges, bound, used: vec![false; columns], current: Vec::new(), best: None };
    go(&mut s, 0, Rational::one());
    s.best
}
