//! Functional dependencies: normalization, attribute closure, structural
//! predicates, satisfaction, and decomposition into independent parts.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::io::DslError;
use crate::model::{AttrId, AttrSet, ModelError, Relation, Schema, Value};
use crate::union_find::UnionFind;

/// `lhs -> rhs`. An empty `lhs` is a consensus FD.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fd {
    pub lhs: AttrSet,
    pub rhs: AttrSet,
}

impl Fd {
    pub fn new(lhs: AttrSet, rhs: AttrSet) -> Self {
        Fd { lhs, rhs }
    }

    pub fn is_trivial(&self) -> bool {
        self.rhs.is_subset(self.lhs)
    }

    pub fn is_unary(&self) -> bool {
        self.lhs.len() == 1
    }

    pub fn is_consensus(&self) -> bool {
        self.lhs.is_empty()
    }

    pub fn attrs(&self) -> AttrSet {
        self.lhs.union(self.rhs)
    }
}

/// A set of FDs over one schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FdSet {
    schema: Arc<Schema>,
    fds: Vec<Fd>,
}

impl FdSet {
    pub fn new(schema: Arc<Schema>, fds: impl IntoIterator<Item = Fd>) -> Self {
        FdSet { schema, fds: fds.into_iter().collect() }
    }

    pub fn empty(schema: Arc<Schema>) -> Self {
        FdSet { schema, fds: Vec::new() }
    }

    /// Parses the FD DSL (see [`crate::io::parse_fds`]); the result is normalized.
    pub fn parse(schema: Arc<Schema>, text: &str) -> Result<Self, DslError> {
        crate::io::parse_fds(text, schema)
    }

    /// Builds `lhs -> rhs` from attribute names.
    pub fn from_names(schema: Arc<Schema>, rules: &[(&[&str], &[&str])]) -> Result<Self, ModelError> {
        let resolve = |names: &[&str]| -> Result<AttrSet, ModelError> {
            names.iter().map(|n| schema.attr(n)).collect()
        };
        let fds = rules
            .iter()
            .map(|(l, r)| Ok(Fd::new(resolve(l)?, resolve(r)?)))
            .collect::<Result<Vec<_>, ModelError>>()?;
        Ok(FdSet::new(schema, fds).normalize())
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn fds(&self) -> &[Fd] {
        &self.fds
    }

    pub fn len(&self) -> usize {
        self.fds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fds.is_empty()
    }

    /// All attributes mentioned by some FD.
    pub fn attrs(&self) -> AttrSet {
        self.fds.iter().fold(AttrSet::EMPTY, |acc, fd| acc.union(fd.attrs()))
    }

    /// Splits right-hand sides into single attributes, drops trivial FDs and
    /// duplicates, and sorts. Logically equivalent to `self`.
    pub fn normalize(&self) -> FdSet {
        let mut fds: Vec<Fd> = self
            .fds
            .iter()
            .flat_map(|fd| {
                fd.rhs
                    .difference(fd.lhs)
                    .iter()
                    .map(move |a| Fd::new(fd.lhs, AttrSet::singleton(a)))
            })
            .collect();
        fds.sort();
        fds.dedup();
        FdSet { schema: self.schema.clone(), fds }
    }

    /// Least superset of `attrs` closed under the FDs.
    pub fn closure(&self, attrs: AttrSet) -> AttrSet {
        let mut closed = attrs;
        loop {
            let before = closed;
            for fd in &self.fds {
                if fd.lhs.is_subset(closed) {
                    closed = closed.union(fd.rhs);
                }
            }
            if closed == before {
                return closed;
            }
        }
    }

    /// The attribute determines nothing beyond itself.
    pub fn is_sink(&self, attr: AttrId) -> bool {
        self.closure(AttrSet::singleton(attr)) == AttrSet::singleton(attr)
    }

    pub fn equivalent(&self, a: AttrId, b: AttrId) -> bool {
        self.closure(AttrSet::singleton(a)) == self.closure(AttrSet::singleton(b))
    }

    /// Attributes of the schema grouped by identical closures.
    pub fn equivalence_classes(&self) -> Vec<AttrSet> {
        let mut classes: Vec<(AttrSet, AttrSet)> = Vec::new();
        for a in 0..self.schema.len() {
            let c = self.closure(AttrSet::singleton(a));
            match classes.iter_mut().find(|(cl, _)| *cl == c) {
                Some((_, members)) => members.insert(a),
                None => classes.push((c, AttrSet::singleton(a))),
            }
        }
        classes.into_iter().map(|(_, m)| m).collect()
    }

    /// Every left-hand side contains only certain attributes.
    pub fn is_lhs_certain(&self) -> bool {
        let unc = self.schema.uncertain();
        self.fds.iter().all(|fd| fd.lhs.intersection(unc).is_empty())
    }

    pub fn is_unary(&self) -> bool {
        self.fds.iter().all(Fd::is_unary)
    }

    /// Whether `r` satisfies every FD.
    pub fn satisfied_by(&self, r: &Relation) -> Result<bool, ModelError> {
        satisfies(r, self)
    }

    /// Restriction to the given FDs, same schema.
    pub fn subset(&self, fds: impl IntoIterator<Item = Fd>) -> FdSet {
        FdSet { schema: self.schema.clone(), fds: fds.into_iter().collect() }
    }

    /// Splits the FDs into components that share only certain attributes.
    ///
    /// Two FDs land in the same component when they mention a common
    /// uncertain attribute. Attributes outside every FD are reported as
    /// `free`.
    pub fn decompose(&self) -> Decomposition {
        let normalized = self.normalize();
        let fds = &normalized.fds;
        let mut uf = UnionFind::new(fds.len());
        for attr in self.schema.uncertain().iter() {
            let mut first = None;
            for (i, fd) in fds.iter().enumerate() {
                if fd.attrs().contains(attr) {
                    match first {
                        None => first = Some(i),
                        Some(f) => {
                            uf.union(f, i);
                        }
                    }
                }
            }
        }
        let components = uf
            .groups()
            .into_iter()
            .map(|g| normalized.subset(g.into_iter().map(|i| fds[i])))
            .collect();
        Decomposition { components, free: self.schema.all().difference(normalized.attrs()) }
    }

    /// Renders the set in DSL syntax.
    pub fn to_dsl(&self) -> String {
        self.fds
            .iter()
            .map(|fd| {
                format!("{} -> {}", self.schema.display_set(fd.lhs), self.schema.display_set(fd.rhs))
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

impl fmt::Display for FdSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.fds.is_empty() {
            return f.write_str("(no dependencies)");
        }
        f.write_str(&self.to_dsl())
    }
}

/// Result of [`FdSet::decompose`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub components: Vec<FdSet>,
    pub free: AttrSet,
}

/// True iff every pair of tuples agreeing on an FD's left side agrees on its
/// right side.
pub fn satisfies(r: &Relation, fds: &FdSet) -> Result<bool, ModelError> {
    if **r.schema() != *fds.schema {
        return Err(ModelError::SchemaMismatch);
    }
    for fd in &fds.fds {
        let mut seen: HashMap<Vec<&Value>, Vec<&Value>> = HashMap::new();
        for (_, row) in r.rows() {
            let key: Vec<&Value> = fd.lhs.iter().map(|a| &row[a]).collect();
            let val: Vec<&Value> = fd.rhs.iter().map(|a| &row[a]).collect();
            match seen.get(&key) {
                Some(prev) if *prev != val => return Ok(false),
                Some(_) => {}
                None => {
                    seen.insert(key, val);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{CellRef, TupleId};

    fn abc(names: &[&str]) -> Arc<Schema> {
        Arc::new(Schema::parse_names(names).unwrap())
    }

    fn set(schema: &Schema, names: &[&str]) -> AttrSet {
        names.iter().map(|n| schema.attr(n).unwrap()).collect()
    }

    #[test]
    fn normalize_splits_and_drops_trivial() {
        let s = abc(&["A", "B", "C"]);
        let f = FdSet::new(s.clone(), [Fd::new(set(&s, &["A"]), set(&s, &["B", "C"]))]).normalize();
        assert_eq!(f.to_dsl(), "A -> B; A -> C");
        let f = FdSet::new(s.clone(), [Fd::new(set(&s, &["A", "B"]), set(&s, &["A"]))]).normalize();
        assert!(f.is_empty());
        let f2 = fixtures::u1_f2();
        assert_eq!(f2.normalize(), f2);
        assert_eq!(f2.len(), 2);
    }

    #[test]
    fn closure_examples() {
        let s = abc(&["A", "B", "C"]);
        let f = FdSet::parse(s.clone(), "A -> B; B -> C").unwrap();
        assert_eq!(f.closure(set(&s, &["A"])), set(&s, &["A", "B", "C"]));
        assert_eq!(f.closure(set(&s, &["C"])), set(&s, &["C"]));
        let s3 = abc(&["A", "B?", "C?"]);
        let f3 = FdSet::parse(s3.clone(), "A <-> B? -> C?").unwrap();
        assert_eq!(f3.closure(set(&s3, &["B"])), s3.all());
    }

    #[test]
    fn sinks_and_equivalence() {
        let s1 = abc(&["A", "B", "C?"]);
        let f1 = FdSet::parse(s1.clone(), "A -> B -> C?").unwrap();
        assert!(f1.is_sink(s1.attr("C").unwrap()));
        let s2 = abc(&["A", "B?", "C"]);
        let f2 = FdSet::parse(s2.clone(), "A -> B? -> C").unwrap();
        assert!(!f2.is_sink(s2.attr("B").unwrap()));
        assert!(FdSet::empty(s2.clone()).is_sink(0));

        let s3 = abc(&["A", "B?", "C?"]);
        let f3 = FdSet::parse(s3.clone(), "A <-> B? -> C?").unwrap();
        assert!(f3.equivalent(0, 1));
        assert!(!f3.equivalent(0, 2));
        assert!(f3.equivalent(2, 2));
    }

    #[test]
    fn decompose_examples() {
        let s = abc(&["A", "B?", "D?"]);
        let d = FdSet::parse(s.clone(), "A -> B?; A -> D?").unwrap().decompose();
        assert_eq!(d.components.len(), 2);
        assert!(d.free.is_empty());

        let s = abc(&["A?", "B", "C?"]);
        let d = FdSet::parse(s.clone(), "A? -> B; B -> A?").unwrap().decompose();
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.free, set(&s, &["C"]));

        assert_eq!(fixtures::u1_f2().decompose().components.len(), 1);
    }

    #[test]
    fn running_example_satisfaction() {
        let u1 = fixtures::u1();
        let spec = u1.schema().attr("specialist").unwrap();
        let mut r = u1.argmax_sample();
        for (t, v) in [(1, "Lisa"), (2, "Bart"), (3, "Maggie")] {
            r.set(CellRef { tid: TupleId(t), attr: spec }, Value::new(v)).unwrap();
        }
        assert!(satisfies(&r, &fixtures::u1_f1()).unwrap());
        assert!(!satisfies(&r, &fixtures::u1_f2()).unwrap());
        assert!(satisfies(&r, &FdSet::empty(u1.schema().clone())).unwrap());
    }

    #[test]
    fn satisfies_rejects_foreign_schema() {
        let u1 = fixtures::u1();
        let other = FdSet::empty(abc(&["X"]));
        assert!(satisfies(&u1.argmax_sample(), &other).is_err());
    }
}
