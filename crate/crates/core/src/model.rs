//! Values, distributions, schemas, CIRs and their samples.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::Rational;

/// Largest schema supported; attribute sets are 64-bit masks.
pub const MAX_ATTRIBUTES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate attribute `{0}`")]
    DuplicateAttribute(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("schema has {0} attributes, at most {MAX_ATTRIBUTES} are supported")]
    SchemaTooWide(usize),
    #[error("distribution has an empty support")]
    EmptyDistribution,
    #[error("distribution probabilities sum to {0}, expected 1")]
    BadSum(String),
    #[error("negative or out-of-range probability {0}")]
    BadProbability(String),
    #[error("duplicate value `{0}` in distribution")]
    DuplicateValue(String),
    #[error("duplicate tuple id {0}")]
    DuplicateTid(TupleId),
    #[error("tuple {tid} has {found} cells, schema has {expected} attributes")]
    Arity { tid: TupleId, expected: usize, found: usize },
    #[error("tuple {tid}: attribute `{attr}` is certain but the cell holds a distribution")]
    DistributionInCertainCell { tid: TupleId, attr: String },
    #[error("schema mismatch")]
    SchemaMismatch,
    #[error("tuple ids differ")]
    TidMismatch,
    #[error("tuple {tid}: certain cell `{attr}` differs from the CIR")]
    CertainCellMismatch { tid: TupleId, attr: String },
    #[error("unknown cell ({tid}, {attr})")]
    UnknownCell { tid: TupleId, attr: String },
}

/// An atomic database value. Equality is exact string equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Value(Arc<str>);

impl Value {
    pub fn new(text: impl AsRef<str>) -> Self {
        Value(Arc::from(text.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::new(s)
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value(Arc::from(s))
    }
}

/// Index of an attribute within its schema.
pub type AttrId = usize;

/// A set of attributes of one schema, as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttrSet(u64);

impl AttrSet {
    pub const EMPTY: AttrSet = AttrSet(0);

    pub fn singleton(attr: AttrId) -> Self {
        AttrSet(1 << attr)
    }

    pub fn from_bits(bits: u64) -> Self {
        AttrSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, attr: AttrId) -> bool {
        self.0 & (1 << attr) != 0
    }

    pub fn insert(&mut self, attr: AttrId) {
        self.0 |= 1 << attr;
    }

    pub fn union(self, other: AttrSet) -> AttrSet {
        AttrSet(self.0 | other.0)
    }

    pub fn intersection(self, other: AttrSet) -> AttrSet {
        AttrSet(self.0 & other.0)
    }

    pub fn difference(self, other: AttrSet) -> AttrSet {
        AttrSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: AttrSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<AttrId> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = AttrId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let next = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(next)
        })
    }
}

impl FromIterator<AttrId> for AttrSet {
    fn from_iter<I: IntoIterator<Item = AttrId>>(iter: I) -> Self {
        let mut set = AttrSet::EMPTY;
        for a in iter {
            set.insert(a);
        }
        set
    }
}

impl fmt::Debug for AttrSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub uncertain: bool,
}

/// Ordered attribute list with the uncertain (marked) attributes flagged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    attributes: Vec<Attribute>,
    index: HashMap<String, AttrId>,
}

impl Schema {
    pub fn new(attributes: Vec<Attribute>) -> Result<Self, ModelError> {
        if attributes.len() > MAX_ATTRIBUTES {
            return Err(ModelError::SchemaTooWide(attributes.len()));
        }
        let mut index = HashMap::with_capacity(attributes.len());
        for (i, a) in attributes.iter().enumerate() {
            if index.insert(a.name.clone(), i).is_some() {
                return Err(ModelError::DuplicateAttribute(a.name.clone()));
            }
        }
        Ok(Schema { attributes, index })
    }

    /// Builds a schema from names where a trailing `?` marks an uncertain
    /// attribute: `Schema::parse_names(&["room", "specialist?", "time"])`.
    pub fn parse_names(names: &[&str]) -> Result<Self, ModelError> {
        Schema::new(
            names
                .iter()
                .map(|n| match n.strip_suffix('?') {
                    Some(base) => Attribute { name: base.to_string(), uncertain: true },
                    None => Attribute { name: n.to_string(), uncertain: false },
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn name(&self, attr: AttrId) -> &str {
        &self.attributes[attr].name
    }

    pub fn is_uncertain(&self, attr: AttrId) -> bool {
        self.attributes[attr].uncertain
    }

    pub fn lookup(&self, name: &str) -> Option<AttrId> {
        self.index.get(name).copied()
    }

    pub fn attr(&self, name: &str) -> Result<AttrId, ModelError> {
        self.lookup(name).ok_or_else(|| ModelError::UnknownAttribute(name.to_string()))
    }

    pub fn all(&self) -> AttrSet {
        AttrSet::from_bits(if self.len() == 64 { u64::MAX } else { (1u64 << self.len()) - 1 })
    }

    pub fn uncertain(&self) -> AttrSet {
        (0..self.len()).filter(|&a| self.is_uncertain(a)).collect()
    }

    pub fn certain(&self) -> AttrSet {
        self.all().difference(self.uncertain())
    }

    /// Attribute names of a set, in schema order, uncertain ones suffixed `?`.
    pub fn display_set(&self, set: AttrSet) -> String {
        if set.is_empty() {
            return "{}".to_string();
        }
        set.iter()
            .map(|a| {
                if self.is_uncertain(a) {
                    format!("{}?", self.name(a))
                } else {
                    self.name(a).to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A finite distribution over values with strictly positive probabilities
/// summing to exactly one. Entries are kept sorted by value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    entries: Vec<(Value, Rational)>,
}

impl Distribution {
    /// Zero-probability entries are dropped; the rest must sum to one.
    pub fn new<V: Into<Value>>(
        entries: impl IntoIterator<Item = (V, Rational)>,
    ) -> Result<Self, ModelError> {
        let mut map: BTreeMap<Value, Rational> = BTreeMap::new();
        let mut total = Rational::zero();
        for (v, p) in entries {
            let v = v.into();
            if p < Rational::zero() || p > Rational::one() {
                return Err(ModelError::BadProbability(p.to_string()));
            }
            total += &p;
            if map.contains_key(&v) {
                return Err(ModelError::DuplicateValue(v.to_string()));
            }
            map.insert(v, p);
        }
        if total != Rational::one() {
            return Err(ModelError::BadSum(total.to_string()));
        }
        let entries: Vec<_> = map.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        if entries.is_empty() {
            return Err(ModelError::EmptyDistribution);
        }
        Ok(Distribution { entries })
    }

    /// Uniform distribution over the distinct given values.
    pub fn uniform<V: Into<Value>>(values: impl IntoIterator<Item = V>) -> Result<Self, ModelError> {
        let mut vals: Vec<Value> = values.into_iter().map(Into::into).collect();
        vals.sort();
        vals.dedup();
        if vals.is_empty() {
            return Err(ModelError::EmptyDistribution);
        }
        let p = Rational::new(1.into(), (vals.len() as i64).into());
        Ok(Distribution { entries: vals.into_iter().map(|v| (v, p.clone())).collect() })
    }

    pub fn point(value: impl Into<Value>) -> Self {
        Distribution { entries: vec![(value.into(), Rational::one())] }
    }

    pub fn entries(&self) -> &[(Value, Rational)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = &Value> {
        self.entries.iter().map(|(v, _)| v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_point(&self) -> bool {
        self.entries.len() == 1
    }

    /// Probability of `value`; zero outside the support.
    pub fn prob(&self, value: &Value) -> Rational {
        self.prob_ref(value).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn prob_ref(&self, value: &Value) -> Option<&Rational> {
        self.entries
            .binary_search_by(|(v, _)| v.cmp(value))
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn contains(&self, value: &Value) -> bool {
        self.prob_ref(value).is_some()
    }

    /// Most likely value, the smallest one on ties.
    pub fn argmax(&self) -> (&Value, &Rational) {
        let mut best = &self.entries[0];
        for e in &self.entries[1..] {
            if e.1 > best.1 {
                best = e;
            }
        }
        (&best.0, &best.1)
    }

    pub fn max_prob(&self) -> &Rational {
        self.argmax().1
    }
}

/// Identifier of a tuple. Duplicate rows are distinguished only by this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TupleId(pub u64);

impl fmt::Display for TupleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Coordinates of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellRef {
    pub tid: TupleId,
    pub attr: AttrId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Certain(Value),
    Uncertain(Distribution),
}

impl Cell {
    /// Certain cells behave as point distributions.
    pub fn prob(&self, value: &Value) -> Rational {
        match self {
            Cell::Certain(v) if v == value => Rational::one(),
            Cell::Certain(_) => Rational::zero(),
            Cell::Uncertain(d) => d.prob(value),
        }
    }

    pub fn support_len(&self) -> usize {
        match self {
            Cell::Certain(_) => 1,
            Cell::Uncertain(d) => d.len(),
        }
    }

    pub fn entries(&self) -> Vec<(Value, Rational)> {
        match self {
            Cell::Certain(v) => vec![(v.clone(), Rational::one())],
            Cell::Uncertain(d) => d.entries().to_vec(),
        }
    }
}

/// A cell-independent relation: a table whose uncertain attributes hold
/// independent finite distributions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cir {
    schema: Arc<Schema>,
    tuples: BTreeMap<TupleId, Vec<Cell>>,
}

impl Cir {
    /// Cells of a certain attribute must be [`Cell::Certain`]. Cells of an
    /// uncertain attribute may be either; certain ones become point
    /// distributions.
    pub fn new(
        schema: Arc<Schema>,
        rows: impl IntoIterator<Item = (TupleId, Vec<Cell>)>,
    ) -> Result<Self, ModelError> {
        let mut tuples = BTreeMap::new();
        for (tid, cells) in rows {
            if cells.len() != schema.len() {
                return Err(ModelError::Arity { tid, expected: schema.len(), found: cells.len() });
            }
            let cells: Vec<Cell> = cells
                .into_iter()
                .enumerate()
                .map(|(a, c)| match (schema.is_uncertain(a), c) {
                    (true, Cell::Certain(v)) => Ok(Cell::Uncertain(Distribution::point(v))),
                    (false, Cell::Uncertain(d)) if d.is_point() => {
                        Ok(Cell::Certain(d.entries()[0].0.clone()))
                    }
                    (false, Cell::Uncertain(_)) => Err(ModelError::DistributionInCertainCell {
                        tid,
                        attr: schema.name(a).to_string(),
                    }),
                    (_, c) => Ok(c),
                })
                .collect::<Result<_, _>>()?;
            if tuples.insert(tid, cells).is_some() {
                return Err(ModelError::DuplicateTid(tid));
            }
        }
        Ok(Cir { schema, tuples })
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tids(&self) -> impl Iterator<Item = TupleId> + '_ {
        self.tuples.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = (TupleId, &[Cell])> {
        self.tuples.iter().map(|(t, c)| (*t, c.as_slice()))
    }

    pub fn row(&self, tid: TupleId) -> Option<&[Cell]> {
        self.tuples.get(&tid).map(Vec::as_slice)
    }

    pub fn cell(&self, cell: CellRef) -> Option<&Cell> {
        self.tuples.get(&cell.tid).and_then(|r| r.get(cell.attr))
    }

    /// Uncertain cells restricted to `attrs`, in (tid, attribute) order.
    pub fn uncertain_cells(&self, attrs: AttrSet) -> Vec<CellRef> {
        let scope = attrs.intersection(self.schema.uncertain());
        self.tuples
            .keys()
            .flat_map(|&tid| scope.iter().map(move |attr| CellRef { tid, attr }))
            .collect()
    }

    /// Number of samples over the uncertain cells of `attrs`, saturating.
    pub fn world_count(&self, attrs: AttrSet) -> u128 {
        self.uncertain_cells(attrs).iter().fold(1u128, |acc, c| {
            acc.saturating_mul(self.cell(*c).map_or(1, Cell::support_len) as u128)
        })
    }

    /// Copy of this CIR with one uncertain cell fixed to a point value.
    pub fn with_fixed(&self, cell: CellRef, value: Value) -> Result<Cir, ModelError> {
        let mut out = self.clone();
        let slot = out
            .tuples
            .get_mut(&cell.tid)
            .and_then(|r| r.get_mut(cell.attr))
            .ok_or_else(|| ModelError::UnknownCell {
                tid: cell.tid,
                attr: cell.attr.to_string(),
            })?;
        if let Cell::Uncertain(_) = slot {
            *slot = Cell::Uncertain(Distribution::point(value));
        }
        Ok(out)
    }

    /// The relation that takes the most likely value in every uncertain cell.
    pub fn argmax_sample(&self) -> Relation {
        let rows = self
            .tuples
            .iter()
            .map(|(tid, cells)| {
                let vals = cells
                    .iter()
                    .map(|c| match c {
                        Cell::Certain(v) => v.clone(),
                        Cell::Uncertain(d) => d.argmax().0.clone(),
                    })
                    .collect();
                (*tid, vals)
            })
            .collect();
        Relation { schema: self.schema.clone(), tuples: rows }
    }
}

/// An ordinary relation, e.g. one possible world of a [`Cir`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    schema: Arc<Schema>,
    tuples: BTreeMap<TupleId, Vec<Value>>,
}

impl Relation {
    pub fn new(
        schema: Arc<Schema>,
        rows: impl IntoIterator<Item = (TupleId, Vec<Value>)>,
    ) -> Result<Self, ModelError> {
        let mut tuples = BTreeMap::new();
        for (tid, vals) in rows {
            if vals.len() != schema.len() {
                return Err(ModelError::Arity { tid, expected: schema.len(), found: vals.len() });
            }
            if tuples.insert(tid, vals).is_some() {
                return Err(ModelError::DuplicateTid(tid));
            }
        }
        Ok(Relation { schema, tuples })
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (TupleId, &[Value])> {
        self.tuples.iter().map(|(t, v)| (*t, v.as_slice()))
    }

    pub fn row(&self, tid: TupleId) -> Option<&[Value]> {
        self.tuples.get(&tid).map(Vec::as_slice)
    }

    pub fn value(&self, cell: CellRef) -> Option<&Value> {
        self.tuples.get(&cell.tid).and_then(|r| r.get(cell.attr))
    }

    pub fn set(&mut self, cell: CellRef, value: Value) -> Result<(), ModelError> {
        let slot = self
            .tuples
            .get_mut(&cell.tid)
            .and_then(|r| r.get_mut(cell.attr))
            .ok_or_else(|| ModelError::UnknownCell {
                tid: cell.tid,
                attr: cell.attr.to_string(),
            })?;
        *slot = value;
        Ok(())
    }

    /// Projection of tuple `tid` onto `attrs`, in schema order.
    pub fn project(&self, tid: TupleId, attrs: AttrSet) -> Vec<Value> {
        let row = &self.tuples[&tid];
        attrs.iter().map(|a| row[a].clone()).collect()
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header: Vec<String> = std::iter::once("tid".to_string())
            .chain(self.schema.attributes().iter().map(|a| {
                if a.uncertain {
                    format!("{}?", a.name)
                } else {
                    a.name.clone()
                }
            }))
            .collect();
        let body: Vec<Vec<String>> = self
            .tuples
            .iter()
            .map(|(tid, vals)| {
                std::iter::once(tid.to_string())
                    .chain(vals.iter().map(|v| v.to_string()))
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|i| body.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join(" | ")
        };
        writeln!(f, "{}", line(&header).trim_end())?;
        for row in &body {
            writeln!(f, "{}", line(row).trim_end())?;
        }
        Ok(())
    }
}

fn check_shape(cir: &Cir, r: &Relation) -> Result<(), ModelError> {
    if cir.schema != r.schema && *cir.schema != *r.schema {
        return Err(ModelError::SchemaMismatch);
    }
    if !cir.tuples.keys().eq(r.tuples.keys()) {
        return Err(ModelError::TidMismatch);
    }
    for (tid, cells) in &cir.tuples {
        let vals = &r.tuples[tid];
        for (a, cell) in cells.iter().enumerate() {
            if let Cell::Certain(v) = cell {
                if *v != vals[a] {
                    return Err(ModelError::CertainCellMismatch {
                        tid: *tid,
                        attr: cir.schema.name(a).to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Probability of `r` as a sample of `cir`: the product over uncertain
/// cells of the probability of the chosen value (zero outside a support).
pub fn sample_probability(cir: &Cir, r: &Relation) -> Result<Rational, ModelError> {
    check_shape(cir, r)?;
    let mut p = Rational::one();
    for (tid, cells) in &cir.tuples {
        let vals = &r.tuples[tid];
        for (a, cell) in cells.iter().enumerate() {
            if let Cell::Uncertain(d) = cell {
                match d.prob_ref(&vals[a]) {
                    Some(q) => p *= q,
                    None => return Ok(Rational::zero()),
                }
            }
        }
    }
    Ok(p)
}

/// Whether `r` is in the support of `cir`.
pub fn is_sample(cir: &Cir, r: &Relation) -> bool {
    if check_shape(cir, r).is_err() {
        return false;
    }
    cir.tuples.iter().all(|(tid, cells)| {
        let vals = &r.tuples[tid];
        cells.iter().enumerate().all(|(a, cell)| match cell {
            Cell::Certain(_) => true,
            Cell::Uncertain(d) => d.contains(&vals[a]),
        })
    })
}
