//! JSON document format for CIRs.
//!
//! ```json
//! {
//!   "attributes": ["room", "specialist?", "time"],
//!   "tuples": [
//!     { "tid": 1, "cells": { "room": "41",
//!                            "specialist": { "Bart": "1/2", "Lisa": "0.5" },
//!                            "time": "5 PM" } }
//!   ]
//! }
//! ```
//!
//! A trailing `?` marks an uncertain attribute. Uncertain cells hold an
//! object mapping each value to its probability, written as a `"p/q"`
//! string, a decimal string, or a JSON number; a plain value is shorthand for
//! a point distribution. Certain cells hold a plain value. Numbers and
//! booleans used as values are taken by their JSON text. `tid` defaults to
//! the 1-based position of the tuple.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::model::{Attribute, Cell, Cir, Distribution, ModelError, Schema, TupleId, Value};
use crate::rational::{parse_probability, to_exact_decimal, to_fraction_string, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

fn field(path: impl Into<String>, message: impl Into<String>) -> ParseError {
    ParseError::Field { path: path.into(), message: message.into() }
}

/// How probabilities are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProbFormat {
    /// Exact `p/q` strings.
    #[default]
    Fraction,
    /// Decimal strings when the expansion terminates, fractions otherwise.
    Decimal,
}

fn scalar(path: &str, v: &Json) -> Result<String, ParseError> {
    match v {
        Json::String(s) => Ok(s.clone()),
        Json::Number(n) => Ok(n.to_string()),
        Json::Bool(b) => Ok(b.to_string()),
        _ => Err(field(path, "expected a string, number or boolean")),
    }
}

/// Parses a CIR document.
pub fn parse_cir(text: &str) -> Result<Cir, ParseError> {
    let doc: Json = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = doc.as_object().ok_or_else(|| field("$", "expected an object"))?;

    let attrs = obj
        .get("attributes")
        .and_then(Json::as_array)
        .ok_or_else(|| field("attributes", "expected an array of attribute names"))?;
    let mut attributes = Vec::with_capacity(attrs.len());
    for (i, a) in attrs.iter().enumerate() {
        let path = format!("attributes[{i}]");
        let name = a.as_str().ok_or_else(|| field(&path, "expected a string"))?;
        let (name, uncertain) = match name.strip_suffix('?') {
            Some(base) => (base, true),
            None => (name, false),
        };
        if name.is_empty() {
            return Err(field(&path, "empty attribute name"));
        }
        attributes.push(Attribute { name: name.to_string(), uncertain });
    }
    let schema = Arc::new(Schema::new(attributes).map_err(|e| field("attributes", e.to_string()))?);

    let tuples = match obj.get("tuples") {
        None => &[][..],
        Some(t) => t.as_array().ok_or_else(|| field("tuples", "expected an array"))?.as_slice(),
    };
    let mut rows = Vec::with_capacity(tuples.len());
    let mut seen = BTreeMap::new();
    for (i, t) in tuples.iter().enumerate() {
        let path = format!("tuples[{i}]");
        let tobj = t.as_object().ok_or_else(|| field(&path, "expected an object"))?;
        let tid = match tobj.get("tid") {
            None => TupleId(i as u64 + 1),
            Some(v) => TupleId(
                v.as_u64().ok_or_else(|| field(format!("{path}.tid"), "expected an unsigned integer"))?,
            ),
        };
        if let Some(prev) = seen.insert(tid, i) {
            return Err(field(
                format!("{path}.tid"),
                format!("duplicate tuple id {tid} (also used by tuples[{prev}])"),
            ));
        }
        let cells = tobj
            .get("cells")
            .and_then(Json::as_object)
            .ok_or_else(|| field(format!("{path}.cells"), "expected an object"))?;
        for key in cells.keys() {
            if schema.lookup(key).is_none() {
                return Err(field(format!("{path}.cells.{key}"), "unknown attribute"));
            }
        }
        let mut row = Vec::with_capacity(schema.len());
        for (a, attr) in schema.attributes().iter().enumerate() {
            let cpath = format!("{path}.cells.{}", attr.name);
            let raw = cells.get(&attr.name).ok_or_else(|| field(&cpath, "missing cell"))?;
            let cell = match raw {
                Json::Object(entries) => {
                    if !schema.is_uncertain(a) {
                        return Err(field(&cpath, "distribution in a certain attribute"));
                    }
                    Cell::Uncertain(parse_distribution(&cpath, entries)?)
                }
                other => Cell::Certain(Value::new(scalar(&cpath, other)?)),
            };
            row.push(cell);
        }
        rows.push((tid, row));
    }
    Cir::new(schema, rows).map_err(|e| field("tuples", e.to_string()))
}

fn parse_distribution(path: &str, entries: &Map<String, Json>) -> Result<Distribution, ParseError> {
    let mut parsed: Vec<(Value, Rational)> = Vec::with_capacity(entries.len());
    for (value, p) in entries {
        let ppath = format!("{path}.{value}");
        let text = scalar(&ppath, p)?;
        let prob = parse_probability(&text).map_err(|e| field(&ppath, e.to_string()))?;
        parsed.push((Value::new(value), prob));
    }
    Distribution::new(parsed).map_err(|e| match e {
        ModelError::BadSum(s) => field(path, format!("probabilities sum to {s}, expected 1")),
        other => field(path, other.to_string()),
    })
}

fn render_prob(p: &Rational, format: ProbFormat) -> String {
    match format {
        ProbFormat::Fraction => to_fraction_string(p),
        ProbFormat::Decimal => to_exact_decimal(p).unwrap_or_else(|| to_fraction_string(p)),
    }
}

/// Document tree for `cir`.
pub fn cir_to_json(cir: &Cir, format: ProbFormat) -> Json {
    let schema = cir.schema();
    let attributes: Vec<Json> = schema
        .attributes()
        .iter()
        .map(|a| Json::String(if a.uncertain { format!("{}?", a.name) } else { a.name.clone() }))
        .collect();
    let tuples: Vec<Json> = cir
        .rows()
        .map(|(tid, cells)| {
            let mut m = Map::new();
            for (a, cell) in cells.iter().enumerate() {
                let v = match cell {
                    Cell::Certain(v) => Json::String(v.to_string()),
                    Cell::Uncertain(d) => Json::Object(
                        d.entries()
                            .iter()
                            .map(|(v, p)| (v.to_string(), Json::String(render_prob(p, format))))
                            .collect(),
                    ),
                };
                m.insert(schema.name(a).to_string(), v);
            }
            json!({ "tid": tid.0, "cells": m })
        })
        .collect();
    json!({ "attributes": attributes, "tuples": tuples })
}

/// Pretty-printed document text for `cir`.
pub fn write_cir(cir: &Cir, format: ProbFormat) -> String {
    let mut s = serde_json::to_string_pretty(&cir_to_json(cir, format)).expect("json rendering");
    s.push('\n');
    s
}
