//! Reference instances used by the examples, the tests and the CLI docs.
//!
//! `u1` is a room/specialist/time table with one uncertain column, `u2` a
//! business/spokesperson/location table with two.

use std::sync::Arc;

use crate::fd::FdSet;
use crate::model::{Cell, Cir, Distribution, Schema, TupleId, Value};
use crate::rational::parse_probability;

fn dist(entries: &[(&str, &str)]) -> Cell {
    Cell::Uncertain(
        Distribution::new(
            entries.iter().map(|(v, p)| (Value::new(v), parse_probability(p).unwrap())),
        )
        .unwrap(),
    )
}

fn val(v: &str) -> Cell {
    Cell::Certain(Value::new(v))
}

/// Specialists attending rooms.
pub fn u1() -> Cir {
    let schema = Arc::new(Schema::parse_names(&["room", "specialist?", "time"]).unwrap());
    Cir::new(
        schema,
        vec![
            (TupleId(1), vec![val("41"), dist(&[("Bart", "0.5"), ("Lisa", "0.5")]), val("5 PM")]),
            (TupleId(2), vec![val("163"), dist(&[("Bart", "0.7"), ("Lisa", "0.3")]), val("5 PM")]),
            (TupleId(3), vec![val("41"), dist(&[("Bart", "0.2"), ("Maggie", "0.8")]), val("5 PM")]),
        ],
    )
    .unwrap()
}

/// `specialist? time -> room`
pub fn u1_f1() -> FdSet {
    FdSet::parse(u1().schema().clone(), "specialist? time -> room").unwrap()
}

/// `specialist? time -> room; room time -> specialist?`
pub fn u1_f2() -> FdSet {
    FdSet::parse(u1().schema().clone(), "specialist? time -> room; room time -> specialist?")
        .unwrap()
}

/// Businesses with noisy spokespeople and headquarters.
pub fn u2() -> Cir {
    let schema =
        Arc::new(Schema::parse_names(&["business", "spokesperson?", "location?"]).unwrap());
    Cir::new(
        schema,
        vec![
            (
                TupleId(1),
                vec![
                    val("S. Propane"),
                    dist(&[("Mangione", "0.6"), ("Strickland", "0.4")]),
                    dist(&[("Arlen", "0.6"), ("McMaynerberry", "0.4")]),
                ],
            ),
            (
                TupleId(2),
                vec![
                    val("Mega Lo Mart"),
                    dist(&[("Mangione", "0.45"), ("Thatherton", "0.55")]),
                    dist(&[("Arlen", "0.5"), ("McMaynerberry", "0.5")]),
                ],
            ),
            (
                TupleId(3),
                vec![
                    val("Mega Lo Mart"),
                    dist(&[("Mangione", "0.4"), ("Buckley", "0.6")]),
                    dist(&[("Arlen", "0.55"), ("McMaynerberry", "0.45")]),
                ],
            ),
            (
                TupleId(4),
                vec![
                    val("Get In Get Out"),
                    dist(&[("Peggy", "1.0")]),
                    dist(&[("Arlen", "0.35"), ("McMaynerberry", "0.3"), ("Dallas", "0.35")]),
                ],
            ),
        ],
    )
    .unwrap()
}
