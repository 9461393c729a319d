//! A key on both sides of an uncertain column: the most probable database is
//! a maximum weight matching.

use std::sync::Arc;

use cirsolve::rational::{ratio, to_fraction_string};
use cirsolve::{most_probable, oracle_enumerate, Cell, Cir, Distribution, FdSet, Schema, SolveOptions, TupleId, Value};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let schema = Arc::new(Schema::parse_names(&["worker", "week", "shift?"])?);
    let shift = |entries: &[(&str, i64)]| {
        Distribution::new(entries.iter().map(|&(v, w)| (Value::new(v), ratio(w, 10)))).map(Cell::Uncertain)
    };
    let rows = vec![
        (TupleId(1), vec![Cell::Certain(Value::new("ann")), Cell::Certain(Value::new("w1")), shift(&[("mon", 6), ("tue", 4)])?]),
        (TupleId(2), vec![Cell::Certain(Value::new("bob")), Cell::Certain(Value::new("w1")), shift(&[("mon", 7), ("wed", 3)])?]),
        (TupleId(3), vec![Cell::Certain(Value::new("cat")), Cell::Certain(Value::new("w1")), shift(&[("mon", 9), ("tue", 1)])?]),
    ];
    let cir = Cir::new(schema.clone(), rows)?;
    // One shift per worker and week, and one worker per shift and week.
    let fds = FdSet::parse(schema, "worker week <-> shift? week")?;

    let solved = most_probable(&cir, &fds, &SolveOptions::default())?;
    let mpd = solved.value.expect("a perfect assignment exists");
    println!("steps: {:?}", solved.steps);
    println!("{}probability {}", mpd.relation, to_fraction_string(&mpd.probability));

    let oracle = oracle_enumerate(&cir, &fds)?;
    assert_eq!(oracle.max.map(|m| m.probability), Some(mpd.probability));
    println!("checked against {} enumerated samples", oracle.worlds);
    Ok(())
}
