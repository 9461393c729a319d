//! FD sets that split into independent components are solved part by part.

use std::sync::Arc;

use cirsolve::rational::ratio;
use cirsolve::{classify, most_probable, Cell, Cir, Distribution, FdSet, Problem, Schema, SolveOptions, TupleId, Value};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let schema = Arc::new(Schema::parse_names(&["A", "B?", "C", "D?", "E?"])?);
    // A matching part, a certain-left part and a free column.
    let fds = FdSet::parse(schema.clone(), "A <-> B?; C -> D?")?;
    let parts = fds.decompose();
    for part in &parts.components {
        println!("component: {part}");
    }
    println!("free: {}", schema.display_set(parts.free));

    let c = |v: &str| Cell::Certain(Value::new(v));
    let u = |a: &str, b: &str| {
        Distribution::new([(Value::new(a), ratio(2, 3)), (Value::new(b), ratio(1, 3))]).map(Cell::Uncertain)
    };
    let rows = (1..=4)
        .map(|i| {
            let a = format!("a{}", i % 2);
            let c_val = format!("c{}", i % 3);
            Ok((TupleId(i), vec![c(&a), u("x", "y")?, c(&c_val), u("p", "q")?, u("s", "t")?]))
        })
        .collect::<Result<Vec<_>, cirsolve::model::ModelError>>()?;
    let cir = Cir::new(schema, rows)?;

    println!("mpd plan: {:?}", classify(&fds).verdict(Problem::Mpd).plan.describe(cir.schema()));
    let solved = most_probable(&cir, &fds, &SolveOptions::default())?;
    match solved.value {
        Some(m) => println!("{}", m.relation),
        None => println!("no consistent sample"),
    }
    Ok(())
}
