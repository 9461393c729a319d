//! Complexity verdicts for a handful of FD sets.

use std::sync::Arc;

use cirsolve::{classify, FdSet, Schema};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let schema = Arc::new(Schema::parse_names(&["A", "B?", "C", "D?"])?);
    let sets = [
        "A -> B?",
        "A C -> B?; C -> D?",
        "A <-> B?",
        "A C <-> B? D?",
        "B? -> C",
        "A -> B?; B? -> C",
        "B? -> D?; D? -> A",
    ];
    for text in sets {
        let fds = FdSet::parse(schema.clone(), text)?;
        println!("{}", classify(&fds));
    }
    Ok(())
}
