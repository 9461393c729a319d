//! Reading a relation document and an FD file from disk, then writing the
//! relation back out with decimal probabilities.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use cirsolve::io::{parse_cir, parse_fds, write_cir, ProbFormat};
use cirsolve::{classify, Problem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let cir = parse_cir(&fs::read_to_string(data.join("u1.json"))?)?;
    let fds = parse_fds(&fs::read_to_string(data.join("u1_f2.fds"))?, Arc::clone(cir.schema()))?;

    println!("{} tuples over {:?}", cir.len(), cir.schema().attributes().iter().map(|a| &a.name).collect::<Vec<_>>());
    println!("mpd is {}", classify(&fds).verdict(Problem::Mpd).complexity);
    println!("{}", write_cir(&cir, ProbFormat::Decimal));
    Ok(())
}
