//! Drawing samples conditioned on consistency, one cell at a time.

use cirsolve::fixtures::u2;
use cirsolve::sampler::{conditional_samples, path_weight, CellOrder, LeftCertainBackend};
use cirsolve::rational::to_fraction_string;
use cirsolve::{probability, sample_probability, FdSet, SolveOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cir = u2();
    let fds = FdSet::parse(cir.schema().clone(), "business -> spokesperson?")?;
    let order = CellOrder::lexicographic(&cir);
    let total = probability(&cir, &fds, &SolveOptions::default())?.value;

    for (i, r) in conditional_samples(&cir, &fds, &LeftCertainBackend, 7, 3, &order)?.iter().enumerate() {
        let p = sample_probability(&cir, r)?;
        let w = path_weight(&cir, &fds, r, &LeftCertainBackend, &order)?;
        // The chance of drawing r is its share of the consistent mass.
        assert_eq!(w, &p / &total);
        println!("draw {i}: chance {}\n{r}", to_fraction_string(&w));
    }
    Ok(())
}
