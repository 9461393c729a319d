//! Probability of consistency with certain left sides, computed by the
//! grouped formula, and the same number by search and enumeration.

use cirsolve::fixtures::u2;
use cirsolve::rational::{to_decimal_string, to_fraction_string};
use cirsolve::{probability, FdSet, SolveOptions, Solver};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cir = u2();
    let fds = FdSet::parse(cir.schema().clone(), "business -> spokesperson?")?;

    for solver in [Solver::Poly, Solver::Exact, Solver::Oracle] {
        let pr = probability(&cir, &fds, &SolveOptions::with_solver(solver))?;
        println!(
            "{:<7} {} = {} {:?}",
            solver.name(),
            to_fraction_string(&pr.value),
            to_decimal_string(&pr.value, 6),
            pr.steps
        );
    }
    Ok(())
}
