//! Specialists and rooms: the most probable consistent table and the chance
//! that a random table is consistent.

use cirsolve::fixtures::{u1, u1_f1, u1_f2};
use cirsolve::rational::to_fraction_string;
use cirsolve::{most_probable, probability, SolveOptions, Solver};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cir = u1();
    let auto = SolveOptions::default();

    for fds in [u1_f1(), u1_f2()] {
        println!("fds: {fds}");
        let mpd = most_probable(&cir, &fds, &auto)?;
        match &mpd.value {
            Some(m) => println!("mpd ({}) via {:?}\n{}", to_fraction_string(&m.probability), mpd.steps, m.relation),
            None => println!("no consistent sample"),
        }
        // The probability is hard in general; search is fine at this size.
        let pr = probability(&cir, &fds, &SolveOptions::with_solver(Solver::Exact))?;
        println!("Pr = {}\n", to_fraction_string(&pr.value));
    }
    Ok(())
}
