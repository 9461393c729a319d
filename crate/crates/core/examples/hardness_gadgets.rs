//! Reductions from SAT and from counting perfect matchings, run on small
//! inputs and checked by the solvers.

use cirsolve::gadgets::{
    gadget_nm_sat, gadget_perfect_matching, gadget_sat_matching, nm_sat_fds, perfect_matching_fds,
    sat_matching_fds, BipartiteGraph, CnfFormula,
};
use cirsolve::{possibly_consistent, probability, SolveOptions, Solver};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let exact = SolveOptions::with_solver(Solver::Exact);

    // (x1 or x2) and (not x1) and (not x2)
    let phi = CnfFormula::new(2, vec![vec![1, 2], vec![-1], vec![-2]])?;
    let cir = gadget_nm_sat(&phi)?;
    let witness = possibly_consistent(&cir, &nm_sat_fds(&cir), &exact)?.value;
    println!("non-mixed formula satisfiable: {}", witness.is_some());

    let psi = CnfFormula::new(3, vec![vec![1, -2], vec![2, 3], vec![-1, -3]])?;
    let cir = gadget_sat_matching(&psi)?;
    let witness = possibly_consistent(&cir, &sat_matching_fds(&cir), &exact)?.value;
    println!("mixed formula satisfiable: {}", witness.is_some());

    // K_{3,3} minus one edge has 4 perfect matchings.
    let edges = (0..3).flat_map(|u| (0..3).map(move |v| (u, v))).filter(|&e| e != (0, 0));
    let g = BipartiteGraph::new(3, 3, edges)?;
    let (cir, scale) = gadget_perfect_matching(&g)?;
    let pr = probability(&cir, &perfect_matching_fds(&cir), &exact)?.value;
    println!("perfect matchings: {}", pr * num_rational::BigRational::from_integer(scale.into()));
    Ok(())
}
