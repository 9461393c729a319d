//! Polynomial-time solvers for the tractable classes.

mod combine;
mod left_certain;
mod matching;
mod unary;

pub use combine::{combine_solutions, ComponentSolution, Mpd};
pub use left_certain::{prob_left_certain, solve_left_certain};
pub use matching::solve_matching;
pub use unary::solve_unary_tractable;
