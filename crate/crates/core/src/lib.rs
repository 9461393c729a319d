//! Most probable database, probability of consistency and conditional
//! sampling for cell-independent relations under functional dependencies.

pub mod classify;
pub mod cli;
pub mod engine;
pub mod error;
pub mod exact;
pub mod fd;
pub mod fixtures;
pub mod gadgets;
pub mod io;
pub mod model;
pub mod poly;
pub mod rational;
pub mod sampler;
pub mod union_find;

pub use classify::{classify, Classification, Complexity, Problem, Theorem};
pub use engine::{most_probable, possibly_consistent, probability, SolveOptions, Solver};
pub use error::SolveError;
pub use exact::{bnb_mpd, exact_prob, oracle_enumerate, ExactOptions, OracleReport};
pub use fd::{Fd, FdSet};
pub use model::{sample_probability, Cell, Cir, Distribution, Relation, Schema, TupleId, Value};
pub use poly::Mpd;
pub use rational::Rational;
