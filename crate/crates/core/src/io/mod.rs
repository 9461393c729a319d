//! Text formats: the JSON CIR document, the FD DSL, DIMACS CNF and edge lists.

mod document;
mod dsl;
mod formats;

pub use document::{cir_to_json, parse_cir, write_cir, ParseError, ProbFormat};
pub use dsl::{parse_fds, DslError};
pub use formats::{parse_dimacs, parse_edge_list, write_dimacs, write_edge_list, FormatError};
