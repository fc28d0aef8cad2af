//! Exact minimum multicut for graphs cellularly embedded on a surface of
//! fixed Euler genus with a fixed number of terminals.
//!
//! The pipeline cuts the surface open along a cut graph through the
//! terminals, enumerates the combinatorial ways a multicut dual can meet that
//! cut graph, and for every valid pattern draws the cheapest dual with a
//! dynamic program over a path decomposition.

pub mod crossmetric;
pub mod cutgraph;
pub mod dp;
pub mod embed;
pub mod error;
pub mod generate;
pub mod gmap;
pub mod homotopy;
pub mod io;
pub mod oracle;
pub mod solve;
pub mod topology;

pub use embed::{trace_faces, EmbeddedGraph, FaceStructure};
pub use error::{Error, Result};
pub use io::{parse_instance, render_result, Format};
pub use oracle::MulticutResult;
pub use solve::{solve_multicut, DpMode, Solution, SolverConfig};
