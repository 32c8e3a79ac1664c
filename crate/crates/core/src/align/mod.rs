//! Alignment graphs of supertiles and the lattice paths they induce.

mod graph;
mod path;

pub use graph::{alignment_graph, connectivity, AlignEdge, AlignmentGraph, Connectivity, Contact};
pub use path::{aligned_path, displacement_identity_check, AlignedPath, DisplacementReport, PathTree};
