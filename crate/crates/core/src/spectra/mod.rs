//! Pattern-equivariant edge cochains, return vectors, spatial averages and
//! pseudo-eigenvalue scans.

mod average;
mod cochain;
mod occurrences;
mod scan;

pub use average::{integer_multiplier_lattice, integrality_check, rs_average, IntegralityReport, IntegralityViolation, RsAverage};
pub use cochain::{edge_pattern, integrate, pattern_hash, CochainKind, CochainSpec, Direction, Edge};
pub use occurrences::{occurrences, return_vectors, ReturnVectorSet, Template};
pub use scan::{spectrum_scan, SpectrumScan};
