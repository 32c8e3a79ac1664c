//! Fault lines, discrepancy, offsets across fault lines and shear witnesses.

mod arith;
mod catalog;
mod discrepancy;
mod fault;
mod offsets;

pub use arith::{gcd_report, GcdReport};
pub use catalog::{build_window_catalog, shear_witness, window, Provenance, WindowCatalog, Witness, WitnessResult};
pub use discrepancy::{
    discrepancy, letter_widths, log_slope, synthetic_discrepancy, synthetic_max, DiscrepancyProfile,
};
pub use fault::{find_fault_lines, FaultLine};
pub use offsets::{offsets, Junction, OffsetIndex, OffsetSet};
