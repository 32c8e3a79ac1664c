//! The `tilescope` command line: JSON reports, SVG rendering and the
//! acceptance suite, on top of `tilescope-core`.

pub mod acceptance;
pub mod cli;
pub mod commands;
pub mod render;
pub mod report;

pub use cli::run;
