//! One-dimensional substitutions read off supertile boundaries.

mod cohomology;
mod language;
mod matrix;
mod poly;
mod roots;
mod substitution;

pub use cohomology::{bd_adjacencies, h1_report, stabilization, BdGraph, CohomologyReport, EIGEN_TOLERANCE};
pub use language::{occurs_in_language, two_letter_words};
pub use matrix::IntMatrix;
pub use poly::IntPoly;
pub use roots::{eigenvalues, Root};
pub use substitution::{Letter, Substitution, DEFAULT_WORD_BUDGET};
