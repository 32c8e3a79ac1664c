//! Exact construction and verification tools for hierarchical fusion tilings.
//!
//! The crate is organised around five areas:
//!
//! * [`fusion`]: rule files, exact supertile sizes, supertile patches with
//!   their decomposition trees, exact-cover validation and the axis-swap
//!   involution.
//! * [`subst`]: one-dimensional substitutions read off supertile boundaries,
//!   integer matrices and polynomials, certified eigenvalues and the
//!   Barge–Diamond computation of `H^1`.
//! * [`shear`]: fault lines, discrepancy profiles, offsets across fault lines
//!   and finite shear witnesses.
//! * [`spectra`]: pattern-equivariant edge cochains, path integrals,
//!   Ruelle–Sullivan averages, return vectors and pseudo-eigenvalue scans.
//! * [`align`]: alignment graphs of supertiles and aligned paths.
//!
//! Geometry and combinatorics use exact integers throughout. Cochain values
//! and spectral scans are generic over a [`Scalar`] / [`num_traits::Float`]
//! type; the aliases below fix the usual choices.

pub mod align;
pub mod bundled;
mod error;
pub mod fusion;
pub mod scalar;
pub mod shear;
pub mod spectra;
pub mod subst;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact rational scalar used for cochain values.
pub type Rational = num_rational::BigRational;

/// Small exact rational; fast, but limited to `i64` numerators/denominators.
pub type Rational64 = num_rational::Rational64;

/// Edge cochain with exact rational values.
pub type Cochain = spectra::CochainSpec<Rational>;

/// Edge cochain with `f64` values.
pub type FloatCochain = spectra::CochainSpec<f64>;

/// Pseudo-eigenvalue scan in double precision.
pub type Scan = spectra::SpectrumScan<f64>;

/// Certified polynomial root in double precision.
pub type Eigenvalue = subst::Root<f64>;

/// Ruelle–Sullivan estimate with exact rational components.
pub type RsEstimate = spectra::RsAverage<Rational>;
