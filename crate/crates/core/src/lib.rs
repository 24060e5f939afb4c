//! Simplicial Chern-Weil theory for matrix Lie groups.
//!
//! The crate builds the nerves `BG` and `EG` of a matrix Lie group, evaluates
//! differential forms on `Δⁿ × Gᵐ` pointwise, constructs the canonical
//! simplicial connection on `EG → BG` and the Shulman cocycle of an invariant
//! polynomial, and compares the descended first Pontryagin cocycle with the
//! 2-shifted symplectic form on `BG`.
//!
//! Everything is numerical and pointwise: identities are checked at seeded
//! sample points and tangent vectors, and the verification suites collect
//! their residuals into a [`report::VerificationReport`].

pub mod forms;
pub mod invariants;
pub mod liegroup;
pub mod matrix;
pub mod report;
pub mod sampling;
pub mod shulman;
pub mod simplicial;
pub mod suites;
pub mod symplectic;

pub use forms::{BaseSpace, DifferentialForm, FormValue, Point, Tangent, TotElement, ValueType};
pub use invariants::InvariantPolynomial;
pub use liegroup::{GroupFamily, MatrixGroup};
pub use matrix::CMat;
pub use report::{CheckRecord, VerificationReport};
pub use symplectic::QuadraticPairing;

/// Version string echoed into every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
