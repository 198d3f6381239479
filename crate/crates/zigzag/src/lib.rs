//! Exact label oracle for the categorical braid action.
//!
//! `B_n`-style words act on the triangulated category generated by the
//! spherical projectives `P_1..P_n` of the zig-zag algebra through spherical
//! twists. Objects are twisted complexes with exact rational coefficients;
//! after Gaussian elimination the number of summands of each `P_i` is the
//! Jordan–Hölder multiplicity used as a regression target.
//!
//! Grading and cone conventions are documented in [`complex`].

pub mod algebra;
pub mod complex;
pub mod multiplicity;
pub mod twist;

pub use algebra::{compose_paths, hom_basis, BasisPath};
pub use complex::{Coeff, Complex, MorEntry, ProjSummand};
pub use multiplicity::{graded_multiplicities, jh_multiplicities, GradedCount, JHVector};
pub use twist::{act, apply_braid_word, braid_image, twist, Composition};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZigzagError {
    #[error("vertex {vertex} out of range 1..={n}")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("twist sign must be +1 or -1, got {0}")]
    InvalidSign(i8),
    #[error("invalid braid word: {0}")]
    InvalidWord(String),
    #[error("complex invariant violated: {0}")]
    InvariantViolation(String),
}

/// `P_i` as a complex; shorthand for [`Complex::projective`].
pub fn projective_object(n: usize, vertex: usize) -> Result<Complex, ZigzagError> {
    Complex::projective(n, vertex)
}

/// Minimal homotopy-equivalent model; shorthand for [`Complex::minimize`].
pub fn minimize(x: &Complex) -> Complex {
    x.minimize()
}
