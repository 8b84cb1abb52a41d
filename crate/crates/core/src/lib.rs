//! Exact-arithmetic computer algebra for curved differential graded Lie
//! algebras and Lie algebroids, and for the semiinfinite cohomology of
//! weight-graded Tate-type Lie algebras with discrete coefficients.
//!
//! Everything is computed over arbitrary-precision rationals on weight-
//! truncated bases; truncation is loud (never silently wrong), and all
//! structural identities (`d^2 = 0`, Leibniz rules, curvature identities)
//! are machine-verified rather than assumed.

pub mod error;
pub mod graded;
pub mod lie;
pub mod linalg;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use graded::{Basis, ExtMonomial, GenId, LinComb, SpaceTag};
pub use lie::{LieSpec, ModuleSpec, Side, Truncation};
pub use linalg::{cohomology_dim, SparseMatrix};
pub use report::Report;
pub use scalar::Scalar;
