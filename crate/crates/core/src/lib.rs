//! Polar codes from kernels built on pointed algebraic curves.
//!
//! The crate covers finite-field arithmetic, curve data (rational and
//! Hermitian curves plus user-supplied ones), kernel construction and
//! analysis, discrete memoryless channels, successive-cancellation
//! polarization and the algebraic description of the resulting codes.

pub mod error;
pub mod galois;
pub mod linalg;
pub mod curve;
pub mod kernel;
pub mod channel;
pub mod codeset;
pub mod polarization;

pub use error::{Error, Result};
pub use galois::{FieldDescriptor, FieldElement, FiniteField};
pub use linalg::Matrix;
