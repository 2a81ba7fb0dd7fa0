//! Exact integer linear algebra over arbitrary-precision integers.

mod exterior;
mod group;
mod matrix;
mod smith;

pub use exterior::{exterior_power_matrix, wedge_basis};
pub use group::FinAbGroup;
pub use matrix::IntMatrix;
pub use smith::{cokernel, kernel_basis, smith_normal_form, subquotient, SmithForm};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("entry count {got} does not match shape ({expected} expected)")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("incompatible dimensions {left:?} and {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("exterior degree {q} out of range for dimension {dim}")]
    DegreeOutOfRange { q: usize, dim: usize },
    #[error("cannot parse group {0:?}")]
    GroupParse(String),
}
