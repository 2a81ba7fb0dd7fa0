//! Symmorphic crystallographic groups: catalog, reciprocal actions and
//! presentations of the reciprocal group.

mod point_group;
mod reciprocal;
mod spec;

pub use point_group::{validate_group, GroupReport, PointGroupAction};
pub use reciprocal::{reciprocal_action, semidirect_presentation, GroupPresentation, ReciprocalGroup, Word};
pub use spec::{
    catalog_lookup, catalog_names, catalog_summary, catalog_version, wallpaper_names, CatalogEntry,
    CatalogSummary, GeneratorEntry, SpaceGroupSpec,
};

use crate::exactlinalg::{exterior_power_matrix, IntMatrix};
use num_traits::{One, Signed};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CrystalError {
    #[error("unknown group {name:?}; valid names: {valid}")]
    UnknownGroup { name: String, valid: String },
    #[error("group {0:?} is not symmorphic")]
    NonSymmorphic(String),
    #[error("bad matrix {name}: {reason}")]
    BadMatrix { name: String, reason: String },
    #[error("generator {generator} does not preserve the lattice metric")]
    NotIsometry { generator: String },
    #[error("element list does not start with the identity")]
    MissingIdentity,
    #[error("product of elements {left} and {right} is not in the group")]
    NotClosed { left: usize, right: usize },
    #[error("element {element} has no inverse")]
    NoInverse { element: usize },
    #[error("table is not associative at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("generated group exceeds the size limit")]
    InfiniteGroup,
    #[error("image of the element list does not respect the multiplication table")]
    NotHomomorphism,
    #[error("relator {relator} names undeclared generator {generator}")]
    BadRelator { relator: usize, generator: usize },
    #[error("cannot present point group: {0}")]
    UnsupportedPresentation(String),
}

/// Inverse of a unimodular matrix via the adjugate, `None` if `|det| != 1`.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    let det = m.determinant().ok()?;
    if !det.abs().is_one() {
        return None;
    }
    let n = m.rows();
    if n == 0 {
        return Some(m.clone());
    }
    // adj(M)^T entries are the (n-1)-minors with checkerboard signs
    let minors = exterior_power_matrix(m, n - 1).ok()?;
    let mut inv = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // wedge basis of size n-1 omits index n-1-k at position k
            let c = &minors[(n - 1 - j, n - 1 - i)];
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            inv[(i, j)] = c * sign * &det;
        }
    }
    Some(inv)
}
