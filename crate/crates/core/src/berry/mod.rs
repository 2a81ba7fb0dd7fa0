//! Gauge-invariant invariants of sampled ground-state bundles: lattice Chern
//! numbers from link variables, Wilson-loop holonomies, and the Z_2 torsion
//! invariant on a quotient fundamental domain.

mod chern;
mod domain;
mod holonomy;
mod report;
mod sample;

pub use chern::{
    band_chern, band_sample, fhs_chern, fhs_chern_with_limit, manybody_chern, manybody_sample, plaquette_phases,
};
pub use domain::{f222_domain, f222_torsion, QuotientDomain, LoopStart};
pub use holonomy::{torsion_invariant, torsion_invariant_with_limit, wilson_holonomy, ClosedPath, PathStep, Plaquette, Surface};
pub use report::{InvariantReport, PlaquetteRecord};
pub use sample::{overlap_link, BundleSample, Identification, DEFAULT_LINK_FLOOR, DEFAULT_OVERLAP_FLOOR};

use crate::manybody::ManyBodyError;

/// Default bound on plaquette phases; a plaquette at the bound is ambiguous.
pub const DEFAULT_ADMISSIBILITY_LIMIT: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BerryError {
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    #[error("mesh too coarse: overlap {overlap:.3e} between nodes {from} and {to} is below the floor {floor}")]
    MeshTooCoarse { from: usize, to: usize, overlap: f64, floor: f64 },
    #[error("inconsistent sewing at {label}: overlap {overlap:.3e} below the floor {floor}")]
    InconsistentSewing { label: String, overlap: f64, floor: f64 },
    #[error("inadmissible plaquette at {at}: phase {phase:.6} reaches the limit {limit:.6}; refine the mesh")]
    Inadmissible { at: String, phase: f64, limit: f64 },
    #[error("path is not closed: {0}")]
    OpenPath(String),
    #[error("degenerate ground state (m = {degeneracy}) at twist node {node}; use the determinant-line sample")]
    Degenerate { node: usize, degeneracy: usize },
    #[error("band gap {gap:.3e} closes at momentum node {node}")]
    BandGap { node: usize, gap: f64 },
    #[error("unsupported geometry: {0}")]
    Geometry(String),
    #[error(transparent)]
    ManyBody(#[from] ManyBodyError),
}
