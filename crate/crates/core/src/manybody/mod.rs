//! Finite-lattice many-body Hamiltonians: Fock bases, twisted boundary
//! conditions, total-momentum blocks and ground-state sweeps.

mod basis;
mod bloch;
mod eigen;
mod hamiltonian;
mod model;
mod operator;
mod sectors;
mod sweep;

pub use basis::{build_basis, ManyBodyBasis};
pub use bloch::{bands, bloch_hamiltonian, orbital_symmetry, validate_symmetry, OrbitalSymmetry};
pub use eigen::{dense_eigen, dense_spectrum, ground_state, SpectralSlice, DENSE_LIMIT, DEFAULT_RELATIVE_TOL};
pub use hamiltonian::{build_hamiltonian, fermion_hop_sign, translate_mode, translation_action};
pub use model::{
    FluxEntry, Hopping, HoppingEntry, Impurity, ImpurityEntry, Interaction, InteractionEntry, LatticeModel,
    ModelFile, ParticleStatistics, Phase, StatisticsField, SymmetryData, SymmetryEntry,
};
pub use operator::SparseHermitian;
pub use sectors::{check_translation_invariance, momentum_sectors, MomentumBlock};
pub use sweep::{lowest_single_particle_energy, sweep_twist_grid, twist_grid, TwistField, TwistPoint};

use crate::crystal::CrystalError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ManyBodyError {
    #[error("model parse error: {0}")]
    Parse(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("non-Hermitian term set: {0}")]
    NonHermitian(String),
    #[error("{n} particles exceed the capacity of {capacity}")]
    TooManyParticles { n: usize, capacity: usize },
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),
    #[error("gap {gap:.3e} below threshold {tol:.3e}")]
    GapBelowThreshold { gap: f64, tol: f64 },
    #[error("gap {gap:.3e} below threshold {tol:.3e} at twist node {node} (theta = {theta:?})")]
    GapAtNode {
        node: usize,
        theta: Vec<f64>,
        gap: f64,
        tol: f64,
    },
    #[error("operator has dimension zero")]
    EmptySpace,
    #[error("iterative eigensolver did not converge: {0}")]
    NoConvergence(String),
    #[error(transparent)]
    Crystal(#[from] CrystalError),
}
