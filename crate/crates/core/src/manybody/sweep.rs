use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    build_basis, build_hamiltonian, dense_eigen, ground_state, LatticeModel, ManyBodyBasis, ManyBodyError,
    SpectralSlice,
};

/// Boundary twist angles, reduced into `[0, 2π)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistPoint(Vec<f64>);

impl TwistPoint {
    pub fn new(angles: &[f64]) -> Self {
        Self(angles.iter().map(|a| a.rem_euclid(TAU)).collect())
    }

    /// Angles as given, without reduction. Used to check `θ` against `θ + 2π`.
    pub fn unreduced(angles: &[f64]) -> Self {
        Self(angles.to_vec())
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn angles(&self) -> &[f64] {
        &self.0
    }
}

/// Ground-state data on a regular twist grid, nodes in row-major order.
#[derive(Clone, Debug, Serialize)]
pub struct TwistField {
    pub grid: Vec<usize>,
    pub nodes: Vec<TwistPoint>,
    pub slices: Vec<SpectralSlice>,
    pub min_gap: f64,
}

impl TwistField {
    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.grid).fold(0, |acc, (&x, &n)| acc * n + x)
    }

    pub fn slice(&self, coords: &[usize]) -> &SpectralSlice {
        &self.slices[self.index(coords)]
    }
}

pub fn twist_grid(grid: &[usize]) -> Vec<TwistPoint> {
    let mut out: Vec<Vec<f64>> = vec![vec![]];
    for &n in grid {
        out = out
            .into_iter()
            .flat_map(|p| (0..n).map(move |i| [p.clone(), vec![2.0 * PI * i as f64 / n as f64]].concat()))
            .collect();
    }
    out.iter().map(|a| TwistPoint::new(a)).collect()
}

/// Lowest single-particle energy at twist `theta`.
pub fn lowest_single_particle_energy(model: &LatticeModel, theta: &TwistPoint) -> Result<f64, ManyBodyError> {
    let one = model.with_interaction_scale(0.0).with_particles(1)?;
    let basis = build_basis(&one)?;
    let h = build_hamiltonian(&one, &basis, theta)?;
    Ok(dense_eigen(&h.to_dense()).0[0])
}

fn node_slice(
    model: &LatticeModel,
    basis: &ManyBodyBasis,
    theta: &TwistPoint,
    tol: Option<f64>,
) -> Result<SpectralSlice, ManyBodyError> {
    let h = build_hamiltonian(model, basis, theta)?;
    let mut slice = ground_state(&h, tol)?;
    if model.n_particles == 0 {
        // The vacuum sector is one-dimensional; report the cost of adding a particle.
        slice.gap = lowest_single_particle_energy(model, theta)?;
    }
    Ok(slice)
}

pub fn sweep_twist_grid(model: &LatticeModel, grid: &[usize], tol: Option<f64>) -> Result<TwistField, ManyBodyError> {
    if grid.len() != model.dim {
        return Err(ManyBodyError::InvalidModel(format!(
            "grid has {} axes, model dimension is {}",
            grid.len(),
            model.dim
        )));
    }
    if grid.iter().any(|&n| n < 2) {
        return Err(ManyBodyError::InvalidModel("grid sizes must be at least 2".into()));
    }
    let basis = build_basis(model)?;
    let nodes = twist_grid(grid);
    let results: Vec<Result<SpectralSlice, ManyBodyError>> =
        nodes.par_iter().map(|t| node_slice(model, &basis, t, tol)).collect();
    let mut slices = Vec::with_capacity(nodes.len());
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => slices.push(s),
            Err(ManyBodyError::GapBelowThreshold { gap, tol }) => {
                return Err(ManyBodyError::GapAtNode {
                    node: k,
                    theta: nodes[k].angles().to_vec(),
                    gap,
                    tol,
                })
            }
            Err(e) => return Err(e),
        }
    }
    let min_gap = slices.iter().map(|s| s.gap).fold(f64::INFINITY, f64::min);
    Ok(TwistField {
        grid: grid.to_vec(),
        nodes,
        slices,
        min_gap,
    })
}
