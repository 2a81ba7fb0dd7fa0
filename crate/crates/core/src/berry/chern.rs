use std::f64::consts::TAU;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{overlap_link, BerryError, BundleSample, InvariantReport, PlaquetteRecord, DEFAULT_ADMISSIBILITY_LIMIT};
use crate::manybody::{bands, sweep_twist_grid, LatticeModel};

/// Phases of the elementary plaquettes of a 2D torus sample in row-major node
/// order: `arg U_0(n) U_1(n+e_0) U_0(n+e_1)^* U_1(n)^*`.
pub fn plaquette_phases(sample: &BundleSample) -> Result<Vec<f64>, BerryError> {
    if sample.shape.len() != 2 || !sample.identifications.is_empty() {
        return Err(BerryError::InvalidSample("lattice Chern numbers need a 2D torus sample".into()));
    }
    let (n0, n1) = (sample.shape[0], sample.shape[1]);
    (0..n0 * n1)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n1, k % n1);
            let u0 = overlap_link(sample, &[i, j], 0)?;
            let u1 = overlap_link(sample, &[(i + 1) % n0, j], 1)?;
            let u2 = overlap_link(sample, &[i, (j + 1) % n1], 0)?;
            let u3 = overlap_link(sample, &[i, j], 1)?;
            Ok((u0 * u1 * u2.conj() * u3.conj()).arg())
        })
        .collect()
}

pub fn fhs_chern(sample: &BundleSample) -> Result<InvariantReport, BerryError> {
    fhs_chern_with_limit(sample, DEFAULT_ADMISSIBILITY_LIMIT)
}

pub fn fhs_chern_with_limit(sample: &BundleSample, limit: f64) -> Result<InvariantReport, BerryError> {
    let phases = plaquette_phases(sample)?;
    let n1 = sample.shape[1];
    let mut worst: f64 = 0.0;
    for (k, &p) in phases.iter().enumerate() {
        if p.abs() >= limit {
            return Err(BerryError::Inadmissible {
                at: format!("({}, {})", k / n1, k % n1),
                phase: p,
                limit,
            });
        }
        worst = worst.max(p.abs());
    }
    // Sequential sum keeps the report bit-identical across thread counts.
    let raw = phases.iter().sum::<f64>() / TAU;
    let value = raw.round();
    Ok(InvariantReport {
        invariant: "chern".into(),
        value,
        quantization_distance: (raw - value).abs(),
        admissibility_margin: limit - worst,
        grid: sample.shape.clone(),
        model_hash: None,
        plaquettes: phases
            .iter()
            .enumerate()
            .map(|(k, &phase)| PlaquetteRecord {
                face: String::new(),
                node: vec![k / n1, k % n1],
                phase,
            })
            .collect(),
    })
}

/// Lowest `filled` Bloch bands of a 2D model on an `n0 x n1` momentum grid.
pub fn band_sample(model: &LatticeModel, filled: usize, grid: [usize; 2]) -> Result<BundleSample, BerryError> {
    if model.dim != 2 || filled == 0 || filled > model.orbitals {
        return Err(BerryError::InvalidSample(format!(
            "need a 2D model and 1..={} filled bands",
            model.orbitals
        )));
    }
    let mut frames = Vec::with_capacity(grid[0] * grid[1]);
    for i in 0..grid[0] {
        for j in 0..grid[1] {
            let kappa = [i as f64 / grid[0] as f64, j as f64 / grid[1] as f64];
            let (e, v) = bands(model, &kappa);
            if filled < e.len() && e[filled] - e[filled - 1] < 1e-8 {
                return Err(BerryError::BandGap {
                    node: frames.len(),
                    gap: e[filled] - e[filled - 1],
                });
            }
            frames.push((0..filled).map(|b| v.column(b).into_owned()).collect());
        }
    }
    BundleSample::torus(grid.to_vec(), frames)
}

/// Chern number of the lowest `filled` bands.
pub fn band_chern(model: &LatticeModel, filled: usize, grid: [usize; 2]) -> Result<InvariantReport, BerryError> {
    let mut r = fhs_chern(&band_sample(model, filled, grid)?)?;
    r.model_hash = Some(model.content_hash());
    Ok(r)
}

/// Many-body ground states over the twist torus and the smallest gap on the
/// grid; requires a unique ground state at every node.
pub fn manybody_sample(
    model: &LatticeModel,
    grid: [usize; 2],
    tol: Option<f64>,
) -> Result<(BundleSample, f64), BerryError> {
    let field = sweep_twist_grid(model, &grid, tol)?;
    let min_gap = field.min_gap;
    let mut frames: Vec<Vec<DVector<Complex64>>> = Vec::with_capacity(field.slices.len());
    for (node, s) in field.slices.into_iter().enumerate() {
        if s.degeneracy != 1 {
            return Err(BerryError::Degenerate {
                node,
                degeneracy: s.degeneracy,
            });
        }
        frames.push(s.vectors.into_iter().take(1).collect());
    }
    Ok((BundleSample::torus(grid.to_vec(), frames)?, min_gap))
}

pub fn manybody_chern(model: &LatticeModel, grid: [usize; 2], tol: Option<f64>) -> Result<InvariantReport, BerryError> {
    let mut r = fhs_chern(&manybody_sample(model, grid, tol)?.0)?;
    r.model_hash = Some(model.content_hash());
    Ok(r)
}
