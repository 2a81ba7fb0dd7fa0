use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::crystal::{catalog_lookup, reciprocal_action, ReciprocalGroup};

use super::{dense_eigen, LatticeModel, ManyBodyError};

/// Orbital-space Bloch Hamiltonian in the periodic gauge, `kappa` in units of
/// the reciprocal basis: `H_ij(κ) = Σ t e^{2πi κ·d} + δ_ij ε_i`.
pub fn bloch_hamiltonian(model: &LatticeModel, kappa: &[f64]) -> DMatrix<Complex64> {
    let n = model.orbitals;
    let mut h = DMatrix::zeros(n, n);
    for h_ in &model.hoppings {
        let phase: f64 = h_.d.iter().zip(kappa).map(|(&d, &k)| d as f64 * k).sum();
        h[(h_.i, h_.j)] += h_.t * Complex64::from_polar(1.0, TAU * phase);
    }
    for (i, &e) in model.onsite.iter().enumerate() {
        h[(i, i)] += e;
    }
    h
}

/// Band energies and eigenvectors (columns) at `kappa`.
pub fn bands(model: &LatticeModel, kappa: &[f64]) -> (Vec<f64>, DMatrix<Complex64>) {
    dense_eigen(&bloch_hamiltonian(model, kappa))
}

/// Point-group data for a symmetric model: the reciprocal group and the
/// orbital matrix `D_g` of every element, indexed like the group.
#[derive(Clone, Debug)]
pub struct OrbitalSymmetry {
    pub group: ReciprocalGroup,
    pub reps: Vec<DMatrix<Complex64>>,
}

impl OrbitalSymmetry {
    pub fn rep_of(&self, generator: &str) -> Option<&DMatrix<Complex64>> {
        let names = self.group.action.generator_names();
        let slot = names.iter().position(|n| n == generator)?;
        Some(&self.reps[self.group.action.generators()[slot]])
    }

    /// Reciprocal action of element `g` on fractional momentum coordinates.
    pub fn act(&self, g: usize, kappa: &[f64]) -> Vec<f64> {
        let m = self.group.action.element(g);
        (0..kappa.len())
            .map(|i| {
                (0..kappa.len())
                    .map(|j| i64::try_from(&m[(i, j)]).expect("small entries") as f64 * kappa[j])
                    .sum()
            })
            .collect()
    }
}

pub fn orbital_symmetry(model: &LatticeModel) -> Result<OrbitalSymmetry, ManyBodyError> {
    let sym = model
        .symmetry
        .as_ref()
        .ok_or_else(|| ManyBodyError::SymmetryViolation("model declares no point-group symmetry".into()))?;
    let spec = catalog_lookup(&sym.group)?;
    if spec.dim() != model.dim {
        return Err(ManyBodyError::SymmetryViolation(format!(
            "group {} has dimension {}, model has {}",
            sym.group,
            spec.dim(),
            model.dim
        )));
    }
    let group = reciprocal_action(&spec)?;
    let names = group.action.generator_names().to_vec();
    for name in sym.reps.keys() {
        if !names.contains(name) {
            return Err(ManyBodyError::SymmetryViolation(format!(
                "rep given for unknown generator {name} of {}",
                sym.group
            )));
        }
    }
    let gen_reps: Vec<DMatrix<Complex64>> = names
        .iter()
        .map(|n| {
            let rows = sym.reps.get(n).ok_or_else(|| {
                ManyBodyError::SymmetryViolation(format!("missing orbital rep for generator {n}"))
            })?;
            Ok(DMatrix::from_fn(model.orbitals, model.orbitals, |i, j| rows[i][j]))
        })
        .collect::<Result<_, ManyBodyError>>()?;
    let id = DMatrix::identity(model.orbitals, model.orbitals);
    for (n, d) in names.iter().zip(&gen_reps) {
        if (d.adjoint() * d - &id).norm() > 1e-10 {
            return Err(ManyBodyError::SymmetryViolation(format!("rep of {n} is not unitary")));
        }
    }
    let reps = group
        .action
        .words()
        .iter()
        .map(|w| w.iter().fold(id.clone(), |acc, &slot| acc * &gen_reps[slot]))
        .collect();
    Ok(OrbitalSymmetry { group, reps })
}

/// Deterministic sample momenta for symmetry checks.
fn sample_momenta(dim: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|s| {
            (0..dim)
                .map(|mu| ((s * 7 + mu * 3 + 1) as f64 * 0.618_033_988_75).fract())
                .collect()
        })
        .collect()
}

/// Checks `H(g·κ) = D_g H(κ) D_g†` for every element at sample momenta and
/// returns the worst deviation.
pub fn validate_symmetry(model: &LatticeModel) -> Result<f64, ManyBodyError> {
    let sym = orbital_symmetry(model)?;
    let mut worst: f64 = 0.0;
    for kappa in sample_momenta(model.dim, 12) {
        let hk = bloch_hamiltonian(model, &kappa);
        for g in 0..sym.group.action.order() {
            let d = &sym.reps[g];
            let lhs = bloch_hamiltonian(model, &sym.act(g, &kappa));
            let dev = (lhs - d * &hk * d.adjoint()).norm();
            if dev > 1e-10 {
                return Err(ManyBodyError::SymmetryViolation(format!(
                    "Bloch Hamiltonian breaks element {g} of {} (deviation {dev:.3e})",
                    sym.group.spec.name()
                )));
            }
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}
