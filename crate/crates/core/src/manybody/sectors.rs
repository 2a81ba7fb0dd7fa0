use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{
    build_basis, build_hamiltonian, dense_eigen, translation_action, LatticeModel, ManyBodyBasis,
    ManyBodyError, SparseHermitian, TwistPoint,
};

/// One total-momentum block, `k_mu = 2π n_mu / L_mu`.
#[derive(Clone, Debug, Serialize)]
pub struct MomentumBlock {
    pub momentum: Vec<usize>,
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub hamiltonian: DMatrix<Complex64>,
}

impl MomentumBlock {
    pub fn k(&self, cells: &[usize]) -> Vec<f64> {
        self.momentum
            .iter()
            .zip(cells)
            .map(|(&n, &l)| 2.0 * PI * n as f64 / l as f64)
            .collect()
    }
}

/// Fails with the first translation-breaking term.
pub fn check_translation_invariance(model: &LatticeModel) -> Result<(), ManyBodyError> {
    if let Some((k, im)) = model.impurities.iter().enumerate().next() {
        return Err(ManyBodyError::SymmetryViolation(format!(
            "impurity {k} (orbital {}, cell {:?}, energy {}) breaks translation symmetry",
            im.orbital, im.cell, im.energy
        )));
    }
    Ok(())
}

fn multi_indices(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &l in sizes {
        out = out
            .into_iter()
            .flat_map(|p| (0..l).map(move |x| [p.clone(), vec![x]].concat()))
            .collect();
    }
    out
}

/// Orbit of each representative: `(state index, sign)` for every translation,
/// in row-major translation order.
fn orbits(model: &LatticeModel, basis: &ManyBodyBasis) -> Vec<Vec<(usize, f64)>> {
    let actions: Vec<Vec<(usize, f64)>> = (0..model.dim).map(|mu| translation_action(model, basis, mu)).collect();
    let shifts = multi_indices(&model.cells);
    let mut seen = vec![false; basis.dim()];
    let mut out = Vec::new();
    for rep in 0..basis.dim() {
        if seen[rep] {
            continue;
        }
        let orbit: Vec<(usize, f64)> = shifts
            .iter()
            .map(|a| {
                let (mut s, mut sign) = (rep, 1.0);
                for (mu, &n) in a.iter().enumerate() {
                    for _ in 0..n {
                        let (t, sg) = actions[mu][s];
                        s = t;
                        sign *= sg;
                    }
                }
                (s, sign)
            })
            .collect();
        for &(s, _) in &orbit {
            seen[s] = true;
        }
        out.push(orbit);
    }
    out
}

/// Projects the untwisted Hamiltonian onto total-momentum eigenspaces
/// (`T_a ψ = e^{ik·a} ψ`).
pub fn momentum_sectors(model: &LatticeModel) -> Result<Vec<MomentumBlock>, ManyBodyError> {
    check_translation_invariance(model)?;
    let basis = build_basis(model)?;
    let h = build_hamiltonian(model, &basis, &TwistPoint::zero(model.dim))?;
    let orbit_list = orbits(model, &basis);
    let shifts = multi_indices(&model.cells);
    let mut blocks = Vec::new();
    for momentum in multi_indices(&model.cells) {
        let k: Vec<f64> = momentum
            .iter()
            .zip(&model.cells)
            .map(|(&n, &l)| 2.0 * PI * n as f64 / l as f64)
            .collect();
        // sparse columns of the isometry V_k
        let mut columns: Vec<Vec<(usize, Complex64)>> = Vec::new();
        for orbit in &orbit_list {
            let mut acc: Vec<(usize, Complex64)> = Vec::new();
            for (a, &(s, sign)) in shifts.iter().zip(orbit) {
                let phase: f64 = a.iter().zip(&k).map(|(&x, &kk)| -(x as f64) * kk).sum();
                let c = Complex64::from_polar(sign, phase);
                match acc.iter_mut().find(|(t, _)| *t == s) {
                    Some((_, v)) => *v += c,
                    None => acc.push((s, c)),
                }
            }
            let norm = acc.iter().map(|(_, v)| v.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                acc.retain(|(_, v)| v.norm() > 1e-14);
                for (_, v) in &mut acc {
                    *v /= norm;
                }
                columns.push(acc);
            }
        }
        let hk = project(&h, &columns, basis.dim());
        let (eigenvalues, _) = dense_eigen(&hk);
        blocks.push(MomentumBlock {
            momentum,
            dim: columns.len(),
            eigenvalues,
            hamiltonian: hk,
        });
    }
    Ok(blocks)
}

/// `V† H V` for sparse orthonormal columns with disjoint supports.
fn project(h: &SparseHermitian, columns: &[Vec<(usize, Complex64)>], dim: usize) -> DMatrix<Complex64> {
    let n = columns.len();
    let mut owner = vec![usize::MAX; dim];
    let mut coef = vec![Complex64::new(0.0, 0.0); dim];
    for (j, col) in columns.iter().enumerate() {
        for &(s, v) in col {
            owner[s] = j;
            coef[s] = v;
        }
    }
    let mut out = DMatrix::zeros(n, n);
    for (j, col) in columns.iter().enumerate() {
        for &(c, vc) in col {
            // (H v)_r = sum_c H_rc v_c with H_rc = conj(H_cr)
            for (r, hcr) in h.row(c) {
                let i = owner[r];
                if i != usize::MAX {
                    out[(i, j)] += coef[r].conj() * hcr.conj() * vc;
                }
            }
        }
    }
    out
}
