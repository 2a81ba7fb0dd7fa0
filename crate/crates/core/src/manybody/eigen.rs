use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use super::{ManyBodyError, SparseHermitian};

/// Below this dimension the full dense eigensolver is used.
pub const DENSE_LIMIT: usize = 2000;
/// Default relative degeneracy tolerance (times the spectral width).
pub const DEFAULT_RELATIVE_TOL: f64 = 1e-8;
/// Extra levels computed beyond the ground cluster.
const EXTRA_LEVELS: usize = 3;

/// Low-lying eigendata of one operator.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralSlice {
    /// Lowest eigenvalues, ascending (at least the cluster plus one level
    /// when one exists).
    pub energies: Vec<f64>,
    /// Orthonormal ground-space basis, `degeneracy` vectors.
    #[serde(skip)]
    pub vectors: Vec<DVector<Complex64>>,
    pub degeneracy: usize,
    /// `E_m - E_{m-1}`; infinite when nothing lies above the cluster.
    pub gap: f64,
    /// Degeneracy tolerance actually used.
    pub tol: f64,
}

impl SpectralSlice {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }
}

/// All eigenpairs of a Hermitian matrix, ascending.
pub fn dense_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

pub fn dense_spectrum(h: &SparseHermitian) -> Vec<f64> {
    dense_eigen(&h.to_dense()).0
}

fn cluster(energies: &[f64], tol: f64) -> usize {
    energies.iter().take_while(|&&e| e - energies[0] <= tol).count()
}

/// Ground space and gap. `tol` defaults to `1e-8` times the spectral width.
pub fn ground_state(h: &SparseHermitian, tol: Option<f64>) -> Result<SpectralSlice, ManyBodyError> {
    let n = h.dim();
    if n == 0 {
        return Err(ManyBodyError::EmptySpace);
    }
    if let Some(t) = tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(ManyBodyError::InvalidModel(format!("tolerance must be finite and non-negative, got {t}")));
        }
    }
    let (energies, vectors, width) = if n < DENSE_LIMIT {
        let (vals, vecs) = dense_eigen(&h.to_dense());
        let width = vals[n - 1] - vals[0];
        let tol_v = tol.unwrap_or(DEFAULT_RELATIVE_TOL * width);
        let m = cluster(&vals, tol_v);
        let keep = (m + EXTRA_LEVELS).min(n);
        let vectors = (0..m).map(|k| vecs.column(k).into_owned()).collect();
        (vals[..keep].to_vec(), vectors, width)
    } else {
        lanczos_lowest(h, tol)?
    };
    let tol_v = tol.unwrap_or(DEFAULT_RELATIVE_TOL * width);
    let m = cluster(&energies, tol_v);
    let gap = if m < energies.len() {
        energies[m] - energies[m - 1]
    } else {
        f64::INFINITY
    };
    if gap < tol_v {
        return Err(ManyBodyError::GapBelowThreshold { gap, tol: tol_v });
    }
    Ok(SpectralSlice {
        energies,
        vectors: vectors.into_iter().take(m).collect(),
        degeneracy: m,
        gap,
        tol: tol_v,
    })
}

// ---- Lanczos ---------------------------------------------------------------

const KRYLOV_MAX: usize = 250;
const RESIDUAL_TOL: f64 = 1e-10;

fn start_vector(n: usize, salt: usize) -> DVector<Complex64> {
    // Deterministic, dense, and generic enough to overlap every eigenvector.
    let v = DVector::from_fn(n, |i, _| {
        let x = (i as f64 + 1.0) * 0.754_877_666 + salt as f64 * 0.569_840_291;
        Complex64::new((x * 12.9898).sin(), (x * 78.233).cos() * 0.5)
    });
    let nrm = v.norm();
    v / Complex64::new(nrm, 0.0)
}

fn project_out(v: &mut DVector<Complex64>, basis: &[DVector<Complex64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = b.dotc(v);
            v.axpy(-c, b, Complex64::new(1.0, 0.0));
        }
    }
}

/// Lowest eigenpair of `h` restricted to the complement of `locked`, plus the
/// largest Ritz value seen.
fn lanczos_one(
    h: &SparseHermitian,
    locked: &[DVector<Complex64>],
    salt: usize,
) -> Result<(f64, DVector<Complex64>, f64), ManyBodyError> {
    let n = h.dim();
    let mut q = start_vector(n, salt);
    project_out(&mut q, locked);
    let nrm = q.norm();
    if nrm < 1e-12 {
        return Err(ManyBodyError::NoConvergence("start vector lies in the locked space".into()));
    }
    q /= Complex64::new(nrm, 0.0);
    let mut qs: Vec<DVector<Complex64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let steps = KRYLOV_MAX.min(n - locked.len());
    loop {
        let k = qs.len() - 1;
        let mut w = h.apply(&qs[k]);
        let a = qs[k].dotc(&w).re;
        alpha.push(a);
        // full reorthogonalization against the Krylov basis and locked vectors
        project_out(&mut w, &qs);
        project_out(&mut w, locked);
        let b = w.norm();
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j || j + 1 == i {
                beta[i.min(j)]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (imin, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .expect("non-empty");
        let emax = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let resid = b * eig.eigenvectors[(m - 1, imin)].abs();
        if resid < RESIDUAL_TOL || b < 1e-12 || m >= steps {
            if resid >= 1e-6 && b >= 1e-12 {
                return Err(ManyBodyError::NoConvergence(format!("residual {resid:.2e} after {m} steps")));
            }
            let mut v = DVector::zeros(n);
            for (i, qi) in qs.iter().enumerate() {
                v.axpy(Complex64::new(eig.eigenvectors[(i, imin)], 0.0), qi, Complex64::new(1.0, 0.0));
            }
            project_out(&mut v, locked);
            let nv = v.norm();
            v /= Complex64::new(nv, 0.0);
            let e = v.dotc(&h.apply(&v)).re;
            return Ok((e, v, emax));
        }
        beta.push(b);
        qs.push(w / Complex64::new(b, 0.0));
    }
}

/// Lowest eigenpairs by deflated Lanczos: one pair at a time in the
/// complement of the ones found, until the ground cluster and three further
/// levels are known.
fn lanczos_lowest(
    h: &SparseHermitian,
    tol: Option<f64>,
) -> Result<(Vec<f64>, Vec<DVector<Complex64>>, f64), ManyBodyError> {
    let n = h.dim();
    let mut energies = Vec::new();
    let mut vectors: Vec<DVector<Complex64>> = Vec::new();
    let mut top = f64::NEG_INFINITY;
    loop {
        let (e, v, emax) = lanczos_one(h, &vectors, energies.len())?;
        top = top.max(emax);
        energies.push(e);
        vectors.push(v);
        // deflated runs converge from above; keep the list sorted
        let mut idx: Vec<usize> = (0..energies.len()).collect();
        idx.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
        energies = idx.iter().map(|&k| energies[k]).collect();
        vectors = idx.iter().map(|&k| vectors[k].clone()).collect();
        let width = top - energies[0];
        let tol_v = tol.unwrap_or(DEFAULT_RELATIVE_TOL * width);
        let m = cluster(&energies, tol_v);
        if energies.len() >= m + EXTRA_LEVELS || energies.len() == n {
            return Ok((energies, vectors, width));
        }
    }
}
