use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::BerryError;

/// Floor for overlaps through a sewing operator.
pub const DEFAULT_OVERLAP_FLOOR: f64 = 0.9;
/// Floor for ordinary links; below it neighboring fibers are nearly orthogonal.
pub const DEFAULT_LINK_FLOOR: f64 = 0.1;

/// Fiber at `target` equals `op` applied to the fiber at `source`, up to a
/// gauge transformation.
#[derive(Clone, Debug)]
pub struct Identification {
    pub source: usize,
    pub target: usize,
    pub op: DMatrix<Complex64>,
    pub label: String,
}

/// Ground-space frames sampled on a grid (torus) or on an arbitrary node set
/// (fundamental domain with identifications).
#[derive(Clone, Debug)]
pub struct BundleSample {
    /// Grid shape for torus samples; empty for domain samples.
    pub shape: Vec<usize>,
    /// Per node, `m` orthonormal vectors.
    pub frames: Vec<Vec<DVector<Complex64>>>,
    pub degeneracy: usize,
    pub identifications: Vec<Identification>,
    pub overlap_floor: f64,
    pub link_floor: f64,
}

fn check_frames(frames: &[Vec<DVector<Complex64>>]) -> Result<usize, BerryError> {
    let m = frames.first().map_or(0, Vec::len);
    if m == 0 {
        return Err(BerryError::InvalidSample("empty sample or frame".into()));
    }
    let n = frames[0][0].len();
    for (k, f) in frames.iter().enumerate() {
        if f.len() != m || f.iter().any(|v| v.len() != n) {
            return Err(BerryError::InvalidSample(format!("node {k} has a frame of different shape")));
        }
        for a in 0..m {
            for b in 0..m {
                let want = if a == b { 1.0 } else { 0.0 };
                if (f[a].dotc(&f[b]) - Complex64::new(want, 0.0)).norm() > 1e-8 {
                    return Err(BerryError::InvalidSample(format!("frame at node {k} is not orthonormal")));
                }
            }
        }
    }
    Ok(m)
}

impl BundleSample {
    /// Periodic grid, frames in row-major node order.
    pub fn torus(shape: Vec<usize>, frames: Vec<Vec<DVector<Complex64>>>) -> Result<Self, BerryError> {
        if shape.iter().product::<usize>() != frames.len() || shape.iter().any(|&n| n < 2) {
            return Err(BerryError::InvalidSample("grid shape does not match node count".into()));
        }
        let degeneracy = check_frames(&frames)?;
        Ok(Self {
            shape,
            frames,
            degeneracy,
            identifications: Vec::new(),
            overlap_floor: DEFAULT_OVERLAP_FLOOR,
            link_floor: DEFAULT_LINK_FLOOR,
        })
    }

    pub fn domain(
        frames: Vec<Vec<DVector<Complex64>>>,
        identifications: Vec<Identification>,
    ) -> Result<Self, BerryError> {
        let degeneracy = check_frames(&frames)?;
        for id in &identifications {
            if id.source >= frames.len() || id.target >= frames.len() {
                return Err(BerryError::InvalidSample(format!("identification {} names a missing node", id.label)));
            }
        }
        Ok(Self {
            shape: Vec::new(),
            frames,
            degeneracy,
            identifications,
            overlap_floor: DEFAULT_OVERLAP_FLOOR,
            link_floor: DEFAULT_LINK_FLOOR,
        })
    }

    pub fn with_overlap_floor(mut self, floor: f64) -> Self {
        self.overlap_floor = floor;
        self
    }

    pub fn with_link_floor(mut self, floor: f64) -> Self {
        self.link_floor = floor;
        self
    }

    pub fn node_count(&self) -> usize {
        self.frames.len()
    }

    pub fn node_index(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.shape).fold(0, |acc, (&x, &n)| acc * n + (x % n))
    }

    /// Overlap matrix `ψ_a† op ψ_b` (op = identity when `None`).
    fn overlap(&self, a: usize, b: usize, op: Option<&DMatrix<Complex64>>) -> DMatrix<Complex64> {
        let m = self.degeneracy;
        DMatrix::from_fn(m, m, |i, j| match op {
            None => self.frames[a][i].dotc(&self.frames[b][j]),
            Some(u) => self.frames[a][i].dotc(&(u * &self.frames[b][j])),
        })
    }

    /// Normalized determinant of the overlap from `a` to `b`.
    pub fn link_between(&self, a: usize, b: usize) -> Result<Complex64, BerryError> {
        self.normalize(self.overlap(a, b, None).determinant(), a, b)
    }

    /// Link from `a` to the fiber at `b` carried through `op`: `det(ψ_a† op ψ_b)`.
    pub fn sewn_link(&self, a: usize, b: usize, op: &DMatrix<Complex64>) -> Result<Complex64, BerryError> {
        self.normalize(self.overlap(a, b, Some(op)).determinant(), a, b)
    }

    fn normalize(&self, z: Complex64, a: usize, b: usize) -> Result<Complex64, BerryError> {
        let r = z.norm();
        if r < self.link_floor {
            return Err(BerryError::MeshTooCoarse {
                from: a,
                to: b,
                overlap: r,
                floor: self.link_floor,
            });
        }
        Ok(z / r)
    }

    /// Checks every identification; returns the smallest sewn overlap.
    pub fn check_identifications(&self) -> Result<f64, BerryError> {
        let mut worst = f64::INFINITY;
        for id in &self.identifications {
            let r = self.overlap(id.target, id.source, Some(&id.op)).determinant().norm();
            if r < self.overlap_floor {
                return Err(BerryError::InconsistentSewing {
                    label: id.label.clone(),
                    overlap: r,
                    floor: self.overlap_floor,
                });
            }
            worst = worst.min(r);
        }
        Ok(worst)
    }

    /// Replaces each frame `F` by `F U` with `U` unitary (a gauge change).
    pub fn regauge(&self, unitaries: &[DMatrix<Complex64>]) -> Self {
        let mut out = self.clone();
        for (f, u) in out.frames.iter_mut().zip(unitaries) {
            let old = f.clone();
            for (j, v) in f.iter_mut().enumerate() {
                let mut acc = DVector::zeros(old[0].len());
                for (i, o) in old.iter().enumerate() {
                    acc += o * u[(i, j)];
                }
                *v = acc;
            }
        }
        out
    }
}

/// Link from `node` to its neighbor along `direction` on a torus sample.
pub fn overlap_link(sample: &BundleSample, node: &[usize], direction: usize) -> Result<Complex64, BerryError> {
    if sample.shape.is_empty() || node.len() != sample.shape.len() || direction >= sample.shape.len() {
        return Err(BerryError::InvalidSample("node or direction does not fit the grid".into()));
    }
    let mut next = node.to_vec();
    next[direction] = (next[direction] + 1) % sample.shape[direction];
    sample.link_between(sample.node_index(node), sample.node_index(&next))
}

impl BundleSample {
    /// Direct sum of two samples on the same nodes with the same
    /// identification pattern; sewing operators become block diagonal.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, BerryError> {
        if self.frames.len() != other.frames.len()
            || self.shape != other.shape
            || self.identifications.len() != other.identifications.len()
        {
            return Err(BerryError::InvalidSample("direct sum needs matching node sets".into()));
        }
        let (n1, n2) = (self.frames[0][0].len(), other.frames[0][0].len());
        let pad = |v: &DVector<Complex64>, first: bool| {
            let mut out = DVector::zeros(n1 + n2);
            let off = if first { 0 } else { n1 };
            out.rows_mut(off, v.len()).copy_from(v);
            out
        };
        let frames = self
            .frames
            .iter()
            .zip(&other.frames)
            .map(|(a, b)| a.iter().map(|v| pad(v, true)).chain(b.iter().map(|v| pad(v, false))).collect())
            .collect();
        let mut identifications = Vec::with_capacity(self.identifications.len());
        for (a, b) in self.identifications.iter().zip(&other.identifications) {
            if a.source != b.source || a.target != b.target {
                return Err(BerryError::InvalidSample("identification patterns differ".into()));
            }
            let mut op = DMatrix::zeros(n1 + n2, n1 + n2);
            op.view_mut((0, 0), (n1, n1)).copy_from(&a.op);
            op.view_mut((n1, n1), (n2, n2)).copy_from(&b.op);
            identifications.push(Identification {
                source: a.source,
                target: a.target,
                op,
                label: a.label.clone(),
            });
        }
        Ok(Self {
            shape: self.shape.clone(),
            frames,
            degeneracy: self.degeneracy + other.degeneracy,
            identifications,
            overlap_floor: self.overlap_floor.min(other.overlap_floor),
            link_floor: self.link_floor.min(other.link_floor),
        })
    }
}
