//! Quarter-cube fundamental domain for the face-centered group with point
//! group Z_2 x Z_2.
//!
//! Momenta are Cartesian in units where the reciprocal basis is
//! b1 = (-1,1,1), b2 = (1,-1,1), b3 = (1,1,-1). The domain is the union of the
//! three faces of [0,1]^3 through the origin. Each C_2 rotation composed with
//! the shift (1,1,1) maps the outer hexagon A B C D' E F onto itself,
//! identifying opposite edges; the loop runs over half of the hexagon and the
//! surface is all three faces.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{torsion_invariant, BerryError, BundleSample, ClosedPath, Identification, InvariantReport, Plaquette, Surface};
use crate::manybody::{bands, orbital_symmetry, validate_symmetry, LatticeModel};

const AXES: [&str; 3] = ["x", "y", "z"];

/// Which half of the hexagon the loop covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopStart {
    /// A -> B -> C -> D', closed through C_2z.
    A,
    /// B -> C -> D' -> E, closed through C_2z.
    B,
    /// C -> D' -> E -> F, closed through C_2x.
    C,
}

#[derive(Clone, Debug)]
pub struct QuotientDomain {
    pub mesh: usize,
    pub sample: BundleSample,
    /// Grid coordinates of each node, in units of 1/mesh.
    pub nodes: Vec<[usize; 3]>,
    pub surface: Surface,
    /// Orbital matrices of the C_2 rotations about x, y, z.
    pub ops: [DMatrix<Complex64>; 3],
    index: HashMap<[usize; 3], usize>,
}

impl QuotientDomain {
    pub fn node(&self, p: [usize; 3]) -> usize {
        self.index[&p]
    }

    pub fn path(&self, start: LoopStart) -> ClosedPath {
        let n = self.mesh;
        let mut pts: Vec<[usize; 3]> = Vec::new();
        let (axis, pts) = match start {
            LoopStart::A => {
                pts.extend((0..=n).map(|j| [n, j, 0]));
                pts.extend((0..n).rev().map(|i| [i, n, 0]));
                pts.extend((1..=n).map(|k| [0, n, k]));
                (2, pts)
            }
            LoopStart::B => {
                pts.extend((0..=n).rev().map(|i| [i, n, 0]));
                pts.extend((1..=n).map(|k| [0, n, k]));
                pts.extend((0..n).rev().map(|j| [0, j, n]));
                (2, pts)
            }
            LoopStart::C => {
                pts.extend((0..=n).map(|k| [0, n, k]));
                pts.extend((0..n).rev().map(|j| [0, j, n]));
                pts.extend((1..=n).map(|i| [i, 0, n]));
                (0, pts)
            }
        };
        let nodes: Vec<usize> = pts.iter().map(|p| self.node(*p)).collect();
        ClosedPath::sewn(&nodes, self.ops[axis].clone())
    }

    pub fn torsion(&self, start: LoopStart) -> Result<InvariantReport, BerryError> {
        let mut r = torsion_invariant(&self.sample, &self.path(start), &self.surface)?;
        r.grid = vec![self.mesh; 3];
        Ok(r)
    }
}

fn c2(axis: usize) -> [[i64; 3]; 3] {
    let mut m = [[0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = if i == axis { 1 } else { -1 };
    }
    m
}

fn matmul(a: &[[i64; 3]; 3], b: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let mut m = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

/// The C_2 rotation about `axis` in reciprocal-lattice coordinates.
fn reciprocal_c2(axis: usize) -> Vec<Vec<i64>> {
    // Columns of B are b1, b2, b3; B^{-1} = A^T / 2 with A^T as below.
    let b = [[-1, 1, 1], [1, -1, 1], [1, 1, -1]];
    let twice_binv = [[0, 1, 1], [1, 0, 1], [1, 1, 0]];
    let m = matmul(&matmul(&twice_binv, &c2(axis)), &b);
    m.iter().map(|r| r.iter().map(|x| x / 2).collect()).collect()
}

fn kappa(p: [usize; 3], n: usize) -> Vec<f64> {
    let k: Vec<f64> = p.iter().map(|&x| x as f64 / n as f64).collect();
    vec![(k[1] + k[2]) / 2.0, (k[0] + k[2]) / 2.0, (k[0] + k[1]) / 2.0]
}

/// Samples the lowest `filled` bands of a symmetric three-dimensional model on
/// the quarter-cube domain with `mesh` intervals per edge.
pub fn f222_domain(model: &LatticeModel, filled: usize, mesh: usize) -> Result<QuotientDomain, BerryError> {
    if model.dim != 3 || mesh < 1 || filled == 0 || filled > model.orbitals {
        return Err(BerryError::Geometry(format!(
            "need a 3D model, mesh >= 1 and 1..={} filled bands",
            model.orbitals
        )));
    }
    validate_symmetry(model)?;
    let sym = orbital_symmetry(model)?;
    if sym.group.spec.name() != "f222" {
        return Err(BerryError::Geometry(format!(
            "quarter-cube domain needs group f222, model declares {}",
            sym.group.spec.name()
        )));
    }
    let ops: Vec<DMatrix<Complex64>> = (0..3)
        .map(|axis| {
            let want = reciprocal_c2(axis);
            (0..sym.group.action.order())
                .find(|&g| sym.group.action.element(g).to_i64().as_ref() == Some(&want))
                .map(|g| sym.reps[g].clone())
                .ok_or_else(|| BerryError::Geometry(format!("group has no C_2{} element", AXES[axis])))
        })
        .collect::<Result<_, _>>()?;
    let ops: [DMatrix<Complex64>; 3] = ops.try_into().expect("three axes");

    let n = mesh;
    let mut nodes = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            for k in 0..=n {
                if i.min(j).min(k) == 0 {
                    nodes.push([i, j, k]);
                }
            }
        }
    }
    let index: HashMap<[usize; 3], usize> = nodes.iter().enumerate().map(|(k, p)| (*p, k)).collect();

    let mut frames: Vec<Vec<DVector<Complex64>>> = Vec::with_capacity(nodes.len());
    for (k, p) in nodes.iter().enumerate() {
        let (e, v) = bands(model, &kappa(*p, n));
        if filled < e.len() && e[filled] - e[filled - 1] < 1e-8 {
            return Err(BerryError::BandGap {
                node: k,
                gap: e[filled] - e[filled - 1],
            });
        }
        frames.push((0..filled).map(|b| v.column(b).into_owned()).collect());
    }

    let mut identifications = Vec::new();
    for (src, p) in nodes.iter().enumerate() {
        for axis in 0..3 {
            let q: [i64; 3] = std::array::from_fn(|i| {
                let x = p[i] as i64;
                if i == axis { x + n as i64 } else { n as i64 - x }
            });
            if q.iter().any(|&x| x > n as i64) {
                continue;
            }
            let q = q.map(|x| x as usize);
            if let Some(&dst) = index.get(&q) {
                if dst != src {
                    identifications.push(Identification {
                        source: src,
                        target: dst,
                        op: ops[axis].clone(),
                        label: format!("C2{} {:?} -> {:?}", AXES[axis], p, q),
                    });
                }
            }
        }
    }

    let mut plaquettes = Vec::new();
    let at = |p: [usize; 3]| index[&p];
    for p in 0..n {
        for q in 0..n {
            plaquettes.push(Plaquette {
                nodes: vec![at([p, q, 0]), at([p + 1, q, 0]), at([p + 1, q + 1, 0]), at([p, q + 1, 0])],
                face: "z=0".into(),
                coords: vec![p, q],
            });
            plaquettes.push(Plaquette {
                nodes: vec![at([0, p, q]), at([0, p + 1, q]), at([0, p + 1, q + 1]), at([0, p, q + 1])],
                face: "x=0".into(),
                coords: vec![p, q],
            });
            plaquettes.push(Plaquette {
                nodes: vec![at([q, 0, p]), at([q, 0, p + 1]), at([q + 1, 0, p + 1]), at([q + 1, 0, p])],
                face: "y=0".into(),
                coords: vec![p, q],
            });
        }
    }

    let sample = BundleSample::domain(frames, identifications)?;
    Ok(QuotientDomain {
        mesh,
        sample,
        nodes,
        surface: Surface { plaquettes },
        ops,
        index,
    })
}

/// Torsion invariant of the lowest `filled` bands with the default loop.
pub fn f222_torsion(model: &LatticeModel, filled: usize, mesh: usize) -> Result<InvariantReport, BerryError> {
    let d = f222_domain(model, filled, mesh)?;
    let mut r = d.torsion(LoopStart::A)?;
    r.model_hash = Some(model.content_hash());
    Ok(r)
}
