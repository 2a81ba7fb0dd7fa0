use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ManyBodyError;

/// Fermions, or bosons with an optional per-mode occupancy cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParticleStatistics {
    Fermion,
    Boson { max_occupancy: Option<usize> },
}

/// `t c†_{i,R} c_{j,R+d}`, summed over cells `R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hopping {
    pub i: usize,
    pub j: usize,
    pub d: Vec<i64>,
    pub t: Complex64,
}

/// `v n_{i,R} n_{j,R+d}`, summed over cells `R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub i: usize,
    pub j: usize,
    pub d: Vec<i64>,
    pub v: f64,
}

/// On-site energy on one orbital of one cell. Breaks translation symmetry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Impurity {
    pub orbital: usize,
    pub cell: Vec<usize>,
    pub energy: f64,
}

/// Point-group data for symmetric models: orbital representation matrices
/// of each generator of a catalog group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryData {
    pub group: String,
    pub reps: BTreeMap<String, Vec<Vec<Complex64>>>,
}

/// A validated finite lattice model. Hoppings are closed under Hermitian
/// conjugation and already carry any flux phases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeModel {
    pub name: Option<String>,
    pub dim: usize,
    pub cells: Vec<usize>,
    pub orbitals: usize,
    pub statistics: ParticleStatistics,
    pub n_particles: usize,
    pub hoppings: Vec<Hopping>,
    pub interactions: Vec<Interaction>,
    pub onsite: Vec<f64>,
    pub impurities: Vec<Impurity>,
    pub symmetry: Option<SymmetryData>,
}

// ---- file format ---------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub cells: Vec<usize>,
    pub orbitals: usize,
    pub statistics: StatisticsField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_occupancy: Option<usize>,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub hoppings: Vec<HoppingEntry>,
    #[serde(default)]
    pub interactions: Vec<InteractionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub onsite: Option<Vec<f64>>,
    #[serde(default)]
    pub flux: Vec<FluxEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub impurities: Vec<ImpurityEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticsField {
    Fermion,
    Boson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoppingEntry {
    pub i: usize,
    pub j: usize,
    pub d: Vec<i64>,
    pub t: [f64; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionEntry {
    pub i: usize,
    pub j: usize,
    pub d: Vec<i64>,
    #[serde(rename = "V")]
    pub v: f64,
}

/// Multiplies hopping `bond` (index into `hoppings`) by `exp(2πi phase)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxEntry {
    pub bond: usize,
    pub phase: Phase,
}

/// A phase in units of 2π, either a float or an exact ratio `[p, q]`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Phase {
    Ratio([i64; 2]),
    Value(f64),
}

impl Phase {
    fn turns(self) -> Option<f64> {
        match self {
            Phase::Value(x) => x.is_finite().then_some(x),
            Phase::Ratio([_, 0]) => None,
            Phase::Ratio([p, q]) => Some(p as f64 / q as f64),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpurityEntry {
    pub orbital: usize,
    pub cell: Vec<usize>,
    pub energy: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetryEntry {
    pub group: String,
    /// Per generator name, a square matrix of `[re, im]` entries.
    pub reps: BTreeMap<String, Vec<Vec<[f64; 2]>>>,
}

const MAX_FERMION_MODES: usize = 64;
const HERMITIAN_TOL: f64 = 1e-12;

fn c(z: [f64; 2]) -> Complex64 {
    Complex64::new(z[0], z[1])
}

impl LatticeModel {
    pub fn from_json(text: &str) -> Result<Self, ManyBodyError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| ManyBodyError::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn from_path(path: &Path) -> Result<Self, ManyBodyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ManyBodyError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_file(f: ModelFile) -> Result<Self, ManyBodyError> {
        let invalid = |msg: String| Err(ManyBodyError::InvalidModel(msg));
        if !(1..=3).contains(&f.dim) {
            return invalid(format!("dim must be 1, 2 or 3, got {}", f.dim));
        }
        if f.cells.len() != f.dim || f.cells.contains(&0) {
            return invalid(format!("cells must list {} positive sizes", f.dim));
        }
        if f.orbitals == 0 {
            return invalid("orbitals must be positive".into());
        }
        let statistics = match f.statistics {
            StatisticsField::Fermion => {
                if f.max_occupancy.is_some() {
                    return invalid("max_occupancy applies to bosons only".into());
                }
                ParticleStatistics::Fermion
            }
            StatisticsField::Boson => {
                if f.max_occupancy == Some(0) {
                    return invalid("max_occupancy must be positive".into());
                }
                ParticleStatistics::Boson {
                    max_occupancy: f.max_occupancy,
                }
            }
        };
        let modes = f.orbitals * f.cells.iter().product::<usize>();
        if statistics == ParticleStatistics::Fermion {
            if modes > MAX_FERMION_MODES {
                return invalid(format!("{modes} fermionic modes exceed the limit of {MAX_FERMION_MODES}"));
            }
            if f.n > modes {
                return Err(ManyBodyError::TooManyParticles { n: f.n, capacity: modes });
            }
        }
        if let ParticleStatistics::Boson { max_occupancy: Some(cap) } = statistics {
            if f.n > cap * modes {
                return Err(ManyBodyError::TooManyParticles {
                    n: f.n,
                    capacity: cap * modes,
                });
            }
        }
        let check_orb = |o: usize, what: &str| -> Result<(), ManyBodyError> {
            if o >= f.orbitals {
                return Err(ManyBodyError::InvalidModel(format!(
                    "{what}: orbital {o} out of range (orbitals = {})",
                    f.orbitals
                )));
            }
            Ok(())
        };
        let check_d = |d: &[i64], what: &str| -> Result<(), ManyBodyError> {
            if d.len() != f.dim {
                return Err(ManyBodyError::InvalidModel(format!(
                    "{what}: displacement has {} components, expected {}",
                    d.len(),
                    f.dim
                )));
            }
            Ok(())
        };

        let mut raw: Vec<Hopping> = Vec::with_capacity(f.hoppings.len());
        for (k, h) in f.hoppings.iter().enumerate() {
            let what = format!("hopping {k}");
            check_orb(h.i, &what)?;
            check_orb(h.j, &what)?;
            check_d(&h.d, &what)?;
            if !h.t.iter().all(|x| x.is_finite()) {
                return invalid(format!("{what}: non-finite amplitude"));
            }
            raw.push(Hopping {
                i: h.i,
                j: h.j,
                d: h.d.clone(),
                t: c(h.t),
            });
        }
        for fl in &f.flux {
            let turns = fl
                .phase
                .turns()
                .ok_or_else(|| ManyBodyError::InvalidModel(format!("flux on bond {}: bad phase", fl.bond)))?;
            let h = raw.get_mut(fl.bond).ok_or_else(|| {
                ManyBodyError::InvalidModel(format!("flux refers to missing bond {}", fl.bond))
            })?;
            h.t *= Complex64::from_polar(1.0, 2.0 * PI * turns);
        }
        let hoppings = complete_hermitian(raw)?;

        let mut interactions = Vec::with_capacity(f.interactions.len());
        for (k, it) in f.interactions.iter().enumerate() {
            let what = format!("interaction {k}");
            check_orb(it.i, &what)?;
            check_orb(it.j, &what)?;
            check_d(&it.d, &what)?;
            if !it.v.is_finite() {
                return invalid(format!("{what}: non-finite strength"));
            }
            interactions.push(Interaction {
                i: it.i,
                j: it.j,
                d: it.d.clone(),
                v: it.v,
            });
        }
        let onsite = match f.onsite {
            Some(v) if v.len() != f.orbitals => {
                return invalid(format!("onsite has {} entries, expected {}", v.len(), f.orbitals))
            }
            Some(v) => v,
            None => vec![0.0; f.orbitals],
        };
        let mut impurities = Vec::new();
        for (k, im) in f.impurities.iter().enumerate() {
            let what = format!("impurity {k}");
            check_orb(im.orbital, &what)?;
            if im.cell.len() != f.dim || im.cell.iter().zip(&f.cells).any(|(c, l)| c >= l) {
                return invalid(format!("{what}: cell out of range"));
            }
            impurities.push(Impurity {
                orbital: im.orbital,
                cell: im.cell.clone(),
                energy: im.energy,
            });
        }
        let symmetry = match f.symmetry {
            None => None,
            Some(s) => {
                let mut reps = BTreeMap::new();
                for (name, rows) in s.reps {
                    if rows.len() != f.orbitals || rows.iter().any(|r| r.len() != f.orbitals) {
                        return invalid(format!("symmetry rep {name} must be {0}x{0}", f.orbitals));
                    }
                    reps.insert(name, rows.iter().map(|r| r.iter().map(|&z| c(z)).collect()).collect());
                }
                Some(SymmetryData { group: s.group, reps })
            }
        };
        Ok(Self {
            name: f.name,
            dim: f.dim,
            cells: f.cells,
            orbitals: f.orbitals,
            statistics,
            n_particles: f.n,
            hoppings,
            interactions,
            onsite,
            impurities,
            symmetry,
        })
    }

    pub fn modes(&self) -> usize {
        self.orbitals * self.num_cells()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.iter().product()
    }

    /// Row-major cell index.
    pub fn cell_index(&self, cell: &[usize]) -> usize {
        cell.iter().zip(&self.cells).fold(0, |acc, (&x, &l)| acc * l + x)
    }

    pub fn cell_coords(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for mu in (0..self.dim).rev() {
            out[mu] = index % self.cells[mu];
            index /= self.cells[mu];
        }
        out
    }

    pub fn mode(&self, orbital: usize, cell: &[usize]) -> usize {
        orbital + self.orbitals * self.cell_index(cell)
    }

    /// `cell + d` wrapped into the box, with the wrap count per direction.
    pub fn shift(&self, cell: &[usize], d: &[i64]) -> (Vec<usize>, Vec<i64>) {
        let mut out = Vec::with_capacity(self.dim);
        let mut wraps = Vec::with_capacity(self.dim);
        for mu in 0..self.dim {
            let l = self.cells[mu] as i64;
            let x = cell[mu] as i64 + d[mu];
            wraps.push(x.div_euclid(l));
            out.push(x.rem_euclid(l) as usize);
        }
        (out, wraps)
    }

    pub fn is_fermionic(&self) -> bool {
        self.statistics == ParticleStatistics::Fermion
    }

    /// Free fermions: no interaction term with nonzero strength.
    pub fn is_free(&self) -> bool {
        self.is_fermionic() && self.interactions.iter().all(|i| i.v == 0.0)
    }

    pub fn is_translation_invariant(&self) -> bool {
        self.impurities.is_empty()
    }

    pub fn with_particles(&self, n: usize) -> Result<Self, ManyBodyError> {
        let capacity = match self.statistics {
            ParticleStatistics::Fermion => Some(self.modes()),
            ParticleStatistics::Boson { max_occupancy } => max_occupancy.map(|c| c * self.modes()),
        };
        if let Some(cap) = capacity {
            if n > cap {
                return Err(ManyBodyError::TooManyParticles { n, capacity: cap });
            }
        }
        Ok(Self {
            n_particles: n,
            ..self.clone()
        })
    }

    pub fn with_interaction_scale(&self, s: f64) -> Self {
        let mut m = self.clone();
        for it in &mut m.interactions {
            it.v *= s;
        }
        m
    }

    /// Stable content hash of the validated model.
    pub fn content_hash(&self) -> String {
        let text = serde_json::to_string(self).expect("model serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

fn same_key(a: &Hopping, i: usize, j: usize, d: &[i64]) -> bool {
    a.i == i && a.j == j && a.d == d
}

/// Adds missing Hermitian partners; rejects mismatched explicit partners.
fn complete_hermitian(raw: Vec<Hopping>) -> Result<Vec<Hopping>, ManyBodyError> {
    for (k, h) in raw.iter().enumerate() {
        if raw[..k].iter().any(|o| same_key(o, h.i, h.j, &h.d)) {
            return Err(ManyBodyError::InvalidModel(format!(
                "hopping {k} duplicates an earlier term ({}, {}, {:?})",
                h.i, h.j, h.d
            )));
        }
    }
    let mut out = raw.clone();
    for (k, h) in raw.iter().enumerate() {
        let neg: Vec<i64> = h.d.iter().map(|x| -x).collect();
        if h.i == h.j && h.d.iter().all(|&x| x == 0) {
            if h.t.im.abs() > HERMITIAN_TOL {
                return Err(ManyBodyError::NonHermitian(format!(
                    "hopping {k} is an on-site term with complex amplitude {}",
                    h.t
                )));
            }
            continue;
        }
        match raw.iter().position(|o| same_key(o, h.j, h.i, &neg)) {
            Some(p) => {
                if (raw[p].t - h.t.conj()).norm() > HERMITIAN_TOL {
                    return Err(ManyBodyError::NonHermitian(format!(
                        "hoppings {k} and {p} are conjugate partners with mismatched amplitudes"
                    )));
                }
            }
            None => out.push(Hopping {
                i: h.j,
                j: h.i,
                d: neg,
                t: h.t.conj(),
            }),
        }
    }
    Ok(out)
}
