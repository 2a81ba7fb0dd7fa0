use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::exactlinalg::IntMatrix;

use super::{CrystalError, PointGroupAction};

const CATALOG_JSON: &str = include_str!("../../data/catalog.json");

/// A symmorphic space group `Z^d ⋊ P` given by its point-group generators on
/// direct-lattice coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceGroupSpec {
    name: String,
    dim: usize,
    gram: IntMatrix,
    generators: Vec<(String, IntMatrix)>,
    lattice: String,
    point_group_name: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    format: String,
    version: u32,
    #[allow(dead_code)]
    conventions: serde_json::Value,
    groups: Vec<CatalogEntry>,
}

/// One catalog record, also usable to describe a custom group.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub name: String,
    pub dim: usize,
    pub kind: String,
    pub lattice: String,
    pub point_group: String,
    pub gram: Vec<Vec<i64>>,
    pub generators: Vec<GeneratorEntry>,
    /// Fractional translation parts; any nonzero entry makes the group
    /// non-symmorphic, which is rejected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translations: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorEntry {
    pub name: String,
    pub matrix: Vec<Vec<i64>>,
}

/// Summary row for listing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogSummary {
    pub name: String,
    pub dim: usize,
    pub kind: String,
    pub point_group: String,
    pub point_group_order: usize,
}

fn matrix_from(rows: &[Vec<i64>], dim: usize, name: &str) -> Result<IntMatrix, CrystalError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CrystalError::BadMatrix {
            name: name.to_string(),
            reason: format!("expected {dim}x{dim}"),
        });
    }
    Ok(IntMatrix::from_rows(rows))
}

impl SpaceGroupSpec {
    pub fn new(
        name: &str,
        gram: IntMatrix,
        generators: Vec<(String, IntMatrix)>,
    ) -> Result<Self, CrystalError> {
        let dim = gram.rows();
        if !(1..=3).contains(&dim) || !gram.is_square() {
            return Err(CrystalError::BadMatrix {
                name: "gram".into(),
                reason: "gram matrix must be square of size 1..=3".into(),
            });
        }
        if gram != gram.transpose() || gram.determinant().map_or(true, |d| d <= 0.into()) {
            return Err(CrystalError::BadMatrix {
                name: "gram".into(),
                reason: "gram matrix must be symmetric positive definite".into(),
            });
        }
        for (gname, g) in &generators {
            if g.rows() != dim || g.cols() != dim {
                return Err(CrystalError::BadMatrix {
                    name: gname.clone(),
                    reason: format!("expected {dim}x{dim}"),
                });
            }
            if &(&g.transpose() * &gram) * g != gram {
                return Err(CrystalError::NotIsometry { generator: gname.clone() });
            }
        }
        let spec = Self {
            name: name.to_string(),
            dim,
            gram,
            generators,
            lattice: "custom".into(),
            point_group_name: String::new(),
        };
        spec.point_group()?;
        Ok(spec)
    }

    pub fn from_entry(e: &CatalogEntry) -> Result<Self, CrystalError> {
        if let Some(t) = &e.translations {
            if t.iter().flatten().any(|x| x.fract() != 0.0) {
                return Err(CrystalError::NonSymmorphic(e.name.clone()));
            }
        }
        let gram = matrix_from(&e.gram, e.dim, "gram")?;
        let gens = e
            .generators
            .iter()
            .map(|g| Ok((g.name.clone(), matrix_from(&g.matrix, e.dim, &g.name)?)))
            .collect::<Result<Vec<_>, CrystalError>>()?;
        let mut spec = Self::new(&e.name, gram, gens)?;
        spec.lattice = e.lattice.clone();
        spec.point_group_name = e.point_group.clone();
        Ok(spec)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn generators(&self) -> &[(String, IntMatrix)] {
        &self.generators
    }

    pub fn lattice(&self) -> &str {
        &self.lattice
    }

    pub fn point_group_name(&self) -> &str {
        &self.point_group_name
    }

    /// Always true; non-symmorphic input is rejected at construction.
    pub fn is_symmorphic(&self) -> bool {
        true
    }

    pub fn point_group(&self) -> Result<PointGroupAction, CrystalError> {
        PointGroupAction::from_generators(self.dim, &self.generators)
    }

    /// Same group in the lattice basis given by the columns of `s`:
    /// generators become `s^{-1} g s` and the gram matrix `s^T G s`.
    pub fn change_basis(&self, s: &IntMatrix) -> Result<Self, CrystalError> {
        let s_inv = super::unimodular_inverse(s).ok_or(CrystalError::BadMatrix {
            name: "basis change".into(),
            reason: "not unimodular".into(),
        })?;
        let gram = &(&s.transpose() * &self.gram) * s;
        let gens = self
            .generators
            .iter()
            .map(|(n, g)| (n.clone(), &(&s_inv * g) * s))
            .collect();
        let mut out = Self::new(&self.name, gram, gens)?;
        out.lattice = self.lattice.clone();
        out.point_group_name = self.point_group_name.clone();
        Ok(out)
    }
}

fn catalog_entries() -> &'static [CatalogEntry] {
    static CATALOG: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let file: CatalogFile = serde_json::from_str(CATALOG_JSON).expect("embedded catalog parses");
        assert_eq!(file.format, "crystalphase-catalog");
        assert_eq!(file.version, 1);
        file.groups
    })
}

pub fn catalog_version() -> u32 {
    1
}

pub fn catalog_names() -> Vec<&'static str> {
    catalog_entries().iter().map(|e| e.name.as_str()).collect()
}

/// The twelve wallpaper groups with nontrivial point group, in catalog order.
pub fn wallpaper_names() -> Vec<&'static str> {
    catalog_entries()
        .iter()
        .filter(|e| e.kind == "wallpaper" && !e.generators.is_empty())
        .map(|e| e.name.as_str())
        .collect()
}

pub fn catalog_lookup(name: &str) -> Result<SpaceGroupSpec, CrystalError> {
    let entry = catalog_entries()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| CrystalError::UnknownGroup {
            name: name.to_string(),
            valid: catalog_names().join(", "),
        })?;
    SpaceGroupSpec::from_entry(entry)
}

pub fn catalog_summary() -> Vec<CatalogSummary> {
    catalog_entries()
        .iter()
        .map(|e| {
            let spec = SpaceGroupSpec::from_entry(e).expect("catalog entries are valid");
            CatalogSummary {
                name: e.name.clone(),
                dim: e.dim,
                kind: e.kind.clone(),
                point_group: e.point_group.clone(),
                point_group_order: spec.point_group().expect("valid").order(),
            }
        })
        .collect()
}
