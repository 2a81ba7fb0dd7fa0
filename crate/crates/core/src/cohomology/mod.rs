//! Borel-equivariant cohomology of the Brillouin torus.
//!
//! Degree 2 comes from the reciprocal group: free rank from the invariants of
//! `Λ²`, torsion from the abelianization. Cyclic point groups additionally get
//! the E2 page of the LHS spectral sequence in degrees up to 3.

mod module;
mod reference;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::crystal::{reciprocal_action, CrystalError, GroupPresentation, SpaceGroupSpec};
use crate::exactlinalg::{cokernel, kernel_basis, subquotient, FinAbGroup, IntMatrix, LinalgError};

pub use module::{invariant_rank, PModule};
pub use reference::{reference_source, reference_tables, ReferenceColumn, ReferenceTables};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CohomologyError {
    #[error(transparent)]
    Crystal(#[from] CrystalError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid module: {0}")]
    BadModule(String),
    #[error("point group of {0} is not cyclic; only cyclic groups have a periodic resolution here")]
    NonCyclic(String),
    #[error("degree {0} unsupported (maximum 3)")]
    DegreeUnsupported(usize),
    #[error("LHS degree-2 total {lhs} disagrees with abelianization result {direct}")]
    Inconsistent { lhs: String, direct: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    /// Trivial extension `P × Z_2^F`.
    Fermion,
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Boson => "boson",
            Self::Fermion => "fermion",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "abelianization+rank")]
    AbelianizationRank,
    #[serde(rename = "LHS-collapse")]
    LhsCollapse,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AbelianizationRank => "abelianization+rank",
            Self::LhsCollapse => "LHS-collapse",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exactness {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "associated-graded-only")]
    AssociatedGradedOnly,
}

impl fmt::Display for Exactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::AssociatedGradedOnly => "associated-graded-only",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyResult {
    pub group: FinAbGroup,
    pub method: Method,
    pub exactness: Exactness,
}

/// E2 entries `E_2^{p,q}` for `p + q <= 3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E2Page {
    pub entries: BTreeMap<(usize, usize), FinAbGroup>,
    /// Row modules `Λ^q` of the reciprocal action, indexed by `q`.
    pub rows: Vec<PModule>,
}

impl E2Page {
    pub fn get(&self, p: usize, q: usize) -> Option<&FinAbGroup> {
        self.entries.get(&(p, q))
    }

    pub fn antidiagonal(&self, n: usize) -> Vec<((usize, usize), &FinAbGroup)> {
        (0..=n)
            .filter_map(|p| self.entries.get(&(p, n - p)).map(|g| ((p, n - p), g)))
            .collect()
    }
}

pub fn abelianization(pres: &GroupPresentation) -> FinAbGroup {
    cokernel(&pres.relation_matrix())
}

/// `H²_P(T^d; Z)` for a symmorphic group, optionally with fermion parity.
pub fn classify_h2(spec: &SpaceGroupSpec, statistics: Statistics) -> Result<CohomologyResult, CohomologyError> {
    if !spec.is_symmorphic() {
        return Err(CrystalError::NonSymmorphic(spec.name().to_string()).into());
    }
    let recip = reciprocal_action(spec)?;
    let lambda2 = PModule::exterior_power(&recip.action, 2)?;
    let r = invariant_rank(&lambda2);
    let ab = abelianization(&recip.presentation);
    let mut group = FinAbGroup::free(r).direct_sum(&ab.torsion_subgroup());
    if statistics == Statistics::Fermion {
        group = group.direct_sum(&FinAbGroup::cyclic(2));
    }
    Ok(CohomologyResult {
        group,
        method: Method::AbelianizationRank,
        exactness: Exactness::Exact,
    })
}

/// `H^q(C_n; M)` from the 2-periodic resolution.
pub fn cyclic_module_cohomology(module: &PModule, q: usize) -> Result<FinAbGroup, CohomologyError> {
    let sigma = module
        .cyclic_generator()
        .ok_or_else(|| CohomologyError::NonCyclic(format!("module of order {}", module.order())))?;
    let r = module.rank();
    let s1 = module.action()[sigma].checked_sub(&IntMatrix::identity(r))?;
    let n = module.norm();
    Ok(match q {
        0 => FinAbGroup::free(kernel_basis(&s1).cols()),
        q if q % 2 == 1 => subquotient(&n, &s1),
        _ => subquotient(&s1, &n),
    })
}

fn cyclic_spec_modules(spec: &SpaceGroupSpec) -> Result<Vec<PModule>, CohomologyError> {
    let recip = reciprocal_action(spec)?;
    if recip.action.cyclic_generator().is_none() {
        return Err(CohomologyError::NonCyclic(spec.name().to_string()));
    }
    (0..=spec.dim().min(3))
        .map(|q| PModule::exterior_power(&recip.action, q))
        .collect()
}

pub fn lhs_e2(spec: &SpaceGroupSpec) -> Result<E2Page, CohomologyError> {
    let rows = cyclic_spec_modules(spec)?;
    let mut entries = BTreeMap::new();
    for (q, row) in rows.iter().enumerate() {
        for p in 0..=3 - q {
            entries.insert((p, q), cyclic_module_cohomology(row, p)?);
        }
    }
    Ok(E2Page { entries, rows })
}

/// Degree-`n` Borel cohomology as the antidiagonal sum of the E2 page.
pub fn graded_h(spec: &SpaceGroupSpec, n: usize) -> Result<CohomologyResult, CohomologyError> {
    if n > 3 {
        return Err(CohomologyError::DegreeUnsupported(n));
    }
    let page = lhs_e2(spec)?;
    let diag = page.antidiagonal(n);
    let group = FinAbGroup::sum_all(diag.iter().map(|(_, g)| *g));
    let torsion_entries = diag
        .iter()
        .filter(|(_, g)| !g.torsion().is_empty())
        .count();
    let mut exactness = if torsion_entries <= 1 {
        Exactness::Exact
    } else {
        Exactness::AssociatedGradedOnly
    };
    if n == 2 && exactness != Exactness::Exact {
        let direct = classify_h2(spec, Statistics::Boson)?.group;
        if direct != group {
            return Err(CohomologyError::Inconsistent {
                lhs: group.to_string(),
                direct: direct.to_string(),
            });
        }
        exactness = Exactness::Exact;
    }
    Ok(CohomologyResult {
        group,
        method: Method::LhsCollapse,
        exactness,
    })
}
