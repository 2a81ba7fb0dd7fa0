//! Python module `crystalphase`.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use crystalphase_core::berry::{self, BerryError};
use crystalphase_core::cohomology::{self, CohomologyError, Statistics};
use crystalphase_core::crystal::{self, CrystalError};
use crystalphase_core::exactlinalg;
use crystalphase_core::manybody::{self, ManyBodyError};

create_exception!(crystalphase, GapError, PyException, "Spectral gap closed or ground state degenerate.");
create_exception!(crystalphase, MeshError, PyException, "Sample too coarse or sewing inconsistent.");

fn manybody_err(e: ManyBodyError) -> PyErr {
    match e {
        ManyBodyError::GapBelowThreshold { .. } | ManyBodyError::GapAtNode { .. } => GapError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn berry_err(e: BerryError) -> PyErr {
    match e {
        BerryError::ManyBody(inner) => manybody_err(inner),
        BerryError::Degenerate { .. } | BerryError::BandGap { .. } => GapError::new_err(e.to_string()),
        BerryError::MeshTooCoarse { .. } | BerryError::Inadmissible { .. } | BerryError::InconsistentSewing { .. } => {
            MeshError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn statistics(s: &str) -> PyResult<Statistics> {
    match s {
        "boson" => Ok(Statistics::Boson),
        "fermion" => Ok(Statistics::Fermion),
        other => Err(PyValueError::new_err(format!("statistics must be 'boson' or 'fermion', got {other:?}"))),
    }
}

/// Finitely generated abelian group `Z^r + Z_d1 + ... + Z_dk` in invariant-factor form.
#[pyclass(name = "FinAbGroup", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyFinAbGroup(exactlinalg::FinAbGroup);

#[pymethods]
impl PyFinAbGroup {
    #[new]
    fn parse(text: &str) -> PyResult<Self> {
        text.parse().map(Self).map_err(value_err)
    }

    #[getter]
    fn free_rank(&self) -> usize {
        self.0.free_rank()
    }

    /// Invariant factors as decimal strings (they may exceed 64 bits).
    #[getter]
    fn torsion(&self) -> Vec<String> {
        self.0.torsion().iter().map(|t| t.to_string()).collect()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("FinAbGroup('{}')", self.0)
    }
}

#[pyclass(name = "CohomologyResult", frozen, get_all)]
pub struct PyCohomologyResult {
    group: PyFinAbGroup,
    method: String,
    exactness: String,
}

impl From<cohomology::CohomologyResult> for PyCohomologyResult {
    fn from(r: cohomology::CohomologyResult) -> Self {
        Self {
            group: PyFinAbGroup(r.group),
            method: r.method.to_string(),
            exactness: r.exactness.to_string(),
        }
    }
}

fn cohomology_err(e: CohomologyError) -> PyErr {
    value_err(e)
}

fn lookup(name: &str) -> PyResult<crystal::SpaceGroupSpec> {
    crystal::catalog_lookup(name).map_err(|e: CrystalError| value_err(e))
}

/// Degree-2 classification of the named group.
#[pyfunction]
#[pyo3(signature = (group, statistics = "boson"))]
fn classify(group: &str, statistics: &str) -> PyResult<PyCohomologyResult> {
    let stats = self::statistics(statistics)?;
    cohomology::classify_h2(&lookup(group)?, stats).map(Into::into).map_err(cohomology_err)
}

/// Graded piece of the equivariant cohomology in the given degree.
#[pyfunction]
fn graded_h(group: &str, degree: usize) -> PyResult<PyCohomologyResult> {
    cohomology::graded_h(&lookup(group)?, degree).map(Into::into).map_err(cohomology_err)
}

/// `(name, dim, point_group, point_group_order)` for every catalog entry.
#[pyfunction]
fn list_groups() -> Vec<(String, usize, String, usize)> {
    crystal::catalog_summary()
        .into_iter()
        .map(|s| (s.name, s.dim, s.point_group, s.point_group_order))
        .collect()
}

/// Names swept by the all-wallpaper classification, in catalog order.
#[pyfunction]
fn wallpaper_names() -> Vec<String> {
    crystal::wallpaper_names().into_iter().map(String::from).collect()
}

#[pyclass(name = "LatticeModel", frozen)]
pub struct PyLatticeModel(manybody::LatticeModel);

#[pymethods]
impl PyLatticeModel {
    #[staticmethod]
    fn from_path(path: PathBuf) -> PyResult<Self> {
        manybody::LatticeModel::from_path(&path).map(Self).map_err(manybody_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        manybody::LatticeModel::from_json(text).map(Self).map_err(manybody_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim
    }

    #[getter]
    fn cells(&self) -> Vec<usize> {
        self.0.cells.clone()
    }

    #[getter]
    fn orbitals(&self) -> usize {
        self.0.orbitals
    }

    #[getter]
    fn particles(&self) -> usize {
        self.0.n_particles
    }

    #[getter]
    fn content_hash(&self) -> String {
        self.0.content_hash()
    }

    fn with_particles(&self, n: usize) -> PyResult<Self> {
        self.0.with_particles(n).map(Self).map_err(manybody_err)
    }

    fn with_interaction_scale(&self, scale: f64) -> Self {
        Self(self.0.with_interaction_scale(scale))
    }

    /// Many-body Hilbert space dimension.
    fn basis_dim(&self) -> PyResult<usize> {
        manybody::build_basis(&self.0).map(|b| b.dim()).map_err(manybody_err)
    }

    /// `(momentum, eigenvalues)` for every translation sector.
    fn sectors(&self) -> PyResult<Vec<(Vec<usize>, Vec<f64>)>> {
        let blocks = manybody::momentum_sectors(&self.0).map_err(manybody_err)?;
        Ok(blocks.into_iter().map(|b| (b.momentum, b.eigenvalues)).collect())
    }

    /// Full spectrum at zero twist, ascending.
    fn spectrum(&self) -> PyResult<Vec<f64>> {
        let basis = manybody::build_basis(&self.0).map_err(manybody_err)?;
        let h = manybody::build_hamiltonian(&self.0, &basis, &manybody::TwistPoint::zero(self.0.dim))
            .map_err(manybody_err)?;
        Ok(manybody::dense_spectrum(&h))
    }
}

#[pyclass(name = "InvariantReport", frozen, get_all)]
pub struct PyInvariantReport {
    invariant: String,
    value: f64,
    quantization_distance: f64,
    admissibility_margin: f64,
    grid: Vec<usize>,
    /// `(face, node, phase)` per plaquette.
    plaquettes: Vec<(String, Vec<usize>, f64)>,
}

#[pymethods]
impl PyInvariantReport {
    /// Nearest integer to the value.
    fn integer(&self) -> i64 {
        self.value.round() as i64
    }

    fn __repr__(&self) -> String {
        format!("InvariantReport({}={}, grid={:?})", self.invariant, self.value, self.grid)
    }
}

impl From<berry::InvariantReport> for PyInvariantReport {
    fn from(r: berry::InvariantReport) -> Self {
        Self {
            invariant: r.invariant.to_string(),
            value: r.value,
            quantization_distance: r.quantization_distance,
            admissibility_margin: r.admissibility_margin,
            grid: r.grid,
            plaquettes: r.plaquettes.into_iter().map(|p| (p.face, p.node, p.phase)).collect(),
        }
    }
}

fn grid2(grid: (usize, usize)) -> [usize; 2] {
    [grid.0, grid.1]
}

/// Many-body Chern number over a grid of boundary twists.
#[pyfunction]
#[pyo3(signature = (model, grid = (6, 6), tol = None))]
fn chern(py: Python<'_>, model: &PyLatticeModel, grid: (usize, usize), tol: Option<f64>) -> PyResult<PyInvariantReport> {
    let m = &model.0;
    py.detach(|| berry::manybody_chern(m, grid2(grid), tol)).map(Into::into).map_err(berry_err)
}

/// Chern number of the lowest `filled` Bloch bands.
#[pyfunction]
#[pyo3(signature = (model, filled = 1, grid = (24, 24)))]
fn band_chern(py: Python<'_>, model: &PyLatticeModel, filled: usize, grid: (usize, usize)) -> PyResult<PyInvariantReport> {
    let m = &model.0;
    py.detach(|| berry::band_chern(m, filled, grid2(grid))).map(Into::into).map_err(berry_err)
}

/// Z_2 torsion invariant of an F222-symmetric model.
#[pyfunction]
#[pyo3(signature = (model, filled = 1, mesh = 4))]
fn torsion(py: Python<'_>, model: &PyLatticeModel, filled: usize, mesh: usize) -> PyResult<PyInvariantReport> {
    let m = &model.0;
    py.detach(|| berry::f222_torsion(m, filled, mesh)).map(Into::into).map_err(berry_err)
}

#[pymodule]
#[pyo3(name = "crystalphase")]
fn crystalphase_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFinAbGroup>()?;
    m.add_class::<PyCohomologyResult>()?;
    m.add_class::<PyLatticeModel>()?;
    m.add_class::<PyInvariantReport>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(graded_h, m)?)?;
    m.add_function(wrap_pyfunction!(list_groups, m)?)?;
    m.add_function(wrap_pyfunction!(wallpaper_names, m)?)?;
    m.add_function(wrap_pyfunction!(chern, m)?)?;
    m.add_function(wrap_pyfunction!(band_chern, m)?)?;
    m.add_function(wrap_pyfunction!(torsion, m)?)?;
    m.add("GapError", m.py().get_type::<GapError>())?;
    m.add("MeshError", m.py().get_type::<MeshError>())?;
    Ok(())
}
