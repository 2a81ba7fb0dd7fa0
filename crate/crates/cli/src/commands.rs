use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crystalphase_core::berry::{band_chern, f222_torsion, fhs_chern, manybody_sample, InvariantReport};
use crystalphase_core::cohomology::{classify_h2, reference_tables, Statistics};
use crystalphase_core::crystal::{catalog_lookup, catalog_summary, wallpaper_names};
use crystalphase_core::manybody::{build_basis, build_hamiltonian, dense_spectrum, momentum_sectors, LatticeModel, TwistPoint};

use crate::cache::{inputs_hash, Cache, Lookup};
use crate::config::DEFAULT_GRID;
use crate::record::*;
use crate::{CliError, RunConfig, SubcommandKind, EXIT_CHECK_FAILED, EXIT_MESH};

pub const DIRECT_SUM_TOL: f64 = 1e-10;
pub const TORSION_QUANTIZATION_TOL: f64 = 1e-3;

/// Records plus an optional failure that still produced output.
pub type Execution = (Vec<ResultRecord>, Option<CliError>);

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn read_model_bytes(cfg: &RunConfig) -> Result<Option<Vec<u8>>, CliError> {
    match &cfg.model {
        None => Ok(None),
        Some(p) => std::fs::read(p)
            .map(Some)
            .map_err(|e| CliError::validation(format!("cannot read model {}: {e}", p.display()))),
    }
}

pub fn execute(cfg: &RunConfig, stderr: &mut String) -> Result<Execution, CliError> {
    let model_bytes = read_model_bytes(cfg)?;
    let key = inputs_hash(cfg, model_bytes.as_deref());
    let cache = match cfg.subcommand {
        SubcommandKind::ListGroups => None,
        _ => cfg.cache_dir.as_deref().map(Cache::new),
    };
    // Curvature files need plaquette data, which records do not keep.
    if let (Some(c), None) = (&cache, &cfg.emit_curvature) {
        match c.load(&key) {
            Lookup::Hit(records) => {
                stderr.push_str(&format!("cache hit: {}\n", c.entry_path(&key).display()));
                return Ok((records, None));
            }
            Lookup::Corrupt(why) => stderr.push_str(&format!(
                "warning: ignoring corrupt cache entry {} ({why}); recomputing\n",
                c.entry_path(&key).display()
            )),
            Lookup::Miss => {}
        }
    }
    let payloads = dispatch(cfg, model_bytes.as_deref())?;
    let (payloads, status) = payloads;
    let ts = now();
    let records: Vec<ResultRecord> = payloads
        .into_iter()
        .map(|payload| ResultRecord {
            artifact_version: ARTIFACT_VERSION.to_string(),
            subcommand: cfg.subcommand.name().to_string(),
            inputs_hash: key.clone(),
            payload,
            timestamp: ts,
        })
        .collect();
    if let (Some(c), None) = (&cache, &status) {
        if let Err(e) = c.store(&key, &records) {
            stderr.push_str(&format!("warning: could not write cache entry: {e}\n"));
        }
    }
    Ok((records, status))
}

type Dispatch = (Vec<Payload>, Option<CliError>);

fn dispatch(cfg: &RunConfig, model_bytes: Option<&[u8]>) -> Result<Dispatch, CliError> {
    match cfg.subcommand {
        SubcommandKind::Classify => classify(cfg).map(|p| (p, None)),
        SubcommandKind::ListGroups => Ok((catalog_summary().into_iter().map(Payload::Group).collect(), None)),
        SubcommandKind::Chern => chern(cfg, load_model(cfg, model_bytes)?),
        SubcommandKind::Sectors => sectors(cfg, load_model(cfg, model_bytes)?),
        SubcommandKind::Torsion => torsion(cfg, load_model(cfg, model_bytes)?),
    }
}

fn load_model(cfg: &RunConfig, bytes: Option<&[u8]>) -> Result<LatticeModel, CliError> {
    let path = cfg.model.as_deref().expect("validated");
    let text = std::str::from_utf8(bytes.expect("model read"))
        .map_err(|_| CliError::validation(format!("model {} is not UTF-8", path.display())))?;
    let mut m = LatticeModel::from_json(text)
        .map_err(|e| CliError::validation(format!("model {}: {e}", path.display())))?;
    if let Some(n) = cfg.particles {
        m = m.with_particles(n)?;
    }
    if let Some(s) = cfg.interaction_scale {
        m = m.with_interaction_scale(s);
    }
    Ok(m)
}

fn model_label(cfg: &RunConfig, m: &LatticeModel) -> String {
    m.name.clone().unwrap_or_else(|| {
        cfg.model
            .as_deref()
            .and_then(Path::file_stem)
            .map_or_else(|| "model".into(), |s| s.to_string_lossy().into_owned())
    })
}

pub fn reference_columns(group: &str) -> BTreeMap<String, String> {
    let tables = reference_tables();
    tables
        .columns
        .keys()
        .filter_map(|col| tables.value(col, group).map(|v| (col.clone(), v.to_string())))
        .collect()
}

fn classify(cfg: &RunConfig) -> Result<Vec<Payload>, CliError> {
    let names: Vec<String> = if cfg.all_wallpaper {
        wallpaper_names().into_iter().map(String::from).collect()
    } else {
        vec![cfg.group.clone().expect("validated")]
    };
    let statistics = cfg.statistics.unwrap_or(Statistics::Boson);
    names
        .iter()
        .map(|name| {
            let spec = catalog_lookup(name)?;
            let result = classify_h2(&spec, statistics)?;
            Ok(Payload::Classification(ClassificationRow {
                group: name.clone(),
                statistics,
                h2: result.group.to_string(),
                result,
                reference: reference_columns(name),
            }))
        })
        .collect()
}

fn write_curvature(cfg: &RunConfig, report: &InvariantReport) -> Result<(), CliError> {
    if let Some(p) = &cfg.emit_curvature {
        std::fs::write(p, report.curvature_csv())
            .map_err(|e| CliError::validation(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

fn strip(mut r: InvariantReport) -> InvariantReport {
    r.plaquettes.clear();
    r
}

fn chern(cfg: &RunConfig, m: LatticeModel) -> Result<Dispatch, CliError> {
    if m.dim != 2 {
        return Err(CliError::validation(format!("chern needs a 2D model, got dimension {}", m.dim)));
    }
    if let Some(s) = cfg.statistics {
        let model_stats = if m.is_fermionic() { Statistics::Fermion } else { Statistics::Boson };
        if s != model_stats {
            return Err(CliError::validation(format!("--statistics {s} contradicts the model ({model_stats})")));
        }
    }
    let grid: [usize; 2] = match cfg.grid.as_deref() {
        None => [DEFAULT_GRID, DEFAULT_GRID],
        Some([n]) => [*n, *n],
        Some([a, b]) => [*a, *b],
        Some(g) => return Err(CliError::validation(format!("grid has {} axes, model has 2", g.len()))),
    };
    let (sample, min_gap) = manybody_sample(&m, grid, cfg.tol)?;
    let mut manybody = fhs_chern(&sample)?;
    manybody.model_hash = Some(m.content_hash());
    write_curvature(cfg, &manybody)?;

    let cells = m.num_cells();
    let single_particle = if m.is_free() && m.n_particles > 0 && m.n_particles.is_multiple_of(cells) {
        let filled = m.n_particles / cells;
        let sp_grid = [grid[0] * m.cells[0], grid[1] * m.cells[1]];
        Some(strip(band_chern(&m, filled, sp_grid)?))
    } else {
        None
    };
    let agreement = single_particle.as_ref().map(|s| s.value == manybody.value);
    let status = (agreement == Some(false)).then(|| {
        CliError::with_code(EXIT_CHECK_FAILED, "many-body and single-particle Chern numbers disagree")
    });
    let payload = ChernPayload {
        model: model_label(cfg, &m),
        model_hash: m.content_hash(),
        particles: m.n_particles,
        grid: grid.to_vec(),
        min_gap: min_gap.is_finite().then_some(min_gap),
        manybody: strip(manybody),
        single_particle,
        agreement,
    };
    Ok((vec![Payload::Chern(payload)], status))
}

fn sectors(cfg: &RunConfig, m: LatticeModel) -> Result<Dispatch, CliError> {
    let blocks = momentum_sectors(&m)?;
    let rows: Vec<SectorRow> = blocks
        .iter()
        .map(|b| SectorRow {
            momentum: b.momentum.clone(),
            dim: b.dim,
            lowest: b.eigenvalues.iter().take(4).copied().collect(),
        })
        .collect();
    let total_dim = rows.iter().map(|r| r.dim).sum();
    let deviation = if cfg.check_direct_sum {
        let basis = build_basis(&m)?;
        let full = dense_spectrum(&build_hamiltonian(&m, &basis, &TwistPoint::zero(m.dim))?);
        let mut union: Vec<f64> = blocks.iter().flat_map(|b| b.eigenvalues.iter().copied()).collect();
        union.sort_by(f64::total_cmp);
        if union.len() != full.len() {
            Some(f64::INFINITY)
        } else {
            Some(union.iter().zip(&full).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        }
    } else {
        None
    };
    let status = match deviation {
        Some(d) if d.is_nan() || d >= DIRECT_SUM_TOL => Some(CliError::with_code(
            EXIT_CHECK_FAILED,
            format!("sector spectra deviate from the full spectrum by {d:.3e}"),
        )),
        _ => None,
    };
    let payload = SectorsPayload {
        model: model_label(cfg, &m),
        model_hash: m.content_hash(),
        total_dim,
        sectors: rows,
        // Non-finite deviations cannot round-trip through JSON.
        direct_sum_deviation: deviation.filter(|d| d.is_finite()),
    };
    Ok((vec![Payload::Sectors(payload)], status))
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn torsion(cfg: &RunConfig, m: LatticeModel) -> Result<Dispatch, CliError> {
    let cells = m.num_cells();
    if m.n_particles == 0 || !m.n_particles.is_multiple_of(cells) {
        return Err(CliError::validation(format!(
            "torsion needs a whole number of filled bands: N = {} over {cells} cells",
            m.n_particles
        )));
    }
    let filled = m.n_particles / cells;
    let meshes: Vec<usize> = if cfg.refine { vec![cfg.mesh, 2 * cfg.mesh] } else { vec![cfg.mesh] };
    let mut reports = Vec::with_capacity(meshes.len());
    for &mesh in &meshes {
        reports.push(f222_torsion(&m, filled, mesh)?);
    }
    write_curvature(cfg, reports.last().expect("at least one mesh"))?;
    let quantized = reports.iter().all(|r| r.quantization_distance < TORSION_QUANTIZATION_TOL);
    let consistent = reports.windows(2).all(|w| circular_distance(w[0].value, w[1].value) < TORSION_QUANTIZATION_TOL);
    let stable = quantized && consistent;
    let status = (!stable).then(|| {
        CliError::with_code(
            EXIT_MESH,
            "torsion invariant is not quantized or changes under refinement; use a finer mesh",
        )
    });
    let payload = TorsionPayload {
        model: model_label(cfg, &m),
        model_hash: m.content_hash(),
        filled_bands: filled,
        reports: reports.into_iter().map(strip).collect(),
        stable,
    };
    Ok((vec![Payload::Torsion(payload)], status))
}
