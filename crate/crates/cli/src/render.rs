use std::fmt::Write;

use crystalphase_core::berry::InvariantReport;
use crystalphase_core::cohomology::reference_tables;

use crate::record::*;
use crate::{Format, RunConfig};

pub fn render(cfg: &RunConfig, records: &[ResultRecord]) -> String {
    match cfg.format {
        Format::Jsonl => records.iter().map(|r| r.to_json_line() + "\n").collect(),
        Format::Csv => csv(records),
        Format::Text => text(records),
    }
}

/// `0` or `1/2` when quantized, otherwise the raw value.
pub fn torsion_label(r: &InvariantReport) -> String {
    if r.quantization_distance < 1e-3 {
        if (r.value - 0.5).abs() < 1e-3 { "1/2".into() } else { "0".into() }
    } else {
        format!("{:.6}", r.value)
    }
}

fn gap_text(g: Option<f64>) -> String {
    g.map_or_else(|| "none above ground space".into(), |g| format!("{g:.6}"))
}

fn text(records: &[ResultRecord]) -> String {
    let mut out = String::new();
    let mut any_reference = false;
    for r in records {
        match &r.payload {
            Payload::Classification(row) => {
                let _ = write!(
                    out,
                    "{}: {} [{}, {}]",
                    row.group, row.h2, row.result.exactness, row.result.method
                );
                if !row.reference.is_empty() {
                    any_reference = true;
                    let cols: Vec<String> = row
                        .reference
                        .iter()
                        .map(|(col, v)| {
                            let title = reference_tables().columns.get(col).map_or(col.as_str(), |c| c.title.as_str());
                            format!("{title} = {v}")
                        })
                        .collect();
                    let _ = write!(out, "  | reference: {}", cols.join("; "));
                }
                out.push('\n');
            }
            Payload::Chern(c) => {
                let m = &c.manybody;
                let _ = writeln!(out, "model {} (sha256 {})", c.model, &c.model_hash[..12]);
                let _ = writeln!(
                    out,
                    "many-body Chern number: {} (N = {}, twist grid {}x{}, min gap {}, quantization distance {:.1e}, admissibility margin {:.3})",
                    m.integer(),
                    c.particles,
                    c.grid[0],
                    c.grid[1],
                    gap_text(c.min_gap),
                    m.quantization_distance,
                    m.admissibility_margin
                );
                if let Some(s) = &c.single_particle {
                    let _ = writeln!(
                        out,
                        "single-particle Chern number: {} (filled bands, momentum grid {}x{})",
                        s.integer(),
                        s.grid[0],
                        s.grid[1]
                    );
                }
                if let Some(a) = c.agreement {
                    let _ = writeln!(out, "agreement: {}", if a { "yes" } else { "NO" });
                }
            }
            Payload::Sectors(s) => {
                let _ = writeln!(
                    out,
                    "model {}: {} momentum sectors, total dimension {}",
                    s.model,
                    s.sectors.len(),
                    s.total_dim
                );
                for row in &s.sectors {
                    let k: Vec<String> = row.momentum.iter().map(|n| n.to_string()).collect();
                    let lowest: Vec<String> = row.lowest.iter().map(|e| format!("{e:.10}")).collect();
                    let _ = writeln!(out, "  n = ({})  dim {}  lowest [{}]", k.join(", "), row.dim, lowest.join(", "));
                }
                if let Some(d) = s.direct_sum_deviation {
                    let verdict = if d < crate::commands::DIRECT_SUM_TOL { "pass" } else { "FAIL" };
                    let _ = writeln!(out, "direct-sum check: max deviation {d:.3e} ({verdict})");
                }
            }
            Payload::Torsion(t) => {
                let _ = writeln!(out, "model {} ({} filled band(s))", t.model, t.filled_bands);
                for r in &t.reports {
                    let _ = writeln!(
                        out,
                        "  mesh {}^3: torsion invariant {} (value {:.12}, quantization distance {:.1e}, admissibility margin {:.3})",
                        r.grid.first().copied().unwrap_or(0),
                        torsion_label(r),
                        r.value,
                        r.quantization_distance,
                        r.admissibility_margin
                    );
                }
                let _ = writeln!(out, "stable: {}", if t.stable { "yes" } else { "NO" });
            }
            Payload::Group(g) => {
                let _ = writeln!(
                    out,
                    "{:<6} dim {}  {:<10} point group {} (order {})",
                    g.name, g.dim, g.kind, g.point_group, g.point_group_order
                );
            }
        }
    }
    if any_reference {
        let tables = reference_tables();
        let _ = writeln!(out, "reference columns ({}):", tables.label);
        for c in tables.columns.values() {
            let _ = writeln!(out, "  {}: {}", c.title, c.source);
        }
    }
    out
}

fn csv(records: &[ResultRecord]) -> String {
    let mut out = String::new();
    let Some(first) = records.first() else { return out };
    let header = match &first.payload {
        Payload::Classification(_) => {
            let cols: Vec<String> = reference_tables().columns.keys().map(|c| format!("reference_{c}")).collect();
            format!("group,statistics,h2,exactness,method,{}", cols.join(","))
        }
        Payload::Chern(_) => "model,particles,grid,manybody_chern,single_particle_chern,agreement,min_gap,quantization_distance,admissibility_margin".into(),
        Payload::Sectors(_) => "model,momentum,dim,lowest".into(),
        Payload::Torsion(_) => "model,mesh,value,quantization_distance,admissibility_margin,stable".into(),
        Payload::Group(_) => "name,dim,kind,point_group,point_group_order".into(),
    };
    out.push_str(&header);
    out.push('\n');
    for r in records {
        match &r.payload {
            Payload::Classification(row) => {
                let refs: Vec<String> = reference_tables()
                    .columns
                    .keys()
                    .map(|c| row.reference.get(c).cloned().unwrap_or_default())
                    .collect();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    row.group,
                    row.statistics,
                    row.h2,
                    row.result.exactness,
                    row.result.method,
                    refs.join(",")
                );
            }
            Payload::Chern(c) => {
                let _ = writeln!(
                    out,
                    "{},{},{}x{},{},{},{},{},{:e},{}",
                    c.model,
                    c.particles,
                    c.grid[0],
                    c.grid[1],
                    c.manybody.integer(),
                    c.single_particle.as_ref().map(|s| s.integer().to_string()).unwrap_or_default(),
                    c.agreement.map(|a| a.to_string()).unwrap_or_default(),
                    c.min_gap.map(|g| g.to_string()).unwrap_or_default(),
                    c.manybody.quantization_distance,
                    c.manybody.admissibility_margin
                );
            }
            Payload::Sectors(s) => {
                for row in &s.sectors {
                    let k: Vec<String> = row.momentum.iter().map(|n| n.to_string()).collect();
                    let lowest: Vec<String> = row.lowest.iter().map(|e| e.to_string()).collect();
                    let _ = writeln!(out, "{},{},{},{}", s.model, k.join(" "), row.dim, lowest.join(" "));
                }
            }
            Payload::Torsion(t) => {
                for rep in &t.reports {
                    let _ = writeln!(
                        out,
                        "{},{},{},{:e},{},{}",
                        t.model,
                        rep.grid.first().copied().unwrap_or(0),
                        rep.value,
                        rep.quantization_distance,
                        rep.admissibility_margin,
                        t.stable
                    );
                }
            }
            Payload::Group(g) => {
                let _ = writeln!(out, "{},{},{},{},{}", g.name, g.dim, g.kind, g.point_group, g.point_group_order);
            }
        }
    }
    out
}
