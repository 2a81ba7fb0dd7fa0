use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{BerryError, BundleSample, InvariantReport, PlaquetteRecord, DEFAULT_ADMISSIBILITY_LIMIT};

/// One link of a path. With `op` set the step crosses an identification and
/// the link is `det(ψ_from† op ψ_to)`.
#[derive(Clone, Debug)]
pub struct PathStep {
    pub from: usize,
    pub to: usize,
    pub op: Option<DMatrix<Complex64>>,
}

#[derive(Clone, Debug, Default)]
pub struct ClosedPath {
    pub steps: Vec<PathStep>,
}

impl ClosedPath {
    /// Plain path through `nodes`, returning to the first node.
    pub fn cycle(nodes: &[usize]) -> Self {
        let steps = (0..nodes.len())
            .map(|k| PathStep {
                from: nodes[k],
                to: nodes[(k + 1) % nodes.len()],
                op: None,
            })
            .collect();
        Self { steps }
    }

    /// Plain steps along `nodes`, then a sewn step from the last node back to
    /// the first through `op`.
    pub fn sewn(nodes: &[usize], op: DMatrix<Complex64>) -> Self {
        let mut steps: Vec<PathStep> = nodes
            .windows(2)
            .map(|w| PathStep {
                from: w[0],
                to: w[1],
                op: None,
            })
            .collect();
        steps.push(PathStep {
            from: *nodes.last().expect("nonempty path"),
            to: nodes[0],
            op: Some(op),
        });
        Self { steps }
    }

    fn check_closed(&self) -> Result<(), BerryError> {
        let first = self.steps.first().ok_or_else(|| BerryError::OpenPath("empty path".into()))?;
        for (k, w) in self.steps.windows(2).enumerate() {
            if w[0].to != w[1].from {
                return Err(BerryError::OpenPath(format!(
                    "step {k} ends at node {} but step {} starts at node {}",
                    w[0].to,
                    k + 1,
                    w[1].from
                )));
            }
        }
        let last = self.steps.last().expect("nonempty");
        if last.to != first.from {
            return Err(BerryError::OpenPath(format!(
                "path ends at node {} instead of node {}",
                last.to, first.from
            )));
        }
        Ok(())
    }
}

pub fn wilson_holonomy(sample: &BundleSample, path: &ClosedPath) -> Result<Complex64, BerryError> {
    path.check_closed()?;
    let mut acc = Complex64::new(1.0, 0.0);
    for s in &path.steps {
        let link = match &s.op {
            None => sample.link_between(s.from, s.to)?,
            Some(op) => sample.sewn_link(s.from, s.to, op)?,
        };
        acc *= link;
    }
    Ok(acc / acc.norm())
}

/// Oriented elementary cell of a surface, nodes in boundary order.
#[derive(Clone, Debug)]
pub struct Plaquette {
    pub nodes: Vec<usize>,
    pub face: String,
    pub coords: Vec<usize>,
}

/// A 2-chain made of plaquettes with consistent orientation.
#[derive(Clone, Debug, Default)]
pub struct Surface {
    pub plaquettes: Vec<Plaquette>,
}

/// `(arg Hol_l − ½ Σ_X F) / 2π mod 1`, with plaquette phases and the holonomy
/// taken on the principal branch. For a bundle on the quotient the value lies
/// in {0, 1/2}; the report carries the distance to that set.
pub fn torsion_invariant(sample: &BundleSample, l: &ClosedPath, x: &Surface) -> Result<InvariantReport, BerryError> {
    torsion_invariant_with_limit(sample, l, x, DEFAULT_ADMISSIBILITY_LIMIT)
}

pub fn torsion_invariant_with_limit(
    sample: &BundleSample,
    l: &ClosedPath,
    x: &Surface,
    limit: f64,
) -> Result<InvariantReport, BerryError> {
    if sample.identifications.is_empty() {
        return Err(BerryError::InvalidSample("torsion invariant needs identification data".into()));
    }
    sample.check_identifications()?;
    let hol = wilson_holonomy(sample, l)?;
    let mut records = Vec::with_capacity(x.plaquettes.len());
    let mut worst: f64 = 0.0;
    for p in &x.plaquettes {
        let phase = wilson_holonomy(sample, &ClosedPath::cycle(&p.nodes))?.arg();
        if phase.abs() >= limit {
            return Err(BerryError::Inadmissible {
                at: format!("{} {:?}", p.face, p.coords),
                phase,
                limit,
            });
        }
        worst = worst.max(phase.abs());
        records.push(PlaquetteRecord {
            face: p.face.clone(),
            node: p.coords.clone(),
            phase,
        });
    }
    let flux: f64 = records.iter().map(|r| r.phase).sum();
    let mut value = ((hol.arg() - 0.5 * flux) / TAU).rem_euclid(1.0);
    let distance = [0.0, 0.5, 1.0].iter().map(|c| (value - c).abs()).fold(f64::INFINITY, f64::min);
    if (1.0 - value) < 1e-9 {
        value = 0.0;
    }
    Ok(InvariantReport {
        invariant: "torsion".into(),
        value,
        quantization_distance: distance,
        admissibility_margin: limit - worst,
        grid: Vec::new(),
        model_hash: None,
        plaquettes: records,
    })
}
