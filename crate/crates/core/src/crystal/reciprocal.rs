use serde::Serialize;

use crate::exactlinalg::IntMatrix;

use super::{unimodular_inverse, CrystalError, PointGroupAction, SpaceGroupSpec};

/// A word as a list of syllables `(generator, exponent)`.
pub type Word = Vec<(usize, i64)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl GroupPresentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self, CrystalError> {
        for (r, w) in relators.iter().enumerate() {
            if let Some(&(g, _)) = w.iter().find(|(g, _)| *g >= generators.len()) {
                return Err(CrystalError::BadRelator { relator: r, generator: g });
            }
        }
        Ok(Self { generators, relators })
    }

    /// Exponent-sum matrix, one row per relator.
    pub fn relation_matrix(&self) -> IntMatrix {
        let n = self.generators.len();
        let mut m = IntMatrix::zeros(self.relators.len(), n);
        for (r, w) in self.relators.iter().enumerate() {
            for &(g, e) in w {
                m[(r, g)] += e;
            }
        }
        m
    }

    /// Human-readable relator, e.g. `r4 a1 r4^-1 a2^-1`.
    pub fn render_relator(&self, r: usize) -> String {
        let w = &self.relators[r];
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .map(|&(g, e)| match e {
                1 => self.generators[g].clone(),
                _ => format!("{}^{}", self.generators[g], e),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// `G* = L* ⋊ P` with the contragredient action on reciprocal coordinates.
#[derive(Clone, Debug)]
pub struct ReciprocalGroup {
    pub spec: SpaceGroupSpec,
    pub direct: PointGroupAction,
    /// Same element indexing as `direct`; element `k` is `direct[k]^{-T}`.
    pub action: PointGroupAction,
    pub presentation: GroupPresentation,
}

pub fn reciprocal_action(spec: &SpaceGroupSpec) -> Result<ReciprocalGroup, CrystalError> {
    let direct = spec.point_group()?;
    let action = direct.map_elements(|m| {
        unimodular_inverse(m)
            .expect("point-group matrices are unimodular")
            .transpose()
    })?;
    let mut recip = ReciprocalGroup {
        spec: spec.clone(),
        direct,
        action,
        presentation: GroupPresentation {
            generators: Vec::new(),
            relators: Vec::new(),
        },
    };
    recip.presentation = semidirect_presentation(&recip)?;
    Ok(recip)
}

/// Rational finite order of the von Dyck group `D(p, q, r)`, if spherical.
fn von_dyck_order(p: usize, q: usize, r: usize) -> Option<usize> {
    // 1/p + 1/q + 1/r - 1 = (qr + pr + pq - pqr) / pqr, order = 2 / that
    let num = (q * r + p * r + p * q) as i64 - (p * q * r) as i64;
    if num <= 0 {
        return None;
    }
    let order = 2 * (p * q * r) as i64;
    (order % num == 0).then(|| (order / num) as usize)
}

/// Point-group relators: `g^n` for cyclic generation, the von Dyck triple
/// `a^p, b^q, (ab)^r` for two generators.
fn point_relators(g: &PointGroupAction, offset: usize) -> Result<Vec<Word>, CrystalError> {
    let gens = g.generators();
    match gens.len() {
        0 => Ok(Vec::new()),
        1 => {
            let n = g.element_order(gens[0]);
            if n != g.order() {
                return Err(CrystalError::UnsupportedPresentation(
                    "single generator does not generate the group".into(),
                ));
            }
            Ok(vec![vec![(offset, n as i64)]])
        }
        2 => {
            let (a, b) = (gens[0], gens[1]);
            let (p, q) = (g.element_order(a), g.element_order(b));
            let r = g.element_order(g.mul(a, b));
            if von_dyck_order(p, q, r) != Some(g.order()) {
                return Err(CrystalError::UnsupportedPresentation(format!(
                    "von Dyck relators ({p},{q},{r}) do not present a group of order {}",
                    g.order()
                )));
            }
            let ab: Word = (0..r).flat_map(|_| [(offset, 1), (offset + 1, 1)]).collect();
            Ok(vec![vec![(offset, p as i64)], vec![(offset + 1, q as i64)], ab])
        }
        n => Err(CrystalError::UnsupportedPresentation(format!(
            "{n} point-group generators"
        ))),
    }
}

pub fn semidirect_presentation(recip: &ReciprocalGroup) -> Result<GroupPresentation, CrystalError> {
    let d = recip.spec.dim();
    let mut names: Vec<String> = (1..=d).map(|i| format!("a{i}")).collect();
    names.extend(recip.action.generator_names().iter().cloned());
    let mut relators = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            relators.push(vec![(i, 1), (j, 1), (i, -1), (j, -1)]);
        }
    }
    relators.extend(point_relators(&recip.action, d)?);
    for (slot, &g) in recip.action.generators().iter().enumerate() {
        let p = d + slot;
        let m = recip.action.element(g);
        for i in 0..d {
            // p a_i p^-1 = prod_j a_j^{m[j][i]}
            let mut w: Word = vec![(p, 1), (i, 1), (p, -1)];
            for j in (0..d).rev() {
                let e = i64::try_from(&m[(j, i)]).expect("small action entries");
                if e != 0 {
                    w.push((j, -e));
                }
            }
            relators.push(w);
        }
    }
    GroupPresentation::new(names, relators)
}
