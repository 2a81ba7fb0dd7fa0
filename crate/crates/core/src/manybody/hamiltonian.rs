use num_complex::Complex64;

use super::{LatticeModel, ManyBodyBasis, ManyBodyError, SparseHermitian, TwistPoint};

const HERMITIAN_TOL: f64 = 1e-12;

/// Mode-level terms: hoppings `(a, b, amp)` for `amp c†_a c_b`, densities
/// `(a, b, v)` for `v n_a n_b`, and one-body diagonal energies per mode.
struct ModeTerms {
    hops: Vec<(usize, usize, Complex64)>,
    densities: Vec<(usize, usize, f64)>,
    onsite: Vec<f64>,
}

fn mode_terms(model: &LatticeModel, theta: &TwistPoint) -> ModeTerms {
    let mut hops = Vec::new();
    let mut densities = Vec::new();
    let mut onsite = vec![0.0; model.modes()];
    for c in 0..model.num_cells() {
        let cell = model.cell_coords(c);
        for (o, &e) in model.onsite.iter().enumerate() {
            onsite[model.mode(o, &cell)] += e;
        }
        for h in &model.hoppings {
            let a = model.mode(h.i, &cell);
            let (target, wraps) = model.shift(&cell, &h.d);
            let b = model.mode(h.j, &target);
            let phase: f64 = wraps.iter().zip(theta.angles()).map(|(&w, &t)| w as f64 * t).sum();
            hops.push((a, b, h.t * Complex64::from_polar(1.0, phase)));
        }
        for it in &model.interactions {
            let a = model.mode(it.i, &cell);
            let (target, _) = model.shift(&cell, &it.d);
            densities.push((a, model.mode(it.j, &target), it.v));
        }
    }
    for im in &model.impurities {
        onsite[model.mode(im.orbital, &im.cell)] += im.energy;
    }
    ModeTerms {
        hops,
        densities,
        onsite,
    }
}

/// Sign of `c†_a c_b |s>` (with `b` occupied, `a` empty or equal to `b`) in
/// the ascending-mode ordering convention.
pub fn fermion_hop_sign(s: u64, a: usize, b: usize) -> f64 {
    let below = |x: u64, m: usize| (x & ((1u64 << m) - 1)).count_ones();
    let removed = s & !(1u64 << b);
    if (below(s, b) + below(removed, a)) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn build_hamiltonian(
    model: &LatticeModel,
    basis: &ManyBodyBasis,
    theta: &TwistPoint,
) -> Result<SparseHermitian, ManyBodyError> {
    if theta.angles().len() != model.dim {
        return Err(ManyBodyError::InvalidModel(format!(
            "twist has {} angles, model dimension is {}",
            theta.angles().len(),
            model.dim
        )));
    }
    let terms = mode_terms(model, theta);
    let dim = basis.dim();
    let mut trip: Vec<(usize, usize, Complex64)> = Vec::with_capacity(dim * (terms.hops.len() / 2 + 1));
    match basis {
        ManyBodyBasis::Fermion { states, .. } => {
            for (col, &s) in states.iter().enumerate() {
                let occ = |m: usize| (s >> m & 1) as f64;
                let mut diag = 0.0;
                for (m, &e) in terms.onsite.iter().enumerate() {
                    diag += e * occ(m);
                }
                for &(a, b, v) in &terms.densities {
                    diag += v * occ(a) * occ(b);
                }
                let mut dc = Complex64::new(diag, 0.0);
                for &(a, b, amp) in &terms.hops {
                    if s >> b & 1 == 0 {
                        continue;
                    }
                    if a == b {
                        dc += amp;
                        continue;
                    }
                    if s >> a & 1 == 1 {
                        continue;
                    }
                    let t = (s & !(1u64 << b)) | (1u64 << a);
                    let row = basis.fermion_index(t).expect("particle number conserved");
                    trip.push((row, col, amp * fermion_hop_sign(s, a, b)));
                }
                trip.push((col, col, dc));
            }
        }
        ManyBodyBasis::Boson { states, .. } => {
            let cap = match model.statistics {
                super::ParticleStatistics::Boson { max_occupancy } => max_occupancy,
                _ => None,
            };
            for (col, s) in states.iter().enumerate() {
                let n = |m: usize| s[m] as f64;
                let mut diag = 0.0;
                for (m, &e) in terms.onsite.iter().enumerate() {
                    diag += e * n(m);
                }
                for &(a, b, v) in &terms.densities {
                    diag += v * n(a) * n(b);
                }
                let mut dc = Complex64::new(diag, 0.0);
                let mut t = s.clone();
                for &(a, b, amp) in &terms.hops {
                    if s[b] == 0 {
                        continue;
                    }
                    if a == b {
                        dc += amp * n(a);
                        continue;
                    }
                    if cap.is_some_and(|c| s[a] as usize >= c) {
                        continue;
                    }
                    let f = (n(b) * (n(a) + 1.0)).sqrt();
                    t[b] -= 1;
                    t[a] += 1;
                    let row = basis.boson_index(&t).expect("particle number conserved");
                    t[a] -= 1;
                    t[b] += 1;
                    trip.push((row, col, amp * f));
                }
                trip.push((col, col, dc));
            }
        }
    }
    let h = SparseHermitian::from_triplets(dim, trip);
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(ManyBodyError::NonHermitian(format!(
            "assembled operator deviates from Hermitian by {defect:.3e}"
        )));
    }
    Ok(h)
}

/// Image of mode `m` under translation by one cell along `mu`.
pub fn translate_mode(model: &LatticeModel, m: usize, mu: usize) -> usize {
    let o = m % model.orbitals;
    let cell = model.cell_coords(m / model.orbitals);
    let mut d = vec![0i64; model.dim];
    d[mu] = 1;
    let (t, _) = model.shift(&cell, &d);
    model.mode(o, &t)
}

/// Translation along `mu` as a signed permutation of basis states:
/// entry `k` is `(index of T|k>, sign)`.
pub fn translation_action(model: &LatticeModel, basis: &ManyBodyBasis, mu: usize) -> Vec<(usize, f64)> {
    let perm: Vec<usize> = (0..model.modes()).map(|m| translate_mode(model, m, mu)).collect();
    match basis {
        ManyBodyBasis::Fermion { states, .. } => states
            .iter()
            .map(|&s| {
                let images: Vec<usize> = (0..model.modes()).filter(|&m| s >> m & 1 == 1).map(|m| perm[m]).collect();
                let mut inversions = 0;
                for i in 0..images.len() {
                    for j in i + 1..images.len() {
                        if images[i] > images[j] {
                            inversions += 1;
                        }
                    }
                }
                let t = images.iter().fold(0u64, |acc, &m| acc | 1u64 << m);
                let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
                (basis.fermion_index(t).expect("translation preserves N"), sign)
            })
            .collect(),
        ManyBodyBasis::Boson { states, .. } => states
            .iter()
            .map(|s| {
                let mut t = vec![0u8; s.len()];
                for (m, &k) in s.iter().enumerate() {
                    t[perm[m]] = k;
                }
                (basis.boson_index(&t).expect("translation preserves N"), 1.0)
            })
            .collect(),
    }
}
