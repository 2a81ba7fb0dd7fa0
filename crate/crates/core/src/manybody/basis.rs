use super::{LatticeModel, ManyBodyError, ParticleStatistics};

/// Occupation-number basis of the `N`-particle sector.
///
/// Fermionic configurations are bitsets over modes sorted as integers;
/// bosonic ones are occupation vectors sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ManyBodyBasis {
    Fermion { modes: usize, states: Vec<u64> },
    Boson { modes: usize, states: Vec<Vec<u8>> },
}

pub fn build_basis(model: &LatticeModel) -> Result<ManyBodyBasis, ManyBodyError> {
    let modes = model.modes();
    let n = model.n_particles;
    match model.statistics {
        ParticleStatistics::Fermion => {
            if n > modes {
                return Err(ManyBodyError::TooManyParticles { n, capacity: modes });
            }
            Ok(ManyBodyBasis::Fermion {
                modes,
                states: fermion_states(modes, n),
            })
        }
        ParticleStatistics::Boson { max_occupancy } => {
            let cap = max_occupancy.unwrap_or(n).min(n);
            if cap.max(1) * modes < n {
                return Err(ManyBodyError::TooManyParticles {
                    n,
                    capacity: cap * modes,
                });
            }
            if cap > u8::MAX as usize {
                return Err(ManyBodyError::InvalidModel("boson occupancy above 255".into()));
            }
            let mut states = Vec::new();
            boson_states(modes, n, cap, &mut Vec::with_capacity(modes), &mut states);
            Ok(ManyBodyBasis::Boson { modes, states })
        }
    }
}

fn fermion_states(modes: usize, n: usize) -> Vec<u64> {
    if n == 0 {
        return vec![0];
    }
    let limit: u128 = 1u128 << modes;
    let mut out = Vec::new();
    let mut x: u128 = (1u128 << n) - 1;
    // Gosper's hack: next integer with the same popcount
    while x < limit {
        out.push(x as u64);
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

fn boson_states(modes: usize, left: usize, cap: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if cur.len() == modes {
        if left == 0 {
            out.push(cur.clone());
        }
        return;
    }
    let remaining_modes = modes - cur.len() - 1;
    for k in 0..=cap.min(left) {
        if left - k > remaining_modes * cap {
            continue;
        }
        cur.push(k as u8);
        boson_states(modes, left - k, cap, cur, out);
        cur.pop();
    }
}

impl ManyBodyBasis {
    pub fn dim(&self) -> usize {
        match self {
            Self::Fermion { states, .. } => states.len(),
            Self::Boson { states, .. } => states.len(),
        }
    }

    pub fn modes(&self) -> usize {
        match self {
            Self::Fermion { modes, .. } | Self::Boson { modes, .. } => *modes,
        }
    }

    pub fn fermion_index(&self, s: u64) -> Option<usize> {
        match self {
            Self::Fermion { states, .. } => states.binary_search(&s).ok(),
            Self::Boson { .. } => None,
        }
    }

    pub fn boson_index(&self, s: &[u8]) -> Option<usize> {
        match self {
            Self::Boson { states, .. } => states.binary_search_by(|x| x.as_slice().cmp(s)).ok(),
            Self::Fermion { .. } => None,
        }
    }

    /// Occupation numbers of configuration `k`.
    pub fn occupations(&self, k: usize) -> Vec<u8> {
        match self {
            Self::Fermion { modes, states } => (0..*modes).map(|m| (states[k] >> m & 1) as u8).collect(),
            Self::Boson { states, .. } => states[k].clone(),
        }
    }
}
