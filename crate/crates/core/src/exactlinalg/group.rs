use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::{smith_normal_form, IntMatrix, LinalgError};

/// Finitely generated abelian group `Z^free_rank + Z_{t1} + ... + Z_{tk}`
/// with `t1 | t2 | ... | tk` and every `ti >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinAbGroup {
    #[serde(serialize_with = "ser_factors", deserialize_with = "de_factors")]
    torsion: Vec<BigInt>,
    free_rank: usize,
}

impl FinAbGroup {
    pub fn trivial() -> Self {
        Self {
            torsion: Vec::new(),
            free_rank: 0,
        }
    }

    pub fn free(rank: usize) -> Self {
        Self {
            torsion: Vec::new(),
            free_rank: rank,
        }
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_factors(0, &[BigInt::from(n)])
    }

    /// Canonicalizes an arbitrary list of cyclic orders. Units are dropped and
    /// zeros count as free summands.
    pub fn from_factors(free_rank: usize, factors: &[BigInt]) -> Self {
        let n = factors.len();
        let snf = smith_normal_form(&IntMatrix::diagonal(n, n, factors));
        let r = snf.rank();
        Self::from_invariant_chain(free_rank + (n - r), &snf.d[..r])
    }

    pub fn from_u64(free_rank: usize, factors: &[u64]) -> Self {
        let f: Vec<BigInt> = factors.iter().map(|&x| BigInt::from(x)).collect();
        Self::from_factors(free_rank, &f)
    }

    /// Assumes the nonzero entries already form a divisibility chain.
    pub(crate) fn from_invariant_chain(free_rank: usize, chain: &[BigInt]) -> Self {
        let torsion = chain
            .iter()
            .map(|x| x.abs())
            .filter(|x| !x.is_one())
            .collect();
        Self { torsion, free_rank }
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn torsion_u64(&self) -> Option<Vec<u64>> {
        self.torsion.iter().map(|x| x.to_u64()).collect()
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn torsion_subgroup(&self) -> Self {
        Self {
            torsion: self.torsion.clone(),
            free_rank: 0,
        }
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().fold(BigInt::one(), |acc, x| acc * x)
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut f = self.torsion.clone();
        f.extend(other.torsion.iter().cloned());
        Self::from_factors(self.free_rank + other.free_rank, &f)
    }

    pub fn sum_all<'a, I: IntoIterator<Item = &'a FinAbGroup>>(groups: I) -> Self {
        groups
            .into_iter()
            .fold(Self::trivial(), |acc, g| acc.direct_sum(g))
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let mut j = i;
            while j < self.torsion.len() && self.torsion[j] == self.torsion[i] {
                j += 1;
            }
            match j - i {
                1 => parts.push(format!("Z_{}", self.torsion[i])),
                k => parts.push(format!("Z_{}^{}", self.torsion[i], k)),
            }
            i = j;
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl FromStr for FinAbGroup {
    type Err = LinalgError;

    /// Accepts the rendered form, in any summand order: `0`, `Z^2 + Z_2^3`,
    /// `Z_2 + Z_4 + Z`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LinalgError::GroupParse(s.to_string());
        let s = s.trim();
        if s == "0" {
            return Ok(Self::trivial());
        }
        let mut free = 0usize;
        let mut factors = Vec::new();
        for term in s.split('+') {
            let term = term.trim();
            let (base, exp) = match term.split_once('^') {
                Some((b, e)) => (b.trim(), e.trim().parse::<usize>().map_err(|_| bad())?),
                None => (term, 1),
            };
            if base == "Z" {
                free += exp;
            } else if let Some(n) = base.strip_prefix("Z_") {
                let n: BigInt = n.parse().map_err(|_| bad())?;
                if n < BigInt::from(2) {
                    return Err(bad());
                }
                factors.extend(std::iter::repeat_n(n, exp));
            } else {
                return Err(bad());
            }
        }
        Ok(Self::from_factors(free, &factors))
    }
}

fn ser_factors<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        match x.to_u64() {
            Some(n) => seq.serialize_element(&n)?,
            None => seq.serialize_element(&x.to_string())?,
        }
    }
    seq.end()
}

fn de_factors<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Factor {
        Small(u64),
        Big(String),
    }
    let raw = Vec::<Factor>::deserialize(d)?;
    let vals = raw
        .into_iter()
        .map(|f| match f {
            Factor::Small(n) => Ok(BigInt::from(n)),
            Factor::Big(s) => s.parse::<BigInt>().map_err(de::Error::custom),
        })
        .collect::<Result<Vec<_>, _>>()?;
    for w in vals.windows(2) {
        if !(&w[1] % &w[0]).is_zero() {
            return Err(de::Error::custom("torsion factors must form a divisibility chain"));
        }
    }
    if vals.iter().any(|x| *x < BigInt::from(2)) {
        return Err(de::Error::custom("torsion factors must be at least 2"));
    }
    Ok(vals)
}
