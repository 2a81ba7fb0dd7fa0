use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crystalphase_core::berry::InvariantReport;
use crystalphase_core::cohomology::{CohomologyResult, Statistics};
use crystalphase_core::crystal::CatalogSummary;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRecord {
    pub artifact_version: String,
    pub subcommand: String,
    /// Cache key: hash of the model bytes and the result-relevant config.
    pub inputs_hash: String,
    pub payload: Payload,
    /// Seconds since the Unix epoch; the only nondeterministic field.
    pub timestamp: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Classification(ClassificationRow),
    Chern(ChernPayload),
    Sectors(SectorsPayload),
    Torsion(TorsionPayload),
    Group(CatalogSummary),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassificationRow {
    pub group: String,
    pub statistics: Statistics,
    /// Rendered form of `result.group`.
    pub h2: String,
    pub result: CohomologyResult,
    /// Static reference columns keyed by column id; not computed.
    pub reference: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChernPayload {
    pub model: String,
    pub model_hash: String,
    pub particles: usize,
    pub grid: Vec<usize>,
    /// Smallest many-body gap over the twist grid; `None` when no level lies
    /// above the ground space.
    pub min_gap: Option<f64>,
    pub manybody: InvariantReport,
    /// Lowest-band comparison for free fermions at integer filling.
    pub single_particle: Option<InvariantReport>,
    pub agreement: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorRow {
    pub momentum: Vec<usize>,
    pub dim: usize,
    /// Up to four lowest eigenvalues of the block.
    pub lowest: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorsPayload {
    pub model: String,
    pub model_hash: String,
    pub total_dim: usize,
    pub sectors: Vec<SectorRow>,
    /// Max deviation between the sorted sector union and the full spectrum.
    pub direct_sum_deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorsionPayload {
    pub model: String,
    pub model_hash: String,
    pub filled_bands: usize,
    /// One report per mesh, coarsest first.
    pub reports: Vec<InvariantReport>,
    pub stable: bool,
}

impl ResultRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}
