use serde::{Deserialize, Serialize};

/// Phase of one elementary plaquette, for external plotting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaquetteRecord {
    /// Face label for domain samples, empty for the torus.
    pub face: String,
    pub node: Vec<usize>,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub invariant: String,
    /// Integer for Chern numbers; a value in `[0, 1)` for torsion invariants.
    pub value: f64,
    /// Distance of the raw value to the nearest allowed value.
    pub quantization_distance: f64,
    /// `limit - max |plaquette phase|`.
    pub admissibility_margin: f64,
    pub grid: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_hash: Option<String>,
    #[serde(skip)]
    pub plaquettes: Vec<PlaquetteRecord>,
}

impl InvariantReport {
    /// The value as an integer, for Chern reports.
    pub fn integer(&self) -> i64 {
        self.value.round() as i64
    }

    /// CSV of the plaquette field: `face,node indices...,phase`.
    pub fn curvature_csv(&self) -> String {
        let width = self.plaquettes.iter().map(|p| p.node.len()).max().unwrap_or(0);
        let mut out = String::from("face");
        for k in 0..width {
            out.push_str(&format!(",i{k}"));
        }
        out.push_str(",phase\n");
        for p in &self.plaquettes {
            out.push_str(&p.face);
            for x in &p.node {
                out.push_str(&format!(",{x}"));
            }
            out.push_str(&format!(",{:.17e}\n", p.phase));
        }
        out
    }
}
