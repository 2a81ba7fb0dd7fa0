use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;

const REFERENCE_JSON: &str = include_str!("../../data/reference_tables.json");

/// Static comparison columns. Values are displayed verbatim and never computed.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceTables {
    pub format: String,
    pub version: u32,
    pub label: String,
    pub columns: BTreeMap<String, ReferenceColumn>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceColumn {
    pub title: String,
    pub source: String,
    pub values: BTreeMap<String, String>,
}

impl ReferenceTables {
    pub fn value(&self, column: &str, group: &str) -> Option<&str> {
        self.columns.get(column)?.values.get(group).map(String::as_str)
    }
}

pub fn reference_tables() -> &'static ReferenceTables {
    static TABLES: OnceLock<ReferenceTables> = OnceLock::new();
    TABLES.get_or_init(|| serde_json::from_str(REFERENCE_JSON).expect("embedded reference data parses"))
}

/// Raw text of the shipped reference file.
pub fn reference_source() -> &'static str {
    REFERENCE_JSON
}
