use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::record::{ResultRecord, ARTIFACT_VERSION};
use crate::RunConfig;

/// Everything that can change a result. Output format and cache location are
/// deliberately absent; the model enters by content, not by path.
#[derive(Serialize)]
struct KeyMaterial<'a> {
    artifact_version: &'a str,
    config: KeyConfig<'a>,
    model_sha256: Option<String>,
}

#[derive(Serialize)]
struct KeyConfig<'a> {
    subcommand: &'a str,
    group: &'a Option<String>,
    all_wallpaper: bool,
    statistics: Option<String>,
    grid: &'a Option<Vec<usize>>,
    mesh: usize,
    refine: bool,
    tol: Option<f64>,
    particles: Option<usize>,
    interaction_scale: Option<f64>,
    check_direct_sum: bool,
}

pub fn inputs_hash(cfg: &RunConfig, model_bytes: Option<&[u8]>) -> String {
    let material = KeyMaterial {
        artifact_version: ARTIFACT_VERSION,
        config: KeyConfig {
            subcommand: cfg.subcommand.name(),
            group: &cfg.group,
            all_wallpaper: cfg.all_wallpaper,
            statistics: cfg.statistics.map(|s| s.to_string()),
            grid: &cfg.grid,
            mesh: cfg.mesh,
            refine: cfg.refine,
            tol: cfg.tol,
            particles: cfg.particles,
            interaction_scale: cfg.interaction_scale,
            check_direct_sum: cfg.check_direct_sum,
        },
        model_sha256: model_bytes.map(|b| hex::encode(Sha256::digest(b))),
    };
    let text = serde_json::to_string(&material).expect("key material serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    key: String,
    records: Vec<ResultRecord>,
}

#[derive(Debug)]
pub enum Lookup {
    Hit(Vec<ResultRecord>),
    Miss,
    /// Present but unreadable or inconsistent; the reason is for the warning.
    Corrupt(String),
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf() }
    }

    pub fn entry_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Lookup {
        let path = self.entry_path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Lookup::Miss,
            Err(e) => return Lookup::Corrupt(e.to_string()),
        };
        let entry: Entry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(e) => return Lookup::Corrupt(e.to_string()),
        };
        if entry.key != key || entry.records.is_empty() || entry.records.iter().any(|r| r.inputs_hash != key) {
            return Lookup::Corrupt("entry does not match its key".into());
        }
        Lookup::Hit(entry.records)
    }

    /// Writes through a temporary file so readers never see a partial entry.
    pub fn store(&self, key: &str, records: &[ResultRecord]) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let entry = Entry {
            key: key.to_string(),
            records: records.to_vec(),
        };
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        fs::write(&tmp, serde_json::to_string(&entry).expect("entry serializes"))?;
        fs::rename(&tmp, self.entry_path(key))
    }
}
