use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crystalphase_core::cohomology::Statistics;
use crystalphase_core::crystal::catalog_lookup;

use crate::CliError;

pub const CACHE_ENV: &str = "CRYSTALPHASE_CACHE";

#[derive(Parser, Debug)]
#[command(name = "crystalphase", version, about = "Crystalline phase classification and many-body invariants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify invertible phases of a symmorphic group (degree-2 equivariant cohomology).
    Classify(Flags),
    /// Many-body Chern number over the twist torus.
    Chern(Flags),
    /// Total-momentum block decomposition at zero twist.
    Sectors(Flags),
    /// Torsion invariant on the quarter-cube domain of a face-centered model.
    Torsion(Flags),
    /// List the shipped group catalog.
    ListGroups(Flags),
}

#[derive(clap::Args, Debug, Default, Clone)]
pub struct Flags {
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub all_wallpaper: bool,
    #[arg(long, value_enum)]
    pub statistics: Option<StatisticsArg>,
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Twist grid, `N` or `NxM`.
    #[arg(long, value_name = "N[xN]")]
    pub grid: Option<String>,
    /// Intervals per edge of the torsion domain.
    #[arg(long)]
    pub mesh: Option<usize>,
    /// Also run the torsion invariant at twice the mesh and compare.
    #[arg(long)]
    pub refine: bool,
    /// Degeneracy and gap tolerance (absolute energy).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_name = "DIR")]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub no_cache: bool,
    #[arg(long, value_name = "PATH")]
    pub emit_curvature: Option<PathBuf>,
    /// Override the particle number of the model.
    #[arg(long)]
    pub particles: Option<usize>,
    /// Multiply every interaction strength of the model.
    #[arg(long)]
    pub interaction_scale: Option<f64>,
    /// Compare the union of sector spectra with full diagonalization.
    #[arg(long)]
    pub check_direct_sum: bool,
    /// JSON file with the same keys as the flags (snake_case); flags win.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticsArg {
    Boson,
    Fermion,
}

impl From<StatisticsArg> for Statistics {
    fn from(s: StatisticsArg) -> Self {
        match s {
            StatisticsArg::Boson => Statistics::Boson,
            StatisticsArg::Fermion => Statistics::Fermion,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubcommandKind {
    Classify,
    Chern,
    Sectors,
    Torsion,
    ListGroups,
}

impl SubcommandKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Classify => "classify",
            Self::Chern => "chern",
            Self::Sectors => "sectors",
            Self::Torsion => "torsion",
            Self::ListGroups => "list-groups",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum GridValue {
    Text(String),
    List(Vec<usize>),
}

/// Contents of a `--config` file. Unknown keys are errors.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    group: Option<String>,
    all_wallpaper: Option<bool>,
    statistics: Option<StatisticsArg>,
    model: Option<PathBuf>,
    grid: Option<GridValue>,
    mesh: Option<usize>,
    refine: Option<bool>,
    tol: Option<f64>,
    format: Option<Format>,
    cache: Option<PathBuf>,
    no_cache: Option<bool>,
    emit_curvature: Option<PathBuf>,
    particles: Option<usize>,
    interaction_scale: Option<f64>,
    check_direct_sum: Option<bool>,
}

/// Validated run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: SubcommandKind,
    pub group: Option<String>,
    pub all_wallpaper: bool,
    /// Defaults to boson for classify; checked against the model elsewhere.
    pub statistics: Option<Statistics>,
    pub model: Option<PathBuf>,
    pub grid: Option<Vec<usize>>,
    pub mesh: usize,
    pub refine: bool,
    pub tol: Option<f64>,
    pub format: Format,
    /// `None` when caching is disabled.
    pub cache_dir: Option<PathBuf>,
    pub emit_curvature: Option<PathBuf>,
    pub particles: Option<usize>,
    pub interaction_scale: Option<f64>,
    pub check_direct_sum: bool,
}

pub const DEFAULT_GRID: usize = 6;
pub const DEFAULT_MESH: usize = 4;

fn parse_grid(text: &str) -> Result<Vec<usize>, CliError> {
    let parts: Result<Vec<usize>, _> = text.split(['x', 'X']).map(|p| p.trim().parse::<usize>()).collect();
    match parts {
        Ok(v) if !v.is_empty() && v.iter().all(|&n| n >= 2) => Ok(v),
        _ => Err(CliError::validation(format!(
            "--grid expects N or NxM with sizes >= 2, got {text:?}"
        ))),
    }
}

fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))
}

impl RunConfig {
    pub fn from_cli(command: &Command) -> Result<Self, CliError> {
        let (kind, flags) = match command {
            Command::Classify(f) => (SubcommandKind::Classify, f),
            Command::Chern(f) => (SubcommandKind::Chern, f),
            Command::Sectors(f) => (SubcommandKind::Sectors, f),
            Command::Torsion(f) => (SubcommandKind::Torsion, f),
            Command::ListGroups(f) => (SubcommandKind::ListGroups, f),
        };
        let file = match &flags.config {
            Some(p) => read_config(p)?,
            None => ConfigFile::default(),
        };
        let grid = match (&flags.grid, &file.grid) {
            (Some(t), _) | (None, Some(GridValue::Text(t))) => Some(parse_grid(t)?),
            (None, Some(GridValue::List(v))) => {
                if v.is_empty() || v.iter().any(|&n| n < 2) {
                    return Err(CliError::validation("grid sizes must be at least 2"));
                }
                Some(v.clone())
            }
            (None, None) => None,
        };
        let no_cache = flags.no_cache || file.no_cache.unwrap_or(false);
        let cache_dir = if no_cache {
            None
        } else {
            Some(
                flags
                    .cache
                    .clone()
                    .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
                    .or(file.cache)
                    .unwrap_or_else(|| std::env::temp_dir().join("crystalphase-cache")),
            )
        };
        let cfg = RunConfig {
            subcommand: kind,
            group: flags.group.clone().or(file.group),
            all_wallpaper: flags.all_wallpaper || file.all_wallpaper.unwrap_or(false),
            statistics: flags.statistics.or(file.statistics).map(Statistics::from),
            model: flags.model.clone().or(file.model),
            grid,
            mesh: flags.mesh.or(file.mesh).unwrap_or(DEFAULT_MESH),
            refine: flags.refine || file.refine.unwrap_or(false),
            tol: flags.tol.or(file.tol),
            format: flags.format.or(file.format).unwrap_or(Format::Text),
            cache_dir,
            emit_curvature: flags.emit_curvature.clone().or(file.emit_curvature),
            particles: flags.particles.or(file.particles),
            interaction_scale: flags.interaction_scale.or(file.interaction_scale),
            check_direct_sum: flags.check_direct_sum || file.check_direct_sum.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn reject(&self, present: bool, flag: &str) -> Result<(), CliError> {
        if present {
            return Err(CliError::validation(format!(
                "--{flag} does not apply to {}",
                self.subcommand.name()
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        use SubcommandKind::*;
        let k = self.subcommand;
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::validation(format!("--tol must be positive and finite, got {t}")));
            }
        }
        if let Some(s) = self.interaction_scale {
            if !s.is_finite() {
                return Err(CliError::validation("--interaction-scale must be finite"));
            }
        }
        if self.mesh == 0 {
            return Err(CliError::validation("--mesh must be positive"));
        }
        let is_model_cmd = matches!(k, Chern | Sectors | Torsion);
        self.reject(!matches!(k, Classify) && (self.group.is_some() || self.all_wallpaper), "group/--all-wallpaper")?;
        self.reject(!is_model_cmd && self.model.is_some(), "model")?;
        self.reject(k != Chern && self.grid.is_some(), "grid")?;
        self.reject(k != Torsion && (self.refine || self.mesh != DEFAULT_MESH), "mesh/--refine")?;
        self.reject(k != Sectors && self.check_direct_sum, "check-direct-sum")?;
        self.reject(!matches!(k, Chern | Torsion) && self.emit_curvature.is_some(), "emit-curvature")?;
        self.reject(!is_model_cmd && (self.particles.is_some() || self.interaction_scale.is_some()), "particles/--interaction-scale")?;
        self.reject(!matches!(k, Chern | Torsion) && self.tol.is_some(), "tol")?;
        self.reject(!matches!(k, Classify | Chern) && self.statistics.is_some(), "statistics")?;
        match k {
            Classify => match (&self.group, self.all_wallpaper) {
                (Some(_), true) => Err(CliError::validation("give either --group or --all-wallpaper, not both")),
                (None, false) => Err(CliError::validation("classify needs --group NAME or --all-wallpaper")),
                (Some(g), false) => catalog_lookup(g).map(|_| ()).map_err(|e| CliError::validation(e.to_string())),
                (None, true) => Ok(()),
            },
            Chern | Sectors | Torsion => {
                if self.model.is_none() {
                    return Err(CliError::validation(format!("{} needs --model PATH", k.name())));
                }
                Ok(())
            }
            ListGroups => Ok(()),
        }
    }
}
