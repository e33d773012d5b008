use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

use hybrid_sc::validate::Config;

/// Environment variable naming an optional TOML settings file.
pub const CONFIG_ENV: &str = "HSC_CONFIG";

/// Settings read from the file; every key is optional and command-line
/// flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub step: Option<f64>,
    pub eps_time: Option<f64>,
    pub eps_value: Option<f64>,
    pub horizon: Option<f64>,
    pub goal_margin: Option<f64>,
    pub natural_cap: Option<usize>,
    pub claim_tol: Option<f64>,
    pub default_value: Option<f64>,
    pub expand_sea: Option<bool>,
    pub sea_cap: Option<u128>,
    pub sample: Option<f64>,
}

impl FileConfig {
    pub fn load_env() -> Result<FileConfig> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => FileConfig::load(Path::new(&p)),
            _ => Ok(FileConfig::default()),
        }
    }

    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Numeric flags shared by `validate` and `trace`.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct NumericFlags {
    /// Integration step.
    #[arg(long)]
    pub step: Option<f64>,
    /// Time tolerance of trigger searches.
    #[arg(long)]
    pub eps_time: Option<f64>,
    /// Value tolerance of comparisons.
    #[arg(long)]
    pub eps_value: Option<f64>,
    /// How far ahead natural actions are searched for.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Extra time after the last step within which the goal must hold.
    #[arg(long)]
    pub goal_margin: Option<f64>,
    /// Natural firings allowed at one instant.
    #[arg(long)]
    pub natural_cap: Option<usize>,
    /// Time tolerance for plan steps that name natural actions.
    #[arg(long)]
    pub claim_tol: Option<f64>,
    /// Value for functions missing from the initial state.
    #[arg(long)]
    pub default_value: Option<f64>,
}

impl NumericFlags {
    pub fn resolve(&self, file: &FileConfig) -> Config {
        let d = Config::default();
        Config {
            step: self.step.or(file.step).unwrap_or(d.step),
            eps_time: self.eps_time.or(file.eps_time).unwrap_or(d.eps_time),
            eps_value: self.eps_value.or(file.eps_value).unwrap_or(d.eps_value),
            horizon: self.horizon.or(file.horizon).unwrap_or(d.horizon),
            goal_margin: self.goal_margin.or(file.goal_margin).unwrap_or(d.goal_margin),
            natural_cap: self.natural_cap.or(file.natural_cap).unwrap_or(d.natural_cap),
            claim_tol: self.claim_tol.or(file.claim_tol).unwrap_or(d.claim_tol),
            default_value: self.default_value.or(file.default_value).or(d.default_value),
        }
    }
}
