//! Experiment configuration: TOML config files plus command-line overrides.
//!
//! Config file schema (all keys optional; flags override file values):
//!
//! ```toml
//! depth = 4
//! trials = 100000
//! seed = "0x5EED"        # or a plain integer
//! cap = 10000000
//! format = "json"        # csv | json
//!
//! [spec]
//! family = "extended-tower"   # generators | pattern | tower |
//!                             # extended-tower | intermediate | affine-model
//! degree = 2
//! ```
//!
//! Nested families use nested tables, e.g. an intermediate pair:
//!
//! ```toml
//! [spec]
//! family = "intermediate"
//! [spec.outer]
//! family = "affine-model"
//! degree = 3
//! part = "full"
//! [spec.inner]
//! family = "affine-model"
//! degree = 3
//! part = "translations"
//! ```

use std::path::PathBuf;

use adictree::constructions::GroupSpec;
use adictree::engine::DEFAULT_CAP;
use adictree::report::ReportFormat;
use adictree::spectra::{DEFAULT_SEED, DEFAULT_TRIALS};
use serde::Deserialize;

/// Command-line overrides, mirroring the config file keys.
#[derive(Debug, clap::Args)]
pub struct Overrides {
    /// Path to a TOML experiment config.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Truncation depth (suite-specific default).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Monte Carlo trials.
    #[arg(long)]
    pub trials: Option<u64>,
    /// RNG seed, hexadecimal (with or without 0x).
    #[arg(long)]
    pub seed: Option<String>,
    /// Enumeration cap in elements.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Report format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Directory to write reports into.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    spec: Option<GroupSpec>,
    depth: Option<usize>,
    trials: Option<u64>,
    seed: Option<TomlSeed>,
    cap: Option<usize>,
    format: Option<String>,
    out: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum TomlSeed {
    Number(u64),
    Hex(String),
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub spec: Option<GroupSpec>,
    pub depth: Option<usize>,
    pub trials: u64,
    pub seed: u64,
    pub cap: usize,
    pub format: ReportFormat,
    pub out: Option<PathBuf>,
}

/// A configuration problem: exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

fn parse_hex_seed(text: &str) -> Result<u64, ConfigError> {
    let trimmed = text.trim().trim_start_matches("0x").trim_start_matches("0X");
    u64::from_str_radix(trimmed, 16)
        .map_err(|e| ConfigError(format!("invalid hex seed {text:?}: {e}")))
}

impl Config {
    /// Loads the optional config file and applies the flag overrides.
    pub fn resolve(overrides: &Overrides) -> Result<Config, ConfigError> {
        let file: Option<ConfigFile> = match &overrides.spec {
            None => None,
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
                Some(
                    toml::from_str(&text)
                        .map_err(|e| ConfigError(format!("cannot parse {}: {e}", path.display())))?,
                )
            }
        };
        let file = file.unwrap_or(ConfigFile {
            spec: None,
            depth: None,
            trials: None,
            seed: None,
            cap: None,
            format: None,
            out: None,
        });

        let seed = match (&overrides.seed, &file.seed) {
            (Some(flag), _) => parse_hex_seed(flag)?,
            (None, Some(TomlSeed::Number(n))) => *n,
            (None, Some(TomlSeed::Hex(s))) => parse_hex_seed(s)?,
            (None, None) => DEFAULT_SEED,
        };
        let format_text = overrides
            .format
            .clone()
            .or(file.format)
            .unwrap_or_else(|| "json".to_string());
        let format = format_text
            .parse::<ReportFormat>()
            .map_err(|e| ConfigError(e.to_string()))?;
        let trials = overrides.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
        let cap = overrides.cap.or(file.cap).unwrap_or(DEFAULT_CAP);
        if cap == 0 {
            return Err(ConfigError("cap must be positive".to_string()));
        }
        if let Some(spec) = &file.spec {
            spec.degree()
                .map_err(|e| ConfigError(format!("invalid spec: {e}")))?;
        }
        Ok(Config {
            spec: file.spec,
            depth: overrides.depth.or(file.depth),
            trials,
            seed,
            cap,
            format,
            out: overrides.out.clone().or(file.out.map(PathBuf::from)),
        })
    }
}
