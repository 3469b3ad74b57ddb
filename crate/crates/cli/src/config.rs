//! Versioned experiment configuration. Unknown fields are rejected so that a
//! report always corresponds to a reproducible configuration.

use serde::Deserialize;

use isospec::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyFamily,
    Witness,
    Curvature,
    Heat,
    Flow,
    Sphere,
    Spectra,
    Conformal,
}

impl Command {
    pub fn key(&self) -> &'static str {
        match self {
            Command::VerifyFamily => "verify-family",
            Command::Witness => "witness",
            Command::Curvature => "curvature",
            Command::Heat => "heat",
            Command::Flow => "flow",
            Command::Sphere => "sphere",
            Command::Spectra => "spectra",
            Command::Conformal => "conformal",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    pub total_time: f64,
    pub dt: f64,
    #[serde(default = "default_exponent")]
    pub exponent: u32,
    #[serde(default)]
    pub word_cap: Option<usize>,
}

fn default_exponent() -> u32 {
    5
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereSection {
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    #[serde(default = "default_band")]
    pub band: f64,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_exactness")]
    pub exactness: usize,
}

fn default_resolution() -> f64 {
    1e-3
}
fn default_band() -> f64 {
    1e-6
}
fn default_k_max() -> usize {
    6
}
fn default_exactness() -> usize {
    26
}

impl Default for SphereSection {
    fn default() -> Self {
        SphereSection {
            resolution: default_resolution(),
            band: default_band(),
            k_max: default_k_max(),
            exactness: default_exactness(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConformalSection {
    pub eps: f64,
    #[serde(default = "default_factor")]
    pub factor_index: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_factor() -> usize {
    1
}
fn default_samples() -> usize {
    10_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Schema version; only 1 is understood.
    pub schema: u32,
    pub command: Command,
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub t_values: Vec<f64>,
    /// Blocks as (tensor power, character) pairs.
    #[serde(default)]
    pub blocks: Vec<(usize, Vec<i64>)>,
    /// Named tolerance overrides.
    #[serde(default)]
    pub tolerances: std::collections::BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<String>,
    #[serde(default)]
    pub flow: Option<FlowSection>,
    #[serde(default)]
    pub sphere: Option<SphereSection>,
    #[serde(default)]
    pub conformal: Option<ConformalSection>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != 1 {
            return Err(Error::Config(format!(
                "unsupported schema version {} (expected 1)",
                self.schema
            )));
        }
        for (name, tol) in &self.tolerances {
            if *tol <= 0.0 {
                return Err(Error::Config(format!("tolerance {name} must be positive")));
            }
        }
        if let Some(fam) = &self.family {
            // resolves the key or fails as a configuration error
            if fam != "flow" {
                let family = isospec::maps::IsospectralFamily::builtin(fam)?;
                let (lo, hi) = family.domain;
                for &t in &self.t_values {
                    if t < lo - 1e-12 || t > hi + 1e-12 {
                        return Err(Error::Config(format!(
                            "t = {t} outside the {fam} domain [{lo}, {hi}]"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).cloned().unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"schema": 1, "command": "heat", "family": "so5", "bogus": 3}"#;
        assert!(ExperimentConfig::parse(text).is_err());
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let text = r#"{"schema": 2, "command": "heat"}"#;
        assert!(ExperimentConfig::parse(text).is_err());
    }

    #[test]
    fn unknown_family_is_config_error() {
        let text = r#"{"schema": 1, "command": "heat", "family": "nonexistent"}"#;
        assert!(ExperimentConfig::parse(text).is_err());
    }

    #[test]
    fn minimal_config_parses() {
        let text = r#"{"schema": 1, "command": "verify-family", "family": "so5", "t_values": [0.0, 0.1, 0.3]}"#;
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.command, Command::VerifyFamily);
        assert_eq!(cfg.seed, 0);
    }
}
