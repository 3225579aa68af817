//! JSON configuration shared by the CLI and the batch runner. Every section
//! is optional; missing fields take their defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::EngineConfig;
use crate::replay::{BatchSpec, ErrorMode};
use crate::signal::SignalConfig;
use crate::synth::{NoiseProfile, WalkScript};
use crate::wifi::IndicatorConfig;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub engine: EngineConfig,
    pub indicator: IndicatorConfig,
    pub signal: SignalConfig,
    pub noise: NoiseProfile,
    pub error_mode: ErrorMode,
    /// Walk used by `synth` when no script file is given.
    pub script: Option<WalkScript>,
    pub batch: Option<BatchSpec>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{0}")]
    Invalid(String),
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: p.clone(), source })?;
        let cfg = Self::from_json(&text).map_err(|source| ConfigError::Json { path: p, source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.engine.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.indicator.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.signal.steps.filter.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.noise.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_all_defaults() {
        let cfg = Config::from_json("{}").unwrap();
        assert_eq!(cfg, Config::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let cfg = Config::from_json(r#"{"engine": {"k_win": 7}, "indicator": {"m_of_w": [2, 4]}}"#).unwrap();
        assert_eq!(cfg.engine.k_win, 7);
        assert_eq!(cfg.engine.step_length, 0.7);
        assert_eq!(cfg.indicator.m_of_w, (2, 4));
        assert!(Config::from_json(r#"{"indicator": {"m_of_w": [5, 4]}}"#).unwrap().validate().is_err());
    }
}
