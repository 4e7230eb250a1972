//! TOML form of [`ExperimentConfig`]. Keys map one to one onto the struct
//! fields; unknown keys are rejected.

use std::fs;
use std::path::Path;

use elasto_core::experiment::ExperimentConfig;

use crate::error::{AppError, AppResult};

pub fn parse(text: &str) -> AppResult<ExperimentConfig> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| AppError::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn load(path: &Path) -> AppResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    parse(&text).map_err(|e| match e {
        AppError::Config(msg) => AppError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn to_toml(config: &ExperimentConfig) -> String {
    toml::to_string(config).expect("configuration always serializes")
}

pub fn save(config: &ExperimentConfig, path: &Path) -> AppResult<()> {
    fs::write(path, to_toml(config)).map_err(|e| AppError::io(path, e))
}
