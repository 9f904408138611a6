//! TOML configuration handling shared by every subcommand.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{config_error, HarnessError, Result};

/// A scalar or a list in the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(xs) => xs.clone(),
        }
    }
}

/// A parsed configuration: the optional master `seed` plus the
/// subcommand-specific table.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub seed: Option<u64>,
    pub body: T,
    pub echo: serde_json::Value,
}

/// Parses `text`, pulling out the shared `seed` key before handing the rest
/// to the strict per-subcommand schema.
pub fn parse<T: DeserializeOwned + Serialize>(text: &str) -> Result<Parsed<T>> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
    let seed = match table.remove("seed") {
        None => None,
        Some(toml::Value::Integer(s)) if s >= 0 => Some(s as u64),
        Some(other) => {
            return config_error(format!("seed must be a non-negative integer, got {other}"))
        }
    };
    let body: T = table
        .try_into()
        .map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
    let echo = serde_json::to_value(&body).expect("serializable");
    Ok(Parsed { seed, body, echo })
}

pub(crate) fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        config_error(msg)
    }
}
