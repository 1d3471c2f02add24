//! Scenario and strategy files.
//!
//! ```json
//! {"total_power": 18.0,
//!  "pools": [{"name": "A", "power": 2.0, "alpha": 0.8},
//!            {"name": "B", "power": 3.0, "alpha": 0.8}],
//!  "strategy": {"infiltration": [[0.0, 1.0], [0.0, 0.0]]}}
//! ```
//!
//! `strategy` and `metadata` are optional; unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use dpbw_core::{GameConfig, StrategyProfile, ValidatedGame};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub power: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    /// Full `n x n` matrix, explicit zeros on the diagonal.
    pub infiltration: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub total_power: f64,
    pub pools: Vec<PoolSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyFile>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Validation {
        path: path.into(),
        message: message.into(),
    }
}

impl ScenarioFile {
    pub fn from_game(game: &GameConfig) -> Self {
        let names = game.pool_names.clone();
        Self {
            total_power: game.total_power,
            pools: game
                .pool_powers
                .iter()
                .zip(&game.alphas)
                .enumerate()
                .map(|(i, (&power, &alpha))| PoolSpec {
                    name: names.as_ref().map(|n| n[i].clone()),
                    power,
                    alpha,
                })
                .collect(),
            strategy: None,
            metadata: BTreeMap::new(),
        }
    }

    /// Field-by-field validation, so errors name the offending entry.
    pub fn game(&self) -> Result<ValidatedGame, CliError> {
        if !(self.total_power.is_finite() && self.total_power > 0.0) {
            return Err(invalid("total_power", format!("must be positive, got {}", self.total_power)));
        }
        if self.pools.len() < 2 {
            return Err(invalid("pools", format!("need at least two pools, got {}", self.pools.len())));
        }
        for (i, p) in self.pools.iter().enumerate() {
            if !(p.power.is_finite() && p.power > 0.0) {
                return Err(invalid(format!("pools[{i}].power"), format!("must be positive, got {}", p.power)));
            }
            if !(0.0..=1.0).contains(&p.alpha) {
                return Err(invalid(format!("pools[{i}].alpha"), format!("must lie in [0, 1], got {}", p.alpha)));
            }
        }
        let sum: f64 = self.pools.iter().map(|p| p.power).sum();
        if sum > self.total_power {
            return Err(invalid(
                "pools",
                format!("pool powers sum to {sum}, exceeding total_power {}", self.total_power),
            ));
        }
        let names: Vec<Option<String>> = self.pools.iter().map(|p| p.name.clone()).collect();
        let config = GameConfig {
            total_power: self.total_power,
            pool_powers: self.pools.iter().map(|p| p.power).collect(),
            alphas: self.pools.iter().map(|p| p.alpha).collect(),
            pool_names: if names.iter().all(Option::is_some) {
                Some(names.into_iter().flatten().collect())
            } else {
                None
            },
        };
        config.validate().map_err(|e| invalid("", e.to_string()))
    }
}

impl StrategyFile {
    pub fn from_profile(x: &StrategyProfile) -> Self {
        Self { infiltration: x.rows() }
    }

    pub fn profile(&self, game: &ValidatedGame) -> Result<StrategyProfile, CliError> {
        let n = game.n();
        let rows = &self.infiltration;
        if rows.len() != n {
            return Err(invalid("infiltration", format!("expected {n} rows, got {}", rows.len())));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(invalid(format!("infiltration[{i}]"), format!("expected {n} entries, got {}", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                let path = format!("infiltration[{i}][{j}]");
                if !v.is_finite() {
                    return Err(invalid(path, format!("must be finite, got {v}")));
                }
                if i == j && v != 0.0 {
                    return Err(invalid(path, format!("a pool cannot infiltrate itself, got {v}")));
                }
                if v < 0.0 {
                    return Err(invalid(path, format!("must be non-negative, got {v}")));
                }
            }
            let sent: f64 = row.iter().sum();
            let budget = game.pool_power(i);
            if sent > budget * (1.0 + dpbw_core::game::FEASIBILITY_SLACK) {
                return Err(invalid(
                    format!("infiltration[{i}]"),
                    format!("pool {i} sends {sent} but owns {budget}"),
                ));
            }
        }
        let x = StrategyProfile::from_rows(rows.clone()).map_err(|e| invalid("infiltration", e.to_string()))?;
        game.check_strategy(&x).map_err(|e| invalid("infiltration", e.to_string()))?;
        Ok(x)
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, bytes: &[u8]) -> Result<T, CliError> {
    serde_json::from_slice(bytes).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// A parsed scenario with the raw bytes kept for the report digest.
pub struct Loaded<T> {
    pub value: T,
    pub bytes: Vec<u8>,
}

pub fn load_scenario(path: &Path) -> Result<Loaded<ScenarioFile>, CliError> {
    let bytes = read(path)?;
    let value = parse(path, &bytes)?;
    Ok(Loaded { value, bytes })
}

/// A strategy file is either `{"infiltration": ...}` or a scenario whose
/// `strategy` field is set.
pub fn load_strategy(path: &Path) -> Result<Loaded<StrategyFile>, CliError> {
    let bytes = read(path)?;
    let value = match parse::<StrategyFile>(path, &bytes) {
        Ok(v) => v,
        Err(e) => match serde_json::from_slice::<ScenarioFile>(&bytes) {
            Ok(ScenarioFile { strategy: Some(s), .. }) => s,
            _ => return Err(e),
        },
    };
    Ok(Loaded { value, bytes })
}
