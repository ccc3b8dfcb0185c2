//! Configuration and sweep files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use wehnet::model::db_to_linear;
use wehnet::NetworkConfig;

use crate::error::CliError;

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Reads and validates a network configuration.
pub fn load_config(path: &Path) -> Result<NetworkConfig, CliError> {
    let cfg: NetworkConfig = read_json(path)?;
    cfg.validate().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(cfg)
}

/// Parameter a sweep varies. dB-valued variables are converted to linear
/// ratios when applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "gamma_star_db")]
    GammaStarDb,
    #[serde(rename = "lambda1")]
    Lambda1,
    #[serde(rename = "lambda2")]
    Lambda2,
    #[serde(rename = "lambdaR")]
    LambdaR,
    #[serde(rename = "psi_db")]
    PsiDb,
    #[serde(rename = "mu")]
    Mu,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::GammaStarDb => "gamma_star_db",
            SweepVariable::Lambda1 => "lambda1",
            SweepVariable::Lambda2 => "lambda2",
            SweepVariable::LambdaR => "lambdaR",
            SweepVariable::PsiDb => "psi_db",
            SweepVariable::Mu => "mu",
        }
    }

    /// `base` with this variable set to `value`.
    pub fn apply(self, base: &NetworkConfig, value: f64) -> NetworkConfig {
        let mut cfg = *base;
        match self {
            SweepVariable::GammaStarDb => cfg.gamma_star = db_to_linear(value),
            SweepVariable::Lambda1 => cfg.lambda1 = value,
            SweepVariable::Lambda2 => cfg.lambda2 = value,
            SweepVariable::LambdaR => cfg.lambda_r = value,
            SweepVariable::PsiDb => cfg.psi = db_to_linear(value),
            SweepVariable::Mu => cfg.mu = value,
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    #[serde(default)]
    pub fixed: NetworkConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.grid.is_empty() {
            return Err(CliError::Input("sweep grid is empty".into()));
        }
        if let Some(bad) = self.grid.iter().find(|v| !v.is_finite()) {
            return Err(CliError::Input(format!("sweep grid value {bad} is not finite")));
        }
        if let Some(w) = self.grid.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(CliError::Input(format!(
                "sweep grid must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        self.fixed.validate().map_err(|e| CliError::Input(e.to_string()))?;
        for &v in &self.grid {
            self.variable
                .apply(&self.fixed, v)
                .validate()
                .map_err(|e| CliError::Input(format!("{} = {v}: {e}", self.variable.name())))?;
        }
        Ok(())
    }
}

pub fn load_sweep(path: &Path) -> Result<SweepSpec, CliError> {
    let spec: SweepSpec = read_json(path)?;
    spec.validate()?;
    Ok(spec)
}
