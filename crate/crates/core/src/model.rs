//! Network configuration and pointwise physical primitives.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A configuration value that breaks one of the model's invariants.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid configuration: {field} {rule} (got {value})")]
pub struct ConfigError {
    pub field: &'static str,
    pub rule: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{what} must be > 0 (got {value})")]
    NonPositive { what: &'static str, value: f64 },
}

/// Cubic RF-to-DC efficiency fit, evaluated on input power in dBm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectennaModel {
    pub a3: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl Default for RectennaModel {
    fn default() -> Self {
        Self {
            a3: -4.6e-5,
            a2: -7.8e-4,
            a1: 0.03,
            a0: 0.62,
        }
    }
}

impl RectennaModel {
    /// Raw polynomial value at `dbm`, before clamping.
    pub fn polynomial(&self, dbm: f64) -> f64 {
        ((self.a3 * dbm + self.a2) * dbm + self.a1) * dbm + self.a0
    }

    /// Efficiency at `dbm`, clamped to `[0, 1]`.
    pub fn efficiency_at_dbm(&self, dbm: f64) -> f64 {
        self.polynomial(dbm).clamp(0.0, 1.0)
    }
}

/// Physical and protocol parameters. Powers are in watts, `gamma_star` and
/// `psi` are linear ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(rename = "lambdaR")]
    pub lambda_r: f64,
    pub pt: f64,
    pub pr: f64,
    pub alpha: f64,
    pub mu: f64,
    pub noise: f64,
    pub gamma_star: f64,
    pub psi: f64,
    pub slot_seconds: f64,
    pub battery_joules: f64,
    pub rectenna: RectennaModel,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            lambda1: 0.1,
            lambda2: 0.5,
            lambda_r: 0.25,
            pt: 0.075,
            pr: 0.1,
            alpha: 4.0,
            mu: 1.0,
            noise: dbm_to_watts(-124.0),
            gamma_star: 1.0,
            psi: 0.1,
            slot_seconds: 1.0,
            battery_joules: 1000.0,
            rectenna: RectennaModel::default(),
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fields = [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("lambdaR", self.lambda_r),
            ("pt", self.pt),
            ("pr", self.pr),
            ("alpha", self.alpha),
            ("mu", self.mu),
            ("noise", self.noise),
            ("gamma_star", self.gamma_star),
            ("psi", self.psi),
            ("slot_seconds", self.slot_seconds),
            ("battery_joules", self.battery_joules),
            ("rectenna.a3", self.rectenna.a3),
            ("rectenna.a2", self.rectenna.a2),
            ("rectenna.a1", self.rectenna.a1),
            ("rectenna.a0", self.rectenna.a0),
        ];
        for (field, value) in fields {
            if !value.is_finite() {
                return Err(ConfigError { field, rule: "must be finite", value });
            }
        }
        let non_negative = [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("lambdaR", self.lambda_r),
            ("pr", self.pr),
            ("noise", self.noise),
        ];
        for (field, value) in non_negative {
            if value < 0.0 {
                return Err(ConfigError { field, rule: "must be >= 0", value });
            }
        }
        if self.lambda1 <= 0.0 && self.lambda2 <= 0.0 {
            return Err(ConfigError {
                field: "lambda1",
                rule: "or lambda2 must be > 0",
                value: self.lambda1,
            });
        }
        if self.alpha <= 2.0 {
            return Err(ConfigError { field: "alpha", rule: "must be > 2", value: self.alpha });
        }
        let positive = [
            ("pt", self.pt),
            ("mu", self.mu),
            ("psi", self.psi),
            ("gamma_star", self.gamma_star),
            ("slot_seconds", self.slot_seconds),
            ("battery_joules", self.battery_joules),
        ];
        for (field, value) in positive {
            if value <= 0.0 {
                return Err(ConfigError { field, rule: "must be > 0", value });
            }
        }
        Ok(())
    }

    /// Intensity of the given role's point set.
    pub fn intensity(&self, role: Role) -> f64 {
        match role {
            Role::Source1 => self.lambda1,
            Role::Source2 => self.lambda2,
            Role::Relay => self.lambda_r,
        }
    }
}

/// Communication pattern of one period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Direct,
    Cooperative,
}

impl Scenario {
    /// Number of time slots in one communication period.
    pub fn slots_per_cp(self) -> u32 {
        match self {
            Scenario::Direct => 2,
            Scenario::Cooperative => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Direct => "dc",
            Scenario::Cooperative => "cc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Source1,
    Source2,
    Relay,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::Source1, Role::Source2, Role::Relay];

    pub fn name(self) -> &'static str {
        match self {
            Role::Source1 => "s1",
            Role::Source2 => "s2",
            Role::Relay => "relay",
        }
    }
}

/// Path-loss law: `Unbounded` is `d^-α`, `Bounded` caps the gain at 1 inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathLoss {
    Unbounded,
    Bounded,
}

/// Fraction of received power routed to the decoder for nearest-link fade `h`.
/// The remainder `1 - v` goes to the harvester.
pub fn dps_fraction(h: f64, psi: f64) -> f64 {
    if h < psi {
        1.0
    } else {
        psi / h
    }
}

pub fn pathloss_gain(distance: f64, alpha: f64, law: PathLoss) -> Result<f64, ModelError> {
    if !(distance > 0.0) {
        return Err(ModelError::NonPositive { what: "distance", value: distance });
    }
    let g = distance.powf(-alpha);
    Ok(match law {
        PathLoss::Unbounded => g,
        PathLoss::Bounded => g.min(1.0),
    })
}

/// Decoder SINR for a link with fade `h` over distance `d` and aggregate
/// interference power `interference` (watts). The split fraction scales both
/// signal and interference but not the noise.
pub fn sinr(h: f64, d: f64, interference: f64, cfg: &NetworkConfig) -> f64 {
    let v = dps_fraction(h, cfg.psi);
    let signal = v * cfg.pt * h * d.powf(-cfg.alpha);
    let denom = v * interference + cfg.noise;
    if denom == 0.0 {
        if signal > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        signal / denom
    }
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts / 1e-3).log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// RF-to-DC efficiency for input power `p_in` watts.
pub fn conversion_efficiency(p_in: f64, model: &RectennaModel) -> Result<f64, ModelError> {
    if !(p_in > 0.0) {
        return Err(ModelError::NonPositive { what: "input power", value: p_in });
    }
    Ok(model.efficiency_at_dbm(watts_to_dbm(p_in)))
}
