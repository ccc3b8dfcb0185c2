//! Monte-Carlo simulator: PPP deployments on a torus, slot-by-slot
//! communication periods, and seeded parallel estimation.

mod cp;
mod estimate;
mod geometry;
mod slot;

pub use cp::{run_cp, CpOutcome, Realization};
pub use estimate::{
    estimate, lifetime_from_ensemble, simulate, simulate_lifetime, Conversion, Ensemble,
    LifetimeEstimate, McEstimate, Metric, RealizationRecord, SimSettings,
};
pub use geometry::{sample_ppp, Point, SpatialGrid, Window};
pub use slot::{far_field_mean, run_slot, Reception};

use thiserror::Error;

use crate::analytic::AnalyticError;
use crate::model::ConfigError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("a point set required by the slot is empty")]
    EmptySet,
    #[error("invalid simulation settings: {0}")]
    InvalidSettings(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}
