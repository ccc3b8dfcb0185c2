//! Closed-form and quadrature evaluation of every network metric.

mod coverage;
mod harvest;
mod metrics;
mod optimal;

pub use coverage::{
    cooperative_exchange, exchange_probabilities, interference_factor,
    interference_factor_quadrature, p_cc, p_dc, p_dc_slot, p_dc_slot_alpha4, ExchangeProbabilities,
};
pub use harvest::{
    campbell_mean, mean_nearest_pathloss, mean_nearest_pathloss_quadrature, pdps_cc, pdps_dc,
    pdps_role, peh_from_pdps, peh_role,
};
pub use metrics::{
    cps_to_depletion, energy_per_cp, lifetime, network_lifetime, participating_roles,
    spatial_throughput, throughput_from, tme, tme_from,
};
pub use optimal::{
    closed_form_intensity, golden_section_max, optimal_intensity, rectified_power,
    OptimalIntensity,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ConfigError, NetworkConfig, Role, Scenario};
use crate::specfun::SpecfunError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Numeric(#[from] SpecfunError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("maximization failed: {0}")]
    Maximization(String),
}

/// Every analytic metric for one configuration. Lifetimes are in CPs and may be
/// infinite; powers are in watts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub p_dc1: f64,
    pub p_dc2: f64,
    pub p_dc: f64,
    pub p_cc_r1: f64,
    pub p_cc_r2: f64,
    pub p_cc: f64,
    pub pdps_d1: f64,
    pub pdps_d2: f64,
    pub pdps_c1: f64,
    pub pdps_c2: f64,
    #[serde(rename = "pdps_cR")]
    pub pdps_cr: f64,
    pub peh_d1: f64,
    pub peh_d2: f64,
    pub peh_c1: f64,
    pub peh_c2: f64,
    #[serde(rename = "peh_cR")]
    pub peh_cr: f64,
    #[serde(with = "crate::extended")]
    pub lifetime_dc: f64,
    #[serde(with = "crate::extended")]
    pub lifetime_dc_eh: f64,
    #[serde(with = "crate::extended")]
    pub lifetime_cc_source: f64,
    #[serde(with = "crate::extended")]
    pub lifetime_cc_relay: f64,
    #[serde(with = "crate::extended")]
    pub lifetime_cc_eh: f64,
    pub s_dc: f64,
    pub s_cc: f64,
    #[serde(with = "crate::extended")]
    pub tme_dc: f64,
    #[serde(with = "crate::extended")]
    pub tme_cc: f64,
    /// Optimal transmitter intensity; `None` when the efficiency curve has no
    /// interior maximum.
    pub lambda_opt: Option<f64>,
}

impl AnalyticReport {
    pub const FIELDS: [&'static str; 26] = [
        "p_dc1", "p_dc2", "p_dc", "p_cc_r1", "p_cc_r2", "p_cc", "pdps_d1", "pdps_d2", "pdps_c1",
        "pdps_c2", "pdps_cR", "peh_d1", "peh_d2", "peh_c1", "peh_c2", "peh_cR", "lifetime_dc",
        "lifetime_dc_eh", "lifetime_cc_source", "lifetime_cc_relay", "lifetime_cc_eh", "s_dc",
        "s_cc", "tme_dc", "tme_cc", "lambda_opt",
    ];

    /// Values in [`Self::FIELDS`] order; a missing optimum is `NaN`.
    pub fn values(&self) -> [f64; 26] {
        [
            self.p_dc1,
            self.p_dc2,
            self.p_dc,
            self.p_cc_r1,
            self.p_cc_r2,
            self.p_cc,
            self.pdps_d1,
            self.pdps_d2,
            self.pdps_c1,
            self.pdps_c2,
            self.pdps_cr,
            self.peh_d1,
            self.peh_d2,
            self.peh_c1,
            self.peh_c2,
            self.peh_cr,
            self.lifetime_dc,
            self.lifetime_dc_eh,
            self.lifetime_cc_source,
            self.lifetime_cc_relay,
            self.lifetime_cc_eh,
            self.s_dc,
            self.s_cc,
            self.tme_dc,
            self.tme_cc,
            self.lambda_opt.unwrap_or(f64::NAN),
        ]
    }

    /// Looks a field up by its serialized name.
    pub fn get(&self, field: &str) -> Option<f64> {
        Self::FIELDS
            .iter()
            .position(|&f| f == field)
            .map(|i| self.values()[i])
    }
}

/// Evaluates every metric for `cfg`. All three intensities must be positive.
pub fn report(cfg: &NetworkConfig) -> Result<AnalyticReport, AnalyticError> {
    cfg.validate()?;
    for (name, value) in [("lambda1", cfg.lambda1), ("lambda2", cfg.lambda2), ("lambdaR", cfg.lambda_r)] {
        if !(value > 0.0) {
            return Err(ConfigError { field: name, rule: "must be > 0 for a full report", value }.into());
        }
    }
    let probs = exchange_probabilities(cfg)?;
    let pdps_d1 = pdps_role(Scenario::Direct, Role::Source1, cfg)?;
    let pdps_d2 = pdps_role(Scenario::Direct, Role::Source2, cfg)?;
    let pdps_c1 = pdps_cc(Role::Source1, cfg)?;
    let pdps_c2 = pdps_cc(Role::Source2, cfg)?;
    let pdps_cr = pdps_cc(Role::Relay, cfg)?;
    let rect = &cfg.rectenna;

    let lifetime_dc_eh = network_lifetime(Scenario::Direct, true, cfg)?;
    let lifetime_cc_eh = network_lifetime(Scenario::Cooperative, true, cfg)?;
    let s_dc = throughput_from(probs.p_dc, Scenario::Direct, cfg);
    let s_cc = throughput_from(probs.p_cc, Scenario::Cooperative, cfg);

    let lambda_opt = match optimal_intensity(cfg) {
        Ok(opt) => Some(opt.numeric),
        Err(AnalyticError::Maximization(msg)) => {
            log::warn!("optimal intensity unavailable: {msg}");
            None
        }
        Err(e) => return Err(e),
    };

    Ok(AnalyticReport {
        p_dc1: probs.p_dc1,
        p_dc2: probs.p_dc2,
        p_dc: probs.p_dc,
        p_cc_r1: probs.p_cc_r1,
        p_cc_r2: probs.p_cc_r2,
        p_cc: probs.p_cc,
        pdps_d1,
        pdps_d2,
        pdps_c1,
        pdps_c2,
        pdps_cr,
        peh_d1: peh_from_pdps(pdps_d1, rect),
        peh_d2: peh_from_pdps(pdps_d2, rect),
        peh_c1: peh_from_pdps(pdps_c1, rect),
        peh_c2: peh_from_pdps(pdps_c2, rect),
        peh_cr: peh_from_pdps(pdps_cr, rect),
        lifetime_dc: network_lifetime(Scenario::Direct, false, cfg)?,
        lifetime_dc_eh,
        lifetime_cc_source: lifetime(Scenario::Cooperative, false, Role::Source1, cfg)?,
        lifetime_cc_relay: lifetime(Scenario::Cooperative, false, Role::Relay, cfg)?,
        lifetime_cc_eh,
        s_dc,
        s_cc,
        tme_dc: tme_from(s_dc, lifetime_dc_eh, Scenario::Direct),
        tme_cc: tme_from(s_cc, lifetime_cc_eh, Scenario::Cooperative),
        lambda_opt,
    })
}
