//! Mean harvested RF power under dynamic power splitting.

use std::f64::consts::PI;

use super::AnalyticError;
use crate::model::{NetworkConfig, RectennaModel, Role, Scenario};
use crate::specfun::{erfc_c, expint_ei, integrate_semi_infinite, QuadratureSpec};

/// `E{min(1, r_c^-α)}` for the distance `r_c` to the nearest point of a PPP
/// with intensity `lambda`.
pub fn mean_nearest_pathloss(lambda: f64, alpha: f64) -> Result<f64, AnalyticError> {
    if !(lambda >= 0.0) || !(alpha > 2.0) {
        return Err(AnalyticError::Precondition(format!(
            "need lambda >= 0 and alpha > 2 (got {lambda}, {alpha})"
        )));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let s = PI * lambda;
    let inside = 1.0 - (-s).exp();
    if alpha == 3.0 {
        let tail = 2.0 * s * ((-s).exp() - PI * lambda.sqrt() * erfc_c(s.sqrt()));
        Ok(inside + tail)
    } else if alpha == 4.0 {
        Ok(inside + s * ((-s).exp() + s * expint_ei(-s)?))
    } else if alpha == 5.0 {
        let tail = 2.0 / 3.0
            * s
            * ((1.0 - 2.0 * s) * (-s).exp() + 2.0 * PI * PI * lambda.powf(1.5) * erfc_c(s.sqrt()));
        Ok(inside + tail)
    } else {
        mean_nearest_pathloss_quadrature(lambda, alpha)
    }
}

/// Quadrature form of [`mean_nearest_pathloss`], valid for every `α > 2`.
pub fn mean_nearest_pathloss_quadrature(lambda: f64, alpha: f64) -> Result<f64, AnalyticError> {
    let s = PI * lambda;
    let tail = integrate_semi_infinite(
        |r| r.powf(1.0 - alpha) * 2.0 * s * (-s * r * r).exp(),
        1.0,
        &QuadratureSpec::default(),
    )?;
    Ok(1.0 - (-s).exp() + tail)
}

/// Mean aggregate bounded path loss `E{Σ min(1, r_i^-α)} = παλ/(α-2)`.
pub fn campbell_mean(lambda: f64, alpha: f64) -> f64 {
    PI * alpha * lambda / (alpha - 2.0)
}

/// Mean RF power routed to the harvester while a PPP of intensity
/// `lambda_other` transmits, before rectification.
pub fn pdps_dc(lambda_other: f64, cfg: &NetworkConfig) -> Result<f64, AnalyticError> {
    if !(lambda_other >= 0.0) {
        return Err(AnalyticError::Precondition(format!(
            "transmitter intensity must be >= 0 (got {lambda_other})"
        )));
    }
    if lambda_other == 0.0 {
        return Ok(0.0);
    }
    let mu_psi = cfg.mu * cfg.psi;
    let aggregate = campbell_mean(lambda_other, cfg.alpha);
    let nearest = mean_nearest_pathloss(lambda_other, cfg.alpha)?;
    let power = cfg.pt
        * ((-mu_psi).exp() * aggregate / cfg.mu + cfg.psi * expint_ei(-mu_psi)? * (aggregate - nearest));
    Ok(power.max(0.0))
}

/// Rectified power for a mean RF input of `pdps` watts.
pub fn peh_from_pdps(pdps: f64, model: &RectennaModel) -> f64 {
    if !(pdps > 0.0) {
        return 0.0;
    }
    pdps * model.efficiency_at_dbm(crate::model::watts_to_dbm(pdps))
}

/// Pre-rectification harvested power of a role, summed over every slot in
/// which the role receives.
pub fn pdps_role(scenario: Scenario, role: Role, cfg: &NetworkConfig) -> Result<f64, AnalyticError> {
    match (scenario, role) {
        (Scenario::Direct, Role::Source1) => pdps_dc(cfg.lambda2, cfg),
        (Scenario::Direct, Role::Source2) => pdps_dc(cfg.lambda1, cfg),
        (Scenario::Direct, Role::Relay) => Err(AnalyticError::Precondition(
            "relays take no part in direct communication".into(),
        )),
        (Scenario::Cooperative, _) => pdps_cc(role, cfg),
    }
}

/// Cooperative-scenario harvested power: each role collects from the two
/// point sets it does not belong to.
pub fn pdps_cc(role: Role, cfg: &NetworkConfig) -> Result<f64, AnalyticError> {
    let (a, b) = match role {
        Role::Source1 => (cfg.lambda2, cfg.lambda_r),
        Role::Source2 => (cfg.lambda1, cfg.lambda_r),
        Role::Relay => (cfg.lambda1, cfg.lambda2),
    };
    Ok(pdps_dc(a, cfg)? + pdps_dc(b, cfg)?)
}

/// Rectified harvested power of a role; the efficiency applies to the total.
pub fn peh_role(scenario: Scenario, role: Role, cfg: &NetworkConfig) -> Result<f64, AnalyticError> {
    Ok(peh_from_pdps(pdps_role(scenario, role, cfg)?, &cfg.rectenna))
}
