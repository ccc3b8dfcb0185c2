//! Transmitter intensity that maximizes the rectified harvested power.

use std::f64::consts::LN_10;

use serde::{Deserialize, Serialize};

use super::harvest::{pdps_dc, peh_from_pdps};
use super::AnalyticError;
use crate::model::NetworkConfig;

const GRID_LO: f64 = 1e-6;
const GRID_HI: f64 = 1e3;
const GRID_POINTS: usize = 241;
const GAP_WARNING: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalIntensity {
    /// Maximizer found numerically; the authoritative value.
    pub numeric: f64,
    /// Closed-form estimate, `None` when its radicals have no real value.
    pub closed_form: Option<f64>,
    /// `|closed_form - numeric| / numeric`.
    pub relative_gap: Option<f64>,
    pub warning: Option<String>,
}

/// Rectified harvested power as a function of the transmitting intensity.
pub fn rectified_power(lambda: f64, cfg: &NetworkConfig) -> Result<f64, AnalyticError> {
    Ok(peh_from_pdps(pdps_dc(lambda, cfg)?, &cfg.rectenna))
}

pub fn optimal_intensity(cfg: &NetworkConfig) -> Result<OptimalIntensity, AnalyticError> {
    let numeric = numeric_argmax(cfg)?;
    let closed_form = closed_form_intensity(cfg);
    let relative_gap = closed_form.map(|c| (c - numeric).abs() / numeric);
    let warning = relative_gap.and_then(|gap| {
        (gap > GAP_WARNING).then(|| {
            let msg = format!(
                "closed-form intensity differs from the numeric maximizer by {:.1}%",
                100.0 * gap
            );
            log::warn!("{msg}");
            msg
        })
    });
    Ok(OptimalIntensity {
        numeric,
        closed_form,
        relative_gap,
        warning,
    })
}

fn numeric_argmax(cfg: &NetworkConfig) -> Result<f64, AnalyticError> {
    if !(cfg.rectenna.a3 < 0.0) {
        return Err(AnalyticError::Maximization(format!(
            "efficiency cubic needs a negative leading coefficient (a3 = {})",
            cfg.rectenna.a3
        )));
    }
    let (lo, hi) = (GRID_LO.ln(), GRID_HI.ln());
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let objective = |log_lambda: f64| rectified_power(log_lambda.exp(), cfg);
    let mut values = Vec::with_capacity(GRID_POINTS);
    for i in 0..GRID_POINTS {
        values.push(objective(lo + step * i as f64)?);
    }
    let (best, best_value) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if best == 0 || best == GRID_POINTS - 1 || !(best_value > 0.0) {
        return Err(AnalyticError::Maximization(format!(
            "rectified power has no interior maximum on [{GRID_LO:e}, {GRID_HI:e}]"
        )));
    }
    let a = lo + step * (best - 1) as f64;
    let b = lo + step * (best + 1) as f64;
    Ok(golden_section_max(objective, a, b, 1e-12)?.exp())
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
pub fn golden_section_max<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64, AnalyticError>
where
    F: Fn(f64) -> Result<f64, AnalyticError>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol * (1.0 + a.abs() + b.abs()) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// The closed-form optimal intensity, evaluated exactly as published.
pub fn closed_form_intensity(cfg: &NetworkConfig) -> Option<f64> {
    let r = &cfg.rectenna;
    let (a0, a1, a2, a3) = (r.a0, r.a1, r.a2, r.a3);
    if a3 == 0.0 {
        return None;
    }
    let ln2 = LN_10 * LN_10;
    let ln3 = ln2 * LN_10;
    let delta0 = ln2 * (a2 * a2 - 3.0 * a1 * a3) + 900.0 * a3 * a3;
    let rho = ln3 * (27.0 * a0 * a3 * a3 - 9.0 * a1 * a2 * a3 + 2.0 * a2.powi(3)) + 54000.0 * a3.powi(3);
    let disc = rho * rho - 4.0 * delta0.powi(3);
    if disc < 0.0 {
        return None;
    }
    let f = (-rho + disc.sqrt()).cbrt();
    if f == 0.0 {
        return None;
    }
    let prefactor = cfg.mu * (cfg.alpha - 2.0) * 10f64.powf(-a2 / (30.0 * a3))
        / (1e3 * cfg.pt * std::f64::consts::PI * cfg.alpha * (1.0 - cfg.mu * cfg.psi).exp());
    let exponent = 2f64.powf(2.0 / 3.0) * f / (60.0 * a3) + delta0 / (2f64.powf(-4.0 / 3.0) * 60.0 * a3 * f);
    let value = prefactor * exponent.exp();
    (value.is_finite() && value > 0.0).then_some(value)
}
