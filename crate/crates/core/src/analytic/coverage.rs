//! Decoding and exchange success probabilities.

use std::f64::consts::PI;

use super::AnalyticError;
use crate::model::NetworkConfig;
use crate::specfun::{erfcx, hyp2f1, integrate, QuadratureSpec};

// The exchange integrands are scaled so that the nearest-neighbour mass is
// exp(-s); beyond s = 200 everything is below 1e-86.
const S_CAP: f64 = 200.0;

fn check_intensity(lambda_tx: f64) -> Result<(), AnalyticError> {
    if lambda_tx > 0.0 && lambda_tx.is_finite() {
        Ok(())
    } else {
        Err(AnalyticError::Precondition(format!(
            "transmitter intensity must be > 0 (got {lambda_tx})"
        )))
    }
}

/// Interference factor `ρ(T) = 2T/(α-2) · ₂F₁(1, 1-2/α; 2-2/α; -T)` appearing in
/// the Laplace transform of Rayleigh-faded PPP interference beyond the
/// serving distance. Equivalent to `T^{2/α} ∫_{T^{-2/α}}^∞ du / (1 + u^{α/2})`.
pub fn interference_factor(t: f64, alpha: f64) -> Result<f64, AnalyticError> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let c = 2.0 - 2.0 / alpha;
    let f = if t < 0.5 {
        hyp2f1(1.0, 1.0 - 2.0 / alpha, c, -t)?
    } else {
        // Pfaff: ₂F₁(1,b;c;-T) = ₂F₁(1, c-b; c; T/(1+T)) / (1+T), with c - b = 1
        hyp2f1(1.0, 1.0, c, t / (1.0 + t))? / (1.0 + t)
    };
    Ok(2.0 * t / (alpha - 2.0) * f)
}

/// `γ^{2/α} ∫_{γ^{-2/α}}^∞ du/(1+u^{α/2})` by quadrature, after the change of
/// variables `u = 1/w` that turns it into a finite-interval integral.
pub fn interference_factor_quadrature(gamma: f64, alpha: f64) -> Result<f64, AnalyticError> {
    let upper = gamma.powf(2.0 / alpha);
    let half = alpha / 2.0;
    let integrand = |w: f64| w.powf(half - 2.0) / (w.powf(half) + 1.0);
    Ok(upper * integrate(integrand, 0.0, upper, &QuadratureSpec::default())?)
}

/// Effective threshold `T(r) = γ*/(1 - φγ* r^α)` with `φ = N/(P_t ψ)`, or `None`
/// where the noise alone already defeats decoding.
fn effective_threshold(r_alpha: f64, cfg: &NetworkConfig) -> Option<f64> {
    let phi = cfg.noise / (cfg.pt * cfg.psi);
    let slack = 1.0 - phi * cfg.gamma_star * r_alpha;
    (slack > 0.0).then(|| cfg.gamma_star / slack)
}

/// Upper limit, in units of `s = πλr²`, of the fade-above-split integral.
fn split_branch_cap(lambda_tx: f64, cfg: &NetworkConfig) -> f64 {
    if cfg.noise == 0.0 {
        return S_CAP;
    }
    let r_max = (cfg.pt * cfg.psi / (cfg.noise * cfg.gamma_star)).powf(1.0 / cfg.alpha);
    (PI * lambda_tx * r_max * r_max).min(S_CAP)
}

/// Probability of decoding the nearest transmitter of a PPP with intensity
/// `lambda_tx` in one slot, evaluated by quadrature for any `α > 2`.
pub fn p_dc_slot(lambda_tx: f64, cfg: &NetworkConfig) -> Result<f64, AnalyticError> {
    cfg.validate()?;
    check_intensity(lambda_tx)?;
    let alpha = cfg.alpha;
    let below_split = 1.0 - (-cfg.mu * cfg.psi).exp();
    let spec = QuadratureSpec::default();

    // Fade below ψ: the whole signal reaches the decoder.
    let rho = interference_factor_quadrature(cfg.gamma_star, alpha)?;
    let k = PI * lambda_tx * (1.0 + rho);
    let omega = cfg.mu * cfg.gamma_star * cfg.noise / cfg.pt;
    let first = if omega == 0.0 {
        below_split / (1.0 + rho)
    } else {
        let half = alpha / 2.0;
        let tail = |s: f64| (-s - omega * (s / k).powf(half)).exp();
        let integral = crate::specfun::integrate_semi_infinite(tail, 0.0, &spec)?;
        below_split / (1.0 + rho) * integral
    };

    // Fade at or above ψ: the decoder sees a ψ-scaled signal.
    let cap = split_branch_cap(lambda_tx, cfg);
    let err = std::cell::Cell::new(None);
    let integrand = |s: f64| {
        let r_alpha = (s / (PI * lambda_tx)).powf(alpha / 2.0);
        match effective_threshold(r_alpha, cfg) {
            None => 0.0,
            Some(t) => match interference_factor(t, alpha) {
                Ok(rho_t) => (-s * (1.0 + rho_t)).exp(),
                Err(e) => {
                    err.set(Some(e));
                    0.0
                }
            },
        }
    };
    let integral = integrate(integrand, 0.0, cap, &spec)?;
    if let Some(e) = err.take() {
        return Err(e);
    }
    let second = (-cfg.mu * cfg.psi).exp() * integral;
    Ok((first + second).clamp(0.0, 1.0))
}

/// Fast path of [`p_dc_slot`] for `α = 4`, where the first branch has a
/// closed form and the interference factor reduces to `√T·atan√T`.
pub fn p_dc_slot_alpha4(lambda_tx: f64, cfg: &NetworkConfig) -> Result<f64, AnalyticError> {
    cfg.validate()?;
    check_intensity(lambda_tx)?;
    if cfg.alpha != 4.0 {
        return Err(AnalyticError::Precondition(format!(
            "path-loss exponent must be 4 (got {})",
            cfg.alpha
        )));
    }
    let below_split = 1.0 - (-cfg.mu * cfg.psi).exp();
    let root = cfg.gamma_star.sqrt();
    let chi = PI * lambda_tx * (1.0 + root * root.atan());
    let omega = cfg.mu * cfg.gamma_star * cfg.noise / cfg.pt;
    let first = if omega == 0.0 {
        PI * lambda_tx * below_split / chi
    } else {
        // √(π/ω)·exp(χ²/4ω)·Q(χ/√(2ω)) written with the scaled erfc
        PI * lambda_tx * below_split * 0.5 * (PI / omega).sqrt() * erfcx(chi / (2.0 * omega.sqrt()))
    };

    let cap = split_branch_cap(lambda_tx, cfg);
    let integrand = |s: f64| {
        let r2 = s / (PI * lambda_tx);
        match effective_threshold(r2 * r2, cfg) {
            None => 0.0,
            Some(t) => {
                let zeta = t.sqrt();
                (-s * (1.0 + zeta * zeta.atan())).exp()
            }
        }
    };
    let integral = integrate(integrand, 0.0, cap, &QuadratureSpec::default())?;
    let second = (-cfg.mu * cfg.psi).exp() * integral;
    Ok((first + second).clamp(0.0, 1.0))
}

/// Per-slot and per-CP success probabilities of both scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeProbabilities {
    /// Decoding an S1 transmitter (received by S2 nodes).
    pub p_dc1: f64,
    /// Decoding an S2 transmitter (received by S1 nodes).
    pub p_dc2: f64,
    pub p_dc: f64,
    /// S1 message delivered through a relay.
    pub p_cc_r1: f64,
    /// S2 message delivered through a relay.
    pub p_cc_r2: f64,
    pub p_cc: f64,
}

/// Mutual exchange probability when the direct link succeeds with `direct`
/// and the relay path with `relayed`, both sides independent.
pub fn cooperative_exchange(direct: [f64; 2], relayed: [f64; 2]) -> f64 {
    let side = |d: f64, r: f64| d + r * (1.0 - d);
    side(direct[0], relayed[0]) * side(direct[1], relayed[1])
}

pub fn p_dc(cfg: &NetworkConfig) -> Result<f64, AnalyticError> {
    Ok(p_dc_slot(cfg.lambda1, cfg)? * p_dc_slot(cfg.lambda2, cfg)?)
}

pub fn p_cc(cfg: &NetworkConfig) -> Result<f64, AnalyticError> {
    Ok(exchange_probabilities(cfg)?.p_cc)
}

pub fn exchange_probabilities(cfg: &NetworkConfig) -> Result<ExchangeProbabilities, AnalyticError> {
    let p_dc1 = p_dc_slot(cfg.lambda1, cfg)?;
    let p_dc2 = p_dc_slot(cfg.lambda2, cfg)?;
    let p_relay = p_dc_slot(cfg.lambda_r, cfg)?;
    let p_cc_r1 = p_dc1 * p_relay;
    let p_cc_r2 = p_dc2 * p_relay;
    Ok(ExchangeProbabilities {
        p_dc1,
        p_dc2,
        p_dc: p_dc1 * p_dc2,
        p_cc_r1,
        p_cc_r2,
        p_cc: cooperative_exchange([p_dc1, p_dc2], [p_cc_r1, p_cc_r2]),
    })
}
