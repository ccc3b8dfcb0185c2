//! Battery lifetime, spatial throughput and messages per lifetime.

use super::harvest::peh_role;
use super::coverage::exchange_probabilities;
use super::AnalyticError;
use crate::model::{NetworkConfig, Role, Scenario};

/// Mean energy drawn per communication period by a node of `role`, in joules.
pub fn energy_per_cp(scenario: Scenario, role: Role, cfg: &NetworkConfig) -> Result<f64, AnalyticError> {
    let power = match (scenario, role) {
        (Scenario::Direct, Role::Relay) => {
            return Err(AnalyticError::Precondition(
                "relays take no part in direct communication".into(),
            ))
        }
        (Scenario::Direct, _) => cfg.pr + cfg.pt,
        (Scenario::Cooperative, Role::Relay) => 2.0 * cfg.pr + 2.0 * cfg.pt,
        (Scenario::Cooperative, _) => 2.0 * cfg.pr + cfg.pt,
    };
    Ok(cfg.slot_seconds * power)
}

/// CPs until a battery of `battery` joules is drained at `drain` joules per CP
/// (already net of harvesting). Non-positive drain never empties the battery.
pub fn cps_to_depletion(battery: f64, drain: f64) -> f64 {
    if drain <= 0.0 {
        f64::INFINITY
    } else {
        battery / drain
    }
}

/// Mean lifetime in CPs of a node of `role`.
pub fn lifetime(
    scenario: Scenario,
    with_harvesting: bool,
    role: Role,
    cfg: &NetworkConfig,
) -> Result<f64, AnalyticError> {
    let consumed = energy_per_cp(scenario, role, cfg)?;
    let credited = if with_harvesting {
        cfg.slot_seconds * peh_role(scenario, role, cfg)?
    } else {
        0.0
    };
    Ok(cps_to_depletion(cfg.battery_joules, consumed - credited))
}

/// Roles whose batteries bound the network lifetime.
pub fn participating_roles(scenario: Scenario) -> &'static [Role] {
    match scenario {
        Scenario::Direct => &[Role::Source1, Role::Source2],
        Scenario::Cooperative => &Role::ALL,
    }
}

/// Network lifetime: the first role to run dry ends it.
pub fn network_lifetime(
    scenario: Scenario,
    with_harvesting: bool,
    cfg: &NetworkConfig,
) -> Result<f64, AnalyticError> {
    let mut shortest = f64::INFINITY;
    for &role in participating_roles(scenario) {
        shortest = shortest.min(lifetime(scenario, with_harvesting, role, cfg)?);
    }
    Ok(shortest)
}

/// Messages per second per unit area for exchange probability `p`.
pub fn throughput_from(p: f64, scenario: Scenario, cfg: &NetworkConfig) -> f64 {
    (cfg.lambda1 + cfg.lambda2) * p / (f64::from(scenario.slots_per_cp()) * cfg.slot_seconds)
}

pub fn spatial_throughput(scenario: Scenario, cfg: &NetworkConfig) -> Result<f64, AnalyticError> {
    let probs = exchange_probabilities(cfg)?;
    let p = match scenario {
        Scenario::Direct => probs.p_dc,
        Scenario::Cooperative => probs.p_cc,
    };
    Ok(throughput_from(p, scenario, cfg))
}

/// Throughput times lifetime times slots per CP. A zero throughput wins over an
/// infinite lifetime.
pub fn tme_from(throughput: f64, lifetime_cps: f64, scenario: Scenario) -> f64 {
    if throughput == 0.0 {
        return 0.0;
    }
    throughput * lifetime_cps * f64::from(scenario.slots_per_cp())
}

pub fn tme(scenario: Scenario, with_harvesting: bool, cfg: &NetworkConfig) -> Result<f64, AnalyticError> {
    Ok(tme_from(
        spatial_throughput(scenario, cfg)?,
        network_lifetime(scenario, with_harvesting, cfg)?,
        scenario,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifetimes_without_harvesting() {
        let cfg = NetworkConfig::default();
        let dc = lifetime(Scenario::Direct, false, Role::Source1, &cfg).unwrap();
        assert!((dc - 1000.0 / 0.175).abs() < 1e-9);
        let relay = lifetime(Scenario::Cooperative, false, Role::Relay, &cfg).unwrap();
        assert!((relay - 1000.0 / 0.35).abs() < 1e-9);
        let src = lifetime(Scenario::Cooperative, false, Role::Source2, &cfg).unwrap();
        assert!((src - 1000.0 / 0.275).abs() < 1e-9);
    }

    #[test]
    fn perpetual_operation() {
        assert_eq!(cps_to_depletion(1000.0, 0.0), f64::INFINITY);
        assert_eq!(cps_to_depletion(1000.0, -0.1), f64::INFINITY);
    }

    #[test]
    fn harvesting_never_shortens_life() {
        let cfg = NetworkConfig::default();
        for scenario in [Scenario::Direct, Scenario::Cooperative] {
            for &role in participating_roles(scenario) {
                let plain = lifetime(scenario, false, role, &cfg).unwrap();
                let eh = lifetime(scenario, true, role, &cfg).unwrap();
                assert!(eh >= plain);
            }
        }
    }

    #[test]
    fn throughput_ratio_equal_probability() {
        let cfg = NetworkConfig::default();
        let dc = throughput_from(0.4, Scenario::Direct, &cfg);
        let cc = throughput_from(0.4, Scenario::Cooperative, &cfg);
        assert!((dc / cc - 2.0).abs() < 1e-15);
        assert_eq!(throughput_from(0.0, Scenario::Direct, &cfg), 0.0);
        assert_eq!(tme_from(0.0, f64::INFINITY, Scenario::Direct), 0.0);
    }

    #[test]
    fn relay_cannot_join_direct() {
        assert!(lifetime(Scenario::Direct, false, Role::Relay, &NetworkConfig::default()).is_err());
    }
}
