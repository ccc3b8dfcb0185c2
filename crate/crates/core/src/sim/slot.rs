//! One transmission slot: every transmitter is active, each receiver listens to
//! its nearest transmitter and harvests from all of them.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::geometry::{Point, SpatialGrid};
use super::SimError;
use crate::model::{sinr, NetworkConfig};

const MIN_DISTANCE: f64 = 1e-9;

/// What one receiver experienced during one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reception {
    /// Index of the serving (nearest) transmitter.
    pub transmitter: usize,
    pub decoded: bool,
    /// RF energy routed to the harvester, before rectification, in joules.
    pub harvested_joules: f64,
    /// Fade of the serving link.
    pub nearest_fade: f64,
    /// `Σ h_i·min(1, d_i^-α)` over all transmitters (per unit transmit power).
    pub gain_sum: f64,
}

/// Mean of `Σ h·d^-α` over transmitters farther than `radius`, per unit
/// transmit power: `2πλ R^{2-α} / (μ(α-2))`.
pub fn far_field_mean(density: f64, radius: f64, cfg: &NetworkConfig) -> f64 {
    2.0 * PI * density * radius.powf(2.0 - cfg.alpha) / (cfg.mu * (cfg.alpha - 2.0))
}

/// Runs one slot. `interference_radius` truncates the explicit interferer sum;
/// the mean contribution beyond it is added deterministically. `None` sums
/// every transmitter on the torus.
pub fn run_slot<R: Rng + ?Sized>(
    transmitters: &SpatialGrid,
    receivers: &[Point],
    cfg: &NetworkConfig,
    interference_radius: Option<f64>,
    rng: &mut R,
) -> Result<Vec<Reception>, SimError> {
    if transmitters.is_empty() {
        return Err(SimError::EmptySet);
    }
    let fade = Exp::new(cfg.mu).map_err(|e| SimError::InvalidSettings(e.to_string()))?;
    let radius = interference_radius.unwrap_or(f64::INFINITY);
    let far = match interference_radius {
        Some(r) => far_field_mean(transmitters.density(), r, cfg),
        None => 0.0,
    };
    let alpha = cfg.alpha;
    // path loss from a squared distance
    let pathloss = |d2: f64| if alpha == 4.0 { (d2 * d2).recip() } else { d2.powf(-0.5 * alpha) };
    let mut out = Vec::with_capacity(receivers.len());
    for &rx in receivers {
        let (serving, d_serving) = transmitters.nearest(rx)?;
        let d_serving = d_serving.max(MIN_DISTANCE);
        let h_c: f64 = fade.sample(rng);
        let mut interference = 0.0;
        let mut gain_sum = h_c * pathloss(d_serving * d_serving).min(1.0);
        let mut visit = |i: usize, d2: f64| {
            if i == serving {
                return;
            }
            let h: f64 = fade.sample(rng);
            let g = pathloss(d2.max(MIN_DISTANCE * MIN_DISTANCE));
            interference += h * g;
            gain_sum += h * g.min(1.0);
        };
        if radius.is_finite() {
            transmitters.for_each_within(rx, radius, &mut visit);
        } else {
            for (i, &p) in transmitters.points().iter().enumerate() {
                visit(i, transmitters.window().distance_squared(rx, p));
            }
        }
        interference += far;
        gain_sum += far;
        let gamma = sinr(h_c, d_serving, cfg.pt * interference, cfg);
        let harvested_joules = if h_c >= cfg.psi {
            cfg.slot_seconds * (1.0 - cfg.psi / h_c) * cfg.pt * gain_sum
        } else {
            0.0
        };
        out.push(Reception {
            transmitter: serving,
            decoded: gamma >= cfg.gamma_star,
            harvested_joules,
            nearest_fade: h_c,
            gain_sum,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::geometry::Window;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lone_noise_free_transmitter_always_decodes() {
        let w = Window::new(100.0).unwrap();
        let grid = SpatialGrid::new(vec![[50.0, 50.0]], w);
        let cfg = NetworkConfig { noise: 0.0, ..NetworkConfig::default() };
        let rx = [[10.0, 10.0], [70.0, 20.0], [50.0, 51.0]];
        let out = run_slot(&grid, &rx, &cfg, None, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(out.iter().all(|r| r.decoded));
    }

    #[test]
    fn huge_split_threshold_blocks_harvest() {
        let w = Window::new(50.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let tx = SpatialGrid::new(crate::sim::sample_ppp(0.2, &w, &mut rng), w);
        let rx = crate::sim::sample_ppp(0.2, &w, &mut rng);
        let cfg = NetworkConfig { psi: 50.0, ..NetworkConfig::default() };
        let out = run_slot(&tx, &rx, &cfg, Some(10.0), &mut rng).unwrap();
        assert!(out.iter().all(|r| r.harvested_joules == 0.0));
    }

    #[test]
    fn harvest_only_above_split_and_never_negative() {
        let w = Window::new(60.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tx = SpatialGrid::new(crate::sim::sample_ppp(0.1, &w, &mut rng), w);
        let rx = crate::sim::sample_ppp(0.1, &w, &mut rng);
        let cfg = NetworkConfig::default();
        for r in run_slot(&tx, &rx, &cfg, Some(15.0), &mut rng).unwrap() {
            assert!(r.harvested_joules >= 0.0);
            if r.nearest_fade < cfg.psi {
                assert_eq!(r.harvested_joules, 0.0);
            }
        }
    }

    #[test]
    fn empty_transmitters_error() {
        let w = Window::new(10.0).unwrap();
        let grid = SpatialGrid::new(Vec::new(), w);
        let cfg = NetworkConfig::default();
        assert!(run_slot(&grid, &[[1.0, 1.0]], &cfg, None, &mut ChaCha8Rng::seed_from_u64(1)).is_err());
    }
}
