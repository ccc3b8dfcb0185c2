//! Monte-Carlo estimation over independent realizations.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cp::{run_cp, CpOutcome, Realization};
use super::geometry::Window;
use super::SimError;
use crate::analytic::{cps_to_depletion, energy_per_cp, participating_roles};
use crate::model::{watts_to_dbm, NetworkConfig, RectennaModel, Role, Scenario};

/// Knobs of the Monte-Carlo engine that do not belong to the network model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimSettings {
    /// Torus side in meters.
    pub side: f64,
    /// Interferers beyond this distance enter through their mean; `None` sums
    /// every transmitter explicitly.
    pub interference_radius: Option<f64>,
    /// Receivers sampled per point set and slot; `None` uses every node.
    pub probes: Option<usize>,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            side: 500.0,
            interference_radius: Some(20.0),
            probes: Some(256),
        }
    }
}

impl SimSettings {
    pub fn validate(&self) -> Result<Window, SimError> {
        let window = Window::new(self.side)?;
        if let Some(r) = self.interference_radius {
            if !(r >= 1.0 && r < self.side / 2.0) {
                return Err(SimError::InvalidSettings(format!(
                    "interference radius must lie in [1, side/2) (got {r})"
                )));
            }
        }
        if self.probes == Some(0) {
            return Err(SimError::InvalidSettings("probes must be >= 1".into()));
        }
        Ok(window)
    }
}

/// Per-realization averages. Powers are mean RF power per receive slot summed
/// over the receive slots of a CP, before rectification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizationRecord {
    pub index: u64,
    /// Fraction of S2 receivers decoding their nearest S1 transmitter.
    pub p_dc1: f64,
    /// Fraction of S1 receivers decoding their nearest S2 transmitter.
    pub p_dc2: f64,
    pub p_dc: f64,
    /// Fraction of S2 receivers obtaining an S1 message directly or via a relay.
    pub p_cc1: f64,
    pub p_cc2: f64,
    pub p_cc: f64,
    pub pdps_d1: f64,
    pub pdps_d2: f64,
    pub pdps_c1: f64,
    pub pdps_c2: f64,
    pub pdps_cr: f64,
    /// Slot-1 fraction of receivers whose serving fade reaches ψ.
    pub split_fraction: f64,
    /// Slot-1 mean serving fade among receivers that reach ψ.
    pub split_mean_fade: f64,
    /// Slot-1 mean of `Σ h_i·min(1, d_i^-α)`.
    pub gain_sum: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

fn fraction(flags: &[bool]) -> f64 {
    mean(flags.iter().map(|&b| if b { 1.0 } else { 0.0 }))
}

impl RealizationRecord {
    fn from_outcome(index: u64, out: &CpOutcome, cfg: &NetworkConfig) -> Self {
        let ts = cfg.slot_seconds;
        let slot_power = |rs: &[super::Reception]| mean(rs.iter().map(|r| r.harvested_joules / ts));
        let p_dc1 = fraction(&out.s2_direct.iter().map(|r| r.decoded).collect::<Vec<_>>());
        let p_dc2 = fraction(&out.s1_direct.iter().map(|r| r.decoded).collect::<Vec<_>>());
        let pdps_d1 = slot_power(&out.s1_direct);
        let pdps_d2 = slot_power(&out.s2_direct);
        let cooperative = out.scenario == Scenario::Cooperative;
        let (p_cc1, p_cc2, pdps_c1, pdps_c2, pdps_cr) = if cooperative {
            (
                fraction(&out.s2_success),
                fraction(&out.s1_success),
                mean(out.s1_energy().into_iter().map(|e| e / ts)),
                mean(out.s2_energy().into_iter().map(|e| e / ts)),
                mean(out.relay_energy().into_iter().map(|e| e / ts)),
            )
        } else {
            (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN)
        };
        let above: Vec<f64> = out
            .s2_direct
            .iter()
            .map(|r| r.nearest_fade)
            .filter(|&h| h >= cfg.psi)
            .collect();
        Self {
            index,
            p_dc1,
            p_dc2,
            p_dc: p_dc1 * p_dc2,
            p_cc1,
            p_cc2,
            p_cc: p_cc1 * p_cc2,
            pdps_d1,
            pdps_d2,
            pdps_c1,
            pdps_c2,
            pdps_cr,
            split_fraction: above.len() as f64 / out.s2_direct.len() as f64,
            split_mean_fade: mean(above.into_iter()),
            gain_sum: mean(out.s2_direct.iter().map(|r| r.gain_sum)),
        }
    }
}

/// Quantities the engine can estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    PDc1,
    PDc2,
    PDc,
    PCc1,
    PCc2,
    PCc,
    PdpsD1,
    PdpsD2,
    PdpsC1,
    PdpsC2,
    PdpsCr,
    PehD1,
    PehD2,
    PehC1,
    PehC2,
    PehCr,
    SplitFraction,
    SplitMeanFade,
    GainSum,
}

impl Metric {
    pub const ALL: [Metric; 19] = [
        Metric::PDc1,
        Metric::PDc2,
        Metric::PDc,
        Metric::PCc1,
        Metric::PCc2,
        Metric::PCc,
        Metric::PdpsD1,
        Metric::PdpsD2,
        Metric::PdpsC1,
        Metric::PdpsC2,
        Metric::PdpsCr,
        Metric::PehD1,
        Metric::PehD2,
        Metric::PehC1,
        Metric::PehC2,
        Metric::PehCr,
        Metric::SplitFraction,
        Metric::SplitMeanFade,
        Metric::GainSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::PDc1 => "p_dc1",
            Metric::PDc2 => "p_dc2",
            Metric::PDc => "p_dc",
            Metric::PCc1 => "p_cc1",
            Metric::PCc2 => "p_cc2",
            Metric::PCc => "p_cc",
            Metric::PdpsD1 => "pdps_d1",
            Metric::PdpsD2 => "pdps_d2",
            Metric::PdpsC1 => "pdps_c1",
            Metric::PdpsC2 => "pdps_c2",
            Metric::PdpsCr => "pdps_cR",
            Metric::PehD1 => "peh_d1",
            Metric::PehD2 => "peh_d2",
            Metric::PehC1 => "peh_c1",
            Metric::PehC2 => "peh_c2",
            Metric::PehCr => "peh_cR",
            Metric::SplitFraction => "split_fraction",
            Metric::SplitMeanFade => "split_mean_fade",
            Metric::GainSum => "gain_sum",
        }
    }

    /// Pre-rectification counterpart of a rectified-power metric.
    pub fn rf_source(self) -> Option<Metric> {
        match self {
            Metric::PehD1 => Some(Metric::PdpsD1),
            Metric::PehD2 => Some(Metric::PdpsD2),
            Metric::PehC1 => Some(Metric::PdpsC1),
            Metric::PehC2 => Some(Metric::PdpsC2),
            Metric::PehCr => Some(Metric::PdpsCr),
            _ => None,
        }
    }

    pub fn needs_relays(self) -> bool {
        matches!(
            self,
            Metric::PCc1
                | Metric::PCc2
                | Metric::PCc
                | Metric::PdpsC1
                | Metric::PdpsC2
                | Metric::PdpsCr
                | Metric::PehC1
                | Metric::PehC2
                | Metric::PehCr
        )
    }

    fn sample(self, r: &RealizationRecord) -> f64 {
        match self {
            Metric::PDc1 => r.p_dc1,
            Metric::PDc2 => r.p_dc2,
            Metric::PDc => r.p_dc,
            Metric::PCc1 => r.p_cc1,
            Metric::PCc2 => r.p_cc2,
            Metric::PCc => r.p_cc,
            Metric::PdpsD1 => r.pdps_d1,
            Metric::PdpsD2 => r.pdps_d2,
            Metric::PdpsC1 => r.pdps_c1,
            Metric::PdpsC2 => r.pdps_c2,
            Metric::PdpsCr => r.pdps_cr,
            Metric::SplitFraction => r.split_fraction,
            Metric::SplitMeanFade => r.split_mean_fade,
            Metric::GainSum => r.gain_sum,
            Metric::PehD1 | Metric::PehD2 | Metric::PehC1 | Metric::PehC2 | Metric::PehCr => f64::NAN,
        }
    }

    /// Pre-rectification metric feeding a role's harvest in a scenario.
    pub fn rf_for_role(scenario: Scenario, role: Role) -> Option<Metric> {
        match (scenario, role) {
            (Scenario::Direct, Role::Source1) => Some(Metric::PdpsD1),
            (Scenario::Direct, Role::Source2) => Some(Metric::PdpsD2),
            (Scenario::Direct, Role::Relay) => None,
            (Scenario::Cooperative, Role::Source1) => Some(Metric::PdpsC1),
            (Scenario::Cooperative, Role::Source2) => Some(Metric::PdpsC2),
            (Scenario::Cooperative, Role::Relay) => Some(Metric::PdpsCr),
        }
    }
}

/// Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    #[serde(with = "crate::extended")]
    pub mean: f64,
    #[serde(with = "crate::extended")]
    pub std_error: f64,
    pub n: usize,
}

impl McEstimate {
    /// Mean and `sd/√n` over the finite samples.
    pub fn from_samples(samples: &[f64]) -> Self {
        let finite: Vec<f64> = samples.iter().copied().filter(|x| x.is_finite()).collect();
        let n = finite.len();
        if n == 0 {
            return Self { mean: f64::NAN, std_error: f64::NAN, n };
        }
        let m = finite.iter().sum::<f64>() / n as f64;
        let se = if n < 2 {
            f64::NAN
        } else {
            let var = finite.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        };
        Self { mean: m, std_error: se, n }
    }

    /// `(estimate - reference) / std_error`.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.mean - reference;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    }
}

/// How rectification is applied to simulated RF power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conversion {
    /// Rectify the ensemble-mean RF power (standard error by the delta method).
    #[default]
    EnsembleMean,
    /// Rectify each realization's mean RF power, then average.
    PerRealization,
}

fn rectify(pdps: f64, model: &RectennaModel) -> f64 {
    crate::analytic::peh_from_pdps(pdps, model)
}

/// `d(P·ε(P))/dP` for the clamped efficiency curve.
fn rectify_slope(pdps: f64, model: &RectennaModel) -> f64 {
    if !(pdps > 0.0) {
        return 0.0;
    }
    let x = watts_to_dbm(pdps);
    let raw = model.polynomial(x);
    if raw <= 0.0 || raw >= 1.0 {
        return raw.clamp(0.0, 1.0);
    }
    let deriv = (3.0 * model.a3 * x + 2.0 * model.a2) * x + model.a1;
    raw + deriv * 10.0 / std::f64::consts::LN_10
}

/// Every realization record of one simulation run, in index order.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub scenario: Scenario,
    pub config: NetworkConfig,
    pub records: Vec<RealizationRecord>,
}

impl Ensemble {
    pub fn samples(&self, metric: Metric) -> Vec<f64> {
        self.records.iter().map(|r| metric.sample(r)).collect()
    }

    pub fn estimate(&self, metric: Metric) -> McEstimate {
        self.estimate_with(metric, Conversion::EnsembleMean)
    }

    pub fn estimate_with(&self, metric: Metric, conversion: Conversion) -> McEstimate {
        let Some(source) = metric.rf_source() else {
            return McEstimate::from_samples(&self.samples(metric));
        };
        let model = &self.config.rectenna;
        match conversion {
            Conversion::EnsembleMean => {
                let rf = McEstimate::from_samples(&self.samples(source));
                McEstimate {
                    mean: rectify(rf.mean, model),
                    std_error: rectify_slope(rf.mean, model).abs() * rf.std_error,
                    n: rf.n,
                }
            }
            Conversion::PerRealization => {
                let converted: Vec<f64> = self.samples(source).into_iter().map(|p| rectify(p, model)).collect();
                McEstimate::from_samples(&converted)
            }
        }
    }

    /// Streams `realization_index,metric,value` rows for every record.
    pub fn write_records<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "realization_index,metric,value")?;
        for r in &self.records {
            for metric in Metric::ALL {
                if metric.rf_source().is_some() {
                    continue;
                }
                let v = metric.sample(r);
                if v.is_finite() {
                    writeln!(out, "{},{},{}", r.index, metric.name(), v)?;
                }
            }
        }
        Ok(())
    }
}

/// Runs `n` independent realizations. Realization `i` draws from ChaCha8
/// stream `i` of `master_seed`, and records are reduced in index order, so the
/// result does not depend on the number of worker threads.
pub fn simulate(
    scenario: Scenario,
    cfg: &NetworkConfig,
    settings: &SimSettings,
    n: usize,
    master_seed: u64,
) -> Result<Ensemble, SimError> {
    cfg.validate()?;
    let window = settings.validate()?;
    if n < 2 {
        return Err(SimError::InvalidSettings(format!("need at least 2 realizations (got {n})")));
    }
    for (name, lambda) in [("lambda1", cfg.lambda1), ("lambda2", cfg.lambda2)]
        .into_iter()
        .chain((scenario == Scenario::Cooperative).then_some(("lambdaR", cfg.lambda_r)))
    {
        let expected = lambda * window.area();
        if expected < 100.0 {
            log::warn!("{name}·side² = {expected:.1} < 100: estimates will be noisy");
        }
    }
    let records: Result<Vec<RealizationRecord>, SimError> = (0..n as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(index);
            let realization = Realization::sample(cfg, window, (master_seed, index), &mut rng);
            let outcome = run_cp(
                scenario,
                &realization,
                cfg,
                settings.probes,
                settings.interference_radius,
                &mut rng,
            )?;
            Ok(RealizationRecord::from_outcome(index, &outcome, cfg))
        })
        .collect();
    Ok(Ensemble {
        scenario,
        config: *cfg,
        records: records?,
    })
}

/// Convenience wrapper: simulate and estimate one metric.
pub fn estimate(
    metric: Metric,
    scenario: Scenario,
    cfg: &NetworkConfig,
    settings: &SimSettings,
    n: usize,
    master_seed: u64,
) -> Result<McEstimate, SimError> {
    let scenario = if metric.needs_relays() { Scenario::Cooperative } else { scenario };
    Ok(simulate(scenario, cfg, settings, n, master_seed)?.estimate(metric))
}

/// Lifetime of each participating role and the network, from an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifetimeEstimate {
    pub network: McEstimate,
    pub limiting_role: Role,
}

/// Whole CPs until the first role's mean battery is exhausted, crediting the
/// rectified mean harvest of each CP when `with_harvesting` is set.
pub fn lifetime_from_ensemble(ensemble: &Ensemble, with_harvesting: bool) -> Result<LifetimeEstimate, SimError> {
    let cfg = &ensemble.config;
    let scenario = ensemble.scenario;
    let mut best: Option<(McEstimate, Role)> = None;
    for &role in participating_roles(scenario) {
        let consumed = energy_per_cp(scenario, role, cfg)?;
        let (credit, credit_se, n) = if with_harvesting {
            let metric = Metric::rf_for_role(scenario, role).expect("participating role has a harvest metric");
            let rf = McEstimate::from_samples(&ensemble.samples(metric));
            let peh = rectify(rf.mean, &cfg.rectenna);
            let se = rectify_slope(rf.mean, &cfg.rectenna).abs() * rf.std_error;
            (cfg.slot_seconds * peh, cfg.slot_seconds * se, rf.n)
        } else {
            (0.0, 0.0, ensemble.records.len())
        };
        let drain = consumed - credit;
        let cps = cps_to_depletion(cfg.battery_joules, drain);
        let (mean, se) = if cps.is_finite() {
            (cps.floor(), cfg.battery_joules / (drain * drain) * credit_se)
        } else {
            (f64::INFINITY, f64::NAN)
        };
        let est = McEstimate { mean, std_error: se, n };
        if best.as_ref().is_none_or(|(b, _)| est.mean < b.mean) {
            best = Some((est, role));
        }
    }
    let (network, limiting_role) = best.expect("every scenario has participating roles");
    Ok(LifetimeEstimate { network, limiting_role })
}

pub fn simulate_lifetime(
    scenario: Scenario,
    with_harvesting: bool,
    cfg: &NetworkConfig,
    settings: &SimSettings,
    n: usize,
    master_seed: u64,
) -> Result<McEstimate, SimError> {
    let ensemble = simulate(scenario, cfg, settings, n, master_seed)?;
    Ok(lifetime_from_ensemble(&ensemble, with_harvesting)?.network)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimSettings {
        SimSettings { side: 60.0, interference_radius: Some(15.0), probes: Some(64) }
    }

    #[test]
    fn identical_samples_have_zero_error() {
        let e = McEstimate::from_samples(&[0.3, 0.3]);
        assert_eq!(e.std_error, 0.0);
        assert_eq!(e.n, 2);
    }

    #[test]
    fn standard_error_formula() {
        let e = McEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((e.std_error - sd / 2.0).abs() < 1e-15);
        assert_eq!(McEstimate::from_samples(&[1.0, f64::NAN, 3.0]).n, 2);
    }

    #[test]
    fn lifetime_without_harvest_is_exact() {
        let cfg = NetworkConfig::default();
        let l = simulate_lifetime(Scenario::Direct, false, &cfg, &small(), 4, 1).unwrap();
        assert_eq!(l.mean, 5714.0);
    }

    #[test]
    fn perpetual_when_harvest_covers_consumption() {
        let cfg = NetworkConfig::default();
        let mut ens = simulate(Scenario::Direct, &cfg, &small(), 4, 1).unwrap();
        assert!(lifetime_from_ensemble(&ens, true).unwrap().network.mean.is_finite());
        // 10 mW of RF rectifies to 7.96 mW, above a 1 mW draw
        for r in &mut ens.records {
            r.pdps_d1 = 0.01;
            r.pdps_d2 = 0.01;
        }
        ens.config.pr = 0.0;
        ens.config.pt = 1e-3;
        let l = lifetime_from_ensemble(&ens, true).unwrap();
        assert_eq!(l.network.mean, f64::INFINITY);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let cfg = NetworkConfig::default();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate(Scenario::Cooperative, &cfg, &small(), 6, 42).unwrap().records)
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn records_csv_has_header() {
        let cfg = NetworkConfig::default();
        let ens = simulate(Scenario::Direct, &cfg, &small(), 2, 3).unwrap();
        let mut buf = Vec::new();
        ens.write_records(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("realization_index,metric,value\n"));
        assert!(text.contains("\n1,p_dc1,"));
    }

    #[test]
    fn rejects_bad_settings() {
        let cfg = NetworkConfig::default();
        let bad = SimSettings { interference_radius: Some(40.0), ..small() };
        assert!(simulate(Scenario::Direct, &cfg, &bad, 4, 1).is_err());
        assert!(simulate(Scenario::Direct, &cfg, &small(), 1, 1).is_err());
    }
}
