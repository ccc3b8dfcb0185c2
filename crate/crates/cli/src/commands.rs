//! The four subcommands as pure functions returning their output text.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wehnet::analytic::{network_lifetime, optimal_intensity, throughput_from, tme_from, OptimalIntensity};
use wehnet::extended::to_text;
use wehnet::sim::{lifetime_from_ensemble, simulate, Ensemble, McEstimate, Metric, SimSettings};
use wehnet::{report, AnalyticReport, NetworkConfig, Scenario};

use crate::error::CliError;
use crate::input::SweepSpec;

/// Smallest realization count `validate` accepts.
pub const MIN_VALIDATION_REALIZATIONS: usize = 100;
/// `validate` fails when any |z| exceeds this.
pub const Z_LIMIT: f64 = 4.0;

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = writer.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Input(e.to_string()))
}

pub fn analytic(cfg: &NetworkConfig) -> Result<String, CliError> {
    let rep = report(cfg)?;
    Ok(serde_json::to_string_pretty(&rep).expect("report serializes") + "\n")
}

pub fn optimal(cfg: &NetworkConfig) -> Result<OptimalIntensity, CliError> {
    cfg.validate().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(optimal_intensity(cfg)?)
}

pub fn optimal_json(cfg: &NetworkConfig) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(&optimal(cfg)?).expect("record serializes") + "\n")
}

/// Simulated quantity paired with its analytic report field.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Compared {
    Metric(Metric),
    Lifetime(Scenario),
}

impl Compared {
    fn field(self) -> &'static str {
        match self {
            Compared::Metric(m) => m.name(),
            Compared::Lifetime(Scenario::Direct) => "lifetime_dc_eh",
            Compared::Lifetime(Scenario::Cooperative) => "lifetime_cc_eh",
        }
    }

    fn estimate(self, ensemble: &Ensemble) -> Result<McEstimate, CliError> {
        match self {
            Compared::Metric(m) => Ok(ensemble.estimate(m)),
            Compared::Lifetime(scenario) => {
                let view = Ensemble { scenario, ..ensemble.clone() };
                Ok(lifetime_from_ensemble(&view, true)?.network)
            }
        }
    }
}

const COMPARED: [Compared; 18] = [
    Compared::Metric(Metric::PDc1),
    Compared::Metric(Metric::PDc2),
    Compared::Metric(Metric::PDc),
    Compared::Metric(Metric::PCc),
    Compared::Metric(Metric::PdpsD1),
    Compared::Metric(Metric::PdpsD2),
    Compared::Metric(Metric::PdpsC1),
    Compared::Metric(Metric::PdpsC2),
    Compared::Metric(Metric::PdpsCr),
    Compared::Metric(Metric::PehD1),
    Compared::Metric(Metric::PehD2),
    Compared::Metric(Metric::PehC1),
    Compared::Metric(Metric::PehC2),
    Compared::Metric(Metric::PehCr),
    Compared::Lifetime(Scenario::Direct),
    Compared::Lifetime(Scenario::Cooperative),
    // the two relay-path sides enter only through p_cc; list them for diagnosis
    Compared::Metric(Metric::PCc1),
    Compared::Metric(Metric::PCc2),
];

/// Analytic value of a compared quantity. The one-sided cooperative
/// probabilities are not report fields and are rebuilt from their parts.
fn analytic_value(rep: &AnalyticReport, what: Compared) -> f64 {
    match what {
        Compared::Metric(Metric::PCc1) => rep.p_dc1 + rep.p_cc_r1 * (1.0 - rep.p_dc1),
        Compared::Metric(Metric::PCc2) => rep.p_dc2 + rep.p_cc_r2 * (1.0 - rep.p_dc2),
        other => rep.get(other.field()).expect("compared field is a report field"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub metric: String,
    pub analytic: f64,
    pub mc: McEstimate,
    pub z_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationTable {
    pub rows: Vec<ValidationRow>,
}

impl ValidationTable {
    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z_score.abs()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv_writer();
        w.write_record(["metric", "analytic", "mc_mean", "mc_std_error", "n", "z_score"])?;
        for r in &self.rows {
            w.write_record([
                r.metric.clone(),
                to_text(r.analytic),
                to_text(r.mc.mean),
                to_text(r.mc.std_error),
                r.mc.n.to_string(),
                to_text(r.z_score),
            ])?;
        }
        finish(w)
    }
}

/// Simulates the cooperative scenario (whose first two slots are the direct
/// exchange) and compares every estimate against the model.
pub fn validate(
    cfg: &NetworkConfig,
    n: usize,
    seed: u64,
    settings: &SimSettings,
) -> Result<ValidationTable, CliError> {
    if n < MIN_VALIDATION_REALIZATIONS {
        return Err(CliError::Input(format!(
            "validation needs at least {MIN_VALIDATION_REALIZATIONS} realizations (got {n})"
        )));
    }
    let rep = report(cfg)?;
    let ensemble = simulate(Scenario::Cooperative, cfg, settings, n, seed)?;
    let mut rows = Vec::with_capacity(COMPARED.len());
    for what in COMPARED {
        let mc = what.estimate(&ensemble)?;
        let analytic = analytic_value(&rep, what);
        let z_score = if analytic.is_infinite() && mc.mean == analytic { 0.0 } else { mc.z_score(analytic) };
        rows.push(ValidationRow { metric: what.field().to_string(), analytic, mc, z_score });
    }
    Ok(ValidationTable { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Analytic,
    Simulate,
    Both,
    /// Cumulative messages per unit area against time, with harvesting.
    Timeseries,
}

impl std::str::FromStr for SweepMode {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "analytic" => Ok(SweepMode::Analytic),
            "simulate" => Ok(SweepMode::Simulate),
            "both" => Ok(SweepMode::Both),
            "timeseries" => Ok(SweepMode::Timeseries),
            _ => Err(CliError::Input(format!(
                "unknown sweep mode {s:?} (expected analytic, simulate, both or timeseries)"
            ))),
        }
    }
}

/// Monte-Carlo options of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSimulation {
    pub n: usize,
    pub seed: u64,
    pub settings: SimSettings,
}

/// Master seed of grid point `index`, so points draw unrelated streams.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn simulated_columns(ensemble: &Ensemble) -> Result<Vec<String>, CliError> {
    let mut out = Vec::with_capacity(2 * COMPARED.len());
    for what in COMPARED {
        let e = what.estimate(ensemble)?;
        out.push(to_text(e.mean));
        out.push(to_text(e.std_error));
    }
    Ok(out)
}

pub fn sweep(
    spec: &SweepSpec,
    mode: SweepMode,
    sim: &SweepSimulation,
    timeseries_points: usize,
) -> Result<String, CliError> {
    spec.validate()?;
    if mode == SweepMode::Timeseries {
        return timeseries(spec, timeseries_points);
    }
    let with_analytic = matches!(mode, SweepMode::Analytic | SweepMode::Both);
    let with_sim = matches!(mode, SweepMode::Simulate | SweepMode::Both);

    let mut header = vec![spec.variable.name().to_string()];
    if with_analytic {
        header.extend(AnalyticReport::FIELDS.iter().map(|f| f.to_string()));
    }
    if with_sim {
        for what in COMPARED {
            header.push(format!("{}_mc_mean", what.field()));
            header.push(format!("{}_mc_se", what.field()));
        }
    }
    header.push("error".into());
    let width = header.len();

    let configs: Vec<NetworkConfig> = spec.grid.iter().map(|&v| spec.variable.apply(&spec.fixed, v)).collect();
    let analytic_cols: Vec<Result<Vec<String>, String>> = if with_analytic {
        configs
            .par_iter()
            .map(|cfg| {
                report(cfg)
                    .map(|r| r.values().iter().map(|&v| to_text(v)).collect())
                    .map_err(|e| e.to_string())
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut w = csv_writer();
    w.write_record(&header)?;
    for (i, (&value, cfg)) in spec.grid.iter().zip(&configs).enumerate() {
        let mut row = vec![value.to_string()];
        let mut errors = Vec::new();
        if with_analytic {
            match &analytic_cols[i] {
                Ok(cols) => row.extend(cols.iter().cloned()),
                Err(e) => {
                    row.extend(std::iter::repeat_n(String::new(), AnalyticReport::FIELDS.len()));
                    errors.push(format!("analytic: {e}"));
                }
            }
        }
        if with_sim {
            let cols = simulate(Scenario::Cooperative, cfg, &sim.settings, sim.n, point_seed(sim.seed, i))
                .map_err(CliError::from)
                .and_then(|ens| simulated_columns(&ens));
            match cols {
                Ok(cols) => row.extend(cols),
                Err(e) => {
                    row.extend(std::iter::repeat_n(String::new(), 2 * COMPARED.len()));
                    errors.push(format!("simulation: {e}"));
                }
            }
        }
        row.push(errors.join("; "));
        debug_assert_eq!(row.len(), width);
        w.write_record(&row)?;
    }
    finish(w)
}

/// End-of-life time and message rate of one scenario with harvesting.
struct Trajectory {
    scenario: Scenario,
    throughput: f64,
    lifetime_cps: f64,
    cp_seconds: f64,
}

impl Trajectory {
    fn new(scenario: Scenario, cfg: &NetworkConfig) -> Result<Self, CliError> {
        let p = match scenario {
            Scenario::Direct => wehnet::analytic::p_dc(cfg)?,
            Scenario::Cooperative => wehnet::analytic::p_cc(cfg)?,
        };
        Ok(Self {
            scenario,
            throughput: throughput_from(p, scenario, cfg),
            lifetime_cps: network_lifetime(scenario, true, cfg)?,
            cp_seconds: f64::from(scenario.slots_per_cp()) * cfg.slot_seconds,
        })
    }

    fn end_seconds(&self) -> f64 {
        self.lifetime_cps * self.cp_seconds
    }

    /// Whole CPs completed by time `t` and the messages exchanged in them.
    fn at(&self, t: f64) -> (f64, f64) {
        let cps = (t / self.cp_seconds).floor().min(self.lifetime_cps);
        (cps, tme_from(self.throughput, cps, self.scenario))
    }
}

fn timeseries(spec: &SweepSpec, points: usize) -> Result<String, CliError> {
    if points < 2 {
        return Err(CliError::Input(format!("timeseries needs at least 2 points (got {points})")));
    }
    let mut w = csv_writer();
    w.write_record([spec.variable.name(), "scenario", "time_s", "cp", "cumulative_messages", "error"])?;
    for &value in &spec.grid {
        let cfg = spec.variable.apply(&spec.fixed, value);
        let trajectories = [Scenario::Direct, Scenario::Cooperative]
            .map(|s| Trajectory::new(s, &cfg));
        let horizon = trajectories
            .iter()
            .filter_map(|t| t.as_ref().ok())
            .map(Trajectory::end_seconds)
            .filter(|t| t.is_finite())
            .fold(0.0, f64::max);
        for traj in &trajectories {
            match traj {
                Err(e) => {
                    w.write_record([value.to_string(), String::new(), String::new(), String::new(), String::new(), e.to_string()])?;
                }
                Ok(_) if horizon == 0.0 => {
                    w.write_record([
                        value.to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        "no finite lifetime to bound the time axis".to_string(),
                    ])?;
                    break;
                }
                Ok(traj) => {
                    for k in 0..points {
                        let t = horizon * k as f64 / (points - 1) as f64;
                        let (cps, messages) = traj.at(t);
                        w.write_record([
                            value.to_string(),
                            traj.scenario.name().to_string(),
                            t.to_string(),
                            cps.to_string(),
                            to_text(messages),
                            String::new(),
                        ])?;
                    }
                }
            }
        }
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::SweepVariable;

    fn quick() -> SweepSimulation {
        SweepSimulation {
            n: 4,
            seed: 5,
            settings: SimSettings { side: 60.0, interference_radius: Some(15.0), probes: Some(32) },
        }
    }

    #[test]
    fn validation_minimum() {
        let err = validate(&NetworkConfig::default(), 10, 1, &quick().settings).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn threshold_sweep_columns() {
        let spec = SweepSpec {
            variable: SweepVariable::GammaStarDb,
            grid: vec![-10.0, 0.0, 10.0],
            fixed: NetworkConfig::default(),
        };
        let text = sweep(&spec, SweepMode::Analytic, &quick(), 0).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("gamma_star_db,p_dc1,"));
        assert!(lines[0].ends_with(",lambda_opt,error"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn simulated_sweep_has_estimate_columns() {
        let spec = SweepSpec { variable: SweepVariable::Mu, grid: vec![1.0], fixed: NetworkConfig::default() };
        let text = sweep(&spec, SweepMode::Simulate, &quick(), 0).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.starts_with("mu,p_dc1_mc_mean,p_dc1_mc_se,"));
        assert!(!header.contains(",p_cc_r1,"));
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row.len(), header.split(',').count());
        assert_eq!(*row.last().unwrap(), "");
    }

    #[test]
    fn failing_point_is_recorded_and_run_continues() {
        // a vanishing relay intensity is a valid config but has no full report
        let spec = SweepSpec { variable: SweepVariable::LambdaR, grid: vec![0.0, 0.25], fixed: NetworkConfig::default() };
        let text = sweep(&spec, SweepMode::Analytic, &quick(), 0).unwrap();
        let rows: Vec<&str> = text.lines().skip(1).collect();
        assert!(rows[0].contains("analytic:"));
        assert!(rows[1].ends_with(','));
    }

    #[test]
    fn timeseries_stops_growing_at_end_of_life() {
        let spec = SweepSpec { variable: SweepVariable::Mu, grid: vec![1.0], fixed: NetworkConfig::default() };
        let text = sweep(&spec, SweepMode::Timeseries, &quick(), 11).unwrap();
        let rows: Vec<Vec<String>> =
            text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
        assert_eq!(rows.len(), 22);
        let dc: Vec<f64> = rows.iter().filter(|r| r[1] == "dc").map(|r| r[4].parse().unwrap()).collect();
        assert_eq!(dc[0], 0.0);
        assert!(dc.windows(2).all(|w| w[1] >= w[0]));
        let cfg = NetworkConfig::default();
        let tme_dc = wehnet::analytic::tme(Scenario::Direct, true, &cfg).unwrap();
        let last = *dc.last().unwrap();
        assert!(last <= tme_dc && last > 0.99 * tme_dc);
    }

    #[test]
    fn point_seeds_differ() {
        assert_ne!(point_seed(1, 0), point_seed(1, 1));
        assert_eq!(point_seed(9, 0), 9);
    }
}
