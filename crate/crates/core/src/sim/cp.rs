//! One communication period on one sampled deployment.

use rand::Rng;

use super::geometry::{sample_ppp, Point, SpatialGrid, Window};
use super::slot::{run_slot, Reception};
use super::SimError;
use crate::model::{NetworkConfig, Scenario};

/// One sampled deployment of the three point sets.
#[derive(Debug, Clone)]
pub struct Realization {
    pub s1: SpatialGrid,
    pub s2: SpatialGrid,
    pub relays: SpatialGrid,
    pub window: Window,
    /// `(master seed, realization index)` the deployment was drawn from.
    pub seed_path: (u64, u64),
}

impl Realization {
    /// Draws S1, S2 and relay sets in that order, whatever the scenario, so
    /// both scenarios see the same geometry for a given stream.
    pub fn sample<R: Rng + ?Sized>(
        cfg: &NetworkConfig,
        window: Window,
        seed_path: (u64, u64),
        rng: &mut R,
    ) -> Self {
        let s1 = sample_ppp(cfg.lambda1, &window, rng);
        let s2 = sample_ppp(cfg.lambda2, &window, rng);
        let relays = sample_ppp(cfg.lambda_r, &window, rng);
        Self {
            s1: SpatialGrid::new(s1, window),
            s2: SpatialGrid::new(s2, window),
            relays: SpatialGrid::new(relays, window),
            window,
            seed_path,
        }
    }
}

/// Per-receiver outcome of one CP. Receivers are the first `probes` points of
/// each set; since PPP points are i.i.d. this is an unbiased subsample.
#[derive(Debug, Clone)]
pub struct CpOutcome {
    pub scenario: Scenario,
    /// Slot 1: S2 probes listening to S1.
    pub s2_direct: Vec<Reception>,
    /// Slot 2: S1 probes listening to S2.
    pub s1_direct: Vec<Reception>,
    /// Relays that matter this CP (relay probes plus nearest relays of source
    /// probes), sorted by index. Empty in the direct scenario.
    pub active_relays: Vec<usize>,
    /// Position in `active_relays` of each relay probe.
    pub relay_probe_slots: Vec<usize>,
    /// Slot 1 at the active relays.
    pub relays_from_s1: Vec<Reception>,
    /// Slot 2 at the active relays.
    pub relays_from_s2: Vec<Reception>,
    /// Slot 3: S1 probes listening to relays (S2 payload).
    pub s1_from_relay: Vec<Reception>,
    /// Slot 4: S2 probes listening to relays (S1 payload).
    pub s2_from_relay: Vec<Reception>,
    /// Exchange success per S1 probe (message from S2 obtained).
    pub s1_success: Vec<bool>,
    /// Exchange success per S2 probe (message from S1 obtained).
    pub s2_success: Vec<bool>,
}

impl CpOutcome {
    /// Harvested energy per S1 probe over the whole CP.
    pub fn s1_energy(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.s1_direct.iter().map(|r| r.harvested_joules).collect();
        for (acc, r) in e.iter_mut().zip(&self.s1_from_relay) {
            *acc += r.harvested_joules;
        }
        e
    }

    pub fn s2_energy(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.s2_direct.iter().map(|r| r.harvested_joules).collect();
        for (acc, r) in e.iter_mut().zip(&self.s2_from_relay) {
            *acc += r.harvested_joules;
        }
        e
    }

    /// Harvested energy per relay probe (slots 1 and 2).
    pub fn relay_energy(&self) -> Vec<f64> {
        self.relay_probe_slots
            .iter()
            .map(|&k| self.relays_from_s1[k].harvested_joules + self.relays_from_s2[k].harvested_joules)
            .collect()
    }
}

fn probes(grid: &SpatialGrid, limit: Option<usize>) -> Vec<Point> {
    let n = limit.map_or(grid.len(), |k| k.min(grid.len()));
    grid.points()[..n].to_vec()
}

/// Executes one CP: slot 1 S1→S2, slot 2 S2→S1 and, cooperatively, slot 3
/// relays→S1 and slot 4 relays→S2. Relays transmit in slots 3 and 4 whether
/// or not they decoded anything. Fades are drawn afresh in every slot.
pub fn run_cp<R: Rng + ?Sized>(
    scenario: Scenario,
    realization: &Realization,
    cfg: &NetworkConfig,
    probe_limit: Option<usize>,
    interference_radius: Option<f64>,
    rng: &mut R,
) -> Result<CpOutcome, SimError> {
    let s1_rx = probes(&realization.s1, probe_limit);
    let s2_rx = probes(&realization.s2, probe_limit);
    if s1_rx.is_empty() || s2_rx.is_empty() {
        return Err(SimError::EmptySet);
    }

    let s2_direct = run_slot(&realization.s1, &s2_rx, cfg, interference_radius, rng)?;
    let s1_direct = run_slot(&realization.s2, &s1_rx, cfg, interference_radius, rng)?;
    let mut outcome = CpOutcome {
        scenario,
        s1_success: s1_direct.iter().map(|r| r.decoded).collect(),
        s2_success: s2_direct.iter().map(|r| r.decoded).collect(),
        s2_direct,
        s1_direct,
        active_relays: Vec::new(),
        relay_probe_slots: Vec::new(),
        relays_from_s1: Vec::new(),
        relays_from_s2: Vec::new(),
        s1_from_relay: Vec::new(),
        s2_from_relay: Vec::new(),
    };
    if scenario == Scenario::Direct {
        return Ok(outcome);
    }

    let relays = &realization.relays;
    if relays.is_empty() {
        return Err(SimError::EmptySet);
    }
    let probe_count = probe_limit.map_or(relays.len(), |k| k.min(relays.len()));
    let mut serving_s1 = Vec::with_capacity(s1_rx.len());
    for &p in &s1_rx {
        serving_s1.push(relays.nearest(p)?.0);
    }
    let mut serving_s2 = Vec::with_capacity(s2_rx.len());
    for &p in &s2_rx {
        serving_s2.push(relays.nearest(p)?.0);
    }
    let mut active: Vec<usize> = (0..probe_count)
        .chain(serving_s1.iter().copied())
        .chain(serving_s2.iter().copied())
        .collect();
    active.sort_unstable();
    active.dedup();
    let slot_of = |relay: usize| active.binary_search(&relay).expect("relay is active");
    let relay_points: Vec<Point> = active.iter().map(|&i| relays.points()[i]).collect();

    let relays_from_s1 = run_slot(&realization.s1, &relay_points, cfg, interference_radius, rng)?;
    let relays_from_s2 = run_slot(&realization.s2, &relay_points, cfg, interference_radius, rng)?;
    let s1_from_relay = run_slot(relays, &s1_rx, cfg, interference_radius, rng)?;
    let s2_from_relay = run_slot(relays, &s2_rx, cfg, interference_radius, rng)?;

    // An S1 node also succeeds if its serving relay decoded an S2 message in
    // slot 2 and the node decodes that relay in slot 3; symmetrically for S2.
    for (k, ok) in outcome.s1_success.iter_mut().enumerate() {
        let relay_slot = slot_of(s1_from_relay[k].transmitter);
        *ok |= relays_from_s2[relay_slot].decoded && s1_from_relay[k].decoded;
    }
    for (k, ok) in outcome.s2_success.iter_mut().enumerate() {
        let relay_slot = slot_of(s2_from_relay[k].transmitter);
        *ok |= relays_from_s1[relay_slot].decoded && s2_from_relay[k].decoded;
    }

    outcome.relay_probe_slots = (0..probe_count).map(slot_of).collect();
    outcome.active_relays = active;
    outcome.relays_from_s1 = relays_from_s1;
    outcome.relays_from_s2 = relays_from_s2;
    outcome.s1_from_relay = s1_from_relay;
    outcome.s2_from_relay = s2_from_relay;
    Ok(outcome)
}
