//! Slot-level Monte Carlo simulation of the saturated network.
//!
//! Every node always holds a HOL packet. In each slot a node transmits with
//! the probability of its packet's state, every transmitter draws a Rayleigh
//! faded received power `rho_k * Exp(1)`, and packet `j` is decoded iff
//! `P_j >= mu * (sum_{k != j} P_k + 1)`. Several packets can be decoded in one
//! slot.
//!
//! Replication `r` of seed `s` uses ChaCha8 stream `r` keyed by `s`, so
//! replications never share random numbers and a report is a pure function of
//! `(network, SimConfig)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, ensure_positive, Result};
use crate::exec::Exec;
use crate::fixed_point::GroupSpec;
use crate::model::{BackoffSchedule, NetworkConfig};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SimConfig {
    /// Total slots per replication, warmup included.
    pub slots: u64,
    /// Leading slots excluded from every statistic.
    pub warmup: u64,
    pub seed: u64,
    pub replications: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            slots: 101_000,
            warmup: 1_000,
            seed: 0,
            replications: 1,
        }
    }
}

impl SimConfig {
    pub fn new(slots: u64, seed: u64) -> Self {
        Self {
            slots,
            seed,
            ..Self::default()
        }
        .clamp_warmup()
    }

    pub fn with_replications(self, replications: usize) -> Self {
        Self {
            replications,
            ..self
        }
    }

    pub fn with_warmup(self, warmup: u64) -> Self {
        Self { warmup, ..self }
    }

    // keep the default warmup from swallowing short runs
    fn clamp_warmup(self) -> Self {
        Self {
            warmup: self.warmup.min(self.slots / 10),
            ..self
        }
    }

    pub fn measured_slots(&self) -> u64 {
        self.slots - self.warmup
    }

    pub fn validate(&self) -> Result<()> {
        if self.slots <= self.warmup {
            return Err(domain(format!(
                "slots ({}) must exceed warmup ({})",
                self.slots, self.warmup
            )));
        }
        if self.replications == 0 {
            return Err(domain("at least one replication is required"));
        }
        Ok(())
    }
}

/// Nodes to simulate: per-node mean SNR and group label, a common threshold
/// and backoff schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct SimNetwork {
    snr: Vec<f64>,
    group_of: Vec<usize>,
    group_sizes: Vec<usize>,
    threshold: f64,
    schedule: BackoffSchedule,
}

impl SimNetwork {
    pub fn homogeneous(config: &NetworkConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            snr: vec![config.snr; config.nodes],
            group_of: vec![0; config.nodes],
            group_sizes: vec![config.nodes],
            threshold: config.threshold,
            schedule: config.schedule.clone(),
        })
    }

    /// Nodes of group `m` occupy a contiguous block in the order of `spec`.
    pub fn grouped(spec: &GroupSpec, threshold: f64, schedule: &BackoffSchedule) -> Result<Self> {
        ensure_positive("SINR threshold", threshold)?;
        let mut snr = Vec::with_capacity(spec.total_nodes());
        let mut group_of = Vec::with_capacity(spec.total_nodes());
        for (m, g) in spec.groups().iter().enumerate() {
            snr.extend(std::iter::repeat_n(g.snr, g.nodes));
            group_of.extend(std::iter::repeat_n(m, g.nodes));
        }
        Ok(Self {
            snr,
            group_of,
            group_sizes: spec.groups().iter().map(|g| g.nodes).collect(),
            threshold,
            schedule: schedule.clone(),
        })
    }

    pub fn nodes(&self) -> usize {
        self.snr.len()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn schedule(&self) -> &BackoffSchedule {
        &self.schedule
    }
}

/// Attempt and success counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Counts {
    pub attempts: u64,
    pub successes: u64,
}

impl Counts {
    /// `successes / attempts`, or `None` without attempts.
    pub fn ratio(&self) -> Option<f64> {
        (self.attempts > 0).then(|| self.successes as f64 / self.attempts as f64)
    }

    fn add(&mut self, other: &Counts) {
        self.attempts += other.attempts;
        self.successes += other.successes;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupReport {
    pub nodes: usize,
    pub counts: Counts,
    pub p_hat: f64,
    /// Decoded packets per node per measured slot.
    pub node_throughput: f64,
}

/// 95% normal-approximation half-widths across replications.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceIntervals {
    pub p_hat: f64,
    pub throughput: f64,
    pub sum_rate: f64,
    pub group_node_throughput: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub replications: usize,
    /// Measured slots summed over replications.
    pub slots: u64,
    pub attempts: u64,
    pub successes: u64,
    pub p_hat: f64,
    /// Decoded packets per measured slot.
    pub throughput: f64,
    /// `throughput * log2(1 + mu)`.
    pub sum_rate: f64,
    /// `decode_histogram[k]` counts measured slots with exactly `k` decodes.
    pub decode_histogram: Vec<u64>,
    pub per_group: Vec<GroupReport>,
    /// Attempts and successes by the state the packet was in when sent:
    /// index 0 is state T, index `i + 1` is backoff phase `i`.
    pub per_state: Vec<Counts>,
    /// `p_hat` over the first and second half of the measured slots.
    pub half_p_hat: (f64, f64),
    /// `None` for a single replication.
    pub ci: Option<ConfidenceIntervals>,
}

/// Raw tallies of one replication.
#[derive(Debug, Clone, PartialEq)]
struct Tally {
    slots: u64,
    decoded: u64,
    histogram: Vec<u64>,
    groups: Vec<Counts>,
    states: Vec<Counts>,
    halves: [Counts; 2],
}

impl Tally {
    fn new(net: &SimNetwork) -> Self {
        Self {
            slots: 0,
            decoded: 0,
            histogram: vec![0; net.nodes() + 1],
            groups: vec![Counts::default(); net.group_sizes.len()],
            states: vec![Counts::default(); net.schedule.cutoff() + 2],
            halves: [Counts::default(); 2],
        }
    }

    fn merge(&mut self, other: &Tally) {
        self.slots += other.slots;
        self.decoded += other.decoded;
        for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
            *a += b;
        }
        for (a, b) in self.groups.iter_mut().zip(&other.groups) {
            a.add(b);
        }
        for (a, b) in self.states.iter_mut().zip(&other.states) {
            a.add(b);
        }
        for (a, b) in self.halves.iter_mut().zip(&other.halves) {
            a.add(b);
        }
    }

    fn total(&self) -> Counts {
        let mut c = Counts::default();
        for g in &self.groups {
            c.add(g);
        }
        c
    }

    fn report(&self, net: &SimNetwork, replications: usize) -> SimReport {
        let total = self.total();
        let slots = self.slots as f64;
        let throughput = self.decoded as f64 / slots;
        let mut histogram = self.histogram.clone();
        while histogram.len() > 1 && histogram.last() == Some(&0) {
            histogram.pop();
        }
        let per_group = self
            .groups
            .iter()
            .zip(&net.group_sizes)
            .map(|(c, &nodes)| GroupReport {
                nodes,
                counts: *c,
                p_hat: c.ratio().unwrap_or(0.0),
                node_throughput: c.successes as f64 / (slots * nodes as f64),
            })
            .collect();
        SimReport {
            replications,
            slots: self.slots,
            attempts: total.attempts,
            successes: total.successes,
            p_hat: total.ratio().unwrap_or(0.0),
            throughput,
            sum_rate: throughput * net.threshold.ln_1p() * std::f64::consts::LOG2_E,
            decode_histogram: histogram,
            per_group,
            per_state: self.states.clone(),
            half_p_hat: (
                self.halves[0].ratio().unwrap_or(0.0),
                self.halves[1].ratio().unwrap_or(0.0),
            ),
            ci: None,
        }
    }
}

/// Which transmitters are decoded given their received powers: `decoded[j]`
/// iff `powers[j] >= mu * (sum of the other powers + 1)`.
pub fn decode(powers: &[f64], mu: f64, decoded: &mut Vec<bool>) {
    let total: f64 = powers.iter().sum();
    decoded.clear();
    decoded.extend(
        powers
            .iter()
            .map(|&pj| pj >= mu * ((total - pj).max(0.0) + 1.0)),
    );
}

fn simulate(net: &SimNetwork, sim: &SimConfig, stream: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(sim.seed);
    rng.set_stream(stream);

    let n = net.nodes();
    let k = net.schedule.cutoff();
    let q0 = net.schedule.q0();
    // state index: 0 = T, i + 1 = phase i
    let send_prob: Vec<f64> = std::iter::once(q0)
        .chain(net.schedule.probabilities())
        .collect();
    let mut state = vec![0usize; n];
    let mut senders: Vec<usize> = Vec::with_capacity(n);
    let mut powers: Vec<f64> = Vec::with_capacity(n);
    let mut decoded: Vec<bool> = Vec::with_capacity(n);
    let mut tally = Tally::new(net);
    let half = sim.warmup + sim.measured_slots() / 2;

    for slot in 0..sim.slots {
        senders.clear();
        powers.clear();
        for (node, s) in state.iter_mut().enumerate() {
            if rng.random::<f64>() < send_prob[*s] {
                senders.push(node);
                // 1 - U lies in (0, 1], so the logarithm is finite
                let fading = -(1.0 - rng.random::<f64>()).ln();
                powers.push(net.snr[node] * fading);
            } else if *s == 0 {
                *s = 1;
            }
        }
        decode(&powers, net.threshold, &mut decoded);

        let measured = slot >= sim.warmup;
        let mut hits = 0u64;
        for (&node, &ok) in senders.iter().zip(&decoded) {
            let before = state[node];
            if measured {
                let g = net.group_of[node];
                tally.groups[g].attempts += 1;
                tally.states[before].attempts += 1;
                tally.halves[usize::from(slot >= half)].attempts += 1;
                if ok {
                    tally.groups[g].successes += 1;
                    tally.states[before].successes += 1;
                    tally.halves[usize::from(slot >= half)].successes += 1;
                }
            }
            state[node] = if ok {
                hits += 1;
                0
            } else if before <= 1 {
                // failure from T or phase 0
                1 + k.min(1)
            } else {
                1 + k.min(before)
            };
        }
        if measured {
            tally.slots += 1;
            tally.decoded += hits;
            tally.histogram[hits as usize] += 1;
        }
    }
    tally
}

/// One replication on stream 0 of `sim.seed`; `sim.replications` is ignored.
pub fn run(net: &SimNetwork, sim: &SimConfig) -> Result<SimReport> {
    run_replication(net, sim, 0)
}

/// The replication with the given index, as [`replicate`] computes it.
pub fn run_replication(net: &SimNetwork, sim: &SimConfig, index: usize) -> Result<SimReport> {
    sim.validate()?;
    Ok(simulate(net, sim, index as u64).report(net, 1))
}

/// `sim.replications` independent replications, pooled. Counts are summed,
/// so `p_hat` is the attempt-weighted mean of the per-replication values.
pub fn replicate(net: &SimNetwork, sim: &SimConfig, exec: Exec) -> Result<SimReport> {
    sim.validate()?;
    let tallies = exec.map_indices(sim.replications, |r| simulate(net, sim, r as u64));
    let mut pooled = Tally::new(net);
    for t in &tallies {
        pooled.merge(t);
    }
    let mut report = pooled.report(net, sim.replications);
    if sim.replications >= 2 {
        let runs: Vec<SimReport> = tallies.iter().map(|t| t.report(net, 1)).collect();
        let groups = net.group_sizes.len();
        report.ci = Some(ConfidenceIntervals {
            p_hat: half_width(runs.iter().map(|r| r.p_hat)),
            throughput: half_width(runs.iter().map(|r| r.throughput)),
            sum_rate: half_width(runs.iter().map(|r| r.sum_rate)),
            group_node_throughput: (0..groups)
                .map(|m| half_width(runs.iter().map(|r| r.per_group[m].node_throughput)))
                .collect(),
        });
    }
    Ok(report)
}

/// `z * s / sqrt(R)` with the unbiased sample standard deviation `s`.
fn half_width(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let r = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / r;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (r - 1.0);
    Z95 * (var / r).sqrt()
}
