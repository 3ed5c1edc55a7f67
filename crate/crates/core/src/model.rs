//! Domain types and the elementary closed-form quantities of the saturated
//! slotted Aloha network with SINR capture under Rayleigh fading.
//!
//! Conventions used throughout the crate:
//!
//! * SNR values are linear. Decibel inputs are converted at the boundary with
//!   [`db_to_linear`].
//! * The noise power is normalized to one, so a node with mean received SNR
//!   `rho` has instantaneous received power `rho * |h|^2`, `|h|^2 ~ Exp(1)`.
//! * A head-of-line (HOL) packet is either fresh (state T) or in backoff
//!   phase `i = 0..=K`, where the phase counts collisions up to the cutoff.

use crate::error::{domain, ensure_positive, ensure_probability, Error, Result};

/// Convert an encoding rate in bit/s/Hz to the SINR threshold `2^R - 1`.
pub fn rate_to_threshold(rate: f64) -> Result<f64> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(domain(format!("rate must be non-negative, got {rate}")));
    }
    Ok(rate.exp2() - 1.0)
}

/// Inverse of [`rate_to_threshold`]: `log2(1 + mu)`.
pub fn threshold_to_rate(mu: f64) -> Result<f64> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(domain(format!("threshold must be non-negative, got {mu}")));
    }
    Ok(mu.ln_1p() / std::f64::consts::LN_2)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Family a [`BackoffSchedule`] was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BackoffKind {
    /// `Q_i = 1` for every phase.
    Constant,
    /// `Q_i = 2^-i`.
    BinaryExponential,
    /// User supplied multipliers.
    Custom,
}

/// Per-phase transmission probabilities `q_i = q0 * Q_i`, `i = 0..=K`.
///
/// The multipliers start at `Q_0 = 1` and never increase, which is what
/// makes the steady-state fixed point unique.
#[derive(Debug, Clone, PartialEq)]
pub struct BackoffSchedule {
    q0: f64,
    kind: BackoffKind,
    multipliers: Vec<f64>,
}

impl BackoffSchedule {
    /// Same probability `q0` in every phase up to cutoff `k`.
    pub fn constant(q0: f64, k: usize) -> Result<Self> {
        Self::build(q0, BackoffKind::Constant, vec![1.0; k + 1])
    }

    /// Binary exponential backoff: `q_i = q0 / 2^i` up to cutoff `k`.
    pub fn binary_exponential(q0: f64, k: usize) -> Result<Self> {
        let k = i32::try_from(k).map_err(|_| domain("cutoff phase too large"))?;
        let multipliers = (0..=k).map(|i| 2f64.powi(-i)).collect();
        Self::build(q0, BackoffKind::BinaryExponential, multipliers)
    }

    /// Arbitrary multipliers `Q_0..Q_K`. `Q_0` must be 1 and the sequence
    /// must be non-increasing within `(0, 1]`.
    pub fn custom(q0: f64, multipliers: Vec<f64>) -> Result<Self> {
        Self::build(q0, BackoffKind::Custom, multipliers)
    }

    /// Schedule of the given kind; `Custom` is rejected because it needs
    /// explicit multipliers.
    pub fn of_kind(kind: BackoffKind, q0: f64, k: usize) -> Result<Self> {
        match kind {
            BackoffKind::Constant => Self::constant(q0, k),
            BackoffKind::BinaryExponential => Self::binary_exponential(q0, k),
            BackoffKind::Custom => Err(Error::Precondition(
                "custom schedules need explicit multipliers".into(),
            )),
        }
    }

    fn build(q0: f64, kind: BackoffKind, multipliers: Vec<f64>) -> Result<Self> {
        ensure_probability("q0", q0)?;
        match multipliers.first() {
            None => {
                return Err(Error::Precondition(
                    "at least one multiplier (Q_0) is required".into(),
                ))
            }
            Some(&first) if first != 1.0 => {
                return Err(Error::Precondition(format!(
                    "Q_0 must equal 1, got {first}"
                )))
            }
            _ => {}
        }
        for (i, w) in multipliers.windows(2).enumerate() {
            if !(w[1] > 0.0 && w[1] <= 1.0) {
                return Err(domain(format!(
                    "Q_{} must lie in (0, 1], got {}",
                    i + 1,
                    w[1]
                )));
            }
            if w[1] > w[0] {
                return Err(Error::Precondition(format!(
                    "backoff multipliers must be non-increasing: Q_{} = {} > Q_{} = {}",
                    i + 1,
                    w[1],
                    i,
                    w[0]
                )));
            }
        }
        Ok(Self {
            q0,
            kind,
            multipliers,
        })
    }

    /// Same shape with a different initial transmission probability.
    pub fn with_q0(&self, q0: f64) -> Result<Self> {
        ensure_probability("q0", q0)?;
        Ok(Self { q0, ..self.clone() })
    }

    /// Initial transmission probability.
    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn kind(&self) -> BackoffKind {
        self.kind
    }

    /// Cutoff phase `K`.
    pub fn cutoff(&self) -> usize {
        self.multipliers.len() - 1
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    /// Transmission probability in phase `i`; phases beyond `K` use `q_K`.
    pub fn q(&self, phase: usize) -> f64 {
        self.q0 * self.multipliers[phase.min(self.cutoff())]
    }

    /// All effective probabilities `q_0..q_K`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.multipliers.iter().map(|m| self.q0 * m).collect()
    }

    /// True when every multiplier is one, so the fixed point has a closed form.
    pub fn is_flat(&self) -> bool {
        self.multipliers.iter().all(|&m| m == 1.0)
    }

    /// Expected reciprocal transmission probability seen by a packet whose
    /// attempts succeed independently with probability `p`:
    ///
    /// `g(p) = sum_{i<K} p (1-p)^i / q_i + (1-p)^K / q_K`.
    ///
    /// Well defined on `[0, 1]`; `g(0) = 1/q_K` and `g(1) = 1/q_0`.
    pub fn mean_inverse_probability(&self, p: f64) -> f64 {
        self.mean_inverse_multiplier(p) / self.q0
    }

    /// Same as [`Self::mean_inverse_probability`] with `q0` factored out.
    pub fn mean_inverse_multiplier(&self, p: f64) -> f64 {
        let k = self.cutoff();
        let fail = 1.0 - p;
        let mut survive = 1.0;
        let mut acc = 0.0;
        for &m in &self.multipliers[..k] {
            acc += p * survive / m;
            survive *= fail;
        }
        acc + survive / self.multipliers[k]
    }

    /// Probability that a saturated node's HOL packet transmits in a slot,
    /// `pi_T / p = 1 / g(p)`.
    pub fn attempt_rate(&self, p: f64) -> f64 {
        1.0 / self.mean_inverse_probability(p)
    }
}

/// Homogeneous network: `n` nodes sharing mean received SNR `rho`, SINR
/// threshold `mu` and a backoff schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub nodes: usize,
    pub snr: f64,
    pub threshold: f64,
    pub schedule: BackoffSchedule,
}

impl NetworkConfig {
    pub fn new(nodes: usize, snr: f64, threshold: f64, schedule: BackoffSchedule) -> Result<Self> {
        let cfg = Self {
            nodes,
            snr,
            threshold,
            schedule,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Build from an encoding rate instead of a threshold.
    pub fn with_rate(nodes: usize, snr: f64, rate: f64, schedule: BackoffSchedule) -> Result<Self> {
        Self::new(nodes, snr, rate_to_threshold(rate)?, schedule)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes == 0 {
            return Err(domain("node count must be at least 1"));
        }
        ensure_positive("mean received SNR", self.snr)?;
        ensure_positive("SINR threshold", self.threshold)
    }

    pub fn rate(&self) -> f64 {
        self.threshold.ln_1p() / std::f64::consts::LN_2
    }
}

/// Conditional capture probability of a packet facing `interferers`
/// concurrent transmissions: `exp(-mu/rho) / (1+mu)^i`.
pub fn capture_prob(interferers: i64, mu: f64, rho: f64) -> Result<f64> {
    if interferers < 0 {
        return Err(domain(format!(
            "interferer count must be non-negative, got {interferers}"
        )));
    }
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(domain(format!(
            "SINR threshold must be non-negative, got {mu}"
        )));
    }
    ensure_positive("mean received SNR", rho)?;
    let i = interferers as f64;
    Ok((-mu / rho - i * mu.ln_1p()).exp())
}

/// How the fixed point was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverMode {
    /// Finite-`n` product form `exp(-mu/rho) (1 - mu/(mu+1) * tau)^(n-1)`.
    Exact,
    /// Large-`n` exponential form `exp(-mu/rho - n mu/(mu+1) * tau)`.
    Approx,
}

/// Stationary distribution of the HOL-packet Markov chain.
#[derive(Debug, Clone, PartialEq)]
pub struct HolDistribution {
    /// Probability of successful transmission the chain was evaluated at.
    pub p: f64,
    /// Probability of state T, which is also the per-node service rate.
    pub service_rate: f64,
    /// Probabilities of backoff states `0..=K`.
    pub phases: Vec<f64>,
}

impl HolDistribution {
    pub fn total(&self) -> f64 {
        self.service_rate + self.phases.iter().sum::<f64>()
    }
}

/// Stationary distribution of a single HOL packet for a given success
/// probability `p`.
///
/// A fresh packet (state T) that does not transmit moves to state 0; a failed
/// attempt from T or 0 moves to `min(K, 1)`; a failed attempt from phase
/// `i >= 1` moves to `min(K, i + 1)`; any success returns to T. With `K = 0`
/// states 0 and K coincide.
pub fn hol_distribution(p: f64, schedule: &BackoffSchedule) -> Result<HolDistribution> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(domain(format!(
            "success probability must lie in (0, 1], got {p}"
        )));
    }
    let k = schedule.cutoff();
    let service_rate = p * schedule.attempt_rate(p);
    let q = |i: usize| schedule.q(i);
    let phases = if k == 0 {
        vec![(1.0 - p * q(0)) / (p * q(0)) * service_rate]
    } else {
        let mut v = Vec::with_capacity(k + 1);
        v.push((1.0 - q(0)) / q(0) * service_rate);
        let mut survive = 1.0;
        for i in 1..k {
            survive *= 1.0 - p;
            v.push(survive / q(i) * service_rate);
        }
        survive *= 1.0 - p;
        v.push(survive / (p * q(k)) * service_rate);
        v
    };
    Ok(HolDistribution {
        p,
        service_rate,
        phases,
    })
}

/// Steady-state operating point of a homogeneous network.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    /// Non-zero root `p_A` of the fixed-point equation.
    pub p: f64,
    pub distribution: HolDistribution,
    pub mode: SolverMode,
    /// `|p - h(p)|` at the returned root.
    pub residual: f64,
}

impl SteadyState {
    /// Per-node service rate `pi_T`.
    pub fn service_rate(&self) -> f64 {
        self.distribution.service_rate
    }

    /// Network throughput `n * pi_T` for `nodes` saturated nodes.
    pub fn network_throughput(&self, nodes: usize) -> f64 {
        nodes as f64 * self.distribution.service_rate
    }
}

/// Network throughput with its sum rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputPoint {
    /// Decoded packets per slot.
    pub lambda_out: f64,
    /// Bits/s/Hz: `lambda_out * log2(1 + mu)`.
    pub sum_rate: f64,
}

impl ThroughputPoint {
    pub fn new(lambda_out: f64, mu: f64) -> Self {
        Self {
            lambda_out,
            sum_rate: lambda_out * mu.ln_1p() / std::f64::consts::LN_2,
        }
    }
}

/// Network throughput as a function of the steady-state point:
/// `(mu+1) (-p ln p / mu - p / rho)`.
///
/// Valid for `p` in `(0, exp(-mu/rho)]`, the range the fixed point can take.
pub fn throughput_at(p: f64, mu: f64, rho: f64) -> Result<ThroughputPoint> {
    ensure_positive("SINR threshold", mu)?;
    ensure_positive("mean received SNR", rho)?;
    let upper = (-mu / rho).exp();
    if !(p > 0.0 && p <= upper) {
        return Err(domain(format!(
            "steady-state point must lie in (0, {upper}], got {p}"
        )));
    }
    // -ln p - mu/rho >= 0 on the valid range; clamp the rounding at the endpoint.
    let excess = (-p.ln() - mu / rho).max(0.0);
    Ok(ThroughputPoint::new((mu + 1.0) * p * excess / mu, mu))
}
