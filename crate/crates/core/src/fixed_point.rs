//! Saturated steady-state point: the non-zero root of the self-consistency
//! equation for the probability `p` that a HOL packet transmission succeeds.
//!
//! With `tau(p) = pi_T / p` the per-slot attempt probability of a node, the
//! homogeneous equation is `p = h(p)` where
//!
//! * exact:  `h(p) = exp(-mu/rho) * (1 - mu/(mu+1) * tau(p))^(n-1)`
//! * approx: `h(p) = exp(-mu/rho - n*mu/(mu+1) * tau(p))`
//!
//! `h` is non-increasing whenever the backoff multipliers are, so
//! `p - h(p)` is strictly increasing and bisection on `(0, 1]` finds the
//! single root.

use crate::error::{domain, ensure_positive, Error, Result};
use crate::model::{hol_distribution, BackoffSchedule, NetworkConfig, SolverMode, SteadyState};
use crate::roots::{bisect, Tolerance};

/// Lower end of the bisection bracket.
pub const LOWER_BRACKET: f64 = 1e-12;

/// Knobs for the fixed-point solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub mode: SolverMode,
    /// Absolute bound on `|p - h(p)|` at the returned point.
    pub tolerance: f64,
    /// Bisection step cap for the homogeneous solver.
    pub max_iterations: usize,
    /// Sweep cap for the damped heterogeneous iteration.
    pub max_sweeps: usize,
    /// Initial damping of the heterogeneous iteration, in `(0, 1]`.
    pub damping: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            mode: SolverMode::Approx,
            tolerance: 1e-10,
            max_iterations: 200,
            max_sweeps: 20_000,
            damping: 0.5,
        }
    }
}

impl SolverOptions {
    pub fn approx() -> Self {
        Self::default()
    }

    pub fn exact() -> Self {
        Self {
            mode: SolverMode::Exact,
            ..Self::default()
        }
    }

    pub fn with_mode(self, mode: SolverMode) -> Self {
        Self { mode, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("solver tolerance", self.tolerance)?;
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(domain(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if self.max_iterations == 0 || self.max_sweeps == 0 {
            return Err(domain("iteration caps must be positive"));
        }
        Ok(())
    }
}

/// Right-hand side `h(p)` of the homogeneous fixed-point equation.
pub fn fixed_point_map(config: &NetworkConfig, mode: SolverMode, p: f64) -> f64 {
    let mu = config.threshold;
    let tau = config.schedule.attempt_rate(p);
    let coupling = mu / (mu + 1.0);
    let noise = mu / config.snr;
    match mode {
        SolverMode::Approx => (-noise - config.nodes as f64 * coupling * tau).exp(),
        SolverMode::Exact => (-noise + (config.nodes - 1) as f64 * (-coupling * tau).ln_1p()).exp(),
    }
}

/// Solve the homogeneous fixed point by bisection.
pub fn solve_homogeneous(config: &NetworkConfig, options: &SolverOptions) -> Result<SteadyState> {
    config.validate()?;
    options.validate()?;
    let mode = options.mode;
    let excess = |p: f64| p - fixed_point_map(config, mode, p);

    let tol = Tolerance::full_precision(options.max_iterations);
    let (p, iterations) = if excess(LOWER_BRACKET) < 0.0 {
        let root = bisect(excess, LOWER_BRACKET, 1.0, tol)?;
        (root.x, root.iterations)
    } else if excess(f64::MIN_POSITIVE) >= 0.0 {
        return Err(Error::Underflow(
            "steady-state success probability is below the smallest positive f64".into(),
        ));
    } else {
        // Heavy contention pushes the root below the nominal bracket. h stays
        // finite as p -> 0 (tau(0) = q_K), so continue on a log scale down to
        // the smallest positive float.
        let root = bisect(
            |t| excess(t.exp()),
            f64::MIN_POSITIVE.ln(),
            LOWER_BRACKET.ln(),
            tol,
        )?;
        (root.x.exp(), root.iterations)
    };
    let residual = excess(p).abs();
    if residual > options.tolerance {
        return Err(Error::Convergence {
            iterations,
            residual,
        });
    }
    if !(p > 0.0) {
        return Err(Error::Invariant(format!("fixed point collapsed to {p}")));
    }
    Ok(SteadyState {
        p,
        distribution: hol_distribution(p, &config.schedule)?,
        mode,
        residual,
    })
}

/// Closed form `exp(-mu/rho - n*mu*q0/(mu+1))`, valid when all phases share
/// the same transmission probability (approximate mode).
pub fn closed_form_k0(config: &NetworkConfig) -> Result<f64> {
    config.validate()?;
    if !config.schedule.is_flat() {
        return Err(Error::Precondition(
            "closed form needs K = 0 or constant multipliers".into(),
        ));
    }
    let mu = config.threshold;
    Ok((-mu / config.snr - config.nodes as f64 * mu * config.schedule.q0() / (mu + 1.0)).exp())
}

/// One class of nodes sharing a mean received SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Group {
    pub nodes: usize,
    /// Linear mean received SNR.
    pub snr: f64,
}

/// Partition of the network into groups with distinct mean received SNRs.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    groups: Vec<Group>,
}

impl GroupSpec {
    pub fn new(groups: Vec<Group>) -> Result<Self> {
        if groups.is_empty() {
            return Err(domain("at least one group is required"));
        }
        for (m, g) in groups.iter().enumerate() {
            if g.nodes == 0 {
                return Err(domain(format!("group {m} has no nodes")));
            }
            ensure_positive("group SNR", g.snr)?;
        }
        Ok(Self { groups })
    }

    /// Two groups of sizes `n1`, `n2` with SNR ratio `ratio = rho1/rho2` and
    /// node-weighted mean SNR `mean_snr`.
    pub fn two_group_with_mean(n1: usize, n2: usize, mean_snr: f64, ratio: f64) -> Result<Self> {
        ensure_positive("SNR ratio", ratio)?;
        ensure_positive("mean SNR", mean_snr)?;
        let total = (n1 + n2) as f64;
        let rho2 = mean_snr * total / (n1 as f64 * ratio + n2 as f64);
        Self::new(vec![
            Group {
                nodes: n1,
                snr: ratio * rho2,
            },
            Group {
                nodes: n2,
                snr: rho2,
            },
        ])
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn total_nodes(&self) -> usize {
        self.groups.iter().map(|g| g.nodes).sum()
    }

    /// Node-weighted mean SNR.
    pub fn mean_snr(&self) -> f64 {
        self.groups
            .iter()
            .map(|g| g.nodes as f64 * g.snr)
            .sum::<f64>()
            / self.total_nodes() as f64
    }
}

/// Right-hand side of the coupled per-group equations evaluated at `p`.
pub fn heterogeneous_map(
    spec: &GroupSpec,
    mu: f64,
    schedule: &BackoffSchedule,
    mode: SolverMode,
    p: &[f64],
) -> Vec<f64> {
    let taus: Vec<f64> = p.iter().map(|&pm| schedule.attempt_rate(pm)).collect();
    let groups = spec.groups();
    groups
        .iter()
        .enumerate()
        .map(|(l, gl)| {
            let mut exponent = -mu / gl.snr;
            for (m, (gm, &tau)) in groups.iter().zip(&taus).enumerate() {
                let coupling = mu / (mu + gl.snr / gm.snr);
                exponent += match mode {
                    SolverMode::Approx => -(gm.nodes as f64) * coupling * tau,
                    SolverMode::Exact => {
                        let count = gm.nodes - usize::from(m == l);
                        count as f64 * (-coupling * tau).ln_1p()
                    }
                };
            }
            exponent.exp()
        })
        .collect()
}

/// Joint solution of the per-group fixed points.
#[derive(Debug, Clone, PartialEq)]
pub struct HeterogeneousState {
    /// Success probability per group.
    pub p: Vec<f64>,
    pub mode: SolverMode,
    /// `max_m |p_m - h_m(p)|`.
    pub residual: f64,
    pub sweeps: usize,
    /// Damping in force when the iteration stopped.
    pub damping: f64,
}

/// Damped synchronous iteration `p <- (1-d) p + d h(p)` from `p = 1`.
pub fn solve_heterogeneous(
    spec: &GroupSpec,
    mu: f64,
    schedule: &BackoffSchedule,
    options: &SolverOptions,
) -> Result<HeterogeneousState> {
    solve_heterogeneous_from(spec, mu, schedule, options, &vec![1.0; spec.len()])
}

/// As [`solve_heterogeneous`] with an explicit starting point in `(0, 1]^M`.
pub fn solve_heterogeneous_from(
    spec: &GroupSpec,
    mu: f64,
    schedule: &BackoffSchedule,
    options: &SolverOptions,
    start: &[f64],
) -> Result<HeterogeneousState> {
    ensure_positive("SINR threshold", mu)?;
    options.validate()?;
    if start.len() != spec.len() || start.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
        return Err(domain(
            "starting point must have one entry in (0, 1] per group",
        ));
    }
    const GROWTH_LIMIT: usize = 3;
    let mut p = start.to_vec();
    let mut damping = options.damping;
    let mut previous = f64::INFINITY;
    let mut growths = 0;
    let mut residual = f64::INFINITY;
    for sweep in 1..=options.max_sweeps {
        let target = heterogeneous_map(spec, mu, schedule, options.mode, &p);
        residual = p
            .iter()
            .zip(&target)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual <= options.tolerance {
            return Ok(HeterogeneousState {
                p,
                mode: options.mode,
                residual,
                sweeps: sweep,
                damping,
            });
        }
        if residual > previous {
            growths += 1;
            if growths >= GROWTH_LIMIT {
                // oscillation: drop to 0.1, then keep halving
                damping = if damping > 0.1 { 0.1 } else { 0.5 * damping };
                growths = 0;
            }
        }
        previous = residual;
        for (pm, tm) in p.iter_mut().zip(&target) {
            *pm = (1.0 - damping) * *pm + damping * tm;
        }
    }
    Err(Error::Convergence {
        iterations: options.max_sweeps,
        residual,
    })
}

/// Per-node throughput `pi_T` of a node whose packets succeed with `p`.
pub fn group_node_throughput(p: f64, schedule: &BackoffSchedule) -> Result<f64> {
    Ok(hol_distribution(p, schedule)?.service_rate)
}

/// `sum_m n_m * pi_T(p_m)`.
pub fn network_throughput(spec: &GroupSpec, p: &[f64], schedule: &BackoffSchedule) -> Result<f64> {
    if p.len() != spec.len() {
        return Err(domain("one success probability per group is required"));
    }
    spec.groups().iter().zip(p).try_fold(0.0, |acc, (g, &pm)| {
        Ok(acc + g.nodes as f64 * group_node_throughput(pm, schedule)?)
    })
}
