//! Numerical maximum sum rate for a network split into SNR groups.
//!
//! No closed form exists here. The objective
//! `S(mu, q0) = network_throughput(p(mu, q0)) * log2(1 + mu)` is maximized by
//! a coarse log grid over `mu` (evaluated in parallel), an inner search over
//! `q0` at every grid point, and a golden-section refinement of the best cell.
//! Unimodality is not known, so the result also lists other grid cells whose
//! value is close to the best one.

use std::f64::consts::LOG2_E;

use crate::error::{domain, Result};
use crate::exec::Exec;
use crate::fixed_point::{network_throughput, solve_heterogeneous, GroupSpec, SolverOptions};
use crate::grid::logspace;
use crate::model::BackoffSchedule;
use crate::optimize::golden::golden_max;

/// Grid and tolerance settings for [`hetero_max_sum_rate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeteroSearch {
    pub mu_min: f64,
    pub mu_max: f64,
    pub mu_points: usize,
    /// Smallest `q0` on the coarse inner grid (the grid ends at 1).
    pub q0_min: f64,
    pub q0_points: usize,
    /// Width of the final inner bracket, in `log q0`.
    pub q0_tolerance: f64,
    /// Width of the final outer bracket, in `log mu`.
    pub mu_tolerance: f64,
    /// Relative gap below the best grid value within which another local
    /// maximum is reported as a competing peak.
    pub near_optimal: f64,
    pub solver: SolverOptions,
    pub exec: Exec,
}

impl Default for HeteroSearch {
    fn default() -> Self {
        Self {
            mu_min: 1e-4,
            mu_max: 1e3,
            mu_points: 400,
            q0_min: 1e-4,
            q0_points: 41,
            q0_tolerance: 1e-5,
            mu_tolerance: 1e-6,
            near_optimal: 1e-3,
            solver: SolverOptions::approx(),
            exec: Exec::default(),
        }
    }
}

impl HeteroSearch {
    fn validate(&self) -> Result<()> {
        if !(self.mu_min > 0.0 && self.mu_max > self.mu_min) {
            return Err(domain("need 0 < mu_min < mu_max"));
        }
        if !(self.q0_min > 0.0 && self.q0_min < 1.0) {
            return Err(domain("q0_min must lie in (0, 1)"));
        }
        if self.mu_points < 3 || self.q0_points < 3 {
            return Err(domain("grids need at least three points"));
        }
        if !(self.q0_tolerance > 0.0 && self.mu_tolerance > 0.0 && self.near_optimal >= 0.0) {
            return Err(domain("tolerances must be positive"));
        }
        self.solver.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeteroOptimum {
    pub sum_rate: f64,
    pub mu_star: f64,
    pub q0_star: f64,
    /// Network throughput at the optimum.
    pub throughput: f64,
    /// Per-group success probabilities at the optimum.
    pub p: Vec<f64>,
    /// `(mu, sum_rate)` of other grid-local maxima within `near_optimal`.
    pub competing_peaks: Vec<(f64, f64)>,
}

/// Sum rate and network throughput at one `(mu, q0)`; `shape` supplies the
/// backoff multipliers.
pub fn hetero_objective(
    spec: &GroupSpec,
    mu: f64,
    q0: f64,
    shape: &BackoffSchedule,
    solver: &SolverOptions,
) -> Result<(f64, f64)> {
    let schedule = shape.with_q0(q0)?;
    let state = solve_heterogeneous(spec, mu, &schedule, solver)?;
    let throughput = network_throughput(spec, &state.p, &schedule)?;
    Ok((throughput * mu.ln_1p() * LOG2_E, throughput))
}

/// Best `q0` for a fixed threshold: coarse log grid on `[q0_min, 1]`, then
/// golden-section in `log q0` over the two cells around the best grid point.
/// Returns `(q0, sum_rate)`.
pub fn best_q0(
    spec: &GroupSpec,
    mu: f64,
    shape: &BackoffSchedule,
    search: &HeteroSearch,
) -> Result<(f64, f64)> {
    let grid = logspace(search.q0_min, 1.0, search.q0_points);
    let mut values = Vec::with_capacity(grid.len());
    for &q0 in &grid {
        values.push(hetero_objective(spec, mu, q0, shape, &search.solver)?.0);
    }
    let best = argmax(&values);
    let lo = grid[best.saturating_sub(1)].ln();
    let hi = grid[(best + 1).min(grid.len() - 1)].ln();
    let (x, fx) = golden_max(
        |t| Ok(hetero_objective(spec, mu, t.exp(), shape, &search.solver)?.0),
        lo,
        hi,
        search.q0_tolerance,
    )?;
    Ok(if fx > values[best] {
        (x.exp().min(1.0), fx)
    } else {
        (grid[best], values[best])
    })
}

/// Maximum sum rate over the threshold and the initial transmission
/// probability, with the backoff multipliers of `shape` held fixed.
pub fn hetero_max_sum_rate(
    spec: &GroupSpec,
    shape: &BackoffSchedule,
    search: &HeteroSearch,
) -> Result<HeteroOptimum> {
    search.validate()?;
    let mus = logspace(search.mu_min, search.mu_max, search.mu_points);
    let cells: Vec<(f64, f64)> = search
        .exec
        .map(&mus, |&mu| best_q0(spec, mu, shape, search))
        .into_iter()
        .collect::<Result<_>>()?;
    let values: Vec<f64> = cells.iter().map(|c| c.1).collect();
    let best = argmax(&values);

    let lo = mus[best.saturating_sub(1)].ln();
    let hi = mus[(best + 1).min(mus.len() - 1)].ln();
    let (t, refined) = golden_max(
        |t| Ok(best_q0(spec, t.exp(), shape, search)?.1),
        lo,
        hi,
        search.mu_tolerance,
    )?;
    let (mu_star, q0_star) = if refined > values[best] {
        let mu = t.exp();
        (mu, best_q0(spec, mu, shape, search)?.0)
    } else {
        (mus[best], cells[best].0)
    };
    let schedule = shape.with_q0(q0_star)?;
    let state = solve_heterogeneous(spec, mu_star, &schedule, &search.solver)?;
    let throughput = network_throughput(spec, &state.p, &schedule)?;
    let sum_rate = throughput * mu_star.ln_1p() * LOG2_E;

    let threshold = values[best] * (1.0 - search.near_optimal);
    let competing_peaks = (0..values.len())
        .filter(|&i| i.abs_diff(best) > 1)
        .filter(|&i| {
            let left = i == 0 || values[i] >= values[i - 1];
            let right = i + 1 == values.len() || values[i] >= values[i + 1];
            left && right && values[i] >= threshold
        })
        .map(|i| (mus[i], values[i]))
        .collect();

    Ok(HeteroOptimum {
        sum_rate,
        mu_star,
        q0_star,
        throughput,
        p: state.p,
        competing_peaks,
    })
}

/// Index of the first maximum, so ties go to the lowest grid point.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}
