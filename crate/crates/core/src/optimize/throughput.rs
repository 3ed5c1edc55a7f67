//! Maximum network throughput over the backoff parameters for a fixed SINR
//! threshold.

use crate::error::{domain, ensure_positive, Error, Result};
use crate::model::BackoffSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThroughputBranch {
    /// `mu >= 1/(n-1)`: the unconstrained optimum `p_A = exp(-1 - mu/rho)` is
    /// reachable with `q0 = q0_hat <= 1`.
    Achievable,
    /// `mu < 1/(n-1)`: the optimum sits on the boundary `q_i = 1`.
    Saturating,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputOptimum {
    pub lambda_max: f64,
    /// Optimal `q_0..q_K`.
    pub q_star: Vec<f64>,
    pub branch: ThroughputBranch,
    /// Optimal initial transmission probability on the achievable branch.
    pub q0_hat: Option<f64>,
}

impl ThroughputOptimum {
    /// The optimal schedule as a [`BackoffSchedule`] of the given shape.
    pub fn schedule(&self, shape: &BackoffSchedule) -> Result<BackoffSchedule> {
        match self.q0_hat {
            Some(q0) => shape.with_q0(q0),
            None => BackoffSchedule::constant(1.0, shape.cutoff()),
        }
    }
}

/// Optimal steady-state point `exp(-1 - mu/rho)`.
pub fn optimal_success_probability(mu: f64, rho: f64) -> f64 {
    (-1.0 - mu / rho).exp()
}

/// Maximum throughput as a function of the threshold alone (both branches).
pub fn max_throughput_value(n: usize, mu: f64, rho: f64) -> Result<f64> {
    check(n, mu, rho)?;
    let nf = n as f64;
    Ok(if achievable(n, mu) {
        (mu + 1.0) / mu * optimal_success_probability(mu, rho)
    } else {
        nf * (-nf * mu / (mu + 1.0) - mu / rho).exp()
    })
}

/// Maximum throughput and the backoff parameters achieving it. Only the
/// multipliers of `shape` matter; its `q0` is ignored.
pub fn max_throughput(
    n: usize,
    mu: f64,
    rho: f64,
    shape: &BackoffSchedule,
) -> Result<ThroughputOptimum> {
    let lambda_max = max_throughput_value(n, mu, rho)?;
    if !achievable(n, mu) {
        return Ok(ThroughputOptimum {
            lambda_max,
            q_star: vec![1.0; shape.cutoff() + 1],
            branch: ThroughputBranch::Saturating,
            q0_hat: None,
        });
    }
    let p_star = optimal_success_probability(mu, rho);
    let mut q0_hat = (mu + 1.0) / (n as f64 * mu) * shape.mean_inverse_multiplier(p_star);
    if q0_hat > 1.0 {
        // mu == 1/(n-1) with flat multipliers gives exactly 1 up to rounding
        if q0_hat - 1.0 <= 1e-12 {
            q0_hat = 1.0;
        } else {
            return Err(Error::Unachievable { q0_hat });
        }
    }
    Ok(ThroughputOptimum {
        lambda_max,
        q_star: shape.multipliers().iter().map(|m| q0_hat * m).collect(),
        branch: ThroughputBranch::Achievable,
        q0_hat: Some(q0_hat),
    })
}

/// `mu >= 1/(n-1)`, written without the division so that the boundary
/// value itself counts as achievable.
pub(crate) fn achievable(n: usize, mu: f64) -> bool {
    // 1/(n-1) itself must land here even when the division rounds down
    mu * (n - 1) as f64 >= 1.0 - 4.0 * f64::EPSILON
}

fn check(n: usize, mu: f64, rho: f64) -> Result<()> {
    if n < 2 {
        return Err(domain(format!("at least two nodes are required, got {n}")));
    }
    ensure_positive("SINR threshold", mu)?;
    ensure_positive("mean received SNR", rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn achievable_branch_example() {
        let shape = BackoffSchedule::constant(0.5, 0).unwrap();
        let opt = max_throughput(50, 1.0, 10.0, &shape).unwrap();
        assert_eq!(opt.branch, ThroughputBranch::Achievable);
        assert_abs_diff_eq!(opt.lambda_max, 2.0 * (-1.1f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(opt.lambda_max, 0.665742, epsilon = 1e-6);
        assert_abs_diff_eq!(opt.q0_hat.unwrap(), 0.04, epsilon = 1e-15);
        assert_eq!(opt.schedule(&shape).unwrap().q0(), opt.q0_hat.unwrap());
    }

    #[test]
    fn saturating_branch_example() {
        let shape = BackoffSchedule::binary_exponential(0.5, 3).unwrap();
        let opt = max_throughput(50, 0.01, 1.0, &shape).unwrap();
        assert_eq!(opt.branch, ThroughputBranch::Saturating);
        assert_eq!(opt.q_star, vec![1.0; 4]);
        assert_abs_diff_eq!(
            opt.lambda_max,
            50.0 * (-0.01 - 0.5 / 1.01f64).exp(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(opt.lambda_max, 30.17, epsilon = 5e-3);
        assert!(opt.schedule(&shape).unwrap().is_flat());
    }

    #[test]
    fn large_threshold_limit() {
        // -> (mu+1)/mu * exp(-1 - mu/rho) -> 1/e when rho >> mu >> 1
        let v = max_throughput_value(50, 1e4, 1e12).unwrap();
        assert_abs_diff_eq!(v, (-1.0f64).exp(), epsilon = 1e-4);
        let expect = (1e4 + 1.0) / 1e4 * (-1.0 - 1e4 / 10.0f64).exp();
        assert_abs_diff_eq!(
            max_throughput_value(50, 1e4, 10.0).unwrap(),
            expect,
            epsilon = 1e-300
        );
    }

    #[test]
    fn beb_q0_hat_is_geometric_expectation() {
        let shape = BackoffSchedule::binary_exponential(1.0, 2).unwrap();
        let (n, mu, rho) = (50usize, 2.0, 10.0);
        let p = optimal_success_probability(mu, rho);
        let expect =
            (mu + 1.0) / (n as f64 * mu) * (p + p * (1.0 - p) * 2.0 + (1.0 - p).powi(2) * 4.0);
        let opt = max_throughput(n, mu, rho, &shape).unwrap();
        assert_abs_diff_eq!(opt.q0_hat.unwrap(), expect, epsilon = 1e-15);
        assert_abs_diff_eq!(opt.q_star[2], expect / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn boundary_threshold_is_achievable() {
        let shape = BackoffSchedule::constant(0.5, 0).unwrap();
        let opt = max_throughput(50, 1.0 / 49.0, 3.0, &shape).unwrap();
        assert_eq!(opt.branch, ThroughputBranch::Achievable);
        assert!(opt.q0_hat.unwrap() <= 1.0);
    }

    #[test]
    fn steep_backoff_near_boundary_is_unachievable() {
        let shape = BackoffSchedule::binary_exponential(0.5, 6).unwrap();
        assert!(matches!(
            max_throughput(50, 1.0 / 49.0, 3.0, &shape),
            Err(Error::Unachievable { .. })
        ));
    }

    #[test]
    fn rejects_bad_inputs() {
        let shape = BackoffSchedule::constant(0.5, 0).unwrap();
        assert!(max_throughput(1, 1.0, 1.0, &shape).is_err());
        assert!(max_throughput(5, 0.0, 1.0, &shape).is_err());
        assert!(max_throughput(5, 1.0, -1.0, &shape).is_err());
    }
}
