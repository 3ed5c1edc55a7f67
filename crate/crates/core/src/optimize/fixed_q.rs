//! Sum rate when every node transmits with one constant probability `q`
//! regardless of its backoff phase.

use std::f64::consts::{E, LOG2_E};

use crate::error::{domain, ensure_positive, ensure_probability, Result};
use crate::lambert::lambert_w0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedQPoint {
    /// Steady-state success probability.
    pub p_a: f64,
    /// Network throughput `n q p_a`.
    pub throughput: f64,
    /// `throughput * log2(1 + mu)`.
    pub sum_rate: f64,
}

pub fn fixed_q_analysis(n: usize, q: f64, mu: f64, rho: f64) -> Result<FixedQPoint> {
    if n == 0 {
        return Err(domain("at least one node is required"));
    }
    ensure_probability("transmission probability", q)?;
    ensure_positive("SINR threshold", mu)?;
    ensure_positive("mean received SNR", rho)?;
    let nq = n as f64 * q;
    let p_a = (-mu / rho - nq * mu / (mu + 1.0)).exp();
    let throughput = nq * p_a;
    Ok(FixedQPoint {
        p_a,
        throughput,
        sum_rate: throughput * mu.ln_1p() * LOG2_E,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedQOptimum {
    /// Rate-maximizing threshold as `rho -> infinity`.
    pub mu_star: f64,
    /// Sum rate at `mu_star` as `rho -> infinity`.
    pub limit_max_rate: f64,
    /// `e^-1 log2 e`, the `n -> infinity` value of `limit_max_rate`.
    pub large_n_limit: f64,
}

/// Optimal threshold `exp(-W0(-1/(nq))) - 1` and the corresponding rate.
/// Requires `nq >= e` so that the Lambert-W argument stays on the principal
/// branch.
pub fn fixed_q_optimum(n: usize, q: f64) -> Result<FixedQOptimum> {
    ensure_probability("transmission probability", q)?;
    let nq = n as f64 * q;
    if nq < E {
        return Err(domain(format!(
            "n*q = {nq} is below e; the optimum formula needs n*q >= e"
        )));
    }
    let w = lambert_w0(-1.0 / nq)?;
    let mu_star = (-w).exp_m1();
    // n q exp(-n q mu/(mu+1)) log2(1 + mu) with mu/(mu+1) = 1 - e^w
    let limit_max_rate = nq * (nq * w.exp_m1()).exp() * (-w) * LOG2_E;
    Ok(FixedQOptimum {
        mu_star,
        limit_max_rate,
        large_n_limit: LOG2_E / E,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn example_point() {
        let pt = fixed_q_analysis(50, 1.0, 0.02, 10.0).unwrap();
        let expected = (-0.002f64 - 1.0 / 1.02).exp();
        assert_relative_eq!(pt.p_a, expected, max_relative = 1e-14);
        assert_abs_diff_eq!(pt.p_a, 0.37440, epsilon = 5e-5);
        assert_abs_diff_eq!(pt.throughput, 18.72, epsilon = 5e-3);
        assert_relative_eq!(
            pt.sum_rate,
            pt.throughput * 1.02f64.log2(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn vanishing_q() {
        let pt = fixed_q_analysis(50, 1e-12, 1.0, 10.0).unwrap();
        assert!(pt.throughput < 1e-10);
    }

    #[test]
    fn optimum_is_stationary() {
        // mu* maximizes exp(-nq mu/(mu+1)) log(1+mu) when rho -> infinity
        let (n, q) = (50usize, 0.3);
        let opt = fixed_q_optimum(n, q).unwrap();
        let f = |m: f64| fixed_q_analysis(n, q, m, 1e300).unwrap().sum_rate;
        let h = 1e-5 * opt.mu_star;
        assert!(f(opt.mu_star) >= f(opt.mu_star + h));
        assert!(f(opt.mu_star) >= f(opt.mu_star - h));
        assert_relative_eq!(f(opt.mu_star), opt.limit_max_rate, max_relative = 1e-12);
    }

    #[test]
    fn large_n_limit() {
        let opt = fixed_q_optimum(100_000, 1.0).unwrap();
        assert_relative_eq!(opt.limit_max_rate, opt.large_n_limit, max_relative = 0.01);
        assert!(fixed_q_optimum(50, 1.0).unwrap().limit_max_rate > opt.limit_max_rate);
    }

    #[test]
    fn domain_guard() {
        assert!(fixed_q_optimum(2, 1.0).is_err());
        assert!(fixed_q_optimum(50, 0.05).is_err());
        assert!(fixed_q_optimum(3, 1.0).is_ok());
        assert!(fixed_q_analysis(50, 0.0, 1.0, 1.0).is_err());
    }
}
