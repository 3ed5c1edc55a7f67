//! Maximum sum rate over the SINR threshold, its regime boundary, and the
//! Lambert-W based asymptotic approximations.
//!
//! The objective is `f(mu) = lambda_max(mu) * log2(1 + mu)` with
//! `lambda_max` from [`max_throughput_value`]. On each side of
//! `mu = 1/(n-1)` the stationarity condition reduces to a strictly
//! decreasing function (`G1` above, `G2` below), so the optimal threshold is
//! found by bisection on the sign change.

use std::f64::consts::{E, LN_2, LOG2_E};

use crate::error::{domain, ensure_positive, Error, Result};
use crate::lambert::lambert_w0;
use crate::optimize::throughput::max_throughput_value;
use crate::roots::{bisect, Tolerance};

/// Doublings allowed while searching for the upper bracket of `mu_h`.
const MAX_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SnrRegime {
    /// `rho >= rho_0`: optimal threshold `mu_h >= 1/(n-1)`.
    High,
    /// `rho < rho_0`: optimal threshold `mu_l <= 1/(n-1)`.
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRateOptimum {
    /// Maximum sum rate `C` in bit/s/Hz.
    pub capacity: f64,
    pub mu_star: f64,
    pub regime: SnrRegime,
    pub rho_0: f64,
    /// Maximum network throughput at `mu_star`.
    pub lambda_max: f64,
}

/// Sum-rate objective `lambda_max(mu) * log2(1 + mu)`.
pub fn sum_rate_objective(n: usize, mu: f64, rho: f64) -> Result<f64> {
    Ok(max_throughput_value(n, mu, rho)? * mu.ln_1p() / LN_2)
}

/// Regime boundary
/// `rho_0 = (n/(n-1)) ln(n/(n-1)) / (1 - (n-1) ln(n/(n-1)))`.
pub fn rho_threshold(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!("rho_0 needs at least two nodes, got {n}")));
    }
    let m = (n - 1) as f64;
    let l = (1.0 / m).ln_1p();
    // 1 - m ln(1 + 1/m) = 1/(2m) - 1/(3m^2) + ... loses digits for large m
    let gap = if m > 1e4 {
        let x = 1.0 / m;
        x * (0.5 - x * (1.0 / 3.0 - x * (0.25 - x / 5.0)))
    } else {
        1.0 - m * l
    };
    Ok((1.0 + 1.0 / m) * l / gap)
}

/// `(mu - ln(1+mu)) / mu^2` without cancellation for small `mu`.
fn log_defect(mu: f64) -> f64 {
    if mu < 1e-4 {
        0.5 - mu * (1.0 / 3.0 - mu * (0.25 - mu / 5.0))
    } else {
        (mu - mu.ln_1p()) / (mu * mu)
    }
}

/// Derivative sign function above the boundary (strictly decreasing in `mu`):
/// `1/mu - ln(1+mu)/mu^2 - (1+mu) ln(1+mu) / (mu rho)`.
pub fn g_high(mu: f64, rho: f64) -> f64 {
    log_defect(mu) - (1.0 + mu) * mu.ln_1p() / (mu * rho)
}

/// Derivative sign function below the boundary (strictly decreasing in `mu`):
/// `(1+mu) - ((1+mu)^2/rho + n) ln(1+mu)`.
pub fn g_low(mu: f64, rho: f64, n: usize) -> f64 {
    let a = 1.0 + mu;
    a - (a * a / rho + n as f64) * mu.ln_1p()
}

/// Maximum sum rate and the optimal SINR threshold.
pub fn max_sum_rate(n: usize, rho: f64) -> Result<SumRateOptimum> {
    ensure_positive("mean received SNR", rho)?;
    let rho_0 = rho_threshold(n)?;
    let boundary = 1.0 / (n - 1) as f64;
    let tol = Tolerance::full_precision(400);
    let (mu_star, regime) = if rho >= rho_0 {
        let mu = if g_high(boundary, rho) <= 0.0 {
            boundary
        } else {
            let mut hi = boundary;
            let mut found = false;
            for _ in 0..MAX_DOUBLINGS {
                hi *= 2.0;
                if g_high(hi, rho) < 0.0 {
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::Invariant(format!(
                    "no sign change of G1 below {hi} after {MAX_DOUBLINGS} doublings"
                )));
            }
            bisect(|m| g_high(m, rho), boundary, hi, tol)?.x
        };
        (mu, SnrRegime::High)
    } else {
        let mu = if g_low(boundary, rho, n) >= 0.0 {
            boundary
        } else {
            bisect(|m| g_low(m, rho, n), 0.0, boundary, tol)?.x
        };
        (mu, SnrRegime::Low)
    };
    let lambda_max = max_throughput_value(n, mu_star, rho)?;
    let capacity = lambda_max * mu_star.ln_1p() / LN_2;
    let consistent = match regime {
        SnrRegime::High => mu_star >= boundary,
        SnrRegime::Low => mu_star <= boundary && mu_star > 0.0,
    };
    if !consistent || !(capacity > 0.0) {
        return Err(Error::Invariant(format!(
            "optimal threshold {mu_star} inconsistent with {regime:?} regime"
        )));
    }
    Ok(SumRateOptimum {
        capacity,
        mu_star,
        regime,
        rho_0,
        lambda_max,
    })
}

/// Maximum throughput when the threshold is set to its sum-rate optimum.
pub fn max_throughput_at_opt_mu(n: usize, rho: f64) -> Result<f64> {
    Ok(max_sum_rate(n, rho)?.lambda_max)
}

/// Lambert-W approximations of the optimal threshold: `(mu_l, mu_h)` with
/// `mu_l ~ exp(-W0(-1/n)) - 1` (large `n`) and `mu_h ~ exp(W0(rho))`
/// (large `rho`).
pub fn approx_optimal_mu(n: usize, rho: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(domain(format!("at least two nodes are required, got {n}")));
    }
    ensure_positive("mean received SNR", rho)?;
    let low = (-lambert_w0(-1.0 / n as f64)?).exp_m1();
    let high = lambert_w0(rho)?.exp();
    Ok((low, high))
}

/// Closed-form sum-rate approximations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRateApprox {
    /// Accurate for large `rho`.
    pub high_snr: f64,
    /// Accurate for large `n`.
    pub low_snr: f64,
}

pub fn approx_sum_rate(n: usize, rho: f64) -> Result<SumRateApprox> {
    if n < 2 {
        return Err(domain(format!("at least two nodes are required, got {n}")));
    }
    ensure_positive("mean received SNR", rho)?;
    let wh = lambert_w0(rho)?;
    let mu_h = wh.exp();
    let high_snr = (1.0 + (-wh).exp()) * (-1.0 - mu_h / rho).exp() * mu_h.ln_1p() / LN_2;

    let nf = n as f64;
    let wl = lambert_w0(-1.0 / nf)?;
    let mu_l = (-wl).exp_m1();
    let low_snr = -nf * wl * (-nf * (-wl.exp_m1()) - mu_l / rho).exp() * LOG2_E;
    Ok(SumRateApprox { high_snr, low_snr })
}

/// Finite-difference slope of `C` against `log2 rho` between two SNRs in the
/// high-SNR regime.
pub fn high_snr_slope(n: usize, rho1: f64, rho2: f64) -> Result<f64> {
    let rho_0 = rho_threshold(n)?;
    if !(rho1 >= rho_0 && rho2 > rho1) || !rho2.is_finite() {
        return Err(domain(format!(
            "need rho_0 = {rho_0} <= rho1 < rho2, got rho1 = {rho1}, rho2 = {rho2}"
        )));
    }
    let c1 = max_sum_rate(n, rho1)?.capacity;
    let c2 = max_sum_rate(n, rho2)?.capacity;
    Ok((c2 - c1) / (rho2.log2() - rho1.log2()))
}

/// Limit of `C` for `n -> infinity` at low SNR (and of several other
/// large-population sum rates): `e^-1 log2 e`.
pub fn low_snr_limit() -> f64 {
    LOG2_E / E
}
