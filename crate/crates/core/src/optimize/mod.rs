//! Optimization of throughput and sum rate over the backoff parameters and the
//! SINR threshold.

mod fixed_q;
mod golden;
mod hetero;
mod sum_rate;
mod throughput;

pub use fixed_q::{fixed_q_analysis, fixed_q_optimum, FixedQOptimum, FixedQPoint};
pub use golden::golden_max;
pub use hetero::{best_q0, hetero_max_sum_rate, hetero_objective, HeteroOptimum, HeteroSearch};
pub use sum_rate::{
    approx_optimal_mu, approx_sum_rate, g_high, g_low, high_snr_slope, low_snr_limit, max_sum_rate,
    max_throughput_at_opt_mu, rho_threshold, sum_rate_objective, SnrRegime, SumRateApprox,
    SumRateOptimum,
};
pub use throughput::{
    max_throughput, max_throughput_value, optimal_success_probability, ThroughputBranch,
    ThroughputOptimum,
};
