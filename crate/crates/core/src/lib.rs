//! Saturated slotted Aloha with SINR capture under Rayleigh fading.
//!
//! The crate covers three layers:
//!
//! * [`fixed_point`]: the steady-state success probability of HOL packets
//!   for homogeneous and grouped networks, and the resulting throughput.
//! * [`optimize`]: maximum throughput over the backoff parameters, maximum
//!   sum rate over the SINR threshold, asymptotic approximations, the
//!   constant-probability variant, and a numerical optimizer for SNR groups.
//! * [`simulate`]: a slot-level Monte Carlo simulator of the same network.
//!
//! ```
//! use aloha_capture::{solve_homogeneous, BackoffSchedule, NetworkConfig, SolverOptions};
//!
//! let schedule = BackoffSchedule::constant(0.04, 0)?;
//! let config = NetworkConfig::new(50, 10.0, 1.0, schedule)?;
//! let state = solve_homogeneous(&config, &SolverOptions::approx())?;
//! assert!((state.p - (-1.1f64).exp()).abs() < 1e-9);
//! # Ok::<(), aloha_capture::Error>(())
//! ```

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod fixed_point;
pub mod grid;
pub mod lambert;
pub mod model;
pub mod optimize;
pub mod roots;
pub mod simulate;

pub use error::{Error, Result};
pub use exec::Exec;
pub use fixed_point::{
    closed_form_k0, fixed_point_map, group_node_throughput, heterogeneous_map, network_throughput,
    solve_heterogeneous, solve_heterogeneous_from, solve_homogeneous, Group, GroupSpec,
    HeterogeneousState, SolverOptions,
};
pub use lambert::lambert_w0;
pub use model::{
    capture_prob, db_to_linear, hol_distribution, linear_to_db, rate_to_threshold,
    threshold_to_rate, throughput_at, BackoffKind, BackoffSchedule, HolDistribution, NetworkConfig,
    SolverMode, SteadyState, ThroughputPoint,
};
pub use simulate::{replicate, run, run_replication, SimConfig, SimNetwork, SimReport};
