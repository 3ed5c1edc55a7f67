//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::E;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use aloha_capture::optimize::{high_snr_slope, max_sum_rate, rho_threshold, sum_rate_objective};
use aloha_capture::simulate::{replicate, run, SimConfig, SimNetwork};
use aloha_capture::{
    closed_form_k0, db_to_linear, fixed_point_map, grid, hol_distribution, lambert_w0,
    network_throughput, solve_heterogeneous, solve_homogeneous, throughput_at, BackoffSchedule,
    Exec, GroupSpec, NetworkConfig, SolverMode, SolverOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn k0(n: usize, rho: f64, mu: f64, q0: f64) -> NetworkConfig {
    NetworkConfig::new(n, rho, mu, BackoffSchedule::constant(q0, 0).unwrap()).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn fixed_point_vs_closed_form() -> Check {
    let config = k0(50, 10.0, 1.0, 0.04);
    let options = SolverOptions::approx();
    solve_homogeneous(&config, &options).map_err(|e| e.to_string())?;
    let (state, elapsed) = timed(|| solve_homogeneous(&config, &options));
    let p = state.map_err(|e| e.to_string())?.p;
    let oracle = (-1.1f64).exp();
    let err = (p - oracle).abs();
    ensure(err <= 1e-9, || format!("|p_A - exp(-1.1)| = {err:e}"))?;
    ensure(elapsed < Duration::from_millis(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("p_A = {p:.12}, error {err:.1e}, {elapsed:?}"))
}

/// Sweep `q0 = j/points`, `j = 1..=points`, returning `(argmax q0, max)`.
fn sweep_q0(n: usize, mu: f64, rho: f64, points: usize) -> Result<(f64, f64), String> {
    let mut best = (0.0, f64::NEG_INFINITY);
    for j in 1..=points {
        let q0 = j as f64 / points as f64;
        let state = solve_homogeneous(&k0(n, rho, mu, q0), &SolverOptions::approx())
            .map_err(|e| e.to_string())?;
        let lambda = throughput_at(state.p, mu, rho)
            .map_err(|e| e.to_string())?
            .lambda_out;
        if lambda > best.1 {
            best = (q0, lambda);
        }
    }
    Ok(best)
}

fn throughput_optimum() -> Check {
    let (result, elapsed) = timed(|| -> Result<String, String> {
        let (q_arg, max) = sweep_q0(50, 1.0, 10.0, 2000)?;
        let target = 2.0 * (-1.1f64).exp();
        ensure((max - target).abs() <= 1e-3, || {
            format!("max {max} vs {target}")
        })?;
        ensure((q_arg - 0.04).abs() <= 2e-3, || {
            format!("argmax q0 {q_arg} vs 0.04")
        })?;

        let (q_sat, max_sat) = sweep_q0(50, 0.01, 1.0, 2000)?;
        let target_sat = 50.0 * (-0.01 - 0.5 / 1.01f64).exp();
        ensure(q_sat == 1.0, || {
            format!("saturating argmax at q0 = {q_sat}")
        })?;
        ensure((max_sat - target_sat).abs() <= 1e-3, || {
            format!("saturating max {max_sat} vs {target_sat}")
        })?;
        Ok(format!(
            "max {max:.6} at q0 {q_arg}; saturating max {max_sat:.4} at q0 {q_sat}"
        ))
    });
    let detail = result?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{detail}, {elapsed:?}"))
}

fn sum_rate_optimum() -> Check {
    let opt = max_sum_rate(50, 10.0).map_err(|e| e.to_string())?;
    let mus = grid::logspace(1e-4, 1e4, 10_000);
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &mu) in mus.iter().enumerate() {
        let v = sum_rate_objective(50, mu, 10.0).map_err(|e| e.to_string())?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let gap = (opt.capacity - best.1).abs();
    ensure(gap <= 1e-4, || {
        format!("C = {} vs grid {}", opt.capacity, best.1)
    })?;
    let cell = mus[best.0 + 1] - mus[best.0];
    ensure((opt.mu_star - 2.90).abs() <= cell, || {
        format!("mu* = {} not within {cell} of 2.90", opt.mu_star)
    })?;
    ensure((opt.mu_star - mus[best.0]).abs() <= cell, || {
        format!("mu* = {} vs grid {}", opt.mu_star, mus[best.0])
    })?;

    let rho0 = rho_threshold(50).map_err(|e| e.to_string())?;
    ensure((rho0 - 2.0480).abs() <= 5e-4, || format!("rho_0 = {rho0}"))?;
    let high = max_sum_rate(50, rho0).map_err(|e| e.to_string())?;
    let low = max_sum_rate(50, rho0 * (1.0 - 1e-12)).map_err(|e| e.to_string())?;
    let rel = (high.capacity - low.capacity).abs() / high.capacity;
    ensure(high.regime != low.regime, || {
        "both evaluations on one branch".into()
    })?;
    ensure(rel <= 1e-6, || {
        format!("branches differ by {rel:e} at rho_0")
    })?;
    Ok(format!(
        "C = {:.7} (grid {:.7}), mu* = {:.6}, rho_0 = {rho0:.6}, branch gap {rel:.1e}",
        opt.capacity, best.1, opt.mu_star
    ))
}

fn high_snr_slope_check() -> Check {
    let slope = high_snr_slope(50, 1e6, 1e8).map_err(|e| e.to_string())?;
    let target = (-1.0f64).exp();
    let rel = (slope - target).abs() / target;
    ensure(rel <= 0.03, || {
        format!("slope {slope:.6} is {:.2}% from 1/e", 100.0 * rel)
    })?;
    Ok(format!("slope {slope:.6}, {:.2}% from 1/e", 100.0 * rel))
}

fn low_snr_limit_check() -> Check {
    let c = max_sum_rate(100_000, 1.0)
        .map_err(|e| e.to_string())?
        .capacity;
    let rel = (c - 0.5307).abs() / 0.5307;
    ensure(rel <= 0.01, || format!("C = {c}"))?;
    Ok(format!("C = {c:.7}, {:.3}% from 0.5307", 100.0 * rel))
}

struct SimRun {
    seed: u64,
    p_hat: f64,
    throughput: f64,
    elapsed: Duration,
}

fn reference_runs() -> Result<Vec<SimRun>, String> {
    let net = SimNetwork::homogeneous(&k0(50, db_to_linear(10.0), 1.0, 0.04))
        .map_err(|e| e.to_string())?;
    [1u64, 2, 3]
        .iter()
        .map(|&seed| {
            let (report, elapsed) = timed(|| run(&net, &SimConfig::new(1_000_000, seed)));
            let report = report.map_err(|e| e.to_string())?;
            Ok(SimRun {
                seed,
                p_hat: report.p_hat,
                throughput: report.throughput,
                elapsed,
            })
        })
        .collect()
}

fn simulator_vs_exact(runs: &[SimRun]) -> Check {
    let config = k0(50, db_to_linear(10.0), 1.0, 0.04);
    let exact = solve_homogeneous(&config, &SolverOptions::exact()).map_err(|e| e.to_string())?;
    let analytic = exact.network_throughput(50);
    let mut worst = (0.0f64, 0.0f64);
    for r in runs {
        let dp = (r.p_hat - 0.336249).abs();
        let dt = (r.throughput - analytic).abs();
        ensure(dp < 0.005, || format!("seed {}: p_hat {}", r.seed, r.p_hat))?;
        ensure(dt < 0.01, || {
            format!("seed {}: throughput {} vs {analytic}", r.seed, r.throughput)
        })?;
        ensure(r.elapsed < Duration::from_secs(60), || {
            format!("seed {} took {:?}", r.seed, r.elapsed)
        })?;
        worst = (worst.0.max(dp), worst.1.max(dt));
    }
    let slowest = runs.iter().map(|r| r.elapsed).max().unwrap_or_default();
    Ok(format!(
        "max |p_hat - 0.336249| = {:.5}, max |throughput - {analytic:.6}| = {:.5}, slowest run {slowest:?}",
        worst.0, worst.1
    ))
}

fn simulator_vs_approx(runs: &[SimRun]) -> Check {
    let target = 0.332871;
    let mut worst = 0.0f64;
    for r in runs {
        let rel = (r.p_hat - target).abs() / target;
        ensure(rel <= 0.02, || {
            format!(
                "seed {}: p_hat {} is {:.2}% off",
                r.seed,
                r.p_hat,
                100.0 * rel
            )
        })?;
        worst = worst.max(rel);
    }
    Ok(format!("max relative gap {:.3}%", 100.0 * worst))
}

fn multipacket_reception() -> Check {
    let net = SimNetwork::homogeneous(&k0(50, 1.0, 0.01, 1.0)).map_err(|e| e.to_string())?;
    let report = run(&net, &SimConfig::new(100_000, 5)).map_err(|e| e.to_string())?;
    let target = 50.0 * (-0.01f64).exp() / 1.01f64.powi(49);
    let rel = (report.throughput - target).abs() / target;
    ensure(rel <= 0.01, || {
        format!("throughput {} vs {target}", report.throughput)
    })?;
    ensure(report.throughput > 1.0, || "throughput not above 1".into())?;
    Ok(format!(
        "throughput {:.4} vs {target:.4} ({:.3}%)",
        report.throughput,
        100.0 * rel
    ))
}

fn beb_validation() -> Check {
    let rho = db_to_linear(10.0);
    let q0s = grid::linspace(0.008, 0.08, 10);
    let mut cases = Vec::new();
    for k in [0usize, 2, 5] {
        for &q0 in &q0s {
            cases.push((k, q0));
        }
    }
    let results = Exec::default().map(&cases, |&(k, q0)| -> Result<(f64, f64), String> {
        let schedule = BackoffSchedule::binary_exponential(q0, k).map_err(|e| e.to_string())?;
        let config = NetworkConfig::new(50, rho, 1.0, schedule).map_err(|e| e.to_string())?;
        let theory =
            solve_homogeneous(&config, &SolverOptions::approx()).map_err(|e| e.to_string())?;
        let net = SimNetwork::homogeneous(&config).map_err(|e| e.to_string())?;
        let seed = 1000 + 100 * k as u64 + (q0 * 1e4).round() as u64;
        let report = run(&net, &SimConfig::new(100_000, seed)).map_err(|e| e.to_string())?;
        let lambda = theory.network_throughput(50);
        Ok((
            report.p_hat / theory.p - 1.0,
            report.throughput / lambda - 1.0,
        ))
    });
    let mut worst = (0.0f64, 0.0f64);
    let mut misses = Vec::new();
    for (&(k, q0), r) in cases.iter().zip(results) {
        let (dp, dt) = r?;
        worst = (worst.0.max(dp.abs()), worst.1.max(dt.abs()));
        if dp.abs() > 0.02 || dt.abs() > 0.02 {
            misses.push(format!(
                "K={k} q0={q0:.3} (p_hat {:+.2}%, throughput {:+.2}%)",
                100.0 * dp,
                100.0 * dt
            ));
        }
    }
    let summary = format!(
        "{} points, max relative gap p_hat {:.3}%, throughput {:.3}%",
        cases.len(),
        100.0 * worst.0,
        100.0 * worst.1
    );
    ensure(misses.is_empty(), || {
        format!("{summary}; outside 2%: {}", misses.join(", "))
    })?;
    Ok(summary)
}

fn heterogeneous_check() -> Check {
    let schedule = BackoffSchedule::constant(0.04, 0).unwrap();
    let equal = GroupSpec::two_group_with_mean(25, 25, 10.0, 1.0).map_err(|e| e.to_string())?;
    let hetero = solve_heterogeneous(&equal, 1.0, &schedule, &SolverOptions::approx())
        .map_err(|e| e.to_string())?;
    let homo = solve_homogeneous(&k0(50, 10.0, 1.0, 0.04), &SolverOptions::approx())
        .map_err(|e| e.to_string())?;
    let gap = hetero
        .p
        .iter()
        .map(|p| (p - homo.p).abs())
        .fold(0.0, f64::max);
    ensure(gap <= 1e-9, || {
        format!("equal-SNR groups differ from homogeneous by {gap:e}")
    })?;

    let spec = GroupSpec::new(vec![
        aloha_capture::Group {
            nodes: 25,
            snr: 20.0,
        },
        aloha_capture::Group {
            nodes: 25,
            snr: 5.0,
        },
    ])
    .map_err(|e| e.to_string())?;
    // node throughput q0 * p_m with p_m from the two-group closed forms
    let coupling = |own: f64, other: f64| 1.0 / (1.0 + own / other);
    let p1 = (-1.0 / 20.0 - 25.0 * 0.04 * (coupling(20.0, 20.0) + coupling(20.0, 5.0))).exp();
    let p2 = (-1.0 / 5.0 - 25.0 * 0.04 * (coupling(5.0, 20.0) + coupling(5.0, 5.0))).exp();
    let oracle = [0.04 * p1, 0.04 * p2];
    let net = SimNetwork::grouped(&spec, 1.0, &schedule).map_err(|e| e.to_string())?;
    let report = run(&net, &SimConfig::new(1_000_000, 17)).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (g, o) in report.per_group.iter().zip(oracle) {
        let d = (g.node_throughput - o).abs();
        ensure(d <= 0.005, || {
            format!("group node throughput {} vs {o}", g.node_throughput)
        })?;
        worst = worst.max(d);
    }
    let solved = solve_heterogeneous(&spec, 1.0, &schedule, &SolverOptions::approx())
        .map_err(|e| e.to_string())?;
    let solved_total =
        network_throughput(&spec, &solved.p, &schedule).map_err(|e| e.to_string())?;
    ensure(
        (solved_total - 25.0 * (oracle[0] + oracle[1])).abs() <= 1e-9,
        || "solver disagrees with the two-group closed forms".into(),
    )?;
    Ok(format!(
        "equal-SNR gap {gap:.1e}; simulated node throughputs {:.5}, {:.5} vs {:.5}, {:.5}",
        report.per_group[0].node_throughput,
        report.per_group[1].node_throughput,
        oracle[0],
        oracle[1]
    ))
}

fn random_schedule(rng: &mut ChaCha8Rng) -> BackoffSchedule {
    let k = rng.random_range(0..=6);
    let q0 = rng.random_range(0.001..=1.0);
    if rng.random_bool(0.5) {
        BackoffSchedule::binary_exponential(q0, k).unwrap()
    } else {
        BackoffSchedule::constant(q0, k).unwrap()
    }
}

fn property_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);

    // non-increasing h on a 100-point grid
    for _ in 0..200 {
        let config = NetworkConfig::new(
            rng.random_range(2..=500),
            10f64.powf(rng.random_range(-2.0..3.0)),
            10f64.powf(rng.random_range(-2.0..2.0)),
            random_schedule(&mut rng),
        )
        .unwrap();
        for mode in [SolverMode::Approx, SolverMode::Exact] {
            let ps = grid::linspace(1e-6, 1.0, 100);
            let hs: Vec<f64> = ps
                .iter()
                .map(|&p| fixed_point_map(&config, mode, p))
                .collect();
            if let Some(w) = hs.windows(2).find(|w| w[1] > w[0] * (1.0 + 1e-12)) {
                return Err(format!("h increases: {} -> {} for {config:?}", w[0], w[1]));
            }
        }
    }

    // stationary distribution sums to one
    for _ in 0..500 {
        let schedule = random_schedule(&mut rng);
        let p = rng.random_range(1e-6..=1.0);
        let total = hol_distribution(p, &schedule).unwrap().total();
        ensure((total - 1.0).abs() <= 1e-12, || {
            format!("distribution sums to {total}")
        })?;
    }

    // Lambert W round trip on 1000 log-spaced points
    for z in grid::logspace(1e-300, 1e300, 1000)
        .into_iter()
        .chain(grid::linspace(-1.0 / E, 0.0, 200))
    {
        let w = lambert_w0(z).unwrap();
        let back = w * w.exp();
        let tol = 1e-12 * z.abs().max(f64::MIN_POSITIVE);
        // near the branch point w e^w is flat, so compare in w instead
        let ok = (back - z).abs() <= tol || (z + 1.0 / E) < 1e-6 && (w + 1.0).abs() < 1e-2;
        ensure(ok, || format!("W0({z}) = {w}, w e^w = {back}"))?;
    }

    // throughput concave in the steady-state point
    for _ in 0..200 {
        let mu = 10f64.powf(rng.random_range(-2.0..2.0));
        let rho = 10f64.powf(rng.random_range(-1.0..3.0));
        let upper = (-mu / rho).exp();
        let ps = grid::linspace(1e-3 * upper, upper, 200);
        let ls: Vec<f64> = ps
            .iter()
            .map(|&p| throughput_at(p, mu, rho).unwrap().lambda_out)
            .collect();
        let scale = ls.iter().cloned().fold(0.0, f64::max);
        if ls
            .windows(3)
            .any(|w| w[0] + w[2] - 2.0 * w[1] > 1e-12 * scale)
        {
            return Err(format!("throughput not concave for mu = {mu}, rho = {rho}"));
        }
    }

    // closed form agrees with the solver
    for _ in 0..200 {
        let config = k0(
            rng.random_range(2..=1000),
            10f64.powf(rng.random_range(-1.0..3.0)),
            10f64.powf(rng.random_range(-2.0..2.0)),
            rng.random_range(0.001..=0.5),
        );
        let solved = solve_homogeneous(&config, &SolverOptions::approx())
            .unwrap()
            .p;
        let closed = closed_form_k0(&config).unwrap();
        ensure((solved - closed).abs() <= 1e-10, || {
            format!("{solved} vs {closed}")
        })?;
    }

    // simulator determinism
    for _ in 0..5 {
        let config = NetworkConfig::new(
            rng.random_range(1..=30),
            10f64.powf(rng.random_range(-1.0..2.0)),
            10f64.powf(rng.random_range(-2.0..1.0)),
            random_schedule(&mut rng),
        )
        .unwrap();
        let net = SimNetwork::homogeneous(&config).unwrap();
        let sim = SimConfig::new(5_000, rng.random()).with_replications(3);
        let a = replicate(&net, &sim, Exec::Sequential).unwrap();
        let b = replicate(&net, &sim, Exec::Parallel).unwrap();
        let c = replicate(&net, &sim, Exec::Parallel).unwrap();
        ensure(a == b && b == c, || {
            format!("replications differ for {config:?}")
        })?;
    }
    Ok(
        "h monotone, distributions normalized, W0 round trip, concavity, closed form, determinism"
            .into(),
    )
}

/// Report a panic inside a check as a failure instead of aborting the suite.
fn guard(f: impl FnOnce() -> Check + std::panic::UnwindSafe) -> Check {
    std::panic::catch_unwind(f).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() -> ExitCode {
    let runs = reference_runs();
    let sim = |f: fn(&[SimRun]) -> Check| match &runs {
        Ok(r) => f(r),
        Err(e) => Err(e.clone()),
    };
    let results: Vec<(&str, Check)> = vec![
        (
            "fixed point matches closed form",
            guard(fixed_point_vs_closed_form),
        ),
        ("throughput optimum over q0", guard(throughput_optimum)),
        (
            "sum-rate optimum over the threshold",
            guard(sum_rate_optimum),
        ),
        ("high-SNR slope approaches 1/e", guard(high_snr_slope_check)),
        (
            "large-population sum rate limit",
            guard(low_snr_limit_check),
        ),
        (
            "simulation vs exact analysis",
            guard(|| sim(simulator_vs_exact)),
        ),
        (
            "simulation vs approximate analysis",
            guard(|| sim(simulator_vs_approx)),
        ),
        ("multipacket reception", guard(multipacket_reception)),
        ("binary exponential backoff sweep", guard(beb_validation)),
        ("heterogeneous groups", guard(heterogeneous_check)),
        ("randomized properties", guard(property_suites)),
    ];
    let mut failed = 0;
    for (i, (name, result)) in results.iter().enumerate() {
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
