//! CSV data behind the standard figure panels.
//!
//! Every panel uses fixed parameters (n = 50 unless the panel varies n).
//! Simulation-backed panels honor --slots, --warmup, --seed and --reps; the
//! other common flags are ignored here.

use std::path::{Path, PathBuf};

use aloha_capture::grid::{linspace, logspace};
use aloha_capture::model::db_to_linear;
use aloha_capture::optimize::{
    approx_optimal_mu, approx_sum_rate, hetero_max_sum_rate, max_sum_rate, max_throughput,
    max_throughput_value, sum_rate_objective, HeteroSearch,
};
use aloha_capture::{
    replicate, solve_homogeneous, BackoffSchedule, Exec, GroupSpec, NetworkConfig, SimNetwork,
    SolverOptions,
};

use crate::args::{Common, FIGURE_IDS};
use crate::output::{fmt_sig, write_file, Table};
use crate::{sim_config, CliError, CliResult};

const N: usize = 50;
const NS: [usize; 3] = [10, 50, 200];

pub fn run(id: &str, c: &Common) -> CliResult<()> {
    let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
    let ids: Vec<&str> = if id == "all" {
        FIGURE_IDS[..FIGURE_IDS.len() - 1].to_vec()
    } else {
        vec![id]
    };
    // the q0 panels share their simulations between p_A and throughput
    let mut q0_a = None;
    let mut q0_b = None;
    for id in ids {
        let table = match id {
            "fig3a" => fig3a()?,
            "fig3b" => fig3b()?,
            "fig4a" => fig4a()?,
            "fig4b" => fig4b()?,
            "fig5a" => fig5a()?,
            "fig5b" => fig5b()?,
            "fig6a" | "fig7a" => {
                let pair = match q0_a.take() {
                    Some(p) => p,
                    None => q0_panel(&q0_setup_a(), c)?,
                };
                let t = if id == "fig6a" {
                    pair.0.clone()
                } else {
                    pair.1.clone()
                };
                q0_a = Some(pair);
                t
            }
            "fig6b" | "fig7b" => {
                let pair = match q0_b.take() {
                    Some(p) => p,
                    None => q0_panel(&q0_setup_b(), c)?,
                };
                let t = if id == "fig6b" {
                    pair.0.clone()
                } else {
                    pair.1.clone()
                };
                q0_b = Some(pair);
                t
            }
            "fig8-sumrate" => fig8(c)?,
            "fig9-hetero" => fig9()?,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown figure id {other:?}; known: {}",
                    FIGURE_IDS.join(", ")
                )))
            }
        };
        save(&dir, id, &table)?;
    }
    Ok(())
}

fn save(dir: &Path, id: &str, table: &Table) -> CliResult<()> {
    let path = dir.join(format!("{id}.csv"));
    write_file(&path, &table.to_csv())?;
    println!("{id}: {} rows -> {}", table.rows.len(), path.display());
    for (label, x, y) in table.peaks() {
        println!(
            "  {label}: max {} at {} = {}",
            fmt_sig(y),
            table.columns[0],
            fmt_sig(x)
        );
    }
    Ok(())
}

/// NaN marks a point where the quantity is undefined (e.g. an unreachable
/// optimum) so one bad cell does not sink the whole panel.
fn or_nan(r: aloha_capture::Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

fn sweep<F>(x_name: &str, xs: &[f64], labels: Vec<String>, f: F) -> CliResult<Table>
where
    F: Fn(f64) -> CliResult<Vec<f64>> + Sync + Send,
{
    let rows = Exec::default().map(xs, |&x| f(x));
    let mut table = Table::new(x_name, labels);
    for (x, row) in xs.iter().zip(rows) {
        let mut r = vec![*x];
        r.extend(row?);
        table.push(r);
    }
    Ok(table)
}

fn fig3a() -> CliResult<Table> {
    let snrs = [0.0, 10.0, 20.0];
    let labels = snrs.iter().map(|d| format!("snr_db_{d}")).collect();
    sweep("mu", &logspace(1e-3, 1e3, 121), labels, |mu| {
        Ok(snrs
            .iter()
            .map(|&d| or_nan(max_throughput_value(N, mu, db_to_linear(d))))
            .collect())
    })
}

fn fig3b() -> CliResult<Table> {
    let mus = [0.01, 0.5, 1.0, 10.0];
    let labels = mus.iter().map(|m| format!("mu_{m}")).collect();
    sweep("snr_db", &linspace(-30.0, 30.0, 121), labels, |db| {
        Ok(mus
            .iter()
            .map(|&mu| or_nan(max_throughput_value(N, mu, db_to_linear(db))))
            .collect())
    })
}

fn fig4a() -> CliResult<Table> {
    let mut labels: Vec<String> = NS.iter().map(|n| format!("mu_star_n{n}")).collect();
    labels.extend(NS.iter().map(|n| format!("mu_low_approx_n{n}")));
    labels.push("mu_high_approx".into());
    sweep("snr_db", &linspace(-10.0, 40.0, 101), labels, |db| {
        let rho = db_to_linear(db);
        let mut row: Vec<f64> = NS
            .iter()
            .map(|&n| or_nan(max_sum_rate(n, rho).map(|o| o.mu_star)))
            .collect();
        let approx: Vec<(f64, f64)> = NS
            .iter()
            .map(|&n| approx_optimal_mu(n, rho))
            .collect::<Result<_, _>>()?;
        row.extend(approx.iter().map(|a| a.0));
        row.push(approx[0].1);
        Ok(row)
    })
}

fn fig4b() -> CliResult<Table> {
    let labels = NS.iter().map(|n| format!("n{n}")).collect();
    sweep("snr_db", &linspace(-10.0, 40.0, 101), labels, |db| {
        let rho = db_to_linear(db);
        Ok(NS
            .iter()
            .map(|&n| or_nan(max_sum_rate(n, rho).map(|o| o.lambda_max)))
            .collect())
    })
}

fn fig5a() -> CliResult<Table> {
    let mut labels: Vec<String> = NS.iter().map(|n| format!("n{n}")).collect();
    labels.push("high_snr_approx".into());
    sweep("snr_db", &linspace(0.0, 50.0, 101), labels, |db| {
        let rho = db_to_linear(db);
        let mut row: Vec<f64> = NS
            .iter()
            .map(|&n| or_nan(max_sum_rate(n, rho).map(|o| o.capacity)))
            .collect();
        row.push(approx_sum_rate(N, rho)?.high_snr);
        Ok(row)
    })
}

fn fig5b() -> CliResult<Table> {
    let ns = [10usize, 50, 200, 1000];
    let mut labels: Vec<String> = ns.iter().map(|n| format!("n{n}")).collect();
    labels.extend(ns.iter().map(|n| format!("low_snr_approx_n{n}")));
    sweep("snr_db", &linspace(-20.0, 3.0, 47), labels, |db| {
        let rho = db_to_linear(db);
        let mut row: Vec<f64> = ns
            .iter()
            .map(|&n| or_nan(max_sum_rate(n, rho).map(|o| o.capacity)))
            .collect();
        for &n in &ns {
            row.push(approx_sum_rate(n, rho)?.low_snr);
        }
        Ok(row)
    })
}

struct Q0Setup {
    mu: f64,
    snr_db: f64,
    /// `(label, nodes, schedule shape)` per curve.
    curves: Vec<(String, usize, BackoffSchedule)>,
}

fn q0_setup_a() -> Q0Setup {
    let curves = [0usize, 2, 5]
        .iter()
        .map(|&k| {
            (
                format!("k{k}"),
                N,
                BackoffSchedule::binary_exponential(1.0, k).expect("valid shape"),
            )
        })
        .collect();
    Q0Setup {
        mu: 1.0,
        snr_db: 10.0,
        curves,
    }
}

fn q0_setup_b() -> Q0Setup {
    let curves = [10usize, 50, 100]
        .iter()
        .map(|&n| {
            (
                format!("n{n}"),
                n,
                BackoffSchedule::constant(1.0, 0).expect("valid shape"),
            )
        })
        .collect();
    Q0Setup {
        mu: 0.01,
        snr_db: 0.0,
        curves,
    }
}

/// Analysis (approx mode) and simulation of `p_A` and throughput against q0.
fn q0_panel(setup: &Q0Setup, c: &Common) -> CliResult<(Table, Table)> {
    let qs = logspace(1e-3, 1.0, 25);
    let rho = db_to_linear(setup.snr_db);
    let mut labels = Vec::new();
    for (name, _, _) in &setup.curves {
        labels.push(format!("{name}_analysis"));
        labels.push(format!("{name}_sim"));
    }
    let jobs: Vec<(usize, usize)> = (0..setup.curves.len())
        .flat_map(|ci| (0..qs.len()).map(move |qi| (ci, qi)))
        .collect();
    let results = Exec::default().map(&jobs, |&(ci, qi)| -> CliResult<[f64; 4]> {
        let (_, n, shape) = &setup.curves[ci];
        let config = NetworkConfig::new(*n, rho, setup.mu, shape.with_q0(qs[qi])?)?;
        let (pa, thr) = match solve_homogeneous(&config, &SolverOptions::approx()) {
            Ok(s) => (s.p, s.network_throughput(*n)),
            Err(_) => (f64::NAN, f64::NAN),
        };
        let sim = sim_config(c, point_seed(c.seed, ci, qi))?;
        let report = replicate(&SimNetwork::homogeneous(&config)?, &sim, Exec::Sequential)?;
        Ok([pa, report.p_hat, thr, report.throughput])
    });
    let mut pa = Table::new("q0", labels.clone());
    let mut thr = Table::new("q0", labels);
    let width = setup.curves.len();
    let mut pa_rows = vec![vec![f64::NAN; 2 * width + 1]; qs.len()];
    let mut thr_rows = pa_rows.clone();
    for (&(ci, qi), r) in jobs.iter().zip(results) {
        let r = r?;
        pa_rows[qi][0] = qs[qi];
        thr_rows[qi][0] = qs[qi];
        pa_rows[qi][1 + 2 * ci] = r[0];
        pa_rows[qi][2 + 2 * ci] = r[1];
        thr_rows[qi][1 + 2 * ci] = r[2];
        thr_rows[qi][2 + 2 * ci] = r[3];
    }
    for (a, b) in pa_rows.into_iter().zip(thr_rows) {
        pa.push(a);
        thr.push(b);
    }
    Ok((pa, thr))
}

fn point_seed(base: u64, curve: usize, point: usize) -> u64 {
    base.wrapping_add((curve as u64) << 32 | point as u64)
}

/// Sum rate against the threshold with q0 set to its throughput optimum for
/// each threshold; analysis plus simulation.
fn fig8(c: &Common) -> CliResult<Table> {
    let snrs = [0.0, 10.0, 20.0];
    let mus = logspace(1e-3, 1e2, 51);
    let mut labels = Vec::new();
    for d in snrs {
        labels.push(format!("snr_db_{d}_analysis"));
        labels.push(format!("snr_db_{d}_sim"));
    }
    let shape = BackoffSchedule::constant(1.0, 0)?;
    let jobs: Vec<(usize, usize)> = (0..snrs.len())
        .flat_map(|si| (0..mus.len()).map(move |mi| (si, mi)))
        .collect();
    let results = Exec::default().map(&jobs, |&(si, mi)| -> CliResult<(f64, f64)> {
        let (mu, rho) = (mus[mi], db_to_linear(snrs[si]));
        let analysis = sum_rate_objective(N, mu, rho)?;
        let schedule = max_throughput(N, mu, rho, &shape)?.schedule(&shape)?;
        let config = NetworkConfig::new(N, rho, mu, schedule)?;
        let sim = sim_config(c, point_seed(c.seed, si, mi))?;
        let report = replicate(&SimNetwork::homogeneous(&config)?, &sim, Exec::Sequential)?;
        Ok((analysis, report.sum_rate))
    });
    let mut rows: Vec<Vec<f64>> = mus
        .iter()
        .map(|&mu| {
            let mut r = vec![f64::NAN; 2 * snrs.len() + 1];
            r[0] = mu;
            r
        })
        .collect();
    for (&(si, mi), r) in jobs.iter().zip(results) {
        let (a, s) = r?;
        rows[mi][1 + 2 * si] = a;
        rows[mi][2 + 2 * si] = s;
    }
    let mut table = Table::new("mu", labels);
    for r in rows {
        table.push(r);
    }
    Ok(table)
}

/// Two groups of 25 nodes with the mean SNR held fixed while the ratio of
/// the group SNRs grows; K = 0.
fn fig9() -> CliResult<Table> {
    let means = [0.0, 10.0, 15.0, 20.0];
    let labels = means.iter().map(|d| format!("mean_snr_db_{d}")).collect();
    let shape = BackoffSchedule::constant(1.0, 0)?;
    let search = HeteroSearch {
        exec: Exec::Sequential,
        ..HeteroSearch::default()
    };
    sweep("ratio_db", &linspace(0.0, 40.0, 17), labels, |ratio_db| {
        means
            .iter()
            .map(|&d| {
                let spec = GroupSpec::two_group_with_mean(
                    25,
                    25,
                    db_to_linear(d),
                    db_to_linear(ratio_db),
                )?;
                Ok(hetero_max_sum_rate(&spec, &shape, &search)?.sum_rate)
            })
            .collect()
    })
}
