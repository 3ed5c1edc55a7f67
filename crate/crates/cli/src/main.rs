//! `aloha`: command-line front end for the aloha-capture toolkit.

mod args;
mod figures;
mod output;

use std::fmt;
use std::process::ExitCode;

use clap::Parser;

use aloha_capture::fixed_point::{group_node_throughput, network_throughput, solve_heterogeneous};
use aloha_capture::grid::{linspace, logspace};
use aloha_capture::model::{db_to_linear, rate_to_threshold, throughput_at, ThroughputPoint};
use aloha_capture::optimize::{
    approx_optimal_mu, approx_sum_rate, fixed_q_analysis, fixed_q_optimum, hetero_max_sum_rate,
    max_sum_rate, max_throughput, max_throughput_value, HeteroSearch, SnrRegime, ThroughputBranch,
};
use aloha_capture::{
    replicate, solve_homogeneous, BackoffSchedule, Exec, Group, GroupSpec, NetworkConfig,
    SimConfig, SimNetwork, SimReport, SolverMode, SolverOptions,
};

use args::{Cli, Command, Common, Sweep};
use output::{write_file, Summary, Table};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Model(aloha_capture::Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<aloha_capture::Error> for CliError {
    fn from(e: aloha_capture::Error) -> Self {
        CliError::Model(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Model(e) if e.is_input_error() => EXIT_USAGE,
            CliError::Model(_) | CliError::Io(_) => EXIT_NUMERIC,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let args = match args::expand_config(raw) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        // help/version print and exit 0; real parse errors exit 2
        Err(e) => e.exit(),
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Solve(c) => emit(&c, &cmd_solve(&c)?),
        Command::Throughput { common, sweep } => match sweep {
            Some(s) => emit_table(&common, &throughput_sweep(&common, s)?),
            None => emit(&common, &cmd_throughput(&common)?),
        },
        Command::OptimizeQ(c) => emit(&c, &cmd_optimize_q(&c)?),
        Command::OptimizeMu(c) => emit(&c, &cmd_optimize_mu(&c)?),
        Command::FixedQ(c) => emit(&c, &cmd_fixed_q(&c)?),
        Command::Hetero { common, groups } => emit(&common, &cmd_hetero(&common, &groups.0)?),
        Command::Simulate { common, groups } => emit(
            &common,
            &cmd_simulate(&common, groups.as_ref().map(|g| g.0.as_slice()))?,
        ),
        Command::Figures { id, common } => figures::run(&id, &common),
    }
}

fn emit(c: &Common, summary: &Summary) -> CliResult<()> {
    print!("{}", summary.render());
    if let Some(path) = &c.out {
        write_file(path, &summary.to_csv())?;
    }
    Ok(())
}

fn emit_table(c: &Common, table: &Table) -> CliResult<()> {
    let csv = table.to_csv();
    print!("{csv}");
    if let Some(path) = &c.out {
        write_file(path, &csv)?;
    }
    Ok(())
}

fn rho(c: &Common) -> f64 {
    db_to_linear(c.snr_db)
}

fn threshold(c: &Common) -> CliResult<f64> {
    match (c.mu, c.rate) {
        (Some(mu), _) => Ok(mu),
        (None, Some(rate)) => Ok(rate_to_threshold(rate)?),
        (None, None) => Err(CliError::Usage("this command needs --mu or --rate".into())),
    }
}

fn q0(c: &Common) -> CliResult<f64> {
    c.q0.ok_or_else(|| CliError::Usage("this command needs --q0".into()))
}

fn schedule(c: &Common, q0: f64) -> CliResult<BackoffSchedule> {
    Ok(BackoffSchedule::of_kind(c.backoff.into(), q0, c.k)?)
}

fn network(c: &Common) -> CliResult<NetworkConfig> {
    Ok(NetworkConfig::new(
        c.n,
        rho(c),
        threshold(c)?,
        schedule(c, q0(c)?)?,
    )?)
}

fn solver(c: &Common) -> SolverOptions {
    SolverOptions::default().with_mode(c.mode.into())
}

fn mode_name(mode: SolverMode) -> &'static str {
    match mode {
        SolverMode::Exact => "exact",
        SolverMode::Approx => "approx",
    }
}

fn describe(s: &mut Summary, c: &Common, config: &NetworkConfig) {
    s.num("n", c.n as f64)
        .num("snr_db", c.snr_db)
        .num("mu", config.threshold)
        .num("rate", config.rate())
        .num("q0", config.schedule.q0())
        .num("k", c.k as f64)
        .text("backoff", format!("{:?}", c.backoff).to_lowercase());
}

fn cmd_solve(c: &Common) -> CliResult<Summary> {
    let config = network(c)?;
    let state = solve_homogeneous(&config, &solver(c))?;
    let point = ThroughputPoint::new(state.network_throughput(c.n), config.threshold);
    let mut s = Summary::new();
    describe(&mut s, c, &config);
    s.text("mode", mode_name(state.mode))
        .num("p_a", state.p)
        .num("service_rate", state.service_rate())
        .num("attempt_rate", config.schedule.attempt_rate(state.p))
        .num("throughput", point.lambda_out)
        .num("sum_rate", point.sum_rate)
        .num("residual", state.residual);
    Ok(s)
}

fn cmd_throughput(c: &Common) -> CliResult<Summary> {
    let config = network(c)?;
    let state = solve_homogeneous(&config, &solver(c))?;
    let point = throughput_at(state.p, config.threshold, config.snr)?;
    let best = max_throughput_value(c.n, config.threshold, config.snr)?;
    let mut s = Summary::new();
    describe(&mut s, c, &config);
    s.text("mode", mode_name(state.mode))
        .num("p_a", state.p)
        .num("throughput", point.lambda_out)
        .num("sum_rate", point.sum_rate)
        .num("lambda_max", best)
        .num("efficiency", point.lambda_out / best);
    Ok(s)
}

fn throughput_sweep(c: &Common, sweep: Sweep) -> CliResult<Table> {
    let mu = threshold(c)?;
    let rho = rho(c);
    let qs = if sweep.log {
        logspace(sweep.start, sweep.stop, sweep.steps)
    } else {
        linspace(sweep.start, sweep.stop, sweep.steps)
    };
    let options = solver(c);
    let rows = Exec::default().map(&qs, |&q0| -> CliResult<Vec<f64>> {
        let config = NetworkConfig::new(c.n, rho, mu, schedule(c, q0)?)?;
        let state = solve_homogeneous(&config, &options)?;
        let point = throughput_at(state.p, mu, rho)?;
        Ok(vec![q0, state.p, point.lambda_out, point.sum_rate])
    });
    let mut table = Table::new("q0", ["p_a", "throughput", "sum_rate"].map(String::from));
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

fn cmd_optimize_q(c: &Common) -> CliResult<Summary> {
    let mu = threshold(c)?;
    let shape = schedule(c, 1.0)?;
    let opt = max_throughput(c.n, mu, rho(c), &shape)?;
    let mut s = Summary::new();
    s.num("n", c.n as f64)
        .num("snr_db", c.snr_db)
        .num("mu", mu)
        .num("k", c.k as f64);
    s.text(
        "branch",
        match opt.branch {
            ThroughputBranch::Achievable => "achievable",
            ThroughputBranch::Saturating => "saturating (q_i = 1)",
        },
    );
    s.num("lambda_max", opt.lambda_max);
    s.num(
        "sum_rate",
        ThroughputPoint::new(opt.lambda_max, mu).sum_rate,
    );
    if let Some(q0) = opt.q0_hat {
        s.num("q0_hat", q0);
    }
    for (i, q) in opt.q_star.iter().enumerate() {
        s.num(format!("q_star_{i}"), *q);
    }
    Ok(s)
}

fn cmd_optimize_mu(c: &Common) -> CliResult<Summary> {
    let rho = rho(c);
    let opt = max_sum_rate(c.n, rho)?;
    let (mu_l, mu_h) = approx_optimal_mu(c.n, rho)?;
    let approx = approx_sum_rate(c.n, rho)?;
    let mut s = Summary::new();
    s.num("n", c.n as f64)
        .num("snr_db", c.snr_db)
        .text(
            "regime",
            match opt.regime {
                SnrRegime::High => "high",
                SnrRegime::Low => "low",
            },
        )
        .num("rho_0", opt.rho_0)
        .num("capacity", opt.capacity)
        .num("mu_star", opt.mu_star)
        .num("lambda_max", opt.lambda_max)
        .num("mu_approx_low", mu_l)
        .num("mu_approx_high", mu_h)
        .num("capacity_approx_low", approx.low_snr)
        .num("capacity_approx_high", approx.high_snr);
    Ok(s)
}

fn cmd_fixed_q(c: &Common) -> CliResult<Summary> {
    let mu = threshold(c)?;
    let q = q0(c)?;
    let pt = fixed_q_analysis(c.n, q, mu, rho(c))?;
    let mut s = Summary::new();
    s.num("n", c.n as f64)
        .num("snr_db", c.snr_db)
        .num("mu", mu)
        .num("q", q)
        .num("p_a", pt.p_a)
        .num("throughput", pt.throughput)
        .num("sum_rate", pt.sum_rate);
    // the optimum only exists for n q >= e; it is extra information here
    if let Ok(opt) = fixed_q_optimum(c.n, q) {
        s.num("mu_star_large_snr", opt.mu_star)
            .num("max_sum_rate_large_snr", opt.limit_max_rate)
            .num("large_n_limit", opt.large_n_limit);
    }
    Ok(s)
}

fn group_spec(groups: &[(usize, f64)]) -> CliResult<GroupSpec> {
    if groups.is_empty() {
        return Err(CliError::Usage(
            "--groups needs at least one nodes:snr_db pair".into(),
        ));
    }
    Ok(GroupSpec::new(
        groups
            .iter()
            .map(|&(nodes, db)| Group {
                nodes,
                snr: db_to_linear(db),
            })
            .collect(),
    )?)
}

fn cmd_hetero(c: &Common, groups: &[(usize, f64)]) -> CliResult<Summary> {
    let spec = group_spec(groups)?;
    let mut s = Summary::new();
    s.num("groups", spec.len() as f64)
        .num("nodes", spec.total_nodes() as f64)
        .num("mean_snr", spec.mean_snr());
    if c.mu.is_none() && c.rate.is_none() {
        let search = HeteroSearch {
            solver: solver(c),
            ..HeteroSearch::default()
        };
        let opt = hetero_max_sum_rate(&spec, &schedule(c, 1.0)?, &search)?;
        s.num("capacity", opt.sum_rate)
            .num("mu_star", opt.mu_star)
            .num("q0_star", opt.q0_star)
            .num("throughput", opt.throughput);
        for (i, p) in opt.p.iter().enumerate() {
            s.num(format!("p_a_{i}"), *p);
        }
        for (i, (mu, rate)) in opt.competing_peaks.iter().enumerate() {
            s.num(format!("competing_mu_{i}"), *mu)
                .num(format!("competing_sum_rate_{i}"), *rate);
        }
        return Ok(s);
    }
    let mu = threshold(c)?;
    let sched = schedule(c, q0(c)?)?;
    let state = solve_heterogeneous(&spec, mu, &sched, &solver(c))?;
    let total = network_throughput(&spec, &state.p, &sched)?;
    s.num("mu", mu)
        .num("q0", sched.q0())
        .text("mode", mode_name(state.mode));
    for (i, p) in state.p.iter().enumerate() {
        s.num(format!("p_a_{i}"), *p).num(
            format!("node_throughput_{i}"),
            group_node_throughput(*p, &sched)?,
        );
    }
    s.num("throughput", total)
        .num("sum_rate", ThroughputPoint::new(total, mu).sum_rate)
        .num("sweeps", state.sweeps as f64)
        .num("residual", state.residual);
    Ok(s)
}

pub fn sim_config(c: &Common, seed: u64) -> CliResult<SimConfig> {
    let mut sim = SimConfig::new(c.slots, seed).with_replications(c.reps);
    if let Some(w) = c.warmup {
        sim = sim.with_warmup(w);
    }
    sim.validate()?;
    Ok(sim)
}

fn cmd_simulate(c: &Common, groups: Option<&[(usize, f64)]>) -> CliResult<Summary> {
    let mu = threshold(c)?;
    let sched = schedule(c, q0(c)?)?;
    let (net, config) = match groups {
        Some(g) => (SimNetwork::grouped(&group_spec(g)?, mu, &sched)?, None),
        None => {
            let config = NetworkConfig::new(c.n, rho(c), mu, sched.clone())?;
            (SimNetwork::homogeneous(&config)?, Some(config))
        }
    };
    let sim = sim_config(c, c.seed)?;
    let report = replicate(&net, &sim, Exec::default())?;
    let mut s = Summary::new();
    s.num("nodes", net.nodes() as f64)
        .num("mu", mu)
        .num("q0", sched.q0())
        .num("k", c.k as f64);
    s.num("slots", sim.slots as f64)
        .num("warmup", sim.warmup as f64)
        .num("seed", sim.seed as f64)
        .num("reps", report.replications as f64);
    sim_summary(&mut s, &report);
    if let Some(config) = config {
        // analytic reference for the same configuration
        let exact = solve_homogeneous(&config, &SolverOptions::exact())?;
        let approx = solve_homogeneous(&config, &SolverOptions::approx())?;
        s.num("p_a_exact", exact.p)
            .num("throughput_exact", exact.network_throughput(c.n))
            .num("p_a_approx", approx.p)
            .num("throughput_approx", approx.network_throughput(c.n));
    }
    Ok(s)
}

fn sim_summary(s: &mut Summary, r: &SimReport) {
    s.num("attempts", r.attempts as f64)
        .num("successes", r.successes as f64)
        .num("p_hat", r.p_hat)
        .num("throughput", r.throughput)
        .num("sum_rate", r.sum_rate)
        .num("p_hat_first_half", r.half_p_hat.0)
        .num("p_hat_second_half", r.half_p_hat.1);
    if let Some(ci) = &r.ci {
        s.num("ci95_p_hat", ci.p_hat)
            .num("ci95_throughput", ci.throughput)
            .num("ci95_sum_rate", ci.sum_rate);
    }
    for (i, g) in r.per_group.iter().enumerate() {
        if r.per_group.len() > 1 {
            s.num(format!("group_{i}_p_hat"), g.p_hat)
                .num(format!("group_{i}_node_throughput"), g.node_throughput);
            if let Some(ci) = &r.ci {
                s.num(
                    format!("group_{i}_ci95_node_throughput"),
                    ci.group_node_throughput[i],
                );
            }
        }
    }
    for (i, counts) in r.per_state.iter().enumerate() {
        let name = if i == 0 {
            "T".to_string()
        } else {
            (i - 1).to_string()
        };
        if let Some(p) = counts.ratio() {
            s.num(format!("p_hat_state_{name}"), p);
        }
    }
    for (k, count) in r.decode_histogram.iter().enumerate() {
        s.num(format!("slots_decoding_{k}"), *count as f64);
    }
}
