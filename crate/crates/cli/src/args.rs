//! Command-line definitions and config-file expansion.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use aloha_capture::{BackoffKind, SolverMode};

pub const FIGURE_IDS: [&str; 13] = [
    "fig3a",
    "fig3b",
    "fig4a",
    "fig4b",
    "fig5a",
    "fig5b",
    "fig6a",
    "fig6b",
    "fig7a",
    "fig7b",
    "fig8-sumrate",
    "fig9-hetero",
    "all",
];

#[derive(Debug, Parser)]
#[command(
    name = "aloha",
    version,
    about = "Saturated slotted Aloha with SINR capture: analysis, optimization and simulation"
)]
pub struct Cli {
    /// Flat key=value file of default flags; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the steady-state fixed point for one configuration.
    #[command(args_override_self = true)]
    Solve(Common),
    /// Network throughput at one q0, or over a q0 sweep.
    #[command(args_override_self = true)]
    Throughput {
        #[command(flatten)]
        common: Common,
        /// q0 sweep as start:stop:steps[:lin|log].
        #[arg(long, value_parser = parse_sweep)]
        sweep: Option<Sweep>,
    },
    /// Maximum throughput over the backoff parameters for a given threshold.
    #[command(name = "optimize-q", args_override_self = true)]
    OptimizeQ(Common),
    /// Maximum sum rate over the threshold.
    #[command(name = "optimize-mu", args_override_self = true)]
    OptimizeMu(Common),
    /// Every node transmits with the fixed probability given by --q0.
    #[command(name = "fixed-q", args_override_self = true)]
    FixedQ(Common),
    /// Heterogeneous groups: solve at --mu/--q0, or optimize when --mu is absent.
    #[command(args_override_self = true)]
    Hetero {
        #[command(flatten)]
        common: Common,
        /// Groups as nodes:snr_db pairs, e.g. 25:20,25:5.
        #[arg(long, value_parser = parse_groups)]
        groups: Groups,
    },
    /// Slot-level Monte Carlo simulation.
    #[command(args_override_self = true)]
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Simulate heterogeneous groups (nodes:snr_db,...) instead of --n/--snr-db.
        #[arg(long, value_parser = parse_groups)]
        groups: Option<Groups>,
    },
    /// Write CSV data for a figure panel. --out names the output directory.
    #[command(args_override_self = true)]
    Figures {
        #[arg(value_parser = FIGURE_IDS)]
        id: String,
        #[command(flatten)]
        common: Common,
    },
}

pub const SUBCOMMANDS: [&str; 8] = [
    "solve",
    "throughput",
    "optimize-q",
    "optimize-mu",
    "fixed-q",
    "hetero",
    "simulate",
    "figures",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backoff {
    Const,
    Beb,
}

impl From<Backoff> for BackoffKind {
    fn from(b: Backoff) -> Self {
        match b {
            Backoff::Const => BackoffKind::Constant,
            Backoff::Beb => BackoffKind::BinaryExponential,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Approx,
}

impl From<Mode> for SolverMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => SolverMode::Exact,
            Mode::Approx => SolverMode::Approx,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Number of nodes.
    #[arg(long, default_value_t = 50, value_parser = parse_nodes)]
    pub n: usize,
    /// Mean received SNR in dB.
    #[arg(long = "snr-db", default_value_t = 10.0, allow_negative_numbers = true)]
    pub snr_db: f64,
    /// SINR threshold (linear).
    #[arg(long, conflicts_with = "rate", value_parser = parse_positive)]
    pub mu: Option<f64>,
    /// Per-packet rate in bit/s/Hz; sets mu = 2^rate - 1.
    #[arg(long, value_parser = parse_positive)]
    pub rate: Option<f64>,
    /// Initial transmission probability, in (0, 1].
    #[arg(long, value_parser = parse_q0)]
    pub q0: Option<f64>,
    /// Backoff cutoff phase.
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Backoff::Const)]
    pub backoff: Backoff,
    /// Fixed-point equation variant.
    #[arg(long, value_enum, default_value_t = Mode::Approx)]
    pub mode: Mode,
    /// Slots per simulation run, warm-up included.
    #[arg(long, default_value_t = 100_000)]
    pub slots: u64,
    /// Warm-up slots discarded before measuring (default: min(1000, slots/10)).
    #[arg(long)]
    pub warmup: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent replications.
    #[arg(long, default_value_t = 1, value_parser = parse_reps)]
    pub reps: usize,
    /// CSV output file (output directory for `figures`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `(nodes, snr_db)` per group.
#[derive(Debug, Clone, PartialEq)]
pub struct Groups(pub Vec<(usize, f64)>);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub log: bool,
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive and finite, got {v}"))
    }
}

fn parse_q0(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("q0 must lie in (0, 1], got {v}"))
    }
}

fn parse_nodes(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("at least one node is required".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(format!("{e}")),
    }
}

fn parse_reps(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("at least one replication is required".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(format!("{e}")),
    }
}

fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err("expected start:stop:steps[:lin|log]".into());
    }
    let start = parse_q0(parts[0])?;
    let stop = parse_q0(parts[1])?;
    let steps: usize = parts[2].parse().map_err(|e| format!("steps: {e}"))?;
    if steps == 0 {
        return Err("steps must be at least 1".into());
    }
    let log = match parts.get(3).copied() {
        None | Some("lin") => false,
        Some("log") => true,
        Some(other) => return Err(format!("unknown scale {other:?}; use lin or log")),
    };
    Ok(Sweep {
        start,
        stop,
        steps,
        log,
    })
}

fn parse_groups(s: &str) -> Result<Groups, String> {
    s.split(',')
        .map(|g| {
            let (n, snr) = g
                .split_once(':')
                .ok_or_else(|| format!("group {g:?} is not nodes:snr_db"))?;
            let n = parse_nodes(n.trim())?;
            let snr: f64 = snr
                .trim()
                .parse()
                .map_err(|e| format!("group {g:?}: {e}"))?;
            Ok((n, snr))
        })
        .collect::<Result<_, String>>()
        .map(Groups)
}

/// Splice `--key=value` pairs from the config file (if any) in front of the
/// user's own flags, right after the subcommand, so the latter take
/// precedence. `mu` and `rate` from the file are dropped when the command
/// line sets the other one.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text =
        std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let given = |flag: &str| {
        args.iter()
            .any(|a| a == flag || a.starts_with(&format!("{flag}=")))
    };
    let mut extra = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", lineno + 1))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(format!(
                "{path}:{}: nested config files are not supported",
                lineno + 1
            ));
        }
        if (key == "mu" && given("--rate")) || (key == "rate" && given("--mu")) {
            continue;
        }
        extra.push(format!("--{key}={value}"));
    }
    let at = subcommand_index(&args).map_or(args.len(), |i| i + 1);
    let mut out = args[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn subcommand_index(args: &[String]) -> Option<usize> {
    let mut skip_next = false;
    for (i, a) in args.iter().enumerate().skip(1) {
        if skip_next {
            skip_next = false;
            continue;
        }
        if a == "--config" {
            skip_next = true;
            continue;
        }
        if SUBCOMMANDS.contains(&a.as_str()) {
            return Some(i);
        }
    }
    None
}
