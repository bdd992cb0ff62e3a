use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ris_core::montecarlo::{
    aggregate, run_experiment, write_aggregate_csv, write_trials_csv, ChannelModelConfig,
    ExperimentKind, ExperimentSpec,
};
use ris_core::ratios::{approx_ratio_arbitrary, approx_ratio_enpq, approx_ratio_npq};
use ris_core::{normalized_performance, solve, ChannelRealization, Method, PhaseSet, RisError};
use serde_json::json;

/// Discrete phase-shift selection for range-limited RIS hardware.
///
/// Angles on the command line are in degrees, except `--phases`, which takes
/// radians. Phase indices in JSON output are 1-based.
#[derive(Parser)]
#[command(name = "ris", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one or more channel realizations and print JSON
    Solve(SolveArgs),
    /// Run a Monte Carlo experiment and print CSV
    Sweep(SweepArgs),
    /// Print approximation ratios
    Ratio(RatioArgs),
}

#[derive(Args)]
struct Alphabet {
    /// Phase range R in degrees (phases equally separated over [-R/2, R/2])
    #[arg(long, requires = "num_phases")]
    phase_range: Option<f64>,
    /// Number of discrete phases K
    #[arg(long, requires = "phase_range")]
    num_phases: Option<usize>,
    /// Explicit alphabet as comma-separated radians in [-pi, pi)
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["phase_range", "num_phases"])]
    phases: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    /// JSON file with {"beta": [...], "alpha": [...]} (index 0 is the direct
    /// link), a JSON array of such objects, or one object per line
    #[arg(long)]
    channels: PathBuf,
    #[command(flatten)]
    alphabet: Alphabet,
    /// npq, enpq, alg1, alg2, oracle or oracle-onoff
    #[arg(long, default_value = "alg2")]
    method: String,
}

#[derive(Args)]
struct SweepArgs {
    /// cdf, perf-vs-n or boost-vs-r
    #[arg(long, default_value = "perf-vs-n")]
    experiment: String,
    /// Comma-separated subset of npq, enpq, alg1, alg2
    #[arg(long, value_delimiter = ',', default_value = "npq,enpq,alg1,alg2")]
    methods: Vec<String>,
    /// Phase ranges in degrees
    #[arg(long, value_delimiter = ',', required = true)]
    phase_range: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    num_phases: Vec<usize>,
    /// Numbers of RIS elements
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// One row per cell instead of one per trial
    #[arg(long)]
    aggregate: bool,
    /// Rician factor (0 = Rayleigh)
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    /// Direct-link amplitude scale (0 = blocked)
    #[arg(long, default_value_t = 1.0)]
    direct_scale: f64,
    /// Single Rayleigh draw per element instead of a BS-RIS-UE product
    #[arg(long)]
    single_hop: bool,
    /// Write CSV here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RatioArgs {
    #[command(flatten)]
    alphabet: Alphabet,
    /// ENPQ ratio instead of NPQ
    #[arg(long)]
    on_off: bool,
    /// Print the ratio for K in {2,3,4,6,8} over R = 1..359 degrees as CSV
    #[arg(long, conflicts_with_all = ["phase_range", "num_phases", "phases"])]
    table: bool,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Budget(String),
    Io(io::Error),
}

impl From<RisError> for Failure {
    fn from(e: RisError) -> Self {
        match e {
            RisError::Budget { .. } => Failure::Budget(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn parse_phases(list: &str) -> Result<Vec<f64>, Failure> {
    list.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Failure::Input(format!("bad phase '{s}': {e}")))
        })
        .collect()
}

fn build_alphabet(a: &Alphabet) -> Result<PhaseSet, Failure> {
    match (&a.phases, a.phase_range, a.num_phases) {
        (Some(list), _, _) => Ok(PhaseSet::new(&parse_phases(list)?)?),
        (None, Some(deg), Some(k)) => Ok(PhaseSet::equally_separated(deg.to_radians(), k)?),
        _ => Err(Failure::Input(
            "give either --phases or both --phase-range and --num-phases".into(),
        )),
    }
}

fn read_channels(path: &PathBuf) -> Result<Vec<ChannelRealization>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let bad = |e: serde_json::Error| Failure::Input(format!("{}: {e}", path.display()));
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return serde_json::from_str(&text).map_err(bad);
    }
    let channels = serde_json::Deserializer::from_str(&text)
        .into_iter::<ChannelRealization>()
        .collect::<Result<Vec<_>, _>>()
        .map_err(bad)?;
    if channels.is_empty() {
        return Err(Failure::Input(format!("{}: no channels", path.display())));
    }
    Ok(channels)
}

fn cmd_solve(args: &SolveArgs) -> Result<(), Failure> {
    let method: Method = args.method.parse()?;
    let set = build_alphabet(&args.alphabet)?;
    let channels = read_channels(&args.channels)?;
    let mut out = BufWriter::new(io::stdout().lock());
    for channel in &channels {
        let res = solve(method, channel, &set)?;
        let beta0 = channel.beta()[0];
        let line = json!({
            "theta_idx": res.config.theta_idx_one_based(),
            "gains": res.config.gains(),
            "objective": res.objective,
            "snr_boost": (beta0 > 0.0).then(|| res.objective / (beta0 * beta0)),
            "normalized_performance": normalized_performance(channel, &set, &res.config)?,
            "events_processed": res.events_processed,
            "complex_additions": res.complex_additions,
        });
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let spec = ExperimentSpec {
        kind: args.experiment.parse::<ExperimentKind>()?,
        methods: args
            .methods
            .iter()
            .map(|m| m.parse())
            .collect::<Result<_, RisError>>()?,
        ranges_deg: args.phase_range.clone(),
        num_phases: args.num_phases.clone(),
        n_values: args.n.clone(),
        trials: args.trials,
        base_seed: args.seed,
    };
    let model = ChannelModelConfig {
        kappa: args.kappa,
        direct_link_scale: args.direct_scale,
        cascade: !args.single_hop,
        ..ChannelModelConfig::new(1)
    };
    let rows = run_experiment(&spec, &model)?;
    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let sink = BufWriter::new(sink);
    if args.aggregate {
        write_aggregate_csv(&aggregate(&rows)?, sink)?;
    } else {
        write_trials_csv(&rows, sink)?;
    }
    Ok(())
}

const TABLE_K: [usize; 5] = [2, 3, 4, 6, 8];

fn cmd_ratio(args: &RatioArgs) -> Result<(), Failure> {
    let ratio = |r: f64, k: usize| {
        if args.on_off {
            approx_ratio_enpq(r, k)
        } else {
            approx_ratio_npq(r, k)
        }
    };
    let mut out = io::stdout().lock();
    if args.table {
        let head: Vec<String> = TABLE_K.iter().map(|k| format!("K{k}")).collect();
        writeln!(out, "R_deg,{}", head.join(","))?;
        for deg in 1..360 {
            let cells: Vec<String> = TABLE_K
                .iter()
                .map(|&k| {
                    ratio((deg as f64).to_radians(), k)
                        .map(|v| format!("{:.6}", v.value()))
                        .unwrap_or_default()
                })
                .collect();
            writeln!(out, "{deg},{}", cells.join(","))?;
        }
        return Ok(());
    }
    let a = &args.alphabet;
    let value = match (&a.phases, a.phase_range, a.num_phases) {
        (Some(list), _, _) => {
            if args.on_off {
                return Err(Failure::Input(
                    "--on-off needs --phase-range and --num-phases".into(),
                ));
            }
            approx_ratio_arbitrary(&PhaseSet::new(&parse_phases(list)?)?)
        }
        (None, Some(deg), Some(k)) => ratio(deg.to_radians(), k)?,
        _ => {
            return Err(Failure::Input(
                "give --phases, --phase-range with --num-phases, or --table".into(),
            ))
        }
    };
    writeln!(out, "{:.6}", value.value())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("RIS_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("ris: cannot set thread count: {e}");
        }
    }
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Ratio(a) => cmd_ratio(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("ris: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("ris: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("ris: {e}");
            ExitCode::FAILURE
        }
    }
}
