//! `qkdkr`: key rates, noise tolerances, figure data and verification runs
//! for high-dimensional three-state BB84.
//!
//! Exit codes: 0 success, 1 computation or input error, 2 usage error,
//! 3 verification failure.

mod channel_file;
mod error;
mod figure;
mod grid;
mod output;

use std::env;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qkdkr_core::keyrate::{key_rate, noise_tolerance, BoundSelector, ChannelFamily, KeyRateReport, Mode, ProtocolConfig};
use qkdkr_core::oracle::suite::{cases, run_case, summarize, Check, OracleFamily, VerifyOptions};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::figure::{run_figure, FigureName, FigureRequest};
use crate::grid::GridSpec;
use crate::output::num;

#[derive(Parser)]
#[command(name = "qkdkr", version, about = "Key-rate bounds for high-dimensional three-state BB84")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Key rate at a single noise value.
    Keyrate(KeyrateArgs),
    /// Largest noise with a positive key rate.
    Tolerance(ToleranceArgs),
    /// Write the CSV data behind a figure.
    Figure(FigureArgs),
    /// Check the analytic formulas against explicit attacks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Partial,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundArg {
    Winter,
    Lemma,
    Best,
}

#[derive(Debug, Clone)]
enum ChannelArg {
    Depolarizing,
    AmpDamping,
    File(PathBuf),
}

fn parse_channel_arg(s: &str) -> Result<ChannelArg, String> {
    match s {
        "depolarizing" => Ok(ChannelArg::Depolarizing),
        "amp-damping" => Ok(ChannelArg::AmpDamping),
        _ => match s.strip_prefix("file:") {
            Some(p) if !p.is_empty() => Ok(ChannelArg::File(PathBuf::from(p))),
            _ => Err(format!("expected depolarizing, amp-damping or file:PATH, got `{s}`")),
        },
    }
}

#[derive(Args)]
struct ProtocolArgs {
    /// Dimension D. Taken from the file for `file:` channels.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, value_enum, default_value = "full")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "winter")]
    bound: BoundArg,
    /// depolarizing, amp-damping or file:PATH (JSON).
    #[arg(long, value_parser = parse_channel_arg, default_value = "depolarizing")]
    channel: ChannelArg,
}

#[derive(Args)]
struct KeyrateArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Noise parameter: q for depolarizing, p for amplitude damping. Omit for
    /// file channels.
    #[arg(long)]
    noise: Option<f64>,
    /// Print a CSV header and row instead of key=value pairs.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct ToleranceArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(value_enum)]
    name: FigureName,
    /// Noise grid start:stop:step (stop inclusive). Default: 400 uniform
    /// points over the family's range.
    #[arg(long)]
    grid: Option<GridSpec>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// fig1 only: CSV with columns label,noise,key_rate copied into one
    /// extra file per label.
    #[arg(long)]
    overlay: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Depolarizing,
    AmpDamping,
    Both,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random attacks per (dimension, family).
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4, 5, 6])]
    dims: Vec<usize>,
    #[arg(long, value_enum, default_value = "both")]
    family: FamilyArg,
    /// Random Hermitian pairs for the Horn check. Default: 20 × trials.
    #[arg(long)]
    horn_pairs: Option<usize>,
}

fn build_config(p: &ProtocolArgs) -> CliResult<ProtocolConfig> {
    let (dim, family) = match &p.channel {
        ChannelArg::File(path) => {
            let model = channel_file::read_channel_file(path)?;
            if let Some(d) = p.dim.filter(|d| *d != model.dim()) {
                return Err(CliError::usage(format!("--dim {d} disagrees with dim {} in {}", model.dim(), path.display())));
            }
            (model.dim(), ChannelFamily::fixed(model))
        }
        builtin => {
            let dim = p.dim.ok_or_else(|| CliError::usage("--dim is required"))?;
            let family = match builtin {
                ChannelArg::AmpDamping => ChannelFamily::AmplitudeDamping,
                _ => ChannelFamily::Depolarizing,
            };
            (dim, family)
        }
    };
    let mode = match p.mode {
        ModeArg::Full => Mode::Full,
        ModeArg::Partial => Mode::Partial,
    };
    let bound = match p.bound {
        BoundArg::Winter => BoundSelector::Winter,
        BoundArg::Lemma => BoundSelector::LemmaD2,
        BoundArg::Best => BoundSelector::Best,
    };
    ProtocolConfig::new(dim, mode, bound, family).map_err(|e| CliError::usage(e.to_string()))
}

fn config_pairs(cfg: &ProtocolConfig) -> Vec<(&'static str, String)> {
    vec![
        ("dim", cfg.dim().to_string()),
        ("mode", cfg.mode().name().to_owned()),
        ("bound", cfg.bound().name().to_owned()),
        ("channel", cfg.family().name().to_owned()),
    ]
}

fn print_pairs(pairs: &[(&str, String)], csv: bool) {
    if csv {
        let keys: Vec<&str> = pairs.iter().map(|(k, _)| *k).collect();
        let vals: Vec<&str> = pairs.iter().map(|(_, v)| v.as_str()).collect();
        println!("{}", keys.join(","));
        println!("{}", vals.join(","));
    } else {
        let line: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("{}", line.join(" "));
    }
}

fn report_pairs(r: &KeyRateReport) -> Vec<(&'static str, String)> {
    vec![
        ("noise", num(r.noise)),
        ("epsilon", num(r.epsilon)),
        ("delta_bound", num(r.delta_bound)),
        ("delta_kind", r.bound_used.name().to_owned()),
        ("hbx", num(r.hbx_term)),
        ("leak_ec", num(r.leak_ec)),
        ("key_rate", num(r.key_rate)),
        ("positive", r.positive().to_string()),
    ]
}

fn cmd_keyrate(args: &KeyrateArgs) -> CliResult<()> {
    let cfg = build_config(&args.protocol)?;
    let noise = match (&args.protocol.channel, args.noise) {
        (ChannelArg::File(_), None) => 0.0,
        (ChannelArg::File(_), Some(_)) => return Err(CliError::usage("--noise does not apply to file channels")),
        (_, Some(q)) => q,
        (_, None) => return Err(CliError::usage("--noise is required")),
    };
    let report = key_rate(&cfg, noise)?;
    let mut pairs = config_pairs(&cfg);
    pairs.extend(report_pairs(&report));
    print_pairs(&pairs, args.csv);
    Ok(())
}

fn cmd_tolerance(args: &ToleranceArgs) -> CliResult<()> {
    if matches!(args.protocol.channel, ChannelArg::File(_)) {
        return Err(CliError::usage("tolerance needs a noise family, not a fixed channel file"));
    }
    let cfg = build_config(&args.protocol)?;
    let t = noise_tolerance(&cfg)?;
    if !t.positive_at_zero {
        eprintln!("warning: key rate is not positive at zero noise");
    }
    if t.multiple_crossings {
        eprintln!("warning: key rate becomes positive again above the reported crossing");
    }
    let mut pairs = config_pairs(&cfg);
    pairs.extend([
        ("tolerance", num(t.noise)),
        ("bracket_low", num(t.bracket.0)),
        ("bracket_high", num(t.bracket.1)),
        ("positive_at_zero", t.positive_at_zero.to_string()),
        ("multiple_crossings", t.multiple_crossings.to_string()),
        ("scan_points", t.scan_points.to_string()),
        ("bisection_steps", t.bisection_steps.to_string()),
    ]);
    print_pairs(&pairs, args.csv);
    Ok(())
}

fn cmd_figure(args: &FigureArgs) -> CliResult<()> {
    let req = FigureRequest { name: args.name, grid: args.grid, out_dir: &args.out, overlay: args.overlay.as_deref() };
    for path in run_figure(&req)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    if let Some(d) = args.dims.iter().find(|d| **d < 2) {
        return Err(CliError::usage(format!("--dims entries must be at least 2, got {d}")));
    }
    let mut opts = VerifyOptions::new(args.seed, args.trials);
    opts.dims = args.dims.clone();
    opts.families = match args.family {
        FamilyArg::Depolarizing => vec![OracleFamily::Depolarizing],
        FamilyArg::AmpDamping => vec![OracleFamily::AmplitudeDamping],
        FamilyArg::Both => vec![OracleFamily::Depolarizing, OracleFamily::AmplitudeDamping],
    };
    if let Some(n) = args.horn_pairs {
        opts.horn_pairs = n;
    }
    let cs = cases(&opts);
    let outcomes = cs.par_iter().map(|c| run_case(&opts, c)).collect();
    let report = summarize(&cs, outcomes);

    println!("{:<20} {:>7} {:>7}  worst_excess", "check", "total", "failed");
    for check in Check::ALL {
        if let Some(s) = report.summary(check) {
            println!("{:<20} {:>7} {:>7}  {}", check.name(), s.total, s.failures, num(s.worst_excess));
        }
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for (case, e) in &report.errors {
        println!("error in {case:?}: {e}");
    }
    if report.passed() {
        println!("result: pass");
        Ok(())
    } else {
        println!("result: FAIL");
        let failed: usize = report.summaries.iter().map(|s| s.failures).sum();
        Err(CliError::Verification(format!(
            "{failed} failed checks, {} errored cases",
            report.errors.len()
        )))
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = env::var("QKDKR_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("QKDKR_THREADS must be a non-negative integer, got `{raw}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.command {
        Command::Keyrate(a) => cmd_keyrate(a),
        Command::Tolerance(a) => cmd_tolerance(a),
        Command::Figure(a) => cmd_figure(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
