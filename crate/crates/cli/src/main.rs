//! Command line front end: dataset generation, experiment runs, ablation
//! summaries, report rendering, and the gradient check.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for operational failures
//! (unreadable files, invalid configurations, failed checks).

use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mmdes_core::attention::{gradient_check, AttentionDims};
use mmdes_core::data::manifest::write_dataset;
use mmdes_core::harness::{configure_threads, run_experiment_with, RunOptions, DEFAULT_SEED};
use mmdes_core::imputation::ImputationMode;
use mmdes_core::{
    generate_synthetic, render_report, render_sensitivity, sensitivity_summary, Config, Modality,
    Report, ReportFormat, SynthConfig,
};

#[derive(Parser)]
#[command(name = "mmdes", version, about = "Dynamic ensemble selection for emotion regression")]
struct Cli {
    /// Worker threads for repetition-level parallelism (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset and write it as a manifest tree.
    Gen(GenArgs),
    /// Run the evaluation grid and write a JSON report.
    Run(RunArgs),
    /// Run the grid and summarize each scenario's drop against `none`.
    Ablate(AblateArgs),
    /// Render an existing report file.
    Report(ReportArgs),
    /// Compare the fusion backward pass against finite differences.
    GradCheck(GradCheckArgs),
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    ReportFormat::from_str(s).map_err(|e| e.to_string())
}

fn parse_scenario(s: &str) -> Result<ImputationMode, String> {
    let mode = match s {
        "none" => ImputationMode::None,
        "zero_audio" => ImputationMode::Zero {
            modality: Modality::Audio,
        },
        "zero_video" => ImputationMode::Zero {
            modality: Modality::Video,
        },
        "mean_audio" => ImputationMode::Mean {
            modality: Modality::Audio,
        },
        "mean_video" => ImputationMode::Mean {
            modality: Modality::Video,
        },
        other => {
            return Err(format!(
                "unknown scenario `{other}` (expected none, zero_audio, zero_video, mean_audio, or mean_video)"
            ))
        }
    };
    Ok(mode)
}

#[derive(Args)]
struct GenArgs {
    /// Output directory for the manifest tree.
    #[arg(long)]
    out: PathBuf,
    /// Synthetic settings as JSON (persons, frames, groups, noise, ...).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Generation seed (overrides MMDES_SEED and the default).
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of persons.
    #[arg(long)]
    persons: Option<usize>,
    /// Override the frames per person.
    #[arg(long)]
    frames: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration JSON; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report destination.
    #[arg(long, default_value = "report.json")]
    out: PathBuf,
    /// Also print the report to stdout (json, csv, or markdown).
    #[arg(long, value_parser = parse_format)]
    print: Option<ReportFormat>,
    /// Experiment seed (overrides MMDES_SEED and the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Write first-repetition combination weights to this CSV.
    #[arg(long)]
    dump_weights: Option<PathBuf>,
}

#[derive(Args)]
struct AblateArgs {
    /// Experiment configuration JSON; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenarios to evaluate (repeatable); `none` is always included.
    #[arg(long = "scenario", value_parser = parse_scenario)]
    scenarios: Vec<ImputationMode>,
    /// Experiment seed (overrides MMDES_SEED and the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output format for the summary table.
    #[arg(long, value_parser = parse_format, default_value = "markdown")]
    format: ReportFormat,
    /// Also write the full report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Report JSON produced by `run`.
    input: PathBuf,
    #[arg(long, value_parser = parse_format, default_value = "markdown")]
    format: ReportFormat,
    /// Destination file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Render the scenario sensitivity summary instead of the score tables.
    #[arg(long)]
    sensitivity: bool,
}

#[derive(Args)]
struct GradCheckArgs {
    /// Independent random trials.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// Central-difference step.
    #[arg(long, default_value_t = 1e-5)]
    epsilon: f64,
    /// Maximum tolerated relative error.
    #[arg(long, default_value_t = 1e-4)]
    threshold: f64,
    /// Audio feature rows.
    #[arg(long, default_value_t = 4)]
    d_a: usize,
    /// Video feature rows.
    #[arg(long, default_value_t = 3)]
    d_v: usize,
    /// Subsequence length.
    #[arg(long, default_value_t = 5)]
    l: usize,
    /// Corrupt one analytic block first, to prove the check can fail.
    #[arg(long, hide = true)]
    corrupt: bool,
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var("MMDES_SEED") {
        Ok(text) => {
            let seed = text
                .trim()
                .parse()
                .with_context(|| format!("MMDES_SEED `{text}` is not an unsigned integer"))?;
            Ok(Some(seed))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(e).context("MMDES_SEED is not valid unicode"),
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<Config> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            Config::from_json(&text).with_context(|| format!("parsing config {}", p.display()))
        }
        None => Ok(Config::default()),
    }
}

fn apply_seed(config: &mut Config, flag: Option<u64>) -> Result<()> {
    if let Some(seed) = flag.or(env_seed()?) {
        config.seed = seed;
    }
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let mut synth: SynthConfig = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", p.display()))?
        }
        None => SynthConfig::default(),
    };
    if let Some(p) = args.persons {
        synth.persons = p;
    }
    if let Some(f) = args.frames {
        synth.frames = f;
    }
    let seed = args.seed.or(env_seed()?).unwrap_or(DEFAULT_SEED);
    let dataset = generate_synthetic::<f64>(&synth, seed)?;
    let manifest = write_dataset(&dataset, &args.out)?;
    println!("{}", manifest.display());
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let mut config = load_config(&args.config)?;
    apply_seed(&mut config, args.seed)?;
    let options = RunOptions {
        dump_weights: args.dump_weights.clone(),
    };
    let report = run_experiment_with(&config, &options)?;
    fs::write(&args.out, report.to_json()?)
        .with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!("wrote {}", args.out.display());
    if let Some(path) = &args.dump_weights {
        eprintln!("wrote {}", path.display());
    }
    if let Some(format) = args.print {
        print!("{}", render_report(&report, format)?);
    }
    Ok(())
}

fn cmd_ablate(args: &AblateArgs) -> Result<()> {
    let mut config = load_config(&args.config)?;
    apply_seed(&mut config, args.seed)?;
    if !args.scenarios.is_empty() {
        let mut scenarios = vec![ImputationMode::None];
        for mode in &args.scenarios {
            if !scenarios.contains(mode) {
                scenarios.push(*mode);
            }
        }
        config.scenarios = scenarios;
    } else if !config.scenarios.contains(&ImputationMode::None) {
        config.scenarios.insert(0, ImputationMode::None);
    }
    let report = run_experiment_with(&config, &RunOptions::default())?;
    if let Some(path) = &args.report {
        fs::write(path, report.to_json()?)
            .with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    let rows = sensitivity_summary(&report)?;
    print!("{}", render_sensitivity(&rows, args.format)?);
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let report = Report::from_json(&text)
        .with_context(|| format!("parsing {}", args.input.display()))?;
    report.validate()?;
    let rendered = if args.sensitivity {
        let rows = sensitivity_summary(&report)?;
        render_sensitivity(&rows, args.format)?
    } else {
        render_report(&report, args.format)?
    };
    match &args.out {
        Some(path) => {
            fs::write(path, rendered).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{rendered}"),
    }
    Ok(())
}

fn cmd_grad_check(args: &GradCheckArgs) -> Result<()> {
    if args.seeds == 0 {
        bail!("--seeds must be >= 1");
    }
    let dims = AttentionDims {
        d_a: args.d_a,
        d_v: args.d_v,
        l: args.l,
    };
    let mut worst: f64 = 0.0;
    let mut failures = 0usize;
    for seed in 0..args.seeds {
        let check = gradient_check::<f64>(dims, seed, args.epsilon, args.corrupt)?;
        let ok = check.max_rel_error < args.threshold;
        if !ok {
            failures += 1;
        }
        worst = worst.max(check.max_rel_error);
        println!(
            "seed {seed}: max relative error {:.3e} {}",
            check.max_rel_error,
            if ok { "ok" } else { "FAIL" }
        );
        if !ok {
            for block in &check.blocks {
                println!("  {:<8} {:.3e}", block.name, block.max_rel_error);
            }
        }
    }
    println!(
        "{} seeds, worst {:.3e}, threshold {:.1e}",
        args.seeds, worst, args.threshold
    );
    if failures > 0 {
        bail!("{failures} of {} gradient checks failed", args.seeds);
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        configure_threads(jobs)?;
    }
    match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::Ablate(args) => cmd_ablate(args),
        Command::Report(args) => cmd_report(args),
        Command::GradCheck(args) => cmd_grad_check(args),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = dispatch(&cli) {
        eprintln!("error: {e:#}");
        std::process::exit(2);
    }
}
