//! `phonation`: synthetic cohorts, feature extraction and the screening,
//! selection, classification and correlation reports.

use clap::{Args, Parser, Subcommand};
use phonation_core::corpus::ClinicalScore;
use phonation_core::pipeline::{self, FailureClass, PipelineConfig, PipelineError, Scenario};
use phonation_core::selection::Placement;
use phonation_core::synth::{generate_cohort, write_cohort, CohortProfile};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "phonation", version, about = "Vowel phonation analysis pipeline")]
struct Cli {
    /// Worker threads for every parallel stage (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Log progress (-v) or debug detail (-vv).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Pipeline configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed of every forest.
    #[arg(long)]
    seed: Option<u64>,
    /// per-vowel, per-style or all.
    #[arg(long)]
    scenario: Option<Scenario>,
    /// paper (select on all subjects) or nested (select inside each fold).
    #[arg(long = "selection-placement")]
    placement: Option<Placement>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic cohort: WAV files, metadata.csv and truth.json.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        n_pd: usize,
        #[arg(long, default_value_t = 20)]
        n_hc: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cohort profile overrides (TOML).
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Extract features and write the feature matrices.
    Extract(RunArgs),
    /// Per-feature statistics and per-group winners.
    Screen(RunArgs),
    /// mRMR and SFFS on the scenario's matrices.
    Select(RunArgs),
    /// Leave-one-out classification of the scenario's matrices.
    Classify(RunArgs),
    /// Partial correlations of features with clinical scores (PD only).
    Correlate {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated scores, e.g. updrs3,fog. Default: all present.
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<ClinicalScore>>,
    },
    /// Collect the reports written so far into summary.txt.
    Report(RunArgs),
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if !p.as_os_str().is_empty() && p.is_relative() {
        *p = base.join(&*p);
    }
}

/// Parse the TOML config, resolve relative paths against its directory and
/// apply command-line overrides.
fn load_config(args: &RunArgs) -> Result<PipelineConfig, PipelineError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| PipelineError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg: PipelineConfig =
        toml::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", args.config.display())))?;
    let base = args.config.parent().unwrap_or(Path::new(".")).to_path_buf();
    resolve(&base, &mut cfg.corpus);
    resolve(&base, &mut cfg.metadata);
    resolve(&base, &mut cfg.output);
    if let Some(m) = cfg.manifest.as_mut() {
        resolve(&base, m);
    }
    cfg.apply_seed(args.seed.unwrap_or(cfg.seed));
    if let Some(s) = args.scenario {
        cfg.scenario = s;
    }
    if let Some(p) = args.placement {
        cfg.placement = p;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn synth(out: &Path, n_pd: usize, n_hc: usize, seed: u64, profile: Option<&Path>) -> Result<(), PipelineError> {
    let profile = match profile {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| PipelineError::Config(format!("cannot read {}: {e}", p.display())))?;
            toml::from_str::<CohortProfile>(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", p.display())))?
        }
        None => CohortProfile::default(),
    };
    let cohort = generate_cohort(n_pd, n_hc, &profile, seed)?;
    write_cohort(&cohort, out)?;
    println!(
        "wrote {} recordings of {} speakers to {}",
        cohort.recordings.len(),
        cohort.records.len(),
        out.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(PipelineError::Config("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| PipelineError::Config(format!("cannot start {n} workers: {e}")))?;
    }
    let text = match cli.command {
        Command::Synth { out, n_pd, n_hc, seed, profile } => return synth(&out, n_pd, n_hc, seed, profile.as_deref()),
        Command::Extract(args) => pipeline::extract(&load_config(&args)?)?.report.render_text(),
        Command::Screen(args) => pipeline::screen(&load_config(&args)?)?.report.render_text(),
        Command::Select(args) => pipeline::select(&load_config(&args)?)?.1.render_text(),
        Command::Classify(args) => pipeline::classify(&load_config(&args)?)?.1.render_text(),
        Command::Correlate { run, targets } => pipeline::correlate(&load_config(&run)?, targets.as_deref())?
            .report
            .render_text(),
        Command::Report(args) => pipeline::summarize(&load_config(&args)?)?,
    };
    print!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match std::panic::catch_unwind(move || run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.class().exit_code() as u8)
        }
        Err(_) => ExitCode::from(FailureClass::Internal.exit_code() as u8),
    }
}
