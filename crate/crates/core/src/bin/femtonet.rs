use clap::Parser;
use femtonet::experiment::{run_experiment, ExperimentConfig, ExperimentKind, Format};
use femtonet::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Figure reproductions and validation runs.
#[derive(Parser, Debug)]
#[command(name = "femtonet", version, about)]
struct Cli {
    /// fig2_cdf, fig3_outage, fig4_density, fig5_goodput_delay,
    /// fig6_goodput_interference, fig7_beta_surface or validate_all.
    /// Optional when the config file or manifest names one.
    experiment: Option<String>,

    /// TOML file with flat dotted keys.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Re-run the configuration recorded in a run manifest.
    #[arg(long, conflicts_with = "config")]
    manifest: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Monte Carlo trials per sweep point.
    #[arg(long)]
    trials: Option<u64>,

    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long)]
    format: Option<String>,

    /// Worker threads (overrides FEMTONET_THREADS).
    #[arg(long)]
    threads: Option<usize>,

    /// Override any config key, e.g. --set params.n_b=2.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) => 2,
        Error::Io(_) => 1,
        _ => 4,
    }
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let kind = cli
        .experiment
        .as_deref()
        .map(str::parse::<ExperimentKind>)
        .transpose()?;
    let mut overrides = Vec::new();
    for s in &cli.overrides {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{s}`")))?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    let mut cfg = match &cli.manifest {
        Some(path) => {
            let cfg = ExperimentConfig::from_manifest(path)?;
            if kind.is_some_and(|k| k != cfg.experiment) || !overrides.is_empty() {
                return Err(Error::Config(
                    "a manifest fixes the experiment and its keys".into(),
                ));
            }
            cfg
        }
        None => ExperimentConfig::resolve(kind, cli.config.as_deref(), &overrides)?,
    };
    if let Some(seed) = cli.seed {
        cfg.sweep.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.sweep.trials_per_point = trials;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(f) = &cli.format {
        cfg.format = f.parse::<Format>()?;
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("femtonet: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    match run_experiment(&cfg) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if let Some(reports) = &outcome.reports {
                for r in reports {
                    let verdict = if r.passed { "PASS" } else { "FAIL" };
                    eprintln!("{verdict} criterion {:>2} {}: {}", r.id, r.name, r.detail);
                }
            }
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("femtonet: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
