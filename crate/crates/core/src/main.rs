use channel_damping::config::{preset, ExperimentKind, RunConfig, PRESET_NAMES};
use channel_damping::experiment::{report, run_experiment};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "damping", version, about = "Per-mode shear-flow damping experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run any experiment described by a config or preset.
    Run(RunArgs),
    /// Run an evolution with critical-exponent verdicts.
    Scan(RunArgs),
    /// Evaluate the oscillatory-integral suite.
    Asymptotics(RunArgs),
    /// Summarize every experiment found under the output directory.
    Report {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset.
    #[arg(long)]
    preset: Option<String>,
    /// Output root; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn load(args: &RunArgs, forced: Option<ExperimentKind>) -> Result<RunConfig, String> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => RunConfig::from_file(path).map_err(|e| format!("{}: {e}", path.display()))?,
        (None, Some(name)) => preset(name).map_err(|e| e.to_string())?,
        (None, None) => return Err(format!("pass --config or --preset (one of: {})", PRESET_NAMES.join(", "))),
    };
    if let Some(kind) = forced {
        if cfg.kind != kind && !(kind == ExperimentKind::Scan && cfg.kind == ExperimentKind::Evolve) {
            return Err(format!("config `{}` has kind {:?}, expected {kind:?}", cfg.name, cfg.kind));
        }
        cfg.kind = kind;
        cfg.validate().map_err(|e| e.to_string())?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (args, forced) = match &cli.command {
        Command::Run(a) => (a, None),
        Command::Scan(a) => (a, Some(ExperimentKind::Scan)),
        Command::Asymptotics(a) => (a, Some(ExperimentKind::Asymptotics)),
        Command::Report { out } => {
            return match report(out) {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            };
        }
    };
    let cfg = match load(args, forced) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let out = args.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    match run_experiment(&cfg, &out, args.workers) {
        Ok(a) => {
            for f in &a.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
