use clap::{Parser, Subcommand};
use psdmanopt::bench::{
    parse_assignment, plot_script, read_config_file, run_experiment, summary_lines, thread_cap, BenchError,
    ConfigError, PlotError, PlotOptions, RunConfig,
};
use std::path::PathBuf;
use std::process::ExitCode;

const CONFIG_ERROR: u8 = 2;
const NOT_CONVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "psdmanopt", version, about = "Riemannian CG on fixed-rank Hermitian PSD matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat key=value config file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one key; repeatable, applied after the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Instance and start seed; same as --set seed=N.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write traces plus a manifest.
    Run,
    /// Write a gnuplot script for trace files or run directories.
    Plot {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
    },
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("config error: {msg}");
    ExitCode::from(CONFIG_ERROR)
}

fn assignments(cli: &Cli) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => Vec::new(),
    };
    for s in &cli.sets {
        let kv = parse_assignment(s).ok_or_else(|| ConfigError::Syntax { line: 0, text: s.clone() })?;
        pairs.push(kv);
    }
    if let Some(seed) = cli.seed {
        pairs.push(("seed".into(), seed.to_string()));
    }
    Ok(pairs)
}

fn run(cli: &Cli) -> ExitCode {
    let cfg = match assignments(cli).and_then(|p| RunConfig::from_pairs(&p)) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    let threads = match thread_cap() {
        Ok(t) => t,
        Err(e) => return config_error(e),
    };
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(format!("runs/{}-{}", cfg.experiment, cfg.seed)));
    let summary = match run_experiment(&cfg, &out, threads) {
        Ok(s) => s,
        Err(BenchError::Config(e)) => return config_error(e),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    if !cli.quiet {
        for line in summary_lines(&cfg, &summary) {
            println!("{line}");
        }
        println!("wrote {}", out.display());
    }
    let failed = summary.non_converged(cfg.experiment);
    if !failed.is_empty() {
        let names: Vec<_> = failed.iter().map(|m| m.as_str()).collect();
        eprintln!("not converged: {}", names.join(", "));
        return ExitCode::from(NOT_CONVERGED);
    }
    ExitCode::SUCCESS
}

fn plot(cli: &Cli, traces: &[PathBuf]) -> ExitCode {
    let mut opts = PlotOptions::default();
    let pairs = match assignments(cli) {
        Ok(p) => p,
        Err(e) => return config_error(e),
    };
    for (k, v) in &pairs {
        if let Err(e) = opts.set(k, v) {
            return config_error(e);
        }
    }
    let script = match plot_script(traces, &opts) {
        Ok(s) => s,
        Err(e @ (PlotError::Option(_) | PlotError::Schema { .. })) => return config_error(e),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let path = dir.join("plot.gp");
    if let Err(e) = std::fs::create_dir_all(&dir).and_then(|_| std::fs::write(&path, script)) {
        eprintln!("error: {}: {e}", path.display());
        return ExitCode::FAILURE;
    }
    if !cli.quiet {
        println!("wrote {} (run: gnuplot {})", path.display(), path.display());
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match &cli.command {
        Command::Run => run(&cli),
        Command::Plot { traces } => plot(&cli, traces),
    }
}
