use std::path::PathBuf;
use std::process::ExitCode;

use ccch_cli::{dispatch, parse_config, Command, EXIT_IO};
use clap::Parser;

/// Simulations and experiments for the cross-coupled Camassa-Holm system.
#[derive(Parser, Debug)]
#[command(name = "ccch", version)]
struct Cli {
    command: Command,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

fn threads_from_env() -> Result<(), String> {
    let Ok(raw) = std::env::var("CCCH_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CCCH_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<i32, String> {
    threads_from_env()?;
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| format!("cannot read {}: {e}", cli.config.display()))?;
    let mut cfg = parse_config(&text, Some(cli.command)).map_err(|e| e.to_string())?;
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    let verbatim = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let report = dispatch(&cfg, verbatim, &cli.out).map_err(|e| e.to_string())?;
    for v in &report.verdicts {
        println!(
            "{:?} {}: measured {:.6e}, predicted {:.6e}",
            v.status, v.name, v.measured, v.predicted
        );
    }
    for f in &report.flagged {
        println!("note: {f}");
    }
    println!("status {:?}, exit {}", report.status, report.exit_code);
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO as u8)
        }
    }
}
