use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wlsi_cli::{execute, RunOptions, EXIT_ERROR};

/// Run the inequality checks described by a JSON configuration.
#[derive(Debug, Parser)]
#[command(name = "wlsi", version, about)]
struct Args {
    /// Configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Seed for estimator restarts; check `i` uses `seed + i`.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory for report.json, CSVs and tables.
    #[arg(long, default_value = "./out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Treat skipped degenerate members as failures.
    #[arg(long)]
    strict: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = RunOptions { config: args.config, seed: args.seed, out: args.out, jobs: args.jobs, strict: args.strict };
    let report = match execute(&opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    if let Some(e) = &report.error {
        eprintln!("{e}");
    }
    for c in &report.checks {
        let est = c.c_est.map_or("-".to_string(), |v| format!("{v:.6}"));
        println!("{:<24} {:<18} {:<9} C_est={est} members={} skipped={}", c.id, c.kind, format!("{:?}", c.status).to_lowercase(), c.n_members, c.n_skipped);
        if let Some(msg) = &c.error {
            eprintln!("  {msg}");
        }
    }
    for t in &report.tables {
        if let Some(msg) = &t.error {
            eprintln!("table {}: {msg}", t.file);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
