use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use tau_core::cli::{load_config, run_command, COMMANDS};

const EXIT_USAGE: u8 = 2;

/// Verification suites for the proper-time sliced path integral engine.
#[derive(Parser, Debug)]
#[command(name = "tau", version, after_help = commands_help())]
struct Args {
    /// Suite to run.
    command: String,
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Directory for report.json and CSV tables; without it the report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn commands_help() -> String {
    format!("Commands: {}", COMMANDS.join(", "))
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("TAU_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("TAU_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    let cfg = match load_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let start = Instant::now();
    let report = match run_command(&args.command, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    eprintln!("{}: {:.3} s", args.command, start.elapsed().as_secs_f64());
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
    match &args.out {
        Some(dir) => {
            if let Err(e) = report.write(dir) {
                eprintln!("error: cannot write to {}: {e}", dir.display());
                return ExitCode::from(EXIT_USAGE);
            }
        }
        None => print!("{}", report.json_text()),
    }
    ExitCode::from(report.exit_code() as u8)
}
