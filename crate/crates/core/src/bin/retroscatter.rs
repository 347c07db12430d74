use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use retroscatter::cli::{load_config, run, CliError};

/// Billiard scattering in retroreflecting hollows.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// JSON run config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads; falls back to RETRO_THREADS.
    #[arg(long)]
    threads: Option<usize>,
    /// Write the first trajectories as path CSVs.
    #[arg(long)]
    dump_paths: bool,
}

fn threads(arg: Option<usize>) -> Result<Option<usize>, CliError> {
    if arg.is_some() {
        return Ok(arg);
    }
    match std::env::var("RETRO_THREADS") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| CliError::Config(format!("RETRO_THREADS must be a count, got {s:?}"))),
        Err(_) => Ok(None),
    }
}

fn main_inner(args: Args) -> Result<(), CliError> {
    if let Some(n) = threads(args.threads)? {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    }
    let cfg = load_config(&args.config)?;
    let outcome = run(&cfg, &args.out, args.dump_paths)?;
    println!("{}", outcome.report);
    match outcome.files.as_slice() {
        files if files.len() <= 10 => files.iter().for_each(|f| println!("wrote {}", f.display())),
        files => println!("wrote {} files under {}", files.len(), args.out.display()),
    }
    outcome.into_result().map(|_| ())
}

fn main() -> ExitCode {
    match main_inner(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
