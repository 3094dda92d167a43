use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use mmshare::{emit, load_config, run, Format, Mode, RunConfig};

/// Coverage, rate and licensing studies of a primary mmWave operator sharing
/// its band with an interference-capped secondary operator.
#[derive(Parser, Debug)]
#[command(name = "mmshare", version)]
struct Cli {
    #[arg(value_enum)]
    mode: Mode,
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "MMSHARE_THREADS", default_value_t = 0)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // 2 is reserved for a failed validation.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut settings = match load_config(&cli.config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.config.display());
            return ExitCode::from(1);
        }
    };
    if let Some(seed) = cli.seed {
        settings.seed = seed;
    }
    let config = RunConfig { mode: cli.mode, settings, threads: cli.threads };
    let record = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    match emit(&record, &cli.out, cli.format) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    }
    if record.validation_passed == Some(false) {
        eprintln!("validation failed: coverage gap exceeds tolerance");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
