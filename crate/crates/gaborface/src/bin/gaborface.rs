use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gaborface::pipeline::{self, Stage};

/// Gabor jet coding of facial expression images against semantic ratings.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// Study file (JSON).
    #[arg(long)]
    config: PathBuf,

    /// Stage to run; `study` runs all of them.
    #[arg(long, value_enum, default_value = "study")]
    stage: Stage,

    /// Output directory, overriding the study file.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads (default: one per core).
    #[arg(long)]
    threads: Option<usize>,

    /// Expressers left out of the summary averages.
    #[arg(long, value_delimiter = ',')]
    exclude: Vec<String>,

    /// Drop fear-labelled images and the fear rating column.
    #[arg(long)]
    no_fear: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    if args.threads == Some(0) {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(1);
    }
    let mut config = match pipeline::load_study_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(out) = args.out {
        config.output_dir = out;
    }
    if let Some(seed) = args.seed {
        config.options.seed = seed;
    }
    if !args.exclude.is_empty() {
        config.options.exclude = args.exclude;
    }
    config.options.no_fear |= args.no_fear;

    match pipeline::run(&config, args.stage, args.threads) {
        Ok(report) => {
            if let Some(summary) = &report.summary {
                print!("{}", pipeline::summary_table(summary));
            }
            if report.any_failed() {
                for stage in &report.stages {
                    for g in stage.failed() {
                        eprintln!(
                            "error: {}: {} failed: {}",
                            stage.stage,
                            g.expresser_id,
                            g.message.as_deref().unwrap_or("")
                        );
                    }
                }
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
