//! Generates a synthetic study and runs every stage on it.
//!
//!     cargo run --release -p gaborface --example synthetic_study -- /tmp/synth 3 10

use std::path::PathBuf;

use gaborface::pipeline::{self, Stage};
use gaborface::synth::{generate, write_study, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "synthetic-study".into()));
    let expressers = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2);
    let images_per_expresser = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);
    let spec = SyntheticSpec {
        expressers,
        images_per_expresser,
        ..SyntheticSpec::default()
    };
    let config_path = write_study(&dir, &generate(&spec))?;
    let config = pipeline::load_study_config(&config_path)?;
    let report = pipeline::run(&config, Stage::Study, None)?;
    if let Some(summary) = &report.summary {
        print!("{}", pipeline::summary_table(summary));
    }
    println!("outputs in {}", config.output_dir.display());
    Ok(())
}
