//! Batch front-end: reads a TOML configuration, runs the requested checks
//! and writes a text report plus CSV data.

pub mod checks;
pub mod config;
pub mod error;
pub mod model;
pub mod report;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use checks::{CheckOutcome, Verdict};
pub use config::{builtin_config, load_config, parse_config, to_toml, Loaded, RunConfig};
pub use error::CliError;
pub use report::{write_outputs, OutputFiles, RunReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Runs every check of `config`. Checks run concurrently on the current
/// rayon pool; each draws from its own ChaCha8 stream so the outcome does
/// not depend on scheduling.
pub fn run(config: &RunConfig, warnings: Vec<String>) -> Result<RunReport, CliError> {
    let built = model::build_model(&config.model, &config.numerics)?;
    let seed = config.output.seed;
    let outcomes: Vec<CheckOutcome> = config
        .checks
        .par_iter()
        .enumerate()
        .map(|(index, check)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let start = Instant::now();
            let mut out = checks::run_check(check, index, &built, &config.numerics, &mut rng);
            out.seconds = start.elapsed().as_secs_f64();
            out
        })
        .collect();
    Ok(RunReport {
        version: VERSION,
        model: built.name,
        seed,
        timings: config.output.timings,
        config_echo: to_toml(config),
        warnings,
        outcomes,
    })
}

/// Output file names for `config`.
pub fn output_files(config: &RunConfig) -> OutputFiles {
    OutputFiles {
        report: config.output.report.clone(),
        summary: config.output.summary.clone(),
        check_names: config.checks.iter().map(|c| c.name.clone()).collect(),
    }
}
