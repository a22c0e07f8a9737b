use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use picheck::{builtin_config, load_config, output_files, run, to_toml, write_outputs, CliError};

#[derive(Parser)]
#[command(name = "picheck", version, about = "Verify path-independent gate models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a configuration and write the report.
    Run {
        config: PathBuf,
        /// Output directory (overrides output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Random seed (overrides output.seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Reject unknown configuration keys.
        #[arg(long)]
        strict: bool,
    },
    /// Parse and validate a configuration without running it.
    Validate {
        config: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Print the configuration of a built-in model.
    Builtin {
        /// `snap` or `error_transparent`.
        name: String,
        #[arg(long)]
        print_config: bool,
    },
}

fn threads() -> Result<Option<usize>, CliError> {
    match std::env::var("PICHECK_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("PICHECK_THREADS must be a positive integer (got '{v}')"))),
        },
        Err(_) => Ok(None),
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            strict,
        } => {
            let loaded = load_config(&config, strict)?;
            for w in &loaded.warnings {
                eprintln!("warning: {w}");
            }
            let mut cfg = loaded.config;
            if let Some(s) = seed {
                cfg.output.seed = s;
            }
            let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(n) = threads()? {
                pool = pool.num_threads(n);
            }
            let pool = pool.build().map_err(|e| CliError::Usage(e.to_string()))?;
            let report = pool.install(|| run(&cfg, loaded.warnings))?;
            write_outputs(&report, &dir, &output_files(&cfg))?;
            print!("{}", picheck::report::render_text(&report));
            println!("outputs in {}", dir.display());
            Ok(report.exit_code())
        }
        Command::Validate { config, strict } => {
            let loaded = load_config(&config, strict)?;
            for w in &loaded.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "{}: valid ({} checks, model {})",
                config.display(),
                loaded.config.checks.len(),
                loaded.config.model.builtin
            );
            Ok(0)
        }
        Command::Builtin { name, print_config } => {
            let cfg = builtin_config(&name)?;
            if print_config {
                print!("{}", to_toml(&cfg));
            } else {
                println!("builtin '{name}' is available; pass --print-config to emit its configuration");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
