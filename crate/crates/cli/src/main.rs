use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sa_noma_cli::output::{write_outputs, Format};
use sa_noma_cli::{checks, presets, runner, CliError, CliResult, LoadedConfig};

#[derive(Parser)]
#[command(
    name = "sa-noma",
    version,
    about = "Signal-alignment MIMO-NOMA outage simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Monte Carlo trials per grid point (overrides the file).
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Base seed (overrides the file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a scenario and write curves plus a summary.
    Run {
        config: PathBuf,
        /// Output directory; defaults to the current directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Check the model invariants on a scenario.
    Verify { config: PathBuf },
    /// Write a shipped scenario into a directory and run it.
    Preset {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run_and_write(config: &LoadedConfig, out: &Path, common: &Common) -> CliResult<()> {
    let report = runner::run(config, common.trials, common.seed)?;
    let paths = write_outputs(
        out,
        &report,
        &config.file,
        common.format,
        rayon::current_num_threads(),
    )?;
    for p in &paths {
        println!("wrote {}", p.display());
    }
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        let names: Vec<_> = failed
            .iter()
            .map(|c| format!("{} ({})", c.name, c.detail))
            .collect();
        Err(CliError::Invariant(names.join("; ")))
    }
}

fn execute(cli: &Cli) -> CliResult<()> {
    if let Some(threads) = cli.common.threads {
        if threads == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Run { config, out } => {
            run_and_write(&LoadedConfig::load(config)?, out, &cli.common)
        }
        Command::Verify { config } => {
            let config = LoadedConfig::load(config)?;
            let results = checks::verify(&config, cli.common.trials, cli.common.seed)?;
            for c in &results {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {}: {}", c.name, c.detail);
            }
            let failed = results.iter().filter(|c| !c.passed).count();
            if failed == 0 {
                println!("all {} checks passed", results.len());
                Ok(())
            } else {
                Err(CliError::Invariant(format!(
                    "{failed} of {} checks failed",
                    results.len()
                )))
            }
        }
        Command::Preset { name, out } => {
            let text = presets::find(name).ok_or_else(|| {
                let known: Vec<_> = presets::names().collect();
                CliError::Validation(format!(
                    "unknown preset `{name}` (known: {})",
                    known.join(", ")
                ))
            })?;
            std::fs::create_dir_all(out)?;
            let path = out.join(format!("{name}.toml"));
            std::fs::write(&path, text)?;
            println!("wrote {}", path.display());
            run_and_write(&LoadedConfig::parse(text)?, out, &cli.common)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
