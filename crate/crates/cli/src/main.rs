use std::path::PathBuf;
use std::process::ExitCode;

use alr_cli::{cache_dir, recipe, run_spec_text, CliError, RunSettings, SpecFile, RECIPES};
use anyhow::Context;
use clap::{Parser, Subcommand};

/// Anomalous localized resonance laboratory.
#[derive(Parser, Debug)]
#[command(name = "alr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate an experiment spec (a path, or the name of a bundled recipe).
    Run {
        spec: String,
        /// Output directory for CSV, SVG and the result record.
        #[arg(long, default_value = "alr-out")]
        out: PathBuf,
        /// Recompute even if a cached result exists.
        #[arg(long)]
        no_cache: bool,
        /// Also write a log-log SVG plot per run.
        #[arg(long)]
        svg: bool,
    },
    /// List the bundled recipes.
    Recipes {
        /// Print the JSON of one recipe instead of the list.
        #[arg(long)]
        show: Option<String>,
    },
}

fn read_spec(arg: &str) -> Result<String, CliError> {
    let path = PathBuf::from(arg);
    if path.exists() {
        return Ok(std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?);
    }
    recipe(arg)
        .map(str::to_owned)
        .ok_or_else(|| CliError::Io(anyhow::anyhow!("no spec file or bundled recipe named {arg:?}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { spec, out, no_cache, svg } => {
            let text = read_spec(&spec)?;
            let settings = RunSettings { out_dir: out, cache_dir: cache_dir(), use_cache: !no_cache, svg };
            let outcome = run_spec_text(&text, &settings)?;
            let r = &outcome.record;
            let source = if outcome.cache_hit { "cached" } else { "computed" };
            println!("{} [{}] {source} in {:.3} s", r.spec.name, &r.spec_hash[..12], r.wall_clock_seconds);
            for run in &r.runs {
                let verdict = run.verdict.as_deref().map(|v| format!(", verdict {v}")).unwrap_or_default();
                println!("  {} ({}): {} rows{verdict}", run.name, run.kind.as_str(), run.rows.len());
            }
            for f in &outcome.files {
                println!("  wrote {}", f.display());
            }
            Ok(())
        }
        Command::Recipes { show: Some(name) } => {
            let text = recipe(&name).ok_or_else(|| CliError::Io(anyhow::anyhow!("no bundled recipe named {name:?}")))?;
            print!("{text}");
            Ok(())
        }
        Command::Recipes { show: None } => {
            for (file, text) in RECIPES {
                let spec = SpecFile::parse(text)?;
                let kinds: Vec<&str> = spec.runs.iter().map(|r| r.kind.as_str()).collect();
                println!("{file}: {} [{}]", spec.description, kinds.join(", "));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("alr: {e:#}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
