//! Experiment harness around `alr-core`: reads a JSON experiment spec,
//! evaluates its runs (η points in parallel, results in grid order), caches
//! the result record by the spec's SHA-256, and writes CSV and optional SVG.

pub mod output;
pub mod run;
pub mod spec;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use run::{PlannedRun, Row, RunRecord};
pub use spec::{Kind, RunSpec, SpecFile, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_GATE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    /// The spec violates a precondition; nothing was computed.
    #[error("validation error: {0}")]
    Validation(String),
    /// A numerical gate (conditioning, truncation, self-convergence) refused
    /// to certify a result.
    #[error("numerical gate failed: {0}")]
    Gate(String),
    #[error(transparent)]
    Io(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Gate(_) => EXIT_GATE,
            CliError::Io(_) => EXIT_IO,
        }
    }

    pub(crate) fn from_core(e: alr_core::Error) -> Self {
        use alr_core::Error as E;
        match e {
            E::IllConditioned { .. } | E::Truncation { .. } | E::NotConverged(_) => CliError::Gate(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

/// Full result of one spec file, as stored in the cache and next to outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub tool_version: String,
    pub spec_hash: String,
    /// The spec exactly as hashed.
    pub spec: SpecFile,
    pub runs: Vec<RunRecord>,
    pub wall_clock_seconds: f64,
}

/// SHA-256 of the canonical spec plus the tool version, in hex.
pub fn spec_hash(spec: &SpecFile) -> String {
    let mut h = Sha256::new();
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    h.update([0u8]);
    h.update(spec.canonical_json().as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// `ALR_CACHE_DIR`, else `$XDG_CACHE_HOME/alr`, else `~/.cache/alr`, else
/// `./.alr-cache`.
pub fn cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os("ALR_CACHE_DIR") {
        return PathBuf::from(dir);
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(dir).join("alr");
    }
    if let Some(home) = std::env::var_os("HOME") {
        return PathBuf::from(home).join(".cache").join("alr");
    }
    PathBuf::from(".alr-cache")
}

/// Validates every run, then evaluates them in order.
pub fn evaluate(spec: &SpecFile) -> Result<ResultRecord, CliError> {
    let plans = spec.runs.iter().map(PlannedRun::plan).collect::<Result<Vec<_>, _>>()?;
    let start = Instant::now();
    let runs = plans.iter().map(PlannedRun::execute).collect::<Result<Vec<_>, _>>()?;
    Ok(ResultRecord {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        spec_hash: spec_hash(spec),
        spec: spec.clone(),
        runs,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone)]
pub struct RunSettings {
    pub out_dir: PathBuf,
    pub cache_dir: PathBuf,
    pub use_cache: bool,
    pub svg: bool,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub record: ResultRecord,
    pub cache_hit: bool,
    pub files: Vec<PathBuf>,
}

fn load_cached(path: &Path, hash: &str) -> Option<ResultRecord> {
    let text = std::fs::read_to_string(path).ok()?;
    let record: ResultRecord = serde_json::from_str(&text).ok()?;
    (record.spec_hash == hash).then_some(record)
}

fn write_atomic(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Parses, evaluates (or loads from cache) and writes outputs for a spec.
pub fn run_spec_text(text: &str, settings: &RunSettings) -> Result<Outcome, CliError> {
    use anyhow::Context;
    let spec = SpecFile::parse(text)?;
    let hash = spec_hash(&spec);
    let cache_path = settings.cache_dir.join(format!("{hash}.json"));

    let cached = if settings.use_cache { load_cached(&cache_path, &hash) } else { None };
    let cache_hit = cached.is_some();
    let record = match cached {
        Some(r) => r,
        None => {
            let record = evaluate(&spec)?;
            std::fs::create_dir_all(&settings.cache_dir)
                .with_context(|| format!("creating cache directory {}", settings.cache_dir.display()))?;
            let json = serde_json::to_vec_pretty(&record).context("serializing result record")?;
            write_atomic(&cache_path, &json).with_context(|| format!("writing {}", cache_path.display()))?;
            record
        }
    };

    std::fs::create_dir_all(&settings.out_dir)
        .with_context(|| format!("creating output directory {}", settings.out_dir.display()))?;
    let mut files = Vec::new();
    for run in &record.runs {
        let csv_path = settings.out_dir.join(format!("{}.csv", run.name));
        std::fs::write(&csv_path, output::csv_string(&run.rows)).with_context(|| format!("writing {}", csv_path.display()))?;
        files.push(csv_path.clone());
        if settings.svg {
            let title = format!("{} ({})", run.name, run.kind.as_str());
            if let Some(svg) = output::svg_from_csv(&csv_path, &title).context("reading CSV for plot")? {
                let svg_path = settings.out_dir.join(format!("{}.svg", run.name));
                std::fs::write(&svg_path, svg).with_context(|| format!("writing {}", svg_path.display()))?;
                files.push(svg_path);
            }
        }
    }
    let record_path = settings.out_dir.join(format!("{}.record.json", record.spec.name));
    let json = serde_json::to_vec_pretty(&record).context("serializing result record")?;
    std::fs::write(&record_path, json).with_context(|| format!("writing {}", record_path.display()))?;
    files.push(record_path);
    Ok(Outcome { record, cache_hit, files })
}

/// Bundled specs as `(file name, contents)`.
pub const RECIPES: &[(&str, &str)] = &[
    ("appendix.json", include_str!("../recipes/appendix.json")),
    ("certificates.json", include_str!("../recipes/certificates.json")),
    ("conformal.json", include_str!("../recipes/conformal.json")),
    ("eccentric.json", include_str!("../recipes/eccentric.json")),
    ("radial-critical.json", include_str!("../recipes/radial-critical.json")),
];

/// Looks up a bundled recipe by file name, with or without `.json`.
pub fn recipe(name: &str) -> Option<&'static str> {
    RECIPES
        .iter()
        .find(|(file, _)| *file == name || file.strip_suffix(".json") == Some(name))
        .map(|(_, text)| *text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_recipes_validate() {
        for (file, text) in RECIPES {
            let spec = SpecFile::parse(text).unwrap_or_else(|e| panic!("{file}: {e}"));
            assert_eq!(format!("{}.json", spec.name), *file);
            for run in &spec.runs {
                PlannedRun::plan(run).unwrap_or_else(|e| panic!("{file}/{}: {e}", run.name));
            }
        }
        assert!(recipe("appendix").is_some() && recipe("appendix.json").is_some() && recipe("nope").is_none());
    }

    #[test]
    fn hash_tracks_content() {
        let a = SpecFile::parse(recipe("appendix").unwrap()).unwrap();
        let mut b = a.clone();
        assert_eq!(spec_hash(&a), spec_hash(&b));
        b.runs[0].options.l_max = Some(3);
        assert_ne!(spec_hash(&a), spec_hash(&b));
        assert_eq!(spec_hash(&a).len(), 64);
    }

    #[test]
    fn core_errors_map_to_exit_codes() {
        let gate = CliError::from_core(alr_core::Error::NotConverged("x".into()));
        assert_eq!(gate.exit_code(), EXIT_GATE);
        let bad = CliError::from_core(alr_core::Error::InvalidGeometry("x".into()));
        assert_eq!(bad.exit_code(), EXIT_VALIDATION);
    }
}
