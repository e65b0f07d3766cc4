//! Named end-to-end runs: parse an input file, transform it, and write every
//! artifact plus a JSON run report into an output directory in one commit.
//!
//! Pipelines implement [`Pipeline`] and are looked up by name in a
//! [`Registry`]. Outputs are first written to a staging directory next to the
//! destination and renamed into place only when every stage has succeeded.

mod config;
mod stages;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{PartialConfig, PipelineConfig, PolarityFilter, SeriesMode, DEFAULT_GRID, DEFAULT_TOLERANCE};
pub use stages::{CartogramPipeline, CommunityPipeline, SentimentPipeline, TaxonomyPipeline};

use crate::cartogram::CartogramError;
use crate::community::CommunityError;
use crate::io::{EmitError, ParseError};
use crate::sentiment::SentimentError;
use crate::taxonomy::TaxonomyError;

pub const REPORT_FILE: &str = "run_report.json";

#[derive(Debug, Error)]
pub enum StageError {
    #[error("{0}")]
    Config(String),
    #[error("unknown pipeline `{0}`")]
    UnknownPipeline(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Cartogram(#[from] CartogramError),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    Sentiment(#[from] SentimentError),
    #[error(transparent)]
    Community(#[from] CommunityError),
    #[error(transparent)]
    Emit(#[from] EmitError),
}

/// A stage failure; `stage` names where in the run it happened.
#[derive(Debug, Error)]
#[error("{stage}: {source}")]
pub struct PipelineError {
    pub stage: &'static str,
    #[source]
    pub source: StageError,
}

impl PipelineError {
    pub fn new(stage: &'static str, source: impl Into<StageError>) -> Self {
        PipelineError { stage, source: source.into() }
    }

    /// True for numerical failures such as a diffusion that never settles,
    /// as opposed to bad input or configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(self.source, StageError::Cartogram(CartogramError::NonConvergence { .. }))
    }
}

/// Attaches a stage name to any module error.
pub(crate) trait AtStage<T> {
    fn at(self, stage: &'static str) -> Result<T, PipelineError>;
}

impl<T, E: Into<StageError>> AtStage<T> for Result<T, E> {
    fn at(self, stage: &'static str) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError::new(stage, e))
    }
}

/// Files produced by a run, keyed by file name.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: BTreeMap<String, Vec<u8>>,
}

impl Artifacts {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.insert(name.to_string(), bytes);
    }

    pub fn add_json(&mut self, name: &str, value: &impl Serialize) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("artifact documents serialize");
        bytes.push(b'\n');
        self.add(name, bytes);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.get(name).map(Vec::as_slice)
    }
}

pub type Diagnostics = Map<String, Value>;

/// One named analysis. Implementations only transform bytes into artifacts;
/// reading inputs and committing outputs is shared.
pub trait Pipeline: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn execute(&self, config: &PipelineConfig, input: &[u8], out: &mut Artifacts) -> Result<Diagnostics, PipelineError>;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub toolkit_version: String,
    pub pipeline: String,
    pub inputs: Vec<InputDigest>,
    pub parameters: Value,
    pub outputs: Vec<String>,
    pub diagnostics: Diagnostics,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs. `SOURCE_DATE_EPOCH` overrides it.
    pub generated_at: u64,
}

pub struct Registry {
    pipelines: BTreeMap<&'static str, Box<dyn Pipeline>>,
}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.pipelines.keys()).finish()
    }
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry::empty();
        r.register(Box::new(CartogramPipeline));
        r.register(Box::new(TaxonomyPipeline));
        r.register(Box::new(SentimentPipeline));
        r.register(Box::new(CommunityPipeline));
        r
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry { pipelines: BTreeMap::new() }
    }

    /// Replaces any pipeline already registered under the same name.
    pub fn register(&mut self, pipeline: Box<dyn Pipeline>) {
        self.pipelines.insert(pipeline.name(), pipeline);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Pipeline> {
        self.pipelines.get(name).map(|p| p.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.pipelines.keys().copied()
    }

    /// Runs `config.pipeline` and commits its outputs. On error nothing is
    /// left behind and an existing output directory is untouched.
    pub fn run(&self, config: &PipelineConfig) -> Result<RunReport, PipelineError> {
        config.validate()?;
        let pipeline = self
            .get(&config.pipeline)
            .ok_or_else(|| PipelineError::new("config", StageError::UnknownPipeline(config.pipeline.clone())))?;
        let input = fs::read(&config.input)
            .map_err(|source| PipelineError::new("read", StageError::Io { path: config.input.clone(), source }))?;

        let mut artifacts = Artifacts::default();
        let diagnostics = pipeline.execute(config, &input, &mut artifacts)?;

        let mut parameters = serde_json::to_value(config).expect("config serializes");
        if let Value::Object(map) = &mut parameters {
            map.remove("input");
            map.remove("output");
            map.remove("pipeline");
        }
        let mut outputs: Vec<String> = artifacts.names().map(String::from).collect();
        outputs.push(REPORT_FILE.to_string());
        outputs.sort();
        let report = RunReport {
            schema_version: crate::SCHEMA_VERSION,
            toolkit_version: crate::VERSION.to_string(),
            pipeline: pipeline.name().to_string(),
            inputs: vec![InputDigest {
                path: config.input.display().to_string(),
                sha256: hex::encode(Sha256::digest(&input)),
            }],
            parameters,
            outputs,
            diagnostics,
            generated_at: timestamp(),
        };
        artifacts.add_json(REPORT_FILE, &report);
        commit(&artifacts, &config.output)?;
        Ok(report)
    }
}

/// Runs with the built-in registry.
pub fn run(config: &PipelineConfig) -> Result<RunReport, PipelineError> {
    Registry::default().run(config)
}

fn timestamp() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse().ok()) {
        return t;
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Writes everything into a sibling staging directory, then renames it over `dest`.
fn commit(artifacts: &Artifacts, dest: &Path) -> Result<(), PipelineError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| PipelineError::new("write", StageError::Io { path, source })
    };
    if dest.exists() && !dest.is_dir() {
        return Err(PipelineError::new(
            "write",
            StageError::Config(format!("{} exists and is not a directory", dest.display())),
        ));
    }
    let parent = match dest.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(io_err(&parent))?;
    let staging = tempfile::Builder::new().prefix(".staging-").tempdir_in(&parent).map_err(io_err(&parent))?;
    for name in artifacts.names() {
        let path = staging.path().join(name);
        fs::write(&path, artifacts.get(name).unwrap_or_default()).map_err(io_err(&path))?;
    }

    if dest.exists() {
        let backup = tempfile::Builder::new().prefix(".previous-").tempdir_in(&parent).map_err(io_err(&parent))?;
        let old = backup.path().join("old");
        fs::rename(dest, &old).map_err(io_err(dest))?;
        if let Err(e) = fs::rename(staging.path(), dest) {
            let _ = fs::rename(&old, dest);
            return Err(io_err(dest)(e));
        }
        // backup (holding the previous contents) is removed on drop
    } else {
        fs::rename(staging.path(), dest).map_err(io_err(dest))?;
    }
    // the staging path no longer exists; keep the guard from deleting `dest`
    let _ = staging.keep();
    Ok(())
}
