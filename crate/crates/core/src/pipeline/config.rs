use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{PipelineError, StageError};
use crate::cartogram::GridSpec;

pub const DEFAULT_GRID: usize = 256;
pub const DEFAULT_TOLERANCE: f64 = 1e-3;

/// How the taxonomy pipeline reads its columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesMode {
    /// Strictly positive prices, correlated through their log returns.
    #[default]
    Prices,
    /// Feature vectors, correlated as given.
    Raw,
}

/// Which engagement edges survive the sentiment filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PolarityFilter {
    #[default]
    Positive,
    Negative,
    Neutral,
    Any,
}

impl PolarityFilter {
    pub fn sign(self) -> Option<i8> {
        match self {
            PolarityFilter::Positive => Some(1),
            PolarityFilter::Negative => Some(-1),
            PolarityFilter::Neutral => Some(0),
            PolarityFilter::Any => None,
        }
    }
}

impl FromStr for PolarityFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "1" | "+1" | "positive" => Ok(PolarityFilter::Positive),
            "-1" | "negative" => Ok(PolarityFilter::Negative),
            "0" | "neutral" => Ok(PolarityFilter::Neutral),
            "any" => Ok(PolarityFilter::Any),
            other => Err(format!("`{other}` is not one of 1, -1, 0, any")),
        }
    }
}

impl fmt::Display for PolarityFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolarityFilter::Positive => "positive",
            PolarityFilter::Negative => "negative",
            PolarityFilter::Neutral => "neutral",
            PolarityFilter::Any => "any",
        })
    }
}

impl Serialize for PolarityFilter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PolarityFilter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Int(i) => i.to_string(),
            Raw::Str(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub pipeline: String,
    pub input: PathBuf,
    pub output: PathBuf,
    /// Cells along the longer side of the cartogram domain.
    pub grid: usize,
    pub tolerance: f64,
    /// Cartogram domain size relative to the map's bounding box.
    pub pad: f64,
    pub series: SeriesMode,
    /// Order statistics for the tail fit; `None` picks `floor(n^0.6)`.
    pub tail_k: Option<usize>,
    /// Topics to report; `None` means every topic in the input.
    pub topics: Option<Vec<String>>,
    pub polarity: PolarityFilter,
}

impl PipelineConfig {
    pub fn new(pipeline: &str, input: impl Into<PathBuf>, output: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            pipeline: pipeline.to_string(),
            input: input.into(),
            output: output.into(),
            grid: DEFAULT_GRID,
            tolerance: DEFAULT_TOLERANCE,
            pad: GridSpec::DEFAULT_PAD,
            series: SeriesMode::default(),
            tail_k: None,
            topics: None,
            polarity: PolarityFilter::default(),
        }
    }

    /// Reads a TOML document. Relative paths in it are taken relative to the file.
    pub fn from_file(path: &Path) -> Result<Self, PipelineError> {
        PartialConfig::from_file(path)?.resolve()
    }

    pub fn from_toml_str(text: &str) -> Result<Self, PipelineError> {
        PartialConfig::from_toml_str(text)?.resolve()
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |msg: String| Err(PipelineError::new("config", StageError::Config(msg)));
        if !self.grid.is_power_of_two() || self.grid < crate::cartogram::MIN_CELLS {
            return bad(format!("grid must be a power of two >= 64, got {}", self.grid));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return bad(format!("tolerance must lie in (0, 1), got {}", self.tolerance));
        }
        if !(self.pad >= 1.0 && self.pad.is_finite()) {
            return bad(format!("pad must be >= 1, got {}", self.pad));
        }
        if self.tail_k == Some(0) {
            return bad("tail_k must be >= 1".into());
        }
        if let Some(topics) = &self.topics {
            if topics.is_empty() {
                return bad("topics list is empty".into());
            }
        }
        Ok(())
    }
}

/// Every field optional, for layering command-line flags over a file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub pipeline: Option<String>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub grid: Option<usize>,
    pub tolerance: Option<f64>,
    pub pad: Option<f64>,
    pub series: Option<SeriesMode>,
    pub tail_k: Option<usize>,
    pub topics: Option<Vec<String>>,
    pub polarity: Option<PolarityFilter>,
}

impl PartialConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::new("config", StageError::Config(e.to_string())))
    }

    pub fn from_file(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| PipelineError::new("config", StageError::Io { path: path.to_path_buf(), source }))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.input, &mut cfg.output].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Values set in `over` win.
    pub fn merge(self, over: PartialConfig) -> PartialConfig {
        PartialConfig {
            pipeline: over.pipeline.or(self.pipeline),
            input: over.input.or(self.input),
            output: over.output.or(self.output),
            grid: over.grid.or(self.grid),
            tolerance: over.tolerance.or(self.tolerance),
            pad: over.pad.or(self.pad),
            series: over.series.or(self.series),
            tail_k: over.tail_k.or(self.tail_k),
            topics: over.topics.or(self.topics),
            polarity: over.polarity.or(self.polarity),
        }
    }

    pub fn resolve(self) -> Result<PipelineConfig, PipelineError> {
        let missing = |field: &str| PipelineError::new("config", StageError::Config(format!("missing `{field}`")));
        let mut cfg = PipelineConfig::new(
            &self.pipeline.ok_or_else(|| missing("pipeline"))?,
            self.input.ok_or_else(|| missing("input"))?,
            self.output.ok_or_else(|| missing("output"))?,
        );
        if let Some(v) = self.grid {
            cfg.grid = v;
        }
        if let Some(v) = self.tolerance {
            cfg.tolerance = v;
        }
        if let Some(v) = self.pad {
            cfg.pad = v;
        }
        if let Some(v) = self.series {
            cfg.series = v;
        }
        cfg.tail_k = self.tail_k;
        cfg.topics = self.topics;
        if let Some(v) = self.polarity {
            cfg.polarity = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
