use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgAction, Args, CommandFactory, Parser, Subcommand, ValueEnum};

use datacrunch::io::{parse_regions, parse_series, RecordKind, Records};
use datacrunch::pipeline::{self, PartialConfig, PipelineError, PolarityFilter, SeriesMode};

const USAGE_ERROR: u8 = 1;
const NUMERICAL_ERROR: u8 = 2;

/// Cartograms, correlation taxonomies, sentiment graphs and engagement
/// communities from the command line.
#[derive(Debug, Parser)]
#[command(name = "datacrunch", disable_version_flag = true)]
struct Cli {
    /// Print toolkit and report schema versions.
    #[arg(short = 'V', long = "version", action = ArgAction::SetTrue)]
    version: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Resize regions in proportion to their statistic (GeoJSON in).
    Cartogram {
        #[command(flatten)]
        common: Common,
        /// Cells along the longer axis (power of two, at least 64).
        #[arg(long)]
        grid: Option<usize>,
        /// Stop once the density is uniform to this relative tolerance.
        #[arg(long = "tol")]
        tolerance: Option<f64>,
        /// Ratio of the padded domain to the map's bounding box.
        #[arg(long)]
        pad: Option<f64>,
    },
    /// Correlation tree and ultrametric from a CSV of series.
    Taxonomy {
        #[command(flatten)]
        common: Common,
        /// Columns are prices; correlate their log returns (default).
        #[arg(long, conflicts_with = "raw")]
        prices: bool,
        /// Columns are feature vectors; correlate them as given.
        #[arg(long)]
        raw: bool,
        /// Order statistics used by the tail fit.
        #[arg(long = "tail-k")]
        tail_k: Option<usize>,
    },
    /// Signed actor graph from actor/topic stance records (JSON lines).
    Sentiment {
        #[command(flatten)]
        common: Common,
    },
    /// Per-topic engagement communities and topic ranking (JSON lines).
    Community {
        #[command(flatten)]
        common: Common,
        /// Comma-separated topics; default is every topic in the input.
        #[arg(long, value_delimiter = ',')]
        topics: Option<Vec<String>>,
        /// Edge polarity to keep: 1, -1, 0 or any.
        #[arg(long, allow_hyphen_values = true)]
        polarity: Option<PolarityFilter>,
    },
    /// Summarize an input file without transforming it.
    Inspect {
        /// Input file.
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        /// Input format; guessed from the extension and contents if omitted.
        #[arg(long, value_enum)]
        kind: Option<InputKind>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Input file.
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    /// Output directory, replaced as a whole on success.
    #[arg(long = "out", value_name = "DIR")]
    output: Option<PathBuf>,
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InputKind {
    Regions,
    Series,
    Records,
}

fn main() -> ExitCode {
    run(std::env::args_os())
}

fn run(args: impl IntoIterator<Item = OsString>) -> ExitCode {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp => 0,
                _ => USAGE_ERROR,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.version {
        println!(
            "datacrunch {} (run report schema {})",
            datacrunch::VERSION,
            datacrunch::SCHEMA_VERSION
        );
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("{}", Cli::command().render_help());
        return ExitCode::from(USAGE_ERROR);
    };

    let result = match command {
        Command::Inspect { input, kind } => inspect(&input, kind).map_err(|msg| {
            eprintln!("error: {msg}");
            USAGE_ERROR
        }),
        other => run_pipeline(other).map_err(|e| {
            eprintln!("error: {e}");
            if e.is_numerical() { NUMERICAL_ERROR } else { USAGE_ERROR }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}

fn run_pipeline(command: Command) -> Result<(), PipelineError> {
    let (name, common, flags) = match command {
        Command::Cartogram { common, grid, tolerance, pad } => {
            ("cartogram", common, PartialConfig { grid, tolerance, pad, ..Default::default() })
        }
        Command::Taxonomy { common, prices, raw, tail_k } => {
            let series = match (prices, raw) {
                (true, _) => Some(SeriesMode::Prices),
                (_, true) => Some(SeriesMode::Raw),
                _ => None,
            };
            ("taxonomy", common, PartialConfig { series, tail_k, ..Default::default() })
        }
        Command::Sentiment { common } => ("sentiment", common, PartialConfig::default()),
        Command::Community { common, topics, polarity } => {
            ("community", common, PartialConfig { topics, polarity, ..Default::default() })
        }
        Command::Inspect { .. } => unreachable!("handled by the caller"),
    };
    let flags = PartialConfig {
        pipeline: Some(name.to_string()),
        input: common.input,
        output: common.output,
        ..flags
    };
    let base = match &common.config {
        Some(path) => PartialConfig::from_file(path)?,
        None => PartialConfig::default(),
    };
    let config = base.merge(flags).resolve()?;

    let report = match common.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(usize::from(n))
                .build()
                .expect("thread pool with a positive thread count");
            pool.install(|| pipeline::run(&config))?
        }
        None => pipeline::run(&config)?,
    };
    for name in &report.outputs {
        println!("{}", config.output.join(name).display());
    }
    Ok(())
}

fn inspect(path: &Path, kind: Option<InputKind>) -> Result<(), String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let kind = match kind {
        Some(k) => k,
        None => guess_kind(path, &bytes).ok_or_else(|| {
            format!("cannot tell the format of {}; pass --kind", path.display())
        })?,
    };
    let mut out = String::new();
    let err = |e: datacrunch::io::ParseError| format!("{}: {e}", path.display());
    match kind {
        InputKind::Regions => {
            let set = parse_regions(&bytes).map_err(err)?;
            let stats: Vec<f64> = set.regions().iter().map(|r| r.statistic).collect();
            let b = set.bbox();
            let _ = writeln!(out, "kind: regions");
            let _ = writeln!(out, "regions: {}", set.len());
            let _ = writeln!(out, "vertices: {}", set.regions().iter().map(|r| r.vertex_count()).sum::<usize>());
            let _ = writeln!(out, "statistic: total {} range {}", set.total_statistic(), range(&stats));
            let _ = writeln!(out, "area: {}", set.total_area());
            let _ = writeln!(out, "bbox: [{}, {}, {}, {}]", b.xmin, b.ymin, b.xmax, b.ymax);
        }
        InputKind::Series => {
            let set = parse_series(&bytes).map_err(err)?;
            let _ = writeln!(out, "kind: series");
            let _ = writeln!(out, "series: {}", set.len());
            let _ = writeln!(out, "samples: {}", set.sample_len());
            for (label, values) in set.labels().iter().zip(set.samples()) {
                let _ = writeln!(out, "  {label}: {}", range(values));
            }
        }
        InputKind::Records => {
            let record_kind = RecordKind::detect(&bytes)
                .ok_or_else(|| format!("{}: not sentiment records or engagement events", path.display()))?;
            match datacrunch::io::parse_records(&bytes, record_kind).map_err(err)? {
                Records::Sentiment(set) => {
                    let actors: std::collections::BTreeSet<&str> =
                        set.records().iter().map(|r| r.actor.as_str()).collect();
                    let topics: std::collections::BTreeSet<&str> =
                        set.records().iter().map(|r| r.topic.as_str()).collect();
                    let pol: Vec<f64> = set.records().iter().map(|r| r.polarity).collect();
                    let _ = writeln!(out, "kind: sentiment records");
                    let _ = writeln!(out, "records: {}", set.len());
                    let _ = writeln!(out, "actors: {}", actors.len());
                    let _ = writeln!(out, "topics: {}", topics.len());
                    let _ = writeln!(out, "polarity: {}", range(&pol));
                }
                Records::Engagement(set) => {
                    let accounts: std::collections::BTreeSet<&str> = set
                        .events()
                        .iter()
                        .flat_map(|e| [e.source.as_str(), e.target.as_str()])
                        .collect();
                    let times: Vec<f64> = set.events().iter().map(|e| e.timestamp as f64).collect();
                    let _ = writeln!(out, "kind: engagement events");
                    let _ = writeln!(out, "events: {}", set.len());
                    let _ = writeln!(out, "accounts: {}", accounts.len());
                    let _ = writeln!(out, "topics: {}", set.topics().join(", "));
                    let _ = writeln!(out, "timestamp: {}", range(&times));
                }
            }
        }
    }
    print!("{out}");
    Ok(())
}

fn guess_kind(path: &Path, bytes: &[u8]) -> Option<InputKind> {
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("geojson") => Some(InputKind::Regions),
        Some("csv") => Some(InputKind::Series),
        Some("jsonl") | Some("ndjson") => Some(InputKind::Records),
        _ if RecordKind::detect(bytes).is_some() => Some(InputKind::Records),
        _ if parse_regions(bytes).is_ok() => Some(InputKind::Regions),
        _ => None,
    }
}

fn range(values: &[f64]) -> String {
    if values.is_empty() {
        return "empty".to_string();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    format!("[{lo}, {hi}]")
}
