//! Parsers for every input format and emitters for every output artifact.
//!
//! Nothing in here does math beyond what is needed to validate inputs
//! (ring closure, nonzero area) and lay out drawings.

mod geojson;
mod records;
mod series;
mod svg;
mod tree_format;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, BBox, Point};

pub use geojson::{emit_regions, parse_regions};
pub use records::{parse_engagement_events, parse_records, parse_sentiment_records, RecordKind, Records};
pub use series::{emit_series, parse_series};
pub use svg::{emit_svg, SvgDrawable};
pub use tree_format::{emit_tree, TreeFormat};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("feature {feature}: missing `statistic` property")]
    MissingStatistic { feature: String },
    #[error("feature #{index}: missing string `id` property")]
    MissingId { index: usize },
    #[error("feature {feature}: statistic must be a finite number >= 0, got {value}")]
    InvalidStatistic { feature: String, value: String },
    #[error("feature {feature}: unsupported geometry `{kind}` (expected Polygon or MultiPolygon)")]
    UnsupportedGeometry { feature: String, kind: String },
    #[error("feature {feature}: ring {ring} is not closed (first vertex != last vertex)")]
    OpenRing { feature: String, ring: usize },
    #[error("feature {feature}: ring {ring} has {found} vertices, need at least 4")]
    TooFewVertices { feature: String, ring: usize, found: usize },
    #[error("feature {feature}: ring {ring} has zero area")]
    ZeroAreaRing { feature: String, ring: usize },
    #[error("feature {feature}: non-finite coordinate")]
    NonFiniteCoordinate { feature: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("no region has a positive statistic")]
    NoPositiveStatistic,
    #[error("csv: {0}")]
    Csv(String),
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("row {row}, column {column}: `{value}` is not a number")]
    NonNumeric { row: usize, column: String, value: String },
    #[error("row {row}, column {column}: value is not finite")]
    NonFinite { row: usize, column: String },
    #[error("need at least 3 rows, found {0}")]
    TooFewRows(usize),
    #[error("need at least one column")]
    NoColumns,
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("line {line}: source and target are both `{account}`")]
    SelfLoop { line: usize, account: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmitError {
    #[error("nothing to draw: {0}")]
    Empty(&'static str),
    #[error("tree: {0}")]
    InvalidTree(String),
}

/// One polygon: an outer ring and its holes, all closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub exterior: Vec<Point>,
    pub holes: Vec<Vec<Point>>,
}

impl Polygon {
    pub fn rings(&self) -> impl Iterator<Item = &[Point]> {
        std::iter::once(self.exterior.as_slice()).chain(self.holes.iter().map(Vec::as_slice))
    }

    pub fn rings_mut(&mut self) -> impl Iterator<Item = &mut Vec<Point>> {
        std::iter::once(&mut self.exterior).chain(self.holes.iter_mut())
    }

    /// Outer area minus holes, assuming normalized orientation.
    pub fn area(&self) -> f64 {
        self.rings().map(geometry::signed_area).sum()
    }

    /// Outer ring counterclockwise, holes clockwise.
    pub fn normalize_orientation(&mut self) {
        if geometry::signed_area(&self.exterior) < 0.0 {
            self.exterior.reverse();
        }
        for hole in &mut self.holes {
            if geometry::signed_area(hole) > 0.0 {
                hole.reverse();
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: String,
    pub polygons: Vec<Polygon>,
    pub statistic: f64,
}

impl Region {
    pub fn rings(&self) -> impl Iterator<Item = &[Point]> {
        self.polygons.iter().flat_map(Polygon::rings)
    }

    pub fn area(&self) -> f64 {
        self.polygons.iter().map(Polygon::area).sum()
    }

    pub fn bbox(&self) -> BBox {
        let mut b = BBox::empty();
        for p in self.rings().flatten() {
            b.include(*p);
        }
        b
    }

    pub fn vertex_count(&self) -> usize {
        self.rings().map(<[Point]>::len).sum()
    }
}

/// Named map regions, each carrying a nonnegative statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSet {
    regions: Vec<Region>,
}

impl RegionSet {
    /// Validates the invariants and normalizes ring orientation.
    pub fn new(mut regions: Vec<Region>) -> Result<Self, ParseError> {
        let mut seen = HashSet::new();
        for region in &mut regions {
            if !seen.insert(region.id.clone()) {
                return Err(ParseError::DuplicateId(region.id.clone()));
            }
            if !(region.statistic.is_finite() && region.statistic >= 0.0) {
                return Err(ParseError::InvalidStatistic {
                    feature: region.id.clone(),
                    value: region.statistic.to_string(),
                });
            }
            let mut index = 0;
            for polygon in &mut region.polygons {
                for ring in polygon.rings() {
                    validate_ring(&region.id, index, ring)?;
                    index += 1;
                }
                polygon.normalize_orientation();
            }
        }
        if !regions.iter().any(|r| r.statistic > 0.0) {
            return Err(ParseError::NoPositiveStatistic);
        }
        Ok(RegionSet { regions })
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.id == id)
    }

    pub fn bbox(&self) -> BBox {
        let mut b = BBox::empty();
        for r in &self.regions {
            for p in r.rings().flatten() {
                b.include(*p);
            }
        }
        b
    }

    pub fn total_statistic(&self) -> f64 {
        self.regions.iter().map(|r| r.statistic).sum()
    }

    pub fn total_area(&self) -> f64 {
        self.regions.iter().map(Region::area).sum()
    }

    /// Applies `f` to every vertex, keeping ids and statistics.
    pub fn map_vertices<E>(
        &self,
        mut f: impl FnMut(Point) -> Result<Point, E>,
    ) -> Result<RegionSet, E> {
        let mut regions = self.regions.clone();
        for region in &mut regions {
            for polygon in &mut region.polygons {
                for ring in polygon.rings_mut() {
                    for p in ring.iter_mut() {
                        *p = f(*p)?;
                    }
                }
            }
        }
        Ok(RegionSet { regions })
    }

    pub(crate) fn from_parts_unchecked(regions: Vec<Region>) -> RegionSet {
        RegionSet { regions }
    }
}

fn validate_ring(feature: &str, ring_index: usize, ring: &[Point]) -> Result<(), ParseError> {
    if ring.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
        return Err(ParseError::NonFiniteCoordinate { feature: feature.to_string() });
    }
    if ring.len() < 4 {
        return Err(ParseError::TooFewVertices {
            feature: feature.to_string(),
            ring: ring_index,
            found: ring.len(),
        });
    }
    if ring.first() != ring.last() {
        return Err(ParseError::OpenRing { feature: feature.to_string(), ring: ring_index });
    }
    if geometry::signed_area(ring) == 0.0 {
        return Err(ParseError::ZeroAreaRing { feature: feature.to_string(), ring: ring_index });
    }
    Ok(())
}

/// Equal-length labelled sample vectors: price signals or feature vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEnsemble {
    labels: Vec<String>,
    samples: Vec<Vec<f64>>,
}

impl SeriesEnsemble {
    pub const MIN_LEN: usize = 3;

    pub fn new(labels: Vec<String>, samples: Vec<Vec<f64>>) -> Result<Self, ParseError> {
        if labels.is_empty() {
            return Err(ParseError::NoColumns);
        }
        if labels.len() != samples.len() {
            return Err(ParseError::Malformed(format!(
                "{} labels but {} series",
                labels.len(),
                samples.len()
            )));
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(ParseError::DuplicateLabel(label.clone()));
            }
        }
        let n = samples[0].len();
        for (label, s) in labels.iter().zip(&samples) {
            if s.len() != n {
                return Err(ParseError::Malformed(format!(
                    "series `{label}` has length {}, expected {n}",
                    s.len()
                )));
            }
            if let Some(row) = s.iter().position(|v| !v.is_finite()) {
                return Err(ParseError::NonFinite { row: row + 1, column: label.clone() });
            }
        }
        if n < Self::MIN_LEN {
            return Err(ParseError::TooFewRows(n));
        }
        Ok(SeriesEnsemble { labels, samples })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn series(&self, label: &str) -> Option<&[f64]> {
        self.labels.iter().position(|l| l == label).map(|i| self.samples[i].as_slice())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sample_len(&self) -> usize {
        self.samples[0].len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentRecord {
    pub actor: String,
    pub topic: String,
    pub polarity: f64,
}

/// Actor/topic stances; at most one record per (actor, topic) pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SentimentRecordSet {
    records: Vec<SentimentRecord>,
}

impl SentimentRecordSet {
    /// Sums polarities of repeated (actor, topic) pairs, keeping first-seen order.
    pub fn aggregate(raw: impl IntoIterator<Item = SentimentRecord>) -> Self {
        let mut records: Vec<SentimentRecord> = Vec::new();
        let mut index = std::collections::HashMap::new();
        for r in raw {
            match index.get(&(r.actor.clone(), r.topic.clone())) {
                Some(&i) => {
                    let existing: &mut SentimentRecord = &mut records[i];
                    existing.polarity += r.polarity;
                }
                None => {
                    index.insert((r.actor.clone(), r.topic.clone()), records.len());
                    records.push(r);
                }
            }
        }
        SentimentRecordSet { records }
    }

    pub fn records(&self) -> &[SentimentRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngagementKind {
    Reply,
    Quote,
    Retweet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngagementEvent {
    pub source: String,
    pub target: String,
    pub kind: EngagementKind,
    pub topics: Vec<String>,
    pub polarity: i8,
    pub timestamp: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngagementEventSet {
    events: Vec<EngagementEvent>,
}

impl EngagementEventSet {
    /// Rejects self-loops and polarities outside {-1, 0, +1}.
    pub fn new(events: Vec<EngagementEvent>) -> Result<Self, ParseError> {
        for (i, e) in events.iter().enumerate() {
            if e.source == e.target {
                return Err(ParseError::SelfLoop { line: i + 1, account: e.source.clone() });
            }
            if !(-1..=1).contains(&e.polarity) {
                return Err(ParseError::Schema {
                    line: i + 1,
                    message: format!("polarity {} not in {{-1, 0, 1}}", e.polarity),
                });
            }
        }
        Ok(EngagementEventSet { events })
    }

    pub fn events(&self) -> &[EngagementEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Distinct topics in sorted order.
    pub fn topics(&self) -> Vec<String> {
        let set: std::collections::BTreeSet<&String> =
            self.events.iter().flat_map(|e| &e.topics).collect();
        set.into_iter().cloned().collect()
    }
}

/// Shortest round-trip decimal for a float, with `-0` printed as `0`.
pub(crate) fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}
