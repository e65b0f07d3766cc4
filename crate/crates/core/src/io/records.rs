use serde::Deserialize;

use super::{
    EngagementEvent, EngagementEventSet, EngagementKind, ParseError, SentimentRecord,
    SentimentRecordSet,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    Sentiment,
    Engagement,
}

impl RecordKind {
    /// Guesses the schema from the first non-blank line. `None` for empty input.
    pub fn detect(bytes: &[u8]) -> Option<RecordKind> {
        let text = std::str::from_utf8(bytes).ok()?;
        let first = text.lines().find(|l| !l.trim().is_empty())?;
        let v: serde_json::Value = serde_json::from_str(first).ok()?;
        if v.get("actor").is_some() {
            Some(RecordKind::Sentiment)
        } else if v.get("source").is_some() {
            Some(RecordKind::Engagement)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Records {
    Sentiment(SentimentRecordSet),
    Engagement(EngagementEventSet),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSentiment {
    actor: String,
    topic: String,
    polarity: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvent {
    source: String,
    target: String,
    kind: EngagementKind,
    topics: Vec<String>,
    polarity: i64,
    timestamp: i64,
}

pub fn parse_records(bytes: &[u8], kind: RecordKind) -> Result<Records, ParseError> {
    match kind {
        RecordKind::Sentiment => parse_sentiment_records(bytes).map(Records::Sentiment),
        RecordKind::Engagement => parse_engagement_events(bytes).map(Records::Engagement),
    }
}

fn lines(bytes: &[u8]) -> Result<impl Iterator<Item = (usize, &str)>, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ParseError::Malformed(e.to_string()))?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty()))
}

fn schema_error(line: usize, e: impl ToString) -> ParseError {
    ParseError::Schema { line, message: e.to_string() }
}

/// JSON-lines `{"actor", "topic", "polarity"}`; duplicate pairs are summed.
pub fn parse_sentiment_records(bytes: &[u8]) -> Result<SentimentRecordSet, ParseError> {
    let mut raw = Vec::new();
    for (line, text) in lines(bytes)? {
        let r: RawSentiment = serde_json::from_str(text).map_err(|e| schema_error(line, e))?;
        if !r.polarity.is_finite() {
            return Err(schema_error(line, "polarity is not finite"));
        }
        raw.push(SentimentRecord { actor: r.actor, topic: r.topic, polarity: r.polarity });
    }
    Ok(SentimentRecordSet::aggregate(raw))
}

/// JSON-lines `{"source", "target", "kind", "topics", "polarity", "timestamp"}`.
pub fn parse_engagement_events(bytes: &[u8]) -> Result<EngagementEventSet, ParseError> {
    let mut events = Vec::new();
    for (line, text) in lines(bytes)? {
        let r: RawEvent = serde_json::from_str(text).map_err(|e| schema_error(line, e))?;
        if r.source == r.target {
            return Err(ParseError::SelfLoop { line, account: r.source });
        }
        if !(-1..=1).contains(&r.polarity) {
            return Err(schema_error(line, format!("polarity {} not in {{-1, 0, 1}}", r.polarity)));
        }
        events.push(EngagementEvent {
            source: r.source,
            target: r.target,
            kind: r.kind,
            topics: r.topics,
            polarity: r.polarity as i8,
            timestamp: r.timestamp,
        });
    }
    EngagementEventSet::new(events)
}
