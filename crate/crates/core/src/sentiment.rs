//! Signed actor graphs from actor/topic stances.
//!
//! Each actor is a row vector of stances over the topic universe. Two actors
//! are related by the cosine of their rows, and the relation's sign (with a
//! small dead zone around zero) labels the edge positive, neutral or negative.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::SentimentRecordSet;
use crate::sign_with_epsilon;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SentimentError {
    #[error("no sentiment records")]
    Empty,
    #[error("unknown actor `{0}`")]
    UnknownActor(String),
    #[error("an actor is not related to itself (`{0}`)")]
    SameActor(String),
    #[error("need at least 2 actors, got {0}")]
    TooFewActors(usize),
}

/// Actor x topic stance table; actors and topics sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentMatrix {
    pub actors: Vec<String>,
    pub topics: Vec<String>,
    /// Row-major, `actors.len()` rows of `topics.len()` stances.
    pub values: Vec<f64>,
}

impl SentimentMatrix {
    pub fn row(&self, actor: usize) -> &[f64] {
        let k = self.topics.len();
        &self.values[actor * k..(actor + 1) * k]
    }

    pub fn get(&self, actor: usize, topic: usize) -> f64 {
        self.row(actor)[topic]
    }

    pub fn actor_index(&self, actor: &str) -> Option<usize> {
        self.actors.binary_search_by(|a| a.as_str().cmp(actor)).ok()
    }
}

/// One unordered actor pair; `a < b` as indices into `SignedGraph::actors`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedEdge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedGraph {
    pub actors: Vec<String>,
    /// Every unordered pair, sorted by (a, b).
    pub edges: Vec<SignedEdge>,
}

impl SignedGraph {
    pub fn edge(&self, a: &str, b: &str) -> Option<&SignedEdge> {
        let i = self.actors.iter().position(|x| x == a)?;
        let j = self.actors.iter().position(|x| x == b)?;
        let (i, j) = (i.min(j), i.max(j));
        self.edges.iter().find(|e| e.a == i && e.b == j)
    }
}

pub fn build_matrix(records: &SentimentRecordSet) -> Result<SentimentMatrix, SentimentError> {
    if records.is_empty() {
        return Err(SentimentError::Empty);
    }
    let actors: Vec<String> =
        records.records().iter().map(|r| r.actor.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let topics: Vec<String> =
        records.records().iter().map(|r| r.topic.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let mut values = vec![0.0; actors.len() * topics.len()];
    for r in records.records() {
        let i = actors.binary_search(&r.actor).expect("actor collected above");
        let k = topics.binary_search(&r.topic).expect("topic collected above");
        values[i * topics.len() + k] += r.polarity;
    }
    Ok(SentimentMatrix { actors, topics, values })
}

/// Cosine of two stance rows; 0 when either row is all zeros.
pub fn cosine_rows(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    (dot / (nu * nv)).clamp(-1.0, 1.0)
}

pub fn cosine_weight(v: &SentimentMatrix, i: &str, j: &str) -> Result<f64, SentimentError> {
    let a = v.actor_index(i).ok_or_else(|| SentimentError::UnknownActor(i.to_string()))?;
    let b = v.actor_index(j).ok_or_else(|| SentimentError::UnknownActor(j.to_string()))?;
    if a == b {
        return Err(SentimentError::SameActor(i.to_string()));
    }
    Ok(cosine_rows(v.row(a), v.row(b)))
}

/// +1 above 1e-9, -1 below -1e-9, 0 in between.
pub fn sentiment_sign(w: f64) -> i8 {
    sign_with_epsilon(w)
}

pub fn sentiment_graph(v: &SentimentMatrix) -> Result<SignedGraph, SentimentError> {
    let m = v.actors.len();
    if m < 2 {
        return Err(SentimentError::TooFewActors(m));
    }
    let edges: Vec<SignedEdge> = (0..m)
        .into_par_iter()
        .flat_map_iter(|a| {
            (a + 1..m).map(move |b| {
                let weight = cosine_rows(v.row(a), v.row(b));
                SignedEdge { a, b, weight, sign: sentiment_sign(weight) }
            })
        })
        .collect();
    Ok(SignedGraph { actors: v.actors.clone(), edges })
}
