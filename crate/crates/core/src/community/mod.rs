//! Engagement graphs and topic-level community counts.
//!
//! Reply, quote and retweet events become undirected weighted edges between
//! accounts. Restricting the graph to one topic and one polarity, partitioning
//! it by greedy modularity and counting the multi-member communities gives a
//! per-topic importance score, which [`rank_figures`] orders.

mod louvain;
mod report;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::EngagementEventSet;

pub use louvain::{detect_communities, modularity, CommunityPartition};
pub use report::{rank_figures, topic_report, TopicReport, TopicStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CommunityError {
    #[error("graph has no accounts")]
    EmptyGraph,
    #[error("report has no topics")]
    EmptyReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngagementEdge {
    /// Index of the lexicographically smaller account.
    pub a: usize,
    pub b: usize,
    /// Number of interactions between the two accounts, in either direction.
    pub weight: u64,
    pub topics: BTreeSet<String>,
    pub net_polarity: i64,
}

/// Undirected conversation graph; accounts sorted, edges sorted by (a, b).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngagementGraph {
    pub accounts: Vec<String>,
    pub edges: Vec<EngagementEdge>,
}

impl EngagementGraph {
    pub fn is_empty(&self) -> bool {
        self.accounts.is_empty()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn edge(&self, a: &str, b: &str) -> Option<&EngagementEdge> {
        let i = self.accounts.binary_search_by(|x| x.as_str().cmp(a)).ok()?;
        let j = self.accounts.binary_search_by(|x| x.as_str().cmp(b)).ok()?;
        let (i, j) = (i.min(j), i.max(j));
        self.edges.iter().find(|e| e.a == i && e.b == j)
    }

    /// Rebuilds from edges keyed by account names, dropping unused accounts.
    fn from_named(named: BTreeMap<(String, String), (u64, BTreeSet<String>, i64)>) -> Self {
        let accounts: Vec<String> = named
            .keys()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index = |s: &String| accounts.binary_search(s).expect("account collected above");
        let edges = named
            .iter()
            .map(|((a, b), (weight, topics, net))| EngagementEdge {
                a: index(a),
                b: index(b),
                weight: *weight,
                topics: topics.clone(),
                net_polarity: *net,
            })
            .collect();
        EngagementGraph { accounts, edges }
    }
}

pub fn build_engagement_graph(events: &EngagementEventSet) -> EngagementGraph {
    let mut named: BTreeMap<(String, String), (u64, BTreeSet<String>, i64)> = BTreeMap::new();
    for e in events.events() {
        let key = if e.source <= e.target {
            (e.source.clone(), e.target.clone())
        } else {
            (e.target.clone(), e.source.clone())
        };
        let entry = named.entry(key).or_default();
        entry.0 += 1;
        entry.1.extend(e.topics.iter().cloned());
        entry.2 += i64::from(e.polarity);
    }
    EngagementGraph::from_named(named)
}

/// Keeps edges that mention `topic` and whose net polarity has sign `polarity`;
/// `None` keeps every edge on the topic. Isolated accounts are dropped.
pub fn filter_by_topic_sentiment(
    graph: &EngagementGraph,
    topic: &str,
    polarity: Option<i8>,
) -> EngagementGraph {
    let named = graph
        .edges
        .iter()
        .filter(|e| e.topics.contains(topic))
        .filter(|e| polarity.is_none_or(|p| crate::sign_with_epsilon(e.net_polarity as f64) == p))
        .map(|e| {
            (
                (graph.accounts[e.a].clone(), graph.accounts[e.b].clone()),
                (e.weight, e.topics.clone(), e.net_polarity),
            )
        })
        .collect();
    EngagementGraph::from_named(named)
}

const COMMUNITY_COLORS: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// DOT `graph` block named `name` with nodes filled by community id.
pub fn partition_dot(name: &str, graph: &EngagementGraph, partition: &CommunityPartition) -> String {
    use std::fmt::Write;
    let quote = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
    let mut out = format!("graph {} {{\n  node [style=filled];\n", quote(name));
    for a in &graph.accounts {
        let c = partition.assignment.get(a).copied().unwrap_or(0);
        let _ = writeln!(
            out,
            "  {} [community={c}, fillcolor=\"{}\"];",
            quote(a),
            COMMUNITY_COLORS[c % COMMUNITY_COLORS.len()]
        );
    }
    for e in &graph.edges {
        let _ = writeln!(
            out,
            "  {} -- {} [weight={}];",
            quote(&graph.accounts[e.a]),
            quote(&graph.accounts[e.b]),
            e.weight
        );
    }
    out.push_str("}\n");
    out
}
