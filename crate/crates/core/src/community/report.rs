use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{build_engagement_graph, detect_communities, filter_by_topic_sentiment, CommunityError};
use crate::io::EngagementEventSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicStats {
    /// Communities with at least two accounts.
    pub community_count: usize,
    /// Accounts in the topic/polarity-filtered graph.
    pub accounts_involved: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TopicReport {
    pub topics: BTreeMap<String, TopicStats>,
}

pub fn topic_report(
    events: &EngagementEventSet,
    topics: &[String],
    polarity: Option<i8>,
) -> TopicReport {
    let graph = build_engagement_graph(events);
    let topics = topics
        .iter()
        .map(|topic| {
            let filtered = filter_by_topic_sentiment(&graph, topic, polarity);
            let stats = match detect_communities(&filtered) {
                Ok(p) => TopicStats {
                    community_count: p.community_sizes.iter().filter(|&&s| s >= 2).count(),
                    accounts_involved: filtered.accounts.len(),
                },
                Err(CommunityError::EmptyGraph) => TopicStats { community_count: 0, accounts_involved: 0 },
                Err(e) => unreachable!("{e}"),
            };
            (topic.clone(), stats)
        })
        .collect();
    TopicReport { topics }
}

/// Topics by community count, then accounts involved (both descending), then name.
pub fn rank_figures(report: &TopicReport) -> Result<Vec<(String, usize)>, CommunityError> {
    if report.topics.is_empty() {
        return Err(CommunityError::EmptyReport);
    }
    let mut ranked: Vec<(&String, &TopicStats)> = report.topics.iter().collect();
    ranked.sort_by(|(na, a), (nb, b)| {
        b.community_count
            .cmp(&a.community_count)
            .then(b.accounts_involved.cmp(&a.accounts_involved))
            .then(na.cmp(nb))
    });
    Ok(ranked.into_iter().map(|(t, s)| (t.clone(), s.community_count)).collect())
}
