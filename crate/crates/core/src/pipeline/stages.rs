use serde::Serialize;
use serde_json::{json, Value};

use super::{Artifacts, AtStage, Diagnostics, Pipeline, PipelineConfig, PipelineError, SeriesMode};
use crate::cartogram::{make_cartogram, GridSpec};
use crate::community::{
    build_engagement_graph, detect_communities, filter_by_topic_sentiment, partition_dot, rank_figures,
    topic_report,
};
use crate::io::{
    emit_regions, emit_series, emit_svg, emit_tree, parse_engagement_events, parse_regions, parse_sentiment_records,
    parse_series, SeriesEnsemble, TreeFormat,
};
use crate::sentiment::{build_matrix, sentiment_graph};
use crate::taxonomy::{
    correlation, default_k, log_returns, minimum_spanning_tree, subdominant_ultrametric, tail_exponent,
    ultrametric_distance, LabelledMatrix, TaxonomyError,
};

fn diag(value: Value) -> Diagnostics {
    match value {
        Value::Object(map) => map,
        _ => unreachable!("diagnostics are built from object literals"),
    }
}

/// Region map to cartogram: `cartogram.geojson`, `cartogram.svg`,
/// `area_report.json`, and `features.csv` with one column per region.
pub struct CartogramPipeline;

impl Pipeline for CartogramPipeline {
    fn name(&self) -> &'static str {
        "cartogram"
    }

    fn description(&self) -> &'static str {
        "resize regions in proportion to their statistic"
    }

    fn execute(&self, config: &PipelineConfig, input: &[u8], out: &mut Artifacts) -> Result<Diagnostics, PipelineError> {
        let regions = parse_regions(input).at("parse")?;
        let spec = GridSpec::fit(regions.bbox(), config.grid, config.pad).at("grid")?;
        let carto = make_cartogram(&regions, spec, config.tolerance).at("cartogram")?;

        let domain_area = spec.bbox.area();
        let total_area = carto.field.total_area();
        let conservation = (total_area - domain_area).abs() / domain_area;
        out.add("cartogram.geojson", emit_regions(&carto.regions));
        out.add("cartogram.svg", emit_svg(&carto.regions).at("emit")?);
        out.add_json(
            "area_report.json",
            &json!({
                "max_err": carto.report.max_err,
                "mean_err": carto.report.mean_err,
                "per_region": carto.report.per_region,
                "steps": carto.field.steps,
                "residual": carto.field.residual,
                "domain_area": domain_area,
                "transformed_area": total_area,
            }),
        );

        // rows: statistic, original area, cartogram area, statistic share, area share
        let total_stat = regions.total_statistic();
        let new_total: f64 = carto.regions.regions().iter().map(|r| r.area()).sum();
        let labels = regions.regions().iter().map(|r| r.id.clone()).collect();
        let columns = regions
            .regions()
            .iter()
            .zip(carto.regions.regions())
            .map(|(before, after)| {
                vec![before.statistic, before.area(), after.area(), before.statistic / total_stat, after.area() / new_total]
            })
            .collect();
        let features = SeriesEnsemble::new(labels, columns).at("emit")?;
        out.add("features.csv", emit_series(&features));

        Ok(diag(json!({
            "regions": regions.len(),
            "grid": [spec.nx, spec.ny],
            "steps": carto.field.steps,
            "residual": carto.field.residual,
            "max_area_error": carto.report.max_err,
            "mean_area_error": carto.report.mean_err,
            "area_conservation_error": conservation,
            "folded_cells": carto.field.fold_count(),
        })))
    }
}

#[derive(Serialize)]
struct MatrixDoc<'a> {
    labels: &'a [String],
    correlation: Vec<&'a [f64]>,
    distance: Vec<&'a [f64]>,
    ultrametric: Vec<&'a [f64]>,
}

fn rows(m: &LabelledMatrix) -> Vec<&[f64]> {
    m.rows().collect()
}

/// Series table to taxonomy: `tree.nwk`, `tree.dot`, `tree.svg`,
/// `correlation.json`, and `tail.json` when a tail fit is possible.
pub struct TaxonomyPipeline;

impl Pipeline for TaxonomyPipeline {
    fn name(&self) -> &'static str {
        "taxonomy"
    }

    fn description(&self) -> &'static str {
        "correlation distances, minimum spanning tree and ultrametric"
    }

    fn execute(&self, config: &PipelineConfig, input: &[u8], out: &mut Artifacts) -> Result<Diagnostics, PipelineError> {
        let table = parse_series(input).at("parse")?;
        let ensemble = match config.series {
            SeriesMode::Raw => table,
            SeriesMode::Prices => {
                let returns = table
                    .samples()
                    .iter()
                    .map(|s| log_returns(s))
                    .collect::<Result<Vec<_>, TaxonomyError>>()
                    .at("returns")?;
                SeriesEnsemble::new(table.labels().to_vec(), returns).at("returns")?
            }
        };
        let corr = correlation(&ensemble).at("correlation")?;
        let dist = ultrametric_distance(&corr);
        let tree = minimum_spanning_tree(&dist);
        let ultra = subdominant_ultrametric(&tree);

        out.add("tree.nwk", emit_tree(&tree, TreeFormat::Newick).at("emit")?);
        out.add("tree.dot", emit_tree(&tree, TreeFormat::Dot).at("emit")?);
        out.add("tree.svg", emit_svg(&tree).at("emit")?);
        out.add_json(
            "correlation.json",
            &MatrixDoc { labels: &corr.labels, correlation: rows(&corr), distance: rows(&dist), ultrametric: rows(&ultra) },
        );

        // pooled magnitudes of every value the correlation saw
        let pooled: Vec<f64> = ensemble.samples().iter().flatten().map(|v| v.abs()).collect();
        let positive = pooled.iter().filter(|&&v| v > 0.0).count();
        let tail = match config.tail_k {
            Some(k) => Some(tail_exponent(&pooled, k).at("tail")?),
            None => tail_exponent(&pooled, default_k(positive).max(1)).ok(),
        };
        let tail_value = match &tail {
            Some(fit) => {
                out.add_json("tail.json", fit);
                serde_json::to_value(fit).expect("tail fit serializes")
            }
            None => Value::Null,
        };

        Ok(diag(json!({
            "series": ensemble.len(),
            "samples": ensemble.sample_len(),
            "tree_weight": tree.total_weight(),
            "tail": tail_value,
        })))
    }
}

#[derive(Serialize)]
struct EdgeDoc<'a> {
    a: &'a str,
    b: &'a str,
    weight: f64,
    sign: i8,
}

/// Stance records to signed actor graph: `signed_graph.json`, `signed_graph.svg`.
pub struct SentimentPipeline;

impl Pipeline for SentimentPipeline {
    fn name(&self) -> &'static str {
        "sentiment"
    }

    fn description(&self) -> &'static str {
        "signed actor graph from actor/topic polarity records"
    }

    fn execute(&self, _: &PipelineConfig, input: &[u8], out: &mut Artifacts) -> Result<Diagnostics, PipelineError> {
        let records = parse_sentiment_records(input).at("parse")?;
        let matrix = build_matrix(&records).at("sentiment")?;
        let graph = sentiment_graph(&matrix).at("sentiment")?;
        let edges: Vec<EdgeDoc> = graph
            .edges
            .iter()
            .map(|e| EdgeDoc { a: &graph.actors[e.a], b: &graph.actors[e.b], weight: e.weight, sign: e.sign })
            .collect();
        out.add_json("signed_graph.json", &edges);
        out.add("signed_graph.svg", emit_svg(&graph).at("emit")?);
        let count = |s: i8| graph.edges.iter().filter(|e| e.sign == s).count();
        Ok(diag(json!({
            "actors": graph.actors.len(),
            "topics": matrix.topics.len(),
            "positive_edges": count(1),
            "negative_edges": count(-1),
            "neutral_edges": count(0),
        })))
    }
}

/// Engagement events to topic communities: `topic_report.json`,
/// `ranking.json`, and `communities.dot` with one graph per topic.
pub struct CommunityPipeline;

impl Pipeline for CommunityPipeline {
    fn name(&self) -> &'static str {
        "community"
    }

    fn description(&self) -> &'static str {
        "engagement communities per topic and topic ranking"
    }

    fn execute(&self, config: &PipelineConfig, input: &[u8], out: &mut Artifacts) -> Result<Diagnostics, PipelineError> {
        let events = parse_engagement_events(input).at("parse")?;
        let topics = config.topics.clone().unwrap_or_else(|| events.topics());
        let polarity = config.polarity.sign();
        let report = topic_report(&events, &topics, polarity);
        let ranking = rank_figures(&report).at("rank")?;

        let graph = build_engagement_graph(&events);
        let mut dot = String::new();
        let mut modularity = serde_json::Map::new();
        for topic in &topics {
            let filtered = filter_by_topic_sentiment(&graph, topic, polarity);
            match detect_communities(&filtered) {
                Ok(p) => {
                    dot.push_str(&partition_dot(topic, &filtered, &p));
                    modularity.insert(topic.clone(), json!(p.modularity));
                }
                Err(_) => {
                    modularity.insert(topic.clone(), Value::Null);
                }
            }
        }
        out.add_json("topic_report.json", &report);
        let ranked: Vec<Value> =
            ranking.iter().map(|(t, c)| json!({ "topic": t, "community_count": c })).collect();
        out.add_json("ranking.json", &ranked);
        out.add("communities.dot", dot.into_bytes());

        Ok(diag(json!({
            "events": events.len(),
            "accounts": graph.accounts.len(),
            "topics": topics.len(),
            "polarity": config.polarity.to_string(),
            "modularity": modularity,
        })))
    }
}
