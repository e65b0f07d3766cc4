use serde_json::{json, Map, Value};

use super::{ParseError, Polygon, Region, RegionSet};
use crate::geometry::Point;

/// Parses a GeoJSON FeatureCollection of Polygon/MultiPolygon features with
/// `id` (string) and `statistic` (number >= 0) properties.
pub fn parse_regions(bytes: &[u8]) -> Result<RegionSet, ParseError> {
    let doc: Value =
        serde_json::from_slice(bytes).map_err(|e| ParseError::Malformed(e.to_string()))?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(ParseError::Malformed("top-level type must be FeatureCollection".into()));
    }
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| ParseError::Malformed("`features` must be an array".into()))?;

    let mut regions = Vec::with_capacity(features.len());
    for (index, feature) in features.iter().enumerate() {
        regions.push(parse_feature(index, feature)?);
    }
    RegionSet::new(regions)
}

fn parse_feature(index: usize, feature: &Value) -> Result<Region, ParseError> {
    let props = feature.get("properties").and_then(Value::as_object);
    let id = props
        .and_then(|p| p.get("id"))
        .and_then(Value::as_str)
        .ok_or(ParseError::MissingId { index })?
        .to_string();
    let statistic = match props.and_then(|p| p.get("statistic")) {
        None | Some(Value::Null) => return Err(ParseError::MissingStatistic { feature: id }),
        Some(v) => v.as_f64().ok_or_else(|| ParseError::InvalidStatistic {
            feature: id.clone(),
            value: v.to_string(),
        })?,
    };
    if !(statistic.is_finite() && statistic >= 0.0) {
        return Err(ParseError::InvalidStatistic { feature: id, value: statistic.to_string() });
    }

    let geometry = feature
        .get("geometry")
        .ok_or_else(|| ParseError::Malformed(format!("feature {id}: missing geometry")))?;
    let kind = geometry.get("type").and_then(Value::as_str).unwrap_or("");
    let coords = geometry
        .get("coordinates")
        .ok_or_else(|| ParseError::Malformed(format!("feature {id}: missing coordinates")))?;
    let polygons = match kind {
        "Polygon" => vec![parse_polygon(&id, coords)?],
        "MultiPolygon" => as_array(&id, coords)?
            .iter()
            .map(|p| parse_polygon(&id, p))
            .collect::<Result<_, _>>()?,
        other => {
            return Err(ParseError::UnsupportedGeometry { feature: id, kind: other.to_string() })
        }
    };
    if polygons.is_empty() {
        return Err(ParseError::Malformed(format!("feature {id}: empty geometry")));
    }
    Ok(Region { id, polygons, statistic })
}

fn as_array<'a>(id: &str, v: &'a Value) -> Result<&'a Vec<Value>, ParseError> {
    v.as_array()
        .ok_or_else(|| ParseError::Malformed(format!("feature {id}: coordinates must be arrays")))
}

fn parse_polygon(id: &str, v: &Value) -> Result<Polygon, ParseError> {
    let mut rings = as_array(id, v)?
        .iter()
        .map(|r| parse_ring(id, r))
        .collect::<Result<Vec<_>, _>>()?;
    if rings.is_empty() {
        return Err(ParseError::Malformed(format!("feature {id}: polygon without rings")));
    }
    let exterior = rings.remove(0);
    Ok(Polygon { exterior, holes: rings })
}

fn parse_ring(id: &str, v: &Value) -> Result<Vec<Point>, ParseError> {
    as_array(id, v)?
        .iter()
        .map(|pos| {
            let xy = as_array(id, pos)?;
            match (xy.first().and_then(Value::as_f64), xy.get(1).and_then(Value::as_f64)) {
                (Some(x), Some(y)) => Ok(Point::new(x, y)),
                _ => Err(ParseError::Malformed(format!("feature {id}: bad position {pos}"))),
            }
        })
        .collect()
}

/// Writes regions back out in the same GeoJSON subset `parse_regions` reads.
pub fn emit_regions(regions: &RegionSet) -> Vec<u8> {
    let features: Vec<Value> = regions
        .regions()
        .iter()
        .map(|r| {
            let polys: Vec<Value> = r
                .polygons
                .iter()
                .map(|p| Value::Array(p.rings().map(ring_json).collect()))
                .collect();
            let geometry = if polys.len() == 1 {
                json!({ "type": "Polygon", "coordinates": polys[0] })
            } else {
                json!({ "type": "MultiPolygon", "coordinates": polys })
            };
            let mut props = Map::new();
            props.insert("id".into(), Value::String(r.id.clone()));
            props.insert("statistic".into(), json!(r.statistic));
            json!({ "type": "Feature", "properties": props, "geometry": geometry })
        })
        .collect();
    let doc = json!({ "type": "FeatureCollection", "features": features });
    let mut out = serde_json::to_vec(&doc).expect("geojson serializes");
    out.push(b'\n');
    out
}

fn ring_json(ring: &[Point]) -> Value {
    Value::Array(ring.iter().map(|p| json!([p.x, p.y])).collect())
}
